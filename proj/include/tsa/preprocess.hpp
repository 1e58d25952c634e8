#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tsa/errors.hpp"
#include "tsa/labels.hpp"
#include "tsa/utf8.hpp"

namespace tsa {

// Maps each code point index of the cleaned text back to the raw text
// index it came from. Total over the clean length, monotonically
// non-decreasing. Inserted joining spaces map to the whitespace run that
// separated the surrounding tokens in the raw text.
class OffsetMap {
public:
    OffsetMap() = default;
    explicit OffsetMap(std::vector<std::size_t> to_raw) : to_raw_(std::move(to_raw)) {
        for (std::size_t i = 1; i < to_raw_.size(); ++i) {
            if (to_raw_[i] < to_raw_[i - 1]) throw Error("offset map not monotone");
        }
    }

    std::size_t operator()(std::size_t clean_index) const {
        if (clean_index >= to_raw_.size())
            throw RangeOutOfBounds("clean index " + std::to_string(clean_index));
        return to_raw_[clean_index];
    }

    std::size_t size() const { return to_raw_.size(); }

private:
    std::vector<std::size_t> to_raw_;
};

struct Preprocessed {
    std::string clean;
    OffsetMap map;
};

namespace detail {

inline bool is_space(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v';
}

inline bool starts_with(const std::u32string& s, const char32_t* prefix) {
    std::size_t i = 0;
    while (prefix[i] != 0) {
        if (i >= s.size() || s[i] != prefix[i]) return false;
        ++i;
    }
    return true;
}

inline bool is_url_token(const std::u32string& t) {
    return starts_with(t, U"http://") || starts_with(t, U"https://") || starts_with(t, U"www.");
}

}  // namespace detail

// Tweet cleanup: URL tokens and @-mentions are dropped, '#' characters are
// stripped (the hashtag word itself is kept), whitespace runs collapse to a
// single space, leading/trailing whitespace is trimmed. '#' stripping runs
// first so that e.g. "#www.x" is recognized as a URL and removed, which also
// makes the whole function idempotent. Returns the cleaned text together
// with the offset map over it.
inline Preprocessed preprocess(const std::string& raw) {
    const std::u32string cps = decode_utf8(raw);
    std::u32string clean;
    std::vector<std::size_t> to_raw;
    clean.reserve(cps.size());
    to_raw.reserve(cps.size());

    std::size_t i = 0;
    const std::size_t n = cps.size();
    while (i < n) {
        if (detail::is_space(cps[i])) {
            ++i;
            continue;
        }
        // one whitespace-delimited token, starting at i
        std::size_t end = i;
        while (end < n && !detail::is_space(cps[end])) ++end;

        std::u32string token;
        std::vector<std::size_t> token_raw;
        for (std::size_t k = i; k < end; ++k) {
            if (cps[k] == U'#') continue;
            token.push_back(cps[k]);
            token_raw.push_back(k);
        }

        const bool drop = token.empty() || detail::is_url_token(token) || token[0] == U'@';
        if (!drop) {
            if (!clean.empty()) {
                // the joining space maps to the first whitespace char after
                // the previously emitted token
                std::size_t gap = to_raw.back() + 1;
                while (gap < n && !detail::is_space(cps[gap])) ++gap;
                clean.push_back(U' ');
                to_raw.push_back(gap < n ? gap : n - 1);
            }
            clean.append(token);
            to_raw.insert(to_raw.end(), token_raw.begin(), token_raw.end());
        }
        i = end;
    }

    return Preprocessed{encode_utf8(clean), OffsetMap(std::move(to_raw))};
}

// Locates the record's target inside the cleaned text. The result is a
// (start, end) code point span such that clean[start..end) equals the
// preprocessed target. Throws SpanLost when preprocessing destroyed the
// target (e.g. the target was a URL).
inline std::pair<std::size_t, std::size_t> remap_span(const LabeledRecord& record,
                                                      const std::string& clean,
                                                      const OffsetMap& map) {
    const std::u32string clean_cps = decode_utf8(clean);
    if (clean_cps.size() != map.size()) throw Error("offset map does not cover clean text");

    std::size_t lo = clean_cps.size();
    std::size_t hi = 0;
    bool found = false;
    for (std::size_t ci = 0; ci < clean_cps.size(); ++ci) {
        if (clean_cps[ci] == U' ') continue;  // inserted spaces may map anywhere
        const std::size_t ri = map(ci);
        if (ri >= record.target_start && ri < record.target_end) {
            lo = std::min(lo, ci);
            hi = std::max(hi, ci);
            found = true;
        }
    }
    if (!found)
        throw SpanLost("record '" + record.id + "': no cleaned character originates from " +
                       "raw span [" + std::to_string(record.target_start) + ", " +
                       std::to_string(record.target_end) + ")");

    const std::string expected = preprocess(record.target).clean;
    const std::string got = encode_utf8(clean_cps.substr(lo, hi + 1 - lo));
    if (got != expected)
        throw SpanLost("record '" + record.id + "': cleaned span '" + got +
                       "' does not match preprocessed target '" + expected + "'");
    return {lo, hi + 1};
}

}  // namespace tsa
