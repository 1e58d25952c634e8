#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsa/errors.hpp"
#include "tsa/utf8.hpp"

namespace tsa {

using TokenId = std::uint32_t;

constexpr TokenId kPadId = 0;
constexpr TokenId kUnkId = 1;
constexpr TokenId kClsId = 2;
constexpr TokenId kSepId = 3;
constexpr TokenId kTarId = 4;

inline const std::vector<std::string>& reserved_tokens() {
    static const std::vector<std::string> kReserved{"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[TAR]"};
    return kReserved;
}

// Subword vocabulary. Token ids are dense, reserved tokens sit at fixed
// ids 0-4, continuation pieces carry the "##" prefix.
class Vocabulary {
public:
    Vocabulary() {
        for (const auto& t : reserved_tokens()) add(t);
    }

    TokenId add(const std::string& token) {
        const auto it = to_id_.find(token);
        if (it != to_id_.end()) return it->second;
        const auto id = static_cast<TokenId>(tokens_.size());
        tokens_.push_back(token);
        to_id_.emplace(token, id);
        return id;
    }

    bool contains(const std::string& token) const { return to_id_.count(token) > 0; }

    TokenId id(const std::string& token) const {
        const auto it = to_id_.find(token);
        return it == to_id_.end() ? kUnkId : it->second;
    }

    const std::string& token(TokenId id) const {
        if (id >= tokens_.size()) throw IdOutOfRange(std::to_string(id));
        return tokens_[id];
    }

    std::size_t size() const { return tokens_.size(); }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId> to_id_;
};

namespace detail {

inline std::vector<std::u32string> whitespace_words(const std::string& text) {
    std::vector<std::u32string> words;
    const std::u32string cps = decode_utf8(text);
    std::u32string cur;
    for (char32_t c : cps) {
        if (c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v') {
            if (!cur.empty()) words.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

}  // namespace detail

// Builds a vocabulary from a corpus: the five reserved tokens, every single
// character seen, then whole words and "##" suffix pieces by descending
// frequency until `size` entries exist. Candidate order is fixed by the
// corpus order, so the result is deterministic.
inline Vocabulary build_vocab(const std::vector<std::string>& corpus, std::size_t size) {
    // frequency and first-appearance rank per candidate
    std::unordered_map<std::string, std::size_t> freq;
    std::unordered_map<std::string, std::size_t> first_seen;
    std::vector<std::string> char_order;          // distinct single chars, in appearance order
    std::unordered_map<std::string, bool> seen_char;
    std::size_t appearance = 0;

    const auto note = [&](const std::string& cand) {
        auto [it, inserted] = first_seen.emplace(cand, appearance);
        if (inserted) ++appearance;
        ++freq[cand];
    };

    for (const auto& text : corpus) {
        for (const auto& word : detail::whitespace_words(text)) {
            for (char32_t c : word) {
                std::string ch;
                append_utf8(ch, c);
                if (!seen_char[ch]) {
                    seen_char[ch] = true;
                    char_order.push_back(ch);
                }
            }
            note(encode_utf8(word));
            for (std::size_t i = 1; i < word.size(); ++i)
                note("##" + encode_utf8(word.substr(i)));
        }
    }

    if (size < reserved_tokens().size() + char_order.size())
        throw SizeTooSmall("need at least " +
                           std::to_string(reserved_tokens().size() + char_order.size()) +
                           " entries (reserved + alphabet), got " + std::to_string(size));

    Vocabulary vocab;
    for (const auto& ch : char_order) vocab.add(ch);

    std::vector<std::string> candidates;
    candidates.reserve(freq.size());
    for (const auto& [cand, f] : freq)
        if (!vocab.contains(cand)) candidates.push_back(cand);
    std::sort(candidates.begin(), candidates.end(), [&](const std::string& a, const std::string& b) {
        if (freq[a] != freq[b]) return freq[a] > freq[b];
        return first_seen[a] < first_seen[b];
    });
    for (const auto& cand : candidates) {
        if (vocab.size() >= size) break;
        vocab.add(cand);
    }
    return vocab;
}

// Vocabulary file: one token per line, line number = id, lines 0-4 are the
// reserved tokens in order.
inline void save_vocab(const std::string& path, const Vocabulary& vocab) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (TokenId i = 0; i < vocab.size(); ++i) out << vocab.token(i) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline Vocabulary load_vocab(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    Vocabulary vocab;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        if (lineno < reserved_tokens().size()) {
            if (line != reserved_tokens()[lineno])
                throw ParseError(lineno + 1, "line " + std::to_string(lineno) + " must be '" +
                                                 reserved_tokens()[lineno] + "', got '" + line + "'");
        } else {
            if (line.empty()) throw ParseError(lineno + 1, "empty token");
            if (vocab.contains(line)) throw ParseError(lineno + 1, "duplicate token '" + line + "'");
            vocab.add(line);
        }
        ++lineno;
    }
    if (lineno < reserved_tokens().size())
        throw ParseError(lineno, "vocabulary file is missing reserved tokens");
    return vocab;
}

}  // namespace tsa
