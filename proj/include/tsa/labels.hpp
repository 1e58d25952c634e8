#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>

#include "tsa/errors.hpp"
#include "tsa/utf8.hpp"

namespace tsa {

// Stable integer encoding: positive=0, negative=1, neutral=2.
enum class SentimentLabel : int { positive = 0, negative = 1, neutral = 2 };

constexpr std::size_t kNumClasses = 3;

inline const char* label_name(SentimentLabel l) {
    switch (l) {
        case SentimentLabel::positive: return "positive";
        case SentimentLabel::negative: return "negative";
        case SentimentLabel::neutral: return "neutral";
    }
    return "?";
}

inline std::optional<SentimentLabel> parse_label(const std::string& s) {
    if (s == "positive") return SentimentLabel::positive;
    if (s == "negative") return SentimentLabel::negative;
    if (s == "neutral") return SentimentLabel::neutral;
    return std::nullopt;
}

inline int label_index(SentimentLabel l) { return static_cast<int>(l); }

inline SentimentLabel label_from_index(std::size_t i) {
    if (i >= kNumClasses) throw InvalidClass("class index " + std::to_string(i));
    return static_cast<SentimentLabel>(static_cast<int>(i));
}

// Which of the two annotations a consumer reads.
enum class LabelKind { sentence, targeted };

// One text with its single target span and both sentiment labels.
// Offsets are code point indices into `text`, end exclusive.
struct LabeledRecord {
    std::string id;
    std::string text;
    std::string target;
    std::size_t target_start = 0;
    std::size_t target_end = 0;
    SentimentLabel sentence_sentiment = SentimentLabel::neutral;
    SentimentLabel targeted_sentiment = SentimentLabel::neutral;

    SentimentLabel label(LabelKind kind) const {
        return kind == LabelKind::sentence ? sentence_sentiment : targeted_sentiment;
    }
};

// Checks the record invariants; returns the violated field name, or empty.
inline std::string check_record(const LabeledRecord& r) {
    const std::u32string text = decode_utf8(r.text);
    if (r.target_start >= r.target_end) return "target_start";
    if (r.target_end > text.size()) return "target_end";
    const std::u32string target = decode_utf8(r.target);
    if (text.substr(r.target_start, r.target_end - r.target_start) != target) return "target";
    return {};
}

}  // namespace tsa
