#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsa/errors.hpp"
#include "tsa/labels.hpp"
#include "tsa/utf8.hpp"
#include "tsa/wordpiece.hpp"

namespace tsa {

// Fixed-length encoding of one record. `target_range` is an inclusive
// token span: for a marked example it runs from the opening [TAR] to the
// closing [TAR]; otherwise it brackets exactly the target's subwords.
struct EncodedExample {
    std::vector<TokenId> ids;        // length max_len
    std::vector<std::uint8_t> mask;  // 1 on real tokens, 0 on padding
    std::size_t target_first = 0;
    std::size_t target_last = 0;
    std::size_t first_marker_pos = 0;  // meaningful only when marked
    bool marked = false;
    SentimentLabel label = SentimentLabel::neutral;
};

// Encodes cleaned text with a known target span. The text is tokenized in
// three segments (left context, target, right context) so neighboring words
// can never merge into a target subword and markers can never be split.
// When the sequence exceeds max_len, context tokens are dropped from the
// far ends, keeping a window centered on the target; target tokens are
// never truncated.
inline EncodedExample encode(const LabeledRecord& record,
                             std::pair<std::size_t, std::size_t> span, const Vocabulary& vocab,
                             std::size_t max_len, bool marked,
                             LabelKind label_kind = LabelKind::targeted) {
    const std::u32string text = decode_utf8(record.text);
    if (span.first >= span.second || span.second > text.size())
        throw RangeOutOfBounds("target span [" + std::to_string(span.first) + ", " +
                               std::to_string(span.second) + ") in text of length " +
                               std::to_string(text.size()));

    const std::string left = encode_utf8(text.substr(0, span.first));
    const std::string target = encode_utf8(text.substr(span.first, span.second - span.first));
    const std::string right = encode_utf8(text.substr(span.second));

    const auto left_tok = tokenize(left, vocab);
    const auto target_tok = tokenize(target, vocab);
    const auto right_tok = tokenize(right, vocab);
    if (target_tok.empty()) throw SpanLost("record '" + record.id + "': target tokenized to nothing");

    const std::size_t marker_count = marked ? 2 : 0;
    if (4 + marker_count + target_tok.size() > max_len)
        throw TargetTooLong("record '" + record.id + "': " + std::to_string(target_tok.size()) +
                            " target subwords plus specials exceed max_len " +
                            std::to_string(max_len));

    // room for context after [CLS], [SEP], markers and the target itself
    const std::size_t budget = max_len - 2 - marker_count - target_tok.size();
    std::size_t keep_left = std::min(left_tok.size(), budget / 2);
    std::size_t keep_right = std::min(right_tok.size(), budget - keep_left);
    keep_left = std::min(left_tok.size(), budget - keep_right);

    EncodedExample ex;
    ex.marked = marked;
    ex.label = record.label(label_kind);
    ex.ids.reserve(max_len);
    ex.ids.push_back(kClsId);
    for (std::size_t i = left_tok.size() - keep_left; i < left_tok.size(); ++i)
        ex.ids.push_back(vocab.id(left_tok[i]));
    ex.target_first = ex.ids.size();
    if (marked) {
        ex.first_marker_pos = ex.ids.size();
        ex.ids.push_back(kTarId);
    }
    for (const auto& t : target_tok) ex.ids.push_back(vocab.id(t));
    if (marked) ex.ids.push_back(kTarId);
    ex.target_last = ex.ids.size() - 1;
    for (std::size_t i = 0; i < keep_right; ++i) ex.ids.push_back(vocab.id(right_tok[i]));
    ex.ids.push_back(kSepId);

    ex.mask.assign(ex.ids.size(), 1);
    ex.ids.resize(max_len, kPadId);
    ex.mask.resize(max_len, 0);
    return ex;
}

// Number of non-pad positions ([CLS] through [SEP] inclusive).
inline std::size_t real_length(const EncodedExample& ex) {
    std::size_t n = 0;
    for (auto m : ex.mask) n += m;
    return n;
}

}  // namespace tsa
