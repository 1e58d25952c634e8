#pragma once

#include <string>
#include <vector>

#include "tsa/utf8.hpp"
#include "tsa/vocab.hpp"

namespace tsa {

// Greedy longest-match WordPiece. Each whitespace word is consumed by
// repeatedly taking the longest vocabulary prefix; pieces after the first
// carry the "##" continuation prefix. A word with no matching prefix at
// any step becomes a single [UNK].
inline std::vector<std::string> tokenize(const std::string& text, const Vocabulary& vocab) {
    std::vector<std::string> out;
    for (const auto& word : detail::whitespace_words(text)) {
        std::vector<std::string> pieces;
        std::size_t start = 0;
        bool bad = false;
        while (start < word.size()) {
            std::size_t end = word.size();
            std::string match;
            while (end > start) {
                std::string piece = encode_utf8(word.substr(start, end - start));
                if (start > 0) piece = "##" + piece;
                if (vocab.contains(piece)) {
                    match = std::move(piece);
                    break;
                }
                --end;
            }
            if (match.empty()) {
                bad = true;
                break;
            }
            pieces.push_back(std::move(match));
            start = end;
        }
        if (bad) {
            out.push_back(reserved_tokens()[kUnkId]);
        } else {
            out.insert(out.end(), pieces.begin(), pieces.end());
        }
    }
    return out;
}

inline std::vector<TokenId> token_ids(const std::vector<std::string>& tokens,
                                      const Vocabulary& vocab) {
    std::vector<TokenId> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(vocab.id(t));
    return ids;
}

// Joins subword pieces back into words: "##" pieces glue onto the previous
// piece, others start a new whitespace-separated word.
inline std::string detokenize(const std::vector<std::string>& pieces) {
    std::string out;
    for (const auto& p : pieces) {
        if (p.rfind("##", 0) == 0) {
            out += p.substr(2);
        } else {
            if (!out.empty()) out += ' ';
            out += p;
        }
    }
    return out;
}

}  // namespace tsa
