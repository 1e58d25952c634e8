#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tsa/errors.hpp"
#include "tsa/labels.hpp"
#include "tsa/rng.hpp"

// Synthetic corpus with a controllable gap between sentence and targeted
// sentiment. Every sentence carries one target word, one local cue directly
// next to it that fixes the targeted label, and one global cue elsewhere
// that fixes the sentence label. The three word groups and the fillers are
// disjoint, so a rule that reads the cues recovers both labels perfectly:
// models can only separate the labels by attending to the right position.

namespace tsa {

struct SyntheticConfig {
    std::size_t n_examples = 3000;
    double divergence_rate = 0.3;
    // Budget for downstream vocabulary building. Generous enough that every
    // generator word survives as a whole token; tighter budgets shatter the
    // rarer cue words into pieces and cripple what a unigram reader can see.
    std::size_t vocab_size = 320;
    std::size_t min_words = 5;
    std::size_t max_words = 11;
    std::uint64_t seed = 0;

    void validate() const {
        if (n_examples == 0) throw ConfigError("n_examples must be positive");
        if (divergence_rate < 0.0 || divergence_rate > 1.0)
            throw ConfigError("divergence_rate must be in [0, 1]");
        if (min_words < 4) throw ConfigError("min_words must be at least 4");
        if (max_words < min_words) throw ConfigError("max_words must be >= min_words");
        if (vocab_size < 40) throw ConfigError("vocab_size must be at least 40");
    }
};

namespace synth {

inline const std::vector<std::string>& targets() {
    static const std::vector<std::string> v{"widget", "gadget", "camera",
                                            "battery", "service", "update"};
    return v;
}

// local_cues()[class] fix the targeted label, global_cues()[class] the
// sentence label
inline const std::array<std::vector<std::string>, kNumClasses>& local_cues() {
    static const std::array<std::vector<std::string>, kNumClasses> v{
        std::vector<std::string>{"superb", "lovely", "shines"},
        std::vector<std::string>{"broken", "awful", "failing"},
        std::vector<std::string>{"plain", "average", "typical"}};
    return v;
}

inline const std::array<std::vector<std::string>, kNumClasses>& global_cues() {
    static const std::array<std::vector<std::string>, kNumClasses> v{
        std::vector<std::string>{"sunshine", "winning", "cheerful"},
        std::vector<std::string>{"gloomy", "dreadful", "losing"},
        std::vector<std::string>{"ordinary", "routine", "weekday"}};
    return v;
}

inline const std::vector<std::string>& fillers() {
    static const std::vector<std::string> v{"the",  "a",    "on",   "today", "really",
                                            "just", "then", "with", "about", "some",
                                            "very", "so",   "it",   "and",   "still"};
    return v;
}

inline const std::string& pick(const std::vector<std::string>& pool, Rng& rng) {
    return pool[static_cast<std::size_t>(uniform_below(rng, pool.size()))];
}

}  // namespace synth

// Reads the cues back out of a generated sentence. Returns true and fills
// both labels when the sentence has the generated structure.
inline bool synthetic_oracle(const std::string& text, SentimentLabel& targeted,
                             SentimentLabel& sentence) {
    std::vector<std::string> words;
    std::string cur;
    for (char ch : text) {
        if (ch == ' ') {
            if (!cur.empty()) words.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) words.push_back(cur);

    const auto find_class = [](const std::array<std::vector<std::string>, kNumClasses>& groups,
                               const std::string& w, std::size_t& cls) {
        for (std::size_t c = 0; c < kNumClasses; ++c)
            for (const auto& cue : groups[c])
                if (cue == w) {
                    cls = c;
                    return true;
                }
        return false;
    };

    bool have_target = false, have_local = false, have_global = false;
    std::size_t target_pos = 0, local_cls = 0, global_cls = 0;
    for (std::size_t i = 0; i < words.size(); ++i)
        for (const auto& t : synth::targets())
            if (words[i] == t) {
                have_target = true;
                target_pos = i;
            }
    if (!have_target) return false;
    for (std::size_t i = 0; i < words.size(); ++i) {
        std::size_t cls = 0;
        if (find_class(synth::local_cues(), words[i], cls)) {
            if (i + 1 == target_pos || i == target_pos + 1) {
                have_local = true;
                local_cls = cls;
            }
        } else if (find_class(synth::global_cues(), words[i], cls)) {
            have_global = true;
            global_cls = cls;
        }
    }
    if (!have_local || !have_global) return false;
    targeted = label_from_index(local_cls);
    sentence = label_from_index(global_cls);
    return true;
}

// Deterministic given cfg.seed. Offsets are code points; all words are
// ASCII here so they coincide with byte offsets.
inline std::vector<LabeledRecord> generate_synthetic(const SyntheticConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    std::vector<LabeledRecord> out;
    out.reserve(cfg.n_examples);

    for (std::size_t idx = 0; idx < cfg.n_examples; ++idx) {
        const std::size_t len =
            cfg.min_words + static_cast<std::size_t>(
                                uniform_below(rng, cfg.max_words - cfg.min_words + 1));

        const std::size_t target_pos = static_cast<std::size_t>(uniform_below(rng, len));
        // local cue next to the target, side chosen at random within bounds
        std::size_t cue_pos;
        if (target_pos == 0) cue_pos = 1;
        else if (target_pos == len - 1) cue_pos = target_pos - 1;
        else cue_pos = uniform_below(rng, 2) == 0 ? target_pos - 1 : target_pos + 1;

        // global cue at distance >= 2 from the target so only the sentence
        // label correlates with it
        std::vector<std::size_t> slots;
        for (std::size_t p = 0; p < len; ++p) {
            const std::size_t dist = p > target_pos ? p - target_pos : target_pos - p;
            if (dist >= 2 && p != cue_pos) slots.push_back(p);
        }
        if (slots.empty()) {  // cannot happen for len >= 4, kept as a guard
            --idx;
            continue;
        }
        const std::size_t global_pos =
            slots[static_cast<std::size_t>(uniform_below(rng, slots.size()))];

        const std::size_t targeted_cls = static_cast<std::size_t>(uniform_below(rng, kNumClasses));
        std::size_t sentence_cls = targeted_cls;
        if (uniform_real(rng) < cfg.divergence_rate) {
            const std::size_t other = static_cast<std::size_t>(uniform_below(rng, kNumClasses - 1));
            sentence_cls = other < targeted_cls ? other : other + 1;
        }

        std::vector<std::string> words(len);
        words[target_pos] = synth::pick(synth::targets(), rng);
        words[cue_pos] = synth::pick(synth::local_cues()[targeted_cls], rng);
        words[global_pos] = synth::pick(synth::global_cues()[sentence_cls], rng);
        for (std::size_t p = 0; p < len; ++p)
            if (words[p].empty()) words[p] = synth::pick(synth::fillers(), rng);

        LabeledRecord rec;
        rec.id = "syn-" + std::to_string(idx);
        std::size_t offset = 0;
        for (std::size_t p = 0; p < len; ++p) {
            if (p == target_pos) {
                rec.target_start = offset;
                rec.target_end = offset + words[p].size();
            }
            offset += words[p].size() + 1;
            rec.text += words[p];
            if (p + 1 < len) rec.text += ' ';
        }
        rec.target = words[target_pos];
        rec.targeted_sentiment = label_from_index(targeted_cls);
        rec.sentence_sentiment = label_from_index(sentence_cls);
        const std::string violation = check_record(rec);
        if (!violation.empty())
            throw InvariantViolation(idx + 1, violation, "generated record breaks its invariant");
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace tsa
