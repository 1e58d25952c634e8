#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsa/errors.hpp"
#include "tsa/labels.hpp"

// Evaluation math: confusion matrix, per-class precision/recall/F1,
// macro-F1, Cohen's kappa, divergent-subset extraction. Every 0/0 score is
// defined as 0.

namespace tsa {

struct ConfusionMatrix {
    // counts[gold][pred]
    std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (const auto& r : counts)
            for (auto c : r) t += c;
        return t;
    }
};

inline ConfusionMatrix confusion_matrix(const std::vector<SentimentLabel>& gold,
                                        const std::vector<SentimentLabel>& pred) {
    if (gold.size() != pred.size())
        throw LengthMismatch(std::to_string(gold.size()) + " gold vs " +
                             std::to_string(pred.size()) + " pred");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < gold.size(); ++i)
        ++m.counts[label_index(gold[i])][label_index(pred[i])];
    return m;
}

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
};

namespace detail {

inline double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

inline ClassScores class_scores(const ConfusionMatrix& m, std::size_t c) {
    double tp = 0.0, fp = 0.0, fn = 0.0;
    std::uint64_t support = 0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        support += m.counts[c][k];
        if (k != c) {
            fp += static_cast<double>(m.counts[k][c]);
            fn += static_cast<double>(m.counts[c][k]);
        }
    }
    tp = static_cast<double>(m.counts[c][c]);
    ClassScores s;
    s.support = support;
    s.precision = safe_div(tp, tp + fp);
    s.recall = safe_div(tp, tp + fn);
    s.f1 = safe_div(2.0 * s.precision * s.recall, s.precision + s.recall);
    return s;
}

}  // namespace detail

inline double macro_f1(const ConfusionMatrix& m) {
    if (m.total() == 0) throw EmptyMatrix("macro_f1 on empty confusion matrix");
    double sum = 0.0;
    for (std::size_t c = 0; c < kNumClasses; ++c) sum += detail::class_scores(m, c).f1;
    return sum / static_cast<double>(kNumClasses);
}

struct MetricsReport {
    std::array<ClassScores, kNumClasses> per_class{};
    double macro_f1 = 0.0;
    std::uint64_t n_examples = 0;
    std::string subset = "full";  // "full" or "divergent"
};

inline MetricsReport compute_report(const ConfusionMatrix& m, const std::string& subset) {
    MetricsReport r;
    for (std::size_t c = 0; c < kNumClasses; ++c) r.per_class[c] = detail::class_scores(m, c);
    r.macro_f1 = macro_f1(m);
    r.n_examples = m.total();
    r.subset = subset;
    return r;
}

inline nlohmann::json report_to_json(const MetricsReport& r) {
    nlohmann::json per;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        per[label_name(label_from_index(c))] = {{"precision", r.per_class[c].precision},
                                                {"recall", r.per_class[c].recall},
                                                {"f1", r.per_class[c].f1},
                                                {"support", r.per_class[c].support}};
    }
    return nlohmann::json{{"subset", r.subset},
                          {"n_examples", r.n_examples},
                          {"macro_f1", r.macro_f1},
                          {"per_class", per}};
}

// kappa = (p_o - p_e) / (1 - p_e); degenerate p_e = 1 (both raters constant
// on the same class, hence perfect agreement) is defined as 1.
inline double cohens_kappa(const std::vector<SentimentLabel>& a,
                           const std::vector<SentimentLabel>& b) {
    if (a.size() != b.size())
        throw LengthMismatch(std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    if (a.empty()) throw LengthMismatch("kappa on empty label vectors");
    const double n = static_cast<double>(a.size());
    std::array<double, kNumClasses> ma{}, mb{};
    double agree = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma[label_index(a[i])] += 1.0;
        mb[label_index(b[i])] += 1.0;
        if (a[i] == b[i]) agree += 1.0;
    }
    const double po = agree / n;
    double pe = 0.0;
    for (std::size_t c = 0; c < kNumClasses; ++c) pe += (ma[c] / n) * (mb[c] / n);
    if (pe == 1.0) return 1.0;
    return (po - pe) / (1.0 - pe);
}

// Records whose two labels disagree, in input order.
inline std::vector<LabeledRecord> divergent_subset(const std::vector<LabeledRecord>& records) {
    std::vector<LabeledRecord> out;
    for (const auto& r : records)
        if (r.sentence_sentiment != r.targeted_sentiment) out.push_back(r);
    return out;
}

// ---- prediction files for offline scoring: JSONL {"id", "gold", "pred"} ----

struct PredictionRow {
    std::string id;
    SentimentLabel gold;
    SentimentLabel pred;
};

inline void write_predictions(std::ostream& out, const std::vector<PredictionRow>& rows) {
    for (const auto& r : rows) {
        nlohmann::json j{{"id", r.id}, {"gold", label_name(r.gold)}, {"pred", label_name(r.pred)}};
        out << j.dump() << "\n";
    }
}

inline std::vector<PredictionRow> parse_predictions(std::istream& in) {
    std::vector<PredictionRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, e.what());
        }
        try {
            const auto gold = parse_label(j.at("gold").get<std::string>());
            const auto pred = parse_label(j.at("pred").get<std::string>());
            if (!gold || !pred) throw ParseError(line_no, "unknown label");
            rows.push_back({j.at("id").get<std::string>(), *gold, *pred});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return rows;
}

inline std::vector<PredictionRow> load_predictions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return parse_predictions(in);
}

}  // namespace tsa
