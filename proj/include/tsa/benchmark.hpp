#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "tsa/checkpoint.hpp"
#include "tsa/metrics.hpp"
#include "tsa/split.hpp"
#include "tsa/synthetic.hpp"
#include "tsa/train.hpp"
#include "tsa/vocab.hpp"

// Trains every model variant on pre-split data and scores targeted
// sentiment on the full test set and on its divergent subset. Runs are
// sequential and fully seeded, so a report is a pure function of its
// inputs.

namespace tsa {

struct BenchmarkEntry {
    ModelVariant variant = ModelVariant::baseline_sentence;
    bool ok = false;
    std::string error;       // set when training failed
    double full_f1 = 0.0;
    double divergent_f1 = 0.0;
};

struct BenchmarkRun {
    std::uint64_t seed = 0;
    std::vector<BenchmarkEntry> entries;
};

struct BenchmarkReport {
    std::string config_digest;
    std::vector<std::uint64_t> seeds;
    std::vector<BenchmarkRun> runs;
};

namespace detail {

inline void fnv1a(std::uint64_t& h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    h ^= '|';
    h *= 1099511628211ULL;
}

}  // namespace detail

// Digest of everything that determines a benchmark outcome; two runs with
// equal digests and equal seeds must produce identical reports.
inline std::string benchmark_digest(const SyntheticConfig& synth, const TrainConfig& train,
                                    const EncoderConfig& encoder) {
    std::uint64_t h = 1469598103934665603ULL;
    const auto num = [&](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        detail::fnv1a(h, buf);
    };
    const auto uns = [&](std::uint64_t v) { detail::fnv1a(h, std::to_string(v)); };
    uns(synth.n_examples);
    num(synth.divergence_rate);
    uns(synth.vocab_size);
    uns(synth.min_words);
    uns(synth.max_words);
    uns(train.batch_size);
    num(train.base_lr);
    num(train.weight_decay);
    uns(train.warmup_steps);
    uns(train.max_epochs);
    uns(train.patience);
    num(train.beta1);
    num(train.beta2);
    num(train.eps);
    uns(encoder.hidden_size);
    uns(encoder.num_layers);
    uns(encoder.num_heads);
    uns(encoder.ffn_size);
    uns(encoder.max_len);
    num(encoder.dropout_rate);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Trains one variant and scores it against targeted labels.
inline BenchmarkEntry benchmark_variant(ModelVariant variant, const SplitResult& data,
                                        const Vocabulary& vocab, EncoderConfig encoder_cfg,
                                        const TrainConfig& train_cfg) {
    BenchmarkEntry entry;
    entry.variant = variant;
    try {
        Model model = build_model(variant, vocab, encoder_cfg);
        train(model, data.train, data.val, train_cfg);

        std::vector<SentimentLabel> gold, pred, gold_div, pred_div;
        for (const auto& rec : data.test) {
            const SentimentLabel p = predict(model, rec).label;
            gold.push_back(rec.targeted_sentiment);
            pred.push_back(p);
            if (rec.sentence_sentiment != rec.targeted_sentiment) {
                gold_div.push_back(rec.targeted_sentiment);
                pred_div.push_back(p);
            }
        }
        entry.full_f1 = macro_f1(confusion_matrix(gold, pred));
        entry.divergent_f1 = macro_f1(confusion_matrix(gold_div, pred_div));
        entry.ok = true;
    } catch (const std::exception& e) {
        entry.ok = false;
        entry.error = e.what();
    }
    return entry;
}

// One seed over prepared data: the seed drives model initialization and
// training; corpus and split are taken as given.
inline BenchmarkRun run_benchmark_once(const SplitResult& data, const Vocabulary& vocab,
                                       const std::vector<ModelVariant>& variants,
                                       EncoderConfig encoder_cfg, TrainConfig train_cfg,
                                       std::uint64_t seed) {
    BenchmarkRun run;
    run.seed = seed;
    encoder_cfg.seed = seed;
    train_cfg.seed = seed;
    for (ModelVariant v : variants)
        run.entries.push_back(benchmark_variant(v, data, vocab, encoder_cfg, train_cfg));
    return run;
}

// Full harness: per seed, generate the corpus, split it, train and score
// every variant.
inline BenchmarkReport run_benchmark(const SyntheticConfig& synth_cfg,
                                     const TrainConfig& train_cfg,
                                     const EncoderConfig& encoder_cfg,
                                     const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) throw ConfigError("benchmark needs at least one seed");
    BenchmarkReport report;
    report.seeds = seeds;
    report.config_digest = benchmark_digest(synth_cfg, train_cfg, encoder_cfg);
    for (std::uint64_t seed : seeds) {
        SyntheticConfig sc = synth_cfg;
        sc.seed = seed;
        const auto records = generate_synthetic(sc);
        SplitSpec spec;
        spec.seed = seed;
        const SplitResult data = stratified_split(records, spec, LabelKind::targeted);

        std::vector<std::string> corpus;
        for (const auto& r : data.train) corpus.push_back(r.text);
        const Vocabulary vocab = build_vocab(corpus, sc.vocab_size);

        BenchmarkRun run;
        run.seed = seed;
        EncoderConfig ec = encoder_cfg;
        TrainConfig tc = train_cfg;
        ec.seed = seed;
        tc.seed = seed;
        const auto variants = all_variants();
        for (ModelVariant v : variants)
            run.entries.push_back(benchmark_variant(v, data, vocab, ec, tc));
        report.runs.push_back(std::move(run));
    }
    return report;
}

enum class ReportFormat { markdown, csv };

namespace detail {

inline std::string f1_fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

inline std::string f1_exact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline std::string render_report(const BenchmarkReport& report, ReportFormat format) {
    std::string out;
    if (format == ReportFormat::markdown) {
        out += "# Benchmark results\n\n";
        out += "Config digest: `" + report.config_digest + "`\n";
        for (const auto& run : report.runs) {
            out += "\n## Seed " + std::to_string(run.seed) + "\n\n";
            out += "| Model | F1 (full) | F1 (divergent) |\n";
            out += "|---|---:|---:|\n";
            for (const auto& e : run.entries) {
                out += "| " + std::string(variant_name(e.variant)) + " | ";
                if (e.ok)
                    out += detail::f1_fixed(e.full_f1) + " | " + detail::f1_fixed(e.divergent_f1);
                else
                    out += "failed: " + e.error + " | -";
                out += " |\n";
            }
        }
    } else {
        out += "digest,seed,model,status,f1_full,f1_divergent\n";
        for (const auto& run : report.runs)
            for (const auto& e : run.entries) {
                out += report.config_digest + "," + std::to_string(run.seed) + "," +
                       variant_name(e.variant) + ",";
                if (e.ok)
                    out += "ok," + detail::f1_exact(e.full_f1) + "," +
                           detail::f1_exact(e.divergent_f1) + "\n";
                else
                    out += "failed,,\n";
            }
    }
    return out;
}

inline void emit_report(const BenchmarkReport& report, const std::string& path,
                        ReportFormat format) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    const std::string text = render_report(report, format);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for " + path);
}

// Parses the CSV form back; used to verify lossless round-trips.
inline BenchmarkReport parse_report_csv(std::istream& in) {
    BenchmarkReport report;
    std::string line;
    if (!std::getline(in, line) || line != "digest,seed,model,status,f1_full,f1_divergent")
        throw ParseError(1, "bad csv header");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                cells.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (cells.size() != 6) throw ParseError(line_no, "expected 6 cells");
        report.config_digest = cells[0];
        const std::uint64_t seed = std::stoull(cells[1]);
        if (report.runs.empty() || report.runs.back().seed != seed) {
            report.runs.push_back(BenchmarkRun{seed, {}});
            report.seeds.push_back(seed);
        }
        BenchmarkEntry e;
        e.variant = parse_variant(cells[2]);
        e.ok = cells[3] == "ok";
        if (e.ok) {
            e.full_f1 = std::stod(cells[4]);
            e.divergent_f1 = std::stod(cells[5]);
        }
        report.runs.back().entries.push_back(e);
    }
    return report;
}

}  // namespace tsa
