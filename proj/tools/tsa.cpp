// Command-line front end for the targeted sentiment pipeline. One verb per
// stage: preprocess, split, build-vocab, train, eval, predict, agreement,
// synth, benchmark, report.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime error.
// Diagnostics go to stderr; machine-readable results go to stdout or the
// file named by --out.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsa/tsa.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

// Thrown by subcommands for flag-level problems CLI11 cannot catch itself.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t pos = 0;
            seeds.push_back(std::stoull(part, &pos));
            if (pos != part.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw UsageError("bad seed '" + part + "' in --seeds");
        }
    }
    if (seeds.empty()) throw UsageError("--seeds must name at least one seed");
    return seeds;
}

tsa::SplitSpec parse_ratios(const std::string& text, std::uint64_t seed) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t pos = 0;
            parts.push_back(std::stod(part, &pos));
            if (pos != part.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw UsageError("bad ratio '" + part + "'");
        }
    }
    if (parts.size() != 3) throw UsageError("--ratios needs three comma-separated fractions");
    tsa::SplitSpec spec;
    spec.train_frac = parts[0];
    spec.test_frac = parts[1];
    spec.val_frac = parts[2];
    spec.seed = seed;
    return spec;
}

tsa::LabelKind parse_label_kind(const std::string& text) {
    if (text == "targeted") return tsa::LabelKind::targeted;
    if (text == "sentence") return tsa::LabelKind::sentence;
    throw UsageError("label kind must be 'targeted' or 'sentence', got '" + text + "'");
}

// Writes to --out when given, else to stdout.
void emit_text(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw tsa::IoError("cannot open " + out_path + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw tsa::IoError("write failed for " + out_path);
}

struct PreprocessArgs {
    std::string in, out;
};

void run_preprocess(const PreprocessArgs& a) {
    const auto records = tsa::load_dataset(a.in);
    std::vector<tsa::LabeledRecord> cleaned;
    cleaned.reserve(records.size());
    for (const auto& rec : records) {
        const tsa::Preprocessed pp = tsa::preprocess(rec.text);
        const auto span = tsa::remap_span(rec, pp.clean, pp.map);
        tsa::LabeledRecord out = rec;
        out.text = pp.clean;
        out.target_start = span.first;
        out.target_end = span.second;
        const std::u32string cps = tsa::decode_utf8(pp.clean);
        out.target = tsa::encode_utf8(cps.substr(span.first, span.second - span.first));
        cleaned.push_back(std::move(out));
    }
    tsa::save_dataset(a.out, cleaned);
    std::cerr << "preprocessed " << cleaned.size() << " records -> " << a.out << "\n";
}

struct SplitArgs {
    std::string in, ratios = "0.65,0.20,0.15", stratify = "targeted", out_prefix;
    std::uint64_t seed = 0;
};

void run_split(const SplitArgs& a) {
    const tsa::SplitSpec spec = parse_ratios(a.ratios, a.seed);
    spec.validate();
    const tsa::LabelKind kind = parse_label_kind(a.stratify);
    std::string prefix = a.out_prefix;
    if (prefix.empty()) {
        prefix = a.in;
        const std::string ext = ".jsonl";
        if (prefix.size() > ext.size() &&
            prefix.compare(prefix.size() - ext.size(), ext.size(), ext) == 0)
            prefix.resize(prefix.size() - ext.size());
    }
    const auto records = tsa::load_dataset(a.in);
    const tsa::SplitResult result = tsa::stratified_split(records, spec, kind);
    tsa::save_dataset(prefix + "-train.jsonl", result.train);
    tsa::save_dataset(prefix + "-test.jsonl", result.test);
    tsa::save_dataset(prefix + "-val.jsonl", result.val);
    std::cerr << "split " << records.size() << " records: " << result.train.size() << " train, "
              << result.test.size() << " test, " << result.val.size() << " val\n";
}

struct BuildVocabArgs {
    std::string in, out;
    std::size_t size = 120;
};

void run_build_vocab(const BuildVocabArgs& a) {
    const auto records = tsa::load_dataset(a.in);
    std::vector<std::string> corpus;
    corpus.reserve(records.size());
    for (const auto& rec : records) corpus.push_back(rec.text);
    const tsa::Vocabulary vocab = tsa::build_vocab(corpus, a.size);
    tsa::save_vocab(a.out, vocab);
    std::cerr << "vocabulary of " << vocab.size() << " tokens -> " << a.out << "\n";
}

struct TrainArgs {
    std::string variant, config, train, val, vocab, out;
    std::size_t hidden = 64, layers = 2, heads = 4, ffn = 128, max_len = 48;
    double dropout = 0.1;
};

void run_train(const TrainArgs& a) {
    const tsa::ModelVariant variant = tsa::parse_variant(a.variant);
    tsa::TrainConfig cfg;
    if (!a.config.empty()) cfg = tsa::load_train_config(a.config);
    const tsa::Vocabulary vocab = tsa::load_vocab(a.vocab);

    tsa::EncoderConfig ec;
    ec.hidden_size = a.hidden;
    ec.num_layers = a.layers;
    ec.num_heads = a.heads;
    ec.ffn_size = a.ffn;
    ec.max_len = a.max_len;
    ec.dropout_rate = a.dropout;
    ec.seed = cfg.seed;

    const auto train_set = tsa::load_dataset(a.train);
    const auto val_set = tsa::load_dataset(a.val);

    tsa::Model model = tsa::build_model(variant, vocab, ec);
    const tsa::TrainHistory history = tsa::train(model, train_set, val_set, cfg);
    tsa::save_checkpoint(model, a.out);

    for (std::size_t i = 0; i < history.epochs.size(); ++i)
        std::cerr << "epoch " << (i + 1) << ": loss " << history.epochs[i].train_loss
                  << ", val macro-F1 " << history.epochs[i].val_macro_f1 << "\n";
    std::cerr << "best epoch " << history.best_epoch << " (val macro-F1 " << history.best_val_f1
              << ") -> " << a.out << "\n";
}

struct EvalArgs {
    std::string ckpt, test, pred, subset = "full", labels = "targeted", pred_out;
};

void run_eval(const EvalArgs& a) {
    if (a.subset != "full" && a.subset != "divergent")
        throw UsageError("--subset must be 'full' or 'divergent', got '" + a.subset + "'");
    const tsa::LabelKind kind = parse_label_kind(a.labels);
    if (a.ckpt.empty() && a.pred.empty())
        throw UsageError("eval needs --ckpt or --pred");

    std::vector<tsa::PredictionRow> rows;
    if (!a.ckpt.empty()) {
        if (a.test.empty()) throw UsageError("--ckpt evaluation needs --test");
        const tsa::Model model = tsa::load_checkpoint(a.ckpt);
        auto records = tsa::load_dataset(a.test);
        if (a.subset == "divergent") records = tsa::divergent_subset(records);
        for (const auto& rec : records)
            rows.push_back({rec.id, rec.label(kind), tsa::predict(model, rec).label});
    } else {
        rows = tsa::load_predictions(a.pred);
        if (a.subset == "divergent") {
            if (a.test.empty())
                throw UsageError("divergent scoring of a prediction file needs --test");
            std::set<std::string> keep;
            for (const auto& rec : tsa::divergent_subset(tsa::load_dataset(a.test)))
                keep.insert(rec.id);
            std::vector<tsa::PredictionRow> filtered;
            for (const auto& r : rows)
                if (keep.count(r.id)) filtered.push_back(r);
            rows = std::move(filtered);
        }
    }

    std::vector<tsa::SentimentLabel> gold, pred;
    for (const auto& r : rows) {
        gold.push_back(r.gold);
        pred.push_back(r.pred);
    }
    const tsa::MetricsReport report =
        tsa::compute_report(tsa::confusion_matrix(gold, pred), a.subset);
    if (!a.pred_out.empty()) {
        std::ofstream out(a.pred_out, std::ios::trunc);
        if (!out) throw tsa::IoError("cannot open " + a.pred_out + " for writing");
        tsa::write_predictions(out, rows);
    }
    std::cout << tsa::report_to_json(report).dump(2) << "\n";
}

struct PredictArgs {
    std::string ckpt, in, out, labels = "targeted";
};

void run_predict(const PredictArgs& a) {
    const tsa::LabelKind kind = parse_label_kind(a.labels);
    const tsa::Model model = tsa::load_checkpoint(a.ckpt);
    const auto records = tsa::load_dataset(a.in);
    std::ostringstream text;
    std::vector<tsa::PredictionRow> rows;
    for (const auto& rec : records)
        rows.push_back({rec.id, rec.label(kind), tsa::predict(model, rec).label});
    tsa::write_predictions(text, rows);
    emit_text(a.out, text.str());
    std::cerr << "predicted " << rows.size() << " records\n";
}

struct AgreementArgs {
    std::string a, b, field = "targeted";
};

void run_agreement(const AgreementArgs& args) {
    const tsa::LabelKind kind = parse_label_kind(args.field);
    const auto ra = tsa::load_dataset(args.a);
    const auto rb = tsa::load_dataset(args.b);
    if (ra.size() != rb.size())
        throw tsa::LengthMismatch(std::to_string(ra.size()) + " vs " + std::to_string(rb.size()) +
                                  " records");
    std::vector<tsa::SentimentLabel> la, lb;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        if (ra[i].id != rb[i].id)
            throw tsa::LengthMismatch("record " + std::to_string(i) + ": id '" + ra[i].id +
                                      "' vs '" + rb[i].id + "'");
        la.push_back(ra[i].label(kind));
        lb.push_back(rb[i].label(kind));
    }
    const double kappa = tsa::cohens_kappa(la, lb);
    std::cout << nlohmann::json{{"kappa", kappa}, {"n", la.size()}}.dump() << "\n";
}

struct SynthArgs {
    std::string out;
    std::size_t n = 3000;
    double divergence = 0.3;
    std::size_t min_words = 5, max_words = 11;
    std::uint64_t seed = 0;
};

void run_synth(const SynthArgs& a) {
    tsa::SyntheticConfig cfg;
    cfg.n_examples = a.n;
    cfg.divergence_rate = a.divergence;
    cfg.min_words = a.min_words;
    cfg.max_words = a.max_words;
    cfg.seed = a.seed;
    const auto records = tsa::generate_synthetic(cfg);
    tsa::save_dataset(a.out, records);
    std::cerr << "generated " << records.size() << " records -> " << a.out << "\n";
}

struct BenchmarkArgs {
    std::string config, seeds = "7", out, format = "markdown";
};

struct BenchmarkFileConfig {
    tsa::SyntheticConfig synth;
    tsa::TrainConfig train;
};

// Benchmark config file: TrainConfig keys plus n_examples, divergence_rate,
// vocab_size, sentence_length (min,max pair). `seed` keys are ignored in
// favor of --seeds.
BenchmarkFileConfig load_benchmark_config(const std::string& path) {
    BenchmarkFileConfig cfg;
    std::ifstream in(path);
    if (!in) throw tsa::IoError("cannot open " + path);
    tsa::detail::parse_kv_stream(in, [&cfg](const std::string& key, const std::string& value) {
        if (tsa::detail::apply_train_key(cfg.train, key, value)) return true;
        if (key == "n_examples") cfg.synth.n_examples = tsa::detail::parse_u64_value(key, value);
        else if (key == "divergence_rate")
            cfg.synth.divergence_rate = tsa::detail::parse_f64_value(key, value);
        else if (key == "vocab_size") cfg.synth.vocab_size = tsa::detail::parse_u64_value(key, value);
        else if (key == "sentence_length") {
            const auto [lo, hi] = tsa::detail::split_pair(key, value);
            cfg.synth.min_words = tsa::detail::parse_u64_value(key, lo);
            cfg.synth.max_words = tsa::detail::parse_u64_value(key, hi);
        } else {
            return false;
        }
        return true;
    });
    cfg.train.validate();
    cfg.synth.validate();
    return cfg;
}

void run_benchmark_cmd(const BenchmarkArgs& a) {
    if (a.format != "markdown" && a.format != "csv")
        throw UsageError("--format must be 'markdown' or 'csv', got '" + a.format + "'");
    const auto seeds = parse_seed_list(a.seeds);
    BenchmarkFileConfig cfg;
    if (!a.config.empty()) cfg = load_benchmark_config(a.config);
    tsa::EncoderConfig ec;  // desk defaults; vocab_size filled per run
    const tsa::BenchmarkReport report =
        tsa::run_benchmark(cfg.synth, cfg.train, ec, seeds);
    const tsa::ReportFormat fmt =
        a.format == "markdown" ? tsa::ReportFormat::markdown : tsa::ReportFormat::csv;
    emit_text(a.out, tsa::render_report(report, fmt));
    if (!a.out.empty()) std::cerr << "report -> " << a.out << "\n";
}

struct ReportArgs {
    std::string in, out, format = "markdown";
};

void run_report(const ReportArgs& a) {
    if (a.format != "markdown" && a.format != "csv")
        throw UsageError("--format must be 'markdown' or 'csv', got '" + a.format + "'");
    std::ifstream in(a.in);
    if (!in) throw tsa::IoError("cannot open " + a.in);
    const tsa::BenchmarkReport report = tsa::parse_report_csv(in);
    const tsa::ReportFormat fmt =
        a.format == "markdown" ? tsa::ReportFormat::markdown : tsa::ReportFormat::csv;
    emit_text(a.out, tsa::render_report(report, fmt));
}

int classify_exception(const std::exception& e) {
    if (dynamic_cast<const UsageError*>(&e) != nullptr) return kExitUsage;
    if (dynamic_cast<const tsa::ConfigError*>(&e) != nullptr) return kExitUsage;
    if (dynamic_cast<const tsa::IoError*>(&e) != nullptr) return kExitRuntime;
    if (dynamic_cast<const tsa::NonFiniteLoss*>(&e) != nullptr) return kExitRuntime;
    if (dynamic_cast<const tsa::Error*>(&e) != nullptr) return kExitData;
    return kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"targeted sentiment analysis pipeline"};
    app.require_subcommand(1);

    PreprocessArgs pre;
    auto* cmd_pre = app.add_subcommand("preprocess", "clean tweets and remap target offsets");
    cmd_pre->add_option("--in", pre.in, "input dataset (jsonl)")->required();
    cmd_pre->add_option("--out", pre.out, "output dataset (jsonl)")->required();

    SplitArgs spl;
    auto* cmd_spl = app.add_subcommand("split", "stratified train/test/val split");
    cmd_spl->add_option("--in", spl.in, "input dataset (jsonl)")->required();
    cmd_spl->add_option("--ratios", spl.ratios, "train,test,val fractions");
    cmd_spl->add_option("--seed", spl.seed, "shuffle seed");
    cmd_spl->add_option("--stratify", spl.stratify, "label kind: targeted or sentence");
    cmd_spl->add_option("--out-prefix", spl.out_prefix, "output prefix (default: input stem)");

    BuildVocabArgs bv;
    auto* cmd_bv = app.add_subcommand("build-vocab", "build a subword vocabulary");
    cmd_bv->add_option("--in", bv.in, "input dataset (jsonl)")->required();
    cmd_bv->add_option("--size", bv.size, "vocabulary size");
    cmd_bv->add_option("--out", bv.out, "output vocabulary file")->required();

    TrainArgs tr;
    auto* cmd_tr = app.add_subcommand("train", "train one model variant");
    cmd_tr->add_option("--variant", tr.variant, "model variant")->required();
    cmd_tr->add_option("--config", tr.config, "training config file");
    cmd_tr->add_option("--train", tr.train, "training set (jsonl)")->required();
    cmd_tr->add_option("--val", tr.val, "validation set (jsonl)")->required();
    cmd_tr->add_option("--vocab", tr.vocab, "vocabulary file")->required();
    cmd_tr->add_option("--out", tr.out, "checkpoint path")->required();
    cmd_tr->add_option("--hidden", tr.hidden, "encoder hidden size");
    cmd_tr->add_option("--layers", tr.layers, "encoder layers");
    cmd_tr->add_option("--heads", tr.heads, "attention heads");
    cmd_tr->add_option("--ffn", tr.ffn, "feed-forward size");
    cmd_tr->add_option("--max-len", tr.max_len, "sequence length");
    cmd_tr->add_option("--dropout", tr.dropout, "dropout rate");

    EvalArgs ev;
    auto* cmd_ev = app.add_subcommand("eval", "score a checkpoint or prediction file");
    cmd_ev->add_option("--ckpt", ev.ckpt, "checkpoint path");
    cmd_ev->add_option("--test", ev.test, "test set (jsonl)");
    cmd_ev->add_option("--pred", ev.pred, "prediction file to score offline");
    cmd_ev->add_option("--subset", ev.subset, "full or divergent");
    cmd_ev->add_option("--labels", ev.labels, "gold label kind: targeted or sentence");
    cmd_ev->add_option("--pred-out", ev.pred_out, "also write predictions (jsonl)");

    PredictArgs pr;
    auto* cmd_pr = app.add_subcommand("predict", "write predictions for a dataset");
    cmd_pr->add_option("--ckpt", pr.ckpt, "checkpoint path")->required();
    cmd_pr->add_option("--in", pr.in, "input dataset (jsonl)")->required();
    cmd_pr->add_option("--out", pr.out, "output prediction file (default stdout)");
    cmd_pr->add_option("--labels", pr.labels, "gold label kind recorded in the output");

    AgreementArgs ag;
    auto* cmd_ag = app.add_subcommand("agreement", "Cohen's kappa between two label files");
    cmd_ag->add_option("--a", ag.a, "first dataset (jsonl)")->required();
    cmd_ag->add_option("--b", ag.b, "second dataset (jsonl)")->required();
    cmd_ag->add_option("--field", ag.field, "label kind: targeted or sentence");

    SynthArgs sy;
    auto* cmd_sy = app.add_subcommand("synth", "generate a synthetic corpus");
    cmd_sy->add_option("--out", sy.out, "output dataset (jsonl)")->required();
    cmd_sy->add_option("--n", sy.n, "number of records");
    cmd_sy->add_option("--divergence", sy.divergence, "label divergence rate");
    cmd_sy->add_option("--min-words", sy.min_words, "minimum sentence length");
    cmd_sy->add_option("--max-words", sy.max_words, "maximum sentence length");
    cmd_sy->add_option("--seed", sy.seed, "generator seed");

    BenchmarkArgs bm;
    auto* cmd_bm = app.add_subcommand("benchmark", "train and score every variant");
    cmd_bm->add_option("--config", bm.config, "benchmark config file");
    cmd_bm->add_option("--seeds", bm.seeds, "comma-separated seeds");
    cmd_bm->add_option("--out", bm.out, "report path (default stdout)");
    cmd_bm->add_option("--format", bm.format, "markdown or csv");

    ReportArgs rp;
    auto* cmd_rp = app.add_subcommand("report", "re-render a csv report");
    cmd_rp->add_option("--in", rp.in, "csv report path")->required();
    cmd_rp->add_option("--out", rp.out, "output path (default stdout)");
    cmd_rp->add_option("--format", rp.format, "markdown or csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (cmd_pre->parsed()) run_preprocess(pre);
        else if (cmd_spl->parsed()) run_split(spl);
        else if (cmd_bv->parsed()) run_build_vocab(bv);
        else if (cmd_tr->parsed()) run_train(tr);
        else if (cmd_ev->parsed()) run_eval(ev);
        else if (cmd_pr->parsed()) run_predict(pr);
        else if (cmd_ag->parsed()) run_agreement(ag);
        else if (cmd_sy->parsed()) run_synth(sy);
        else if (cmd_bm->parsed()) run_benchmark_cmd(bm);
        else if (cmd_rp->parsed()) run_report(rp);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify_exception(e);
    }
    return kExitOk;
}
