#include <catch2/catch_amalgamated.hpp>

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "tsa/tsa.hpp"

using namespace tsa;

namespace {

SyntheticConfig tiny_synth() {
    SyntheticConfig c;
    c.n_examples = 60;
    c.divergence_rate = 0.4;
    c.vocab_size = 80;
    return c;
}

TrainConfig tiny_train() {
    TrainConfig c;
    c.batch_size = 16;
    c.base_lr = 1e-3;
    c.warmup_steps = 2;
    c.max_epochs = 1;
    c.patience = 1;
    return c;
}

EncoderConfig tiny_encoder() {
    EncoderConfig c;
    c.hidden_size = 8;
    c.num_layers = 1;
    c.num_heads = 2;
    c.ffn_size = 16;
    c.max_len = 16;
    c.dropout_rate = 0.1;
    return c;
}

}  // namespace

TEST_CASE("config digest pins every influential field") {
    const SyntheticConfig s = tiny_synth();
    const TrainConfig t = tiny_train();
    const EncoderConfig e = tiny_encoder();

    const std::string base = benchmark_digest(s, t, e);
    REQUIRE(base.size() == 16);
    for (char c : base) REQUIRE(std::isxdigit(static_cast<unsigned char>(c)));
    REQUIRE(benchmark_digest(s, t, e) == base);

    SyntheticConfig s2 = s;
    s2.n_examples += 1;
    REQUIRE(benchmark_digest(s2, t, e) != base);
    SyntheticConfig s3 = s;
    s3.divergence_rate = 0.41;
    REQUIRE(benchmark_digest(s3, t, e) != base);
    TrainConfig t2 = t;
    t2.base_lr = 2e-3;
    REQUIRE(benchmark_digest(s, t2, e) != base);
    TrainConfig t3 = t;
    t3.max_epochs += 1;
    REQUIRE(benchmark_digest(s, t3, e) != base);
    EncoderConfig e2 = e;
    e2.hidden_size = 16;
    REQUIRE(benchmark_digest(s, t, e2) != base);
    EncoderConfig e3 = e;
    e3.dropout_rate = 0.2;
    REQUIRE(benchmark_digest(s, t, e3) != base);
}

TEST_CASE("a small benchmark runs every variant on every seed") {
    const BenchmarkReport report =
        run_benchmark(tiny_synth(), tiny_train(), tiny_encoder(), {1, 2});

    REQUIRE(report.seeds == std::vector<std::uint64_t>{1, 2});
    REQUIRE(report.runs.size() == 2);
    REQUIRE(report.config_digest ==
            benchmark_digest(tiny_synth(), tiny_train(), tiny_encoder()));

    const auto variants = all_variants();
    for (std::size_t r = 0; r < report.runs.size(); ++r) {
        const BenchmarkRun& run = report.runs[r];
        REQUIRE(run.seed == report.seeds[r]);
        REQUIRE(run.entries.size() == variants.size());
        for (std::size_t i = 0; i < variants.size(); ++i) {
            const BenchmarkEntry& entry = run.entries[i];
            REQUIRE(entry.variant == variants[i]);
            INFO("variant " << variant_name(entry.variant) << ": " << entry.error);
            REQUIRE(entry.ok);
            REQUIRE(entry.full_f1 >= 0.0);
            REQUIRE(entry.full_f1 <= 1.0);
            REQUIRE(entry.divergent_f1 >= 0.0);
            REQUIRE(entry.divergent_f1 <= 1.0);
        }
    }
}

TEST_CASE("benchmarks are byte-for-byte reproducible") {
    const SyntheticConfig s = tiny_synth();
    const TrainConfig t = tiny_train();
    const EncoderConfig e = tiny_encoder();
    const BenchmarkReport a = run_benchmark(s, t, e, {7});
    const BenchmarkReport b = run_benchmark(s, t, e, {7});
    REQUIRE(render_report(a, ReportFormat::csv) == render_report(b, ReportFormat::csv));
    REQUIRE(render_report(a, ReportFormat::markdown) == render_report(b, ReportFormat::markdown));
    REQUIRE_THROWS_AS(run_benchmark(s, t, e, {}), ConfigError);
}

TEST_CASE("failed variants are marked rather than aborting the run") {
    const auto records = generate_synthetic(tiny_synth());
    SplitSpec spec;
    const SplitResult data = stratified_split(records, spec, LabelKind::targeted);
    std::vector<std::string> corpus;
    for (const auto& r : data.train) corpus.push_back(r.text);
    const Vocabulary vocab = build_vocab(corpus, 80);

    EncoderConfig bad = tiny_encoder();
    bad.hidden_size = 10;
    bad.num_heads = 4;  // not divisible: the build must fail, the entry must not
    const BenchmarkEntry entry =
        benchmark_variant(ModelVariant::t_bert, data, vocab, bad, tiny_train());
    REQUIRE_FALSE(entry.ok);
    REQUIRE_FALSE(entry.error.empty());
    REQUIRE(entry.full_f1 == 0.0);
    REQUIRE(entry.divergent_f1 == 0.0);
}

TEST_CASE("markdown reports table every variant per seed") {
    const BenchmarkReport report =
        run_benchmark(tiny_synth(), tiny_train(), tiny_encoder(), {3});
    const std::string md = render_report(report, ReportFormat::markdown);

    REQUIRE(md.find("# Benchmark results") == 0);
    REQUIRE(md.find("Config digest: `" + report.config_digest + "`") != std::string::npos);
    REQUIRE(md.find("## Seed 3") != std::string::npos);
    REQUIRE(md.find("| Model | F1 (full) | F1 (divergent) |") != std::string::npos);
    for (ModelVariant v : all_variants())
        REQUIRE(md.find("| " + std::string(variant_name(v)) + " | ") != std::string::npos);

    // four decimal places for each reported score
    char fixed[32];
    std::snprintf(fixed, sizeof fixed, "%.4f", report.runs[0].entries[0].full_f1);
    REQUIRE(md.find(fixed) != std::string::npos);
}

TEST_CASE("csv reports round trip losslessly") {
    const BenchmarkReport report =
        run_benchmark(tiny_synth(), tiny_train(), tiny_encoder(), {4, 5});
    const std::string csv = render_report(report, ReportFormat::csv);

    std::istringstream lines(csv);
    std::string first;
    std::getline(lines, first);
    REQUIRE(first == "digest,seed,model,status,f1_full,f1_divergent");
    std::size_t rows = 0;
    for (std::string line; std::getline(lines, line);) ++rows;
    REQUIRE(rows == 2 * all_variants().size());

    std::istringstream in(csv);
    const BenchmarkReport back = parse_report_csv(in);
    REQUIRE(back.config_digest == report.config_digest);
    REQUIRE(back.seeds == report.seeds);
    REQUIRE(back.runs.size() == report.runs.size());
    for (std::size_t r = 0; r < report.runs.size(); ++r)
        for (std::size_t i = 0; i < report.runs[r].entries.size(); ++i) {
            const auto& want = report.runs[r].entries[i];
            const auto& got = back.runs[r].entries[i];
            REQUIRE(got.variant == want.variant);
            REQUIRE(got.ok == want.ok);
            REQUIRE(got.full_f1 == want.full_f1);  // %.17g preserves doubles exactly
            REQUIRE(got.divergent_f1 == want.divergent_f1);
        }
    REQUIRE(render_report(back, ReportFormat::csv) == csv);
}

TEST_CASE("csv parsing rejects malformed input") {
    std::istringstream bad_header("digest,seed,model\nx\n");
    REQUIRE_THROWS_AS(parse_report_csv(bad_header), ParseError);

    std::istringstream bad_row("digest,seed,model,status,f1_full,f1_divergent\nabc,1,t-bert,ok\n");
    try {
        parse_report_csv(bad_row);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(e.line == 2);
    }
}

TEST_CASE("reports write to disk exactly as rendered") {
    support::TempDir dir;
    const BenchmarkReport report =
        run_benchmark(tiny_synth(), tiny_train(), tiny_encoder(), {6});
    const std::string path = dir.file("report.csv");
    emit_report(report, path, ReportFormat::csv);
    REQUIRE(support::read_file(path) == render_report(report, ReportFormat::csv));

    REQUIRE_THROWS_AS(
        emit_report(report, (dir.path() / "missing-dir" / "report.md").string(), ReportFormat::markdown),
        IoError);
}
