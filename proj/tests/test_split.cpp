#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "support.hpp"
#include "tsa/tsa.hpp"

using namespace tsa;
using support::make_record;

namespace {

// n records per class, targeted labels; sentence labels deliberately differ
// so the two kinds are distinguishable.
std::vector<LabeledRecord> corpus(std::size_t pos, std::size_t neg, std::size_t neu) {
    std::vector<LabeledRecord> out;
    const std::array<std::size_t, 3> counts = {pos, neg, neu};
    std::size_t serial = 0;
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < counts[c]; ++i) {
            out.push_back(make_record("r" + std::to_string(serial++), "kahve iyi", 0, 5,
                                      SentimentLabel::neutral, label_from_index(c)));
        }
    }
    return out;
}

}  // namespace

TEST_CASE("class distribution counts the requested label kind") {
    std::vector<LabeledRecord> records;
    records.push_back(make_record("a", "x y", 0, 1, SentimentLabel::negative,
                                  SentimentLabel::positive));
    records.push_back(make_record("b", "x y", 0, 1, SentimentLabel::negative,
                                  SentimentLabel::positive));
    records.push_back(make_record("c", "x y", 0, 1, SentimentLabel::positive,
                                  SentimentLabel::negative));
    records.push_back(make_record("d", "x y", 0, 1, SentimentLabel::positive,
                                  SentimentLabel::neutral));
    const auto targeted = class_distribution(records, LabelKind::targeted);
    REQUIRE(targeted == std::array<std::size_t, 3>{2, 1, 1});
    const auto sentence = class_distribution(records, LabelKind::sentence);
    REQUIRE(sentence == std::array<std::size_t, 3>{2, 2, 0});
    REQUIRE(class_distribution({}, LabelKind::targeted) == std::array<std::size_t, 3>{0, 0, 0});
}

TEST_CASE("largest remainder hand apportionments") {
    const std::array<double, 3> fracs = {0.65, 0.20, 0.15};
    REQUIRE(detail::largest_remainder(100, fracs) == std::array<std::size_t, 3>{65, 20, 15});
    REQUIRE(detail::largest_remainder(19, fracs) == std::array<std::size_t, 3>{12, 4, 3});
    REQUIRE(detail::largest_remainder(58, fracs) == std::array<std::size_t, 3>{38, 11, 9});
    REQUIRE(detail::largest_remainder(23, fracs) == std::array<std::size_t, 3>{15, 5, 3});
    REQUIRE(detail::largest_remainder(0, fracs) == std::array<std::size_t, 3>{0, 0, 0});
}

TEST_CASE("largest remainder minimizes total deviation from the quotas") {
    Rng rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t total = 1 + uniform_below(rng, 110);
        double a = 0.05 + uniform_real(rng), b = 0.05 + uniform_real(rng),
               c = 0.05 + uniform_real(rng);
        const double s = a + b + c;
        const std::array<double, 3> fracs = {a / s, b / s, c / s};
        const auto out = detail::largest_remainder(total, fracs);
        REQUIRE(out[0] + out[1] + out[2] == total);
        double dev = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            const double q = total * fracs[i];
            REQUIRE(std::abs(static_cast<double>(out[i]) - q) < 1.0 + 1e-9);
            dev += std::abs(static_cast<double>(out[i]) - q);
        }
        const double best = support::min_abs_deviation(total, fracs);
        REQUIRE_THAT(dev, Catch::Matchers::WithinAbs(best, 1e-9));
    }
}

TEST_CASE("split of the 19/58/23 corpus lands on the per-class quotas") {
    const auto records = corpus(19, 58, 23);
    SplitSpec spec;
    spec.seed = 11;
    const SplitResult result = stratified_split(records, spec, LabelKind::targeted);
    REQUIRE(result.train.size() + result.test.size() + result.val.size() == 100);
    REQUIRE(class_distribution(result.train, LabelKind::targeted) ==
            std::array<std::size_t, 3>{12, 38, 15});
    REQUIRE(class_distribution(result.test, LabelKind::targeted) ==
            std::array<std::size_t, 3>{4, 11, 5});
    REQUIRE(class_distribution(result.val, LabelKind::targeted) ==
            std::array<std::size_t, 3>{3, 9, 3});
}

TEST_CASE("subsets are disjoint, exhaustive, and keep input order") {
    const auto records = corpus(10, 14, 9);
    SplitSpec spec;
    spec.seed = 3;
    const SplitResult r = stratified_split(records, spec, LabelKind::targeted);

    std::set<std::string> seen;
    std::map<std::string, std::size_t> input_pos;
    for (std::size_t i = 0; i < records.size(); ++i) input_pos[records[i].id] = i;
    for (const auto* subset : {&r.train, &r.test, &r.val}) {
        std::size_t prev = 0;
        bool first = true;
        for (const auto& rec : *subset) {
            REQUIRE(seen.insert(rec.id).second);  // no duplicates across subsets
            const std::size_t pos = input_pos.at(rec.id);
            if (!first) REQUIRE(pos > prev);  // input order preserved inside each subset
            prev = pos;
            first = false;
        }
    }
    REQUIRE(seen.size() == records.size());
}

TEST_CASE("identical seeds reproduce the split, membership is seed-driven") {
    const auto records = corpus(12, 20, 8);
    SplitSpec spec;
    spec.seed = 42;
    const SplitResult a = stratified_split(records, spec, LabelKind::targeted);
    const SplitResult b = stratified_split(records, spec, LabelKind::targeted);
    REQUIRE(a.train.size() == b.train.size());
    for (std::size_t i = 0; i < a.train.size(); ++i) REQUIRE(a.train[i].id == b.train[i].id);
    for (std::size_t i = 0; i < a.test.size(); ++i) REQUIRE(a.test[i].id == b.test[i].id);
    for (std::size_t i = 0; i < a.val.size(); ++i) REQUIRE(a.val[i].id == b.val[i].id);
}

TEST_CASE("degenerate specs are rejected") {
    const auto records = corpus(4, 4, 4);
    SplitSpec whole;
    whole.train_frac = 1.0;
    whole.test_frac = 0.0;
    whole.val_frac = 0.0;
    REQUIRE_THROWS_AS(stratified_split(records, whole, LabelKind::targeted), DegenerateSplit);

    SplitSpec off;
    off.train_frac = 0.5;
    off.test_frac = 0.2;
    off.val_frac = 0.2;
    REQUIRE_THROWS_AS(off.validate(), DegenerateSplit);

    // a dataset too small to populate every subset
    SplitSpec ok;
    REQUIRE_THROWS_AS(stratified_split(corpus(1, 0, 0), ok, LabelKind::targeted),
                      DegenerateSplit);
}

TEST_CASE("per-class counts stay within one of the exact apportionment") {
    Rng rng(19);
    const std::array<double, 3> fracs = {0.65, 0.20, 0.15};
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t pos = 4 + uniform_below(rng, 40);
        const std::size_t neg = 4 + uniform_below(rng, 40);
        const std::size_t neu = 4 + uniform_below(rng, 40);
        const auto records = corpus(pos, neg, neu);
        SplitSpec spec;
        spec.seed = 1000 + trial;
        const SplitResult r = stratified_split(records, spec, LabelKind::targeted);
        const std::array<std::size_t, 3> totals = {pos, neg, neu};
        const std::array<const std::vector<LabeledRecord>*, 3> subsets = {&r.train, &r.test,
                                                                          &r.val};
        for (std::size_t s = 0; s < 3; ++s) {
            const auto dist = class_distribution(*subsets[s], LabelKind::targeted);
            for (std::size_t c = 0; c < 3; ++c) {
                const double quota = static_cast<double>(totals[c]) * fracs[s];
                REQUIRE(std::abs(static_cast<double>(dist[c]) - quota) <= 1.0 + 1e-9);
            }
        }
    }
}
