#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "tsa/errors.hpp"
#include "tsa/labels.hpp"
#include "tsa/rng.hpp"

namespace tsa {

struct SplitSpec {
    double train_frac = 0.65;
    double test_frac = 0.20;
    double val_frac = 0.15;
    std::uint64_t seed = 0;

    void validate() const {
        const auto in_open_unit = [](double f) { return f > 0.0 && f < 1.0; };
        if (!in_open_unit(train_frac) || !in_open_unit(test_frac) || !in_open_unit(val_frac))
            throw DegenerateSplit("every fraction must lie in (0, 1)");
        const double sum = train_frac + test_frac + val_frac;
        if (std::abs(sum - 1.0) > 1e-9)
            throw DegenerateSplit("fractions sum to " + std::to_string(sum) + ", not 1");
    }
};

struct SplitResult {
    std::vector<LabeledRecord> train;
    std::vector<LabeledRecord> test;
    std::vector<LabeledRecord> val;
};

inline std::array<std::size_t, 3> class_distribution(const std::vector<LabeledRecord>& records,
                                                     LabelKind kind) {
    std::array<std::size_t, 3> counts{0, 0, 0};
    for (const auto& r : records) ++counts[static_cast<std::size_t>(label_index(r.label(kind)))];
    return counts;
}

namespace detail {

// Largest-remainder apportionment of `total` into parts proportional to
// `fracs`. Ties on the fractional remainder break toward the lower index.
inline std::array<std::size_t, 3> largest_remainder(std::size_t total,
                                                    const std::array<double, 3>& fracs) {
    std::array<std::size_t, 3> out{};
    std::array<double, 3> rem{};
    std::size_t assigned = 0;
    for (int s = 0; s < 3; ++s) {
        const double quota = static_cast<double>(total) * fracs[s];
        out[s] = static_cast<std::size_t>(std::floor(quota));
        rem[s] = quota - std::floor(quota);
        assigned += out[s];
    }
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
    for (std::size_t k = 0; assigned < total; ++k) {
        ++out[order[k % 3]];
        ++assigned;
    }
    return out;
}

}  // namespace detail

// Stratified train/test/val split. Within each class the subset sizes are
// the largest-remainder apportionment of the class count by the requested
// fractions; membership is a seeded shuffle of the class, so the partition
// is deterministic given the seed.
inline SplitResult stratified_split(const std::vector<LabeledRecord>& records,
                                    const SplitSpec& spec, LabelKind kind) {
    spec.validate();
    const std::array<double, 3> fracs{spec.train_frac, spec.test_frac, spec.val_frac};

    std::array<std::vector<std::size_t>, 3> by_class;
    for (std::size_t i = 0; i < records.size(); ++i)
        by_class[static_cast<std::size_t>(label_index(records[i].label(kind)))].push_back(i);

    SplitResult result;
    Rng rng(spec.seed);
    std::array<std::size_t, 3> totals{0, 0, 0};
    std::array<std::vector<std::size_t>, 3> chosen;  // train/test/val record indices
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        auto& members = by_class[static_cast<std::size_t>(c)];
        const auto counts = detail::largest_remainder(members.size(), fracs);
        shuffle(members, rng);
        std::size_t pos = 0;
        for (int s = 0; s < 3; ++s) {
            for (std::size_t k = 0; k < counts[static_cast<std::size_t>(s)]; ++k)
                chosen[static_cast<std::size_t>(s)].push_back(members[pos++]);
            totals[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s)];
        }
    }
    if (totals[0] == 0 || totals[1] == 0 || totals[2] == 0)
        throw DegenerateSplit("a subset would be empty (dataset too small for the fractions)");

    // keep input order within each subset
    for (int s = 0; s < 3; ++s) std::sort(chosen[static_cast<std::size_t>(s)].begin(),
                                          chosen[static_cast<std::size_t>(s)].end());
    const auto take = [&](const std::vector<std::size_t>& idx) {
        std::vector<LabeledRecord> out;
        out.reserve(idx.size());
        for (auto i : idx) out.push_back(records[i]);
        return out;
    };
    result.train = take(chosen[0]);
    result.test = take(chosen[1]);
    result.val = take(chosen[2]);
    return result;
}

}  // namespace tsa
