#pragma once

// Helpers shared by the unit tests and the acceptance runner. Deliberately
// framework-free so both can include it. The brute-force metric
// implementations here are written independently of the library code and
// act as oracles, so keep them dumb and direct.

#include <stdlib.h>
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsa/tsa.hpp"

namespace support {

class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "tsa-test-XXXXXX").string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        if (::mkdtemp(buf.data()) == nullptr)
            throw std::runtime_error("mkdtemp failed for " + tmpl);
        path_ = buf.data();
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

#ifdef TSA_CLI_PATH
// Runs the installed CLI with a pre-formed argument string. Paths created
// by TempDir contain no spaces, so no quoting is needed.
inline CliResult run_cli(const std::string& args, const TempDir& dir) {
    const std::string out_path = dir.file("cli-stdout.txt");
    const std::string err_path = dir.file("cli-stderr.txt");
    const std::string cmd =
        std::string(TSA_CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
    const int raw = std::system(cmd.c_str());
    CliResult r;
    if (raw != -1 && WIFEXITED(raw)) r.code = WEXITSTATUS(raw);
    r.out = read_file(out_path);
    r.err = read_file(err_path);
    return r;
}
#endif

// ---------------------------------------------------------------------------
// Finite-difference gradient checking.

struct FdReport {
    double max_rel_err = 0.0;
    std::size_t probes = 0;
};

// Central differences against the analytic gradient of make_loss(), which
// must rebuild the graph from the leaves' current data on every call.
// probes_per_leaf == 0 probes every element.
inline FdReport fd_check(const std::function<tsa::Tensor()>& make_loss,
                         std::vector<tsa::Tensor> leaves, tsa::Rng* rng = nullptr,
                         std::size_t probes_per_leaf = 0, double step = 1e-5) {
    for (auto& t : leaves) t.zero_grad();
    tsa::Tensor loss = make_loss();
    tsa::backward(loss);
    std::vector<std::vector<double>> analytic;
    analytic.reserve(leaves.size());
    for (auto& t : leaves) analytic.push_back(t.grad());

    FdReport rep;
    for (std::size_t li = 0; li < leaves.size(); ++li) {
        auto& t = leaves[li];
        const std::size_t n = t.numel();
        std::vector<std::size_t> picks;
        if (probes_per_leaf == 0 || probes_per_leaf >= n) {
            picks.resize(n);
            for (std::size_t i = 0; i < n; ++i) picks[i] = i;
        } else {
            for (std::size_t k = 0; k < probes_per_leaf; ++k)
                picks.push_back(static_cast<std::size_t>(tsa::uniform_below(*rng, n)));
        }
        for (std::size_t i : picks) {
            double& x = t.mutable_data()[i];
            const double x0 = x;
            x = x0 + step;
            const double lp = make_loss().item();
            x = x0 - step;
            const double lm = make_loss().item();
            x = x0;
            const double numeric = (lp - lm) / (2.0 * step);
            const double a = analytic[li][i];
            const double scale = std::max({1.0, std::abs(a), std::abs(numeric)});
            rep.max_rel_err = std::max(rep.max_rel_err, std::abs(a - numeric) / scale);
            ++rep.probes;
        }
    }
    return rep;
}

inline tsa::Tensor rand_tensor(tsa::Shape shape, tsa::Rng& rng, double scale,
                               bool requires_grad) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    std::vector<double> data(n);
    for (double& v : data) v = (tsa::uniform_real(rng) * 2.0 - 1.0) * scale;
    return tsa::Tensor::from(std::move(data), std::move(shape), requires_grad);
}

// ---------------------------------------------------------------------------
// Brute-force metric oracles: direct per-class counting over the raw label
// vectors, no confusion matrix involved.

inline double brute_macro_f1(const std::vector<tsa::SentimentLabel>& gold,
                             const std::vector<tsa::SentimentLabel>& pred) {
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
        double tp = 0.0, fp = 0.0, fn = 0.0;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            const int g = tsa::label_index(gold[i]);
            const int p = tsa::label_index(pred[i]);
            if (p == c && g == c) tp += 1.0;
            else if (p == c) fp += 1.0;
            else if (g == c) fn += 1.0;
        }
        const double prec = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
        const double rec = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
        sum += prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    }
    return sum / 3.0;
}

inline double brute_kappa(const std::vector<tsa::SentimentLabel>& a,
                          const std::vector<tsa::SentimentLabel>& b) {
    const double n = static_cast<double>(a.size());
    double po = 0.0;
    double ma[3] = {0.0, 0.0, 0.0};
    double mb[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) po += 1.0;
        ma[tsa::label_index(a[i])] += 1.0;
        mb[tsa::label_index(b[i])] += 1.0;
    }
    po /= n;
    double pe = 0.0;
    for (int c = 0; c < 3; ++c) pe += (ma[c] / n) * (mb[c] / n);
    if (pe == 1.0) return 1.0;
    return (po - pe) / (1.0 - pe);
}

inline std::vector<tsa::SentimentLabel> random_labels(tsa::Rng& rng, std::size_t n) {
    std::vector<tsa::SentimentLabel> v;
    v.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        v.push_back(tsa::label_from_index(tsa::uniform_below(rng, 3)));
    return v;
}

// Smallest achievable total |count - quota| over all integer triples that
// sum to total. O(total^2); keep totals modest.
inline double min_abs_deviation(std::size_t total, const std::array<double, 3>& fracs) {
    double best = 1e300;
    for (std::size_t a = 0; a <= total; ++a) {
        for (std::size_t b = 0; a + b <= total; ++b) {
            const std::size_t c = total - a - b;
            const double dev = std::abs(static_cast<double>(a) - total * fracs[0]) +
                               std::abs(static_cast<double>(b) - total * fracs[1]) +
                               std::abs(static_cast<double>(c) - total * fracs[2]);
            best = std::min(best, dev);
        }
    }
    return best;
}

// Record whose target slice is cut from the text, so the slice invariant
// holds by construction. Offsets count unicode scalar values.
inline tsa::LabeledRecord make_record(std::string id, std::string text, std::size_t start,
                                      std::size_t end, tsa::SentimentLabel sentence,
                                      tsa::SentimentLabel targeted) {
    tsa::LabeledRecord r;
    r.id = std::move(id);
    r.text = std::move(text);
    const std::u32string cps = tsa::decode_utf8(r.text);
    r.target = tsa::encode_utf8(cps.substr(start, end - start));
    r.target_start = start;
    r.target_end = end;
    r.sentence_sentiment = sentence;
    r.targeted_sentiment = targeted;
    return r;
}

}  // namespace support
