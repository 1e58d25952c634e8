#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tsa/metrics.hpp"
#include "tsa/model.hpp"

// Supervised training: class-weighted cross entropy, AdamW with linear
// warmup then linear decay, per-epoch validation macro-F1, best-checkpoint
// tracking and early stopping.

namespace tsa {

struct TrainConfig {
    std::size_t batch_size = 24;
    double base_lr = 1e-3;  // from-scratch desk-scale default; fine-tuning used 1e-5
    double weight_decay = 0.1;
    std::size_t warmup_steps = 300;
    std::size_t max_epochs = 30;
    std::size_t patience = 3;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const {
        if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
        if (base_lr < 0.0) throw ConfigError("base_lr must be >= 0");
        if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
        if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
        if (patience < 1) throw ConfigError("patience must be >= 1");
        if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
            throw ConfigError("betas must be in [0, 1)");
        if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    }
};

// w_c = N / (K * n_c): each class contributes equal total weight, so
// w_c * n_c = N / K for all classes.
inline std::array<double, kNumClasses> class_weights(
    const std::array<std::size_t, kNumClasses>& counts) {
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    std::array<double, kNumClasses> w{};
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        if (counts[c] == 0)
            throw EmptyClass("class " + std::string(label_name(label_from_index(c))) +
                             " has no examples");
        w[c] = static_cast<double>(total) /
               (static_cast<double>(kNumClasses) * static_cast<double>(counts[c]));
    }
    return w;
}

// Linear ramp 0 -> base_lr over warmup_steps, then linear decay to 0 at
// total_steps.
inline double lr_schedule(std::size_t step, std::size_t total_steps, const TrainConfig& cfg) {
    if (cfg.warmup_steps > 0 && step < cfg.warmup_steps)
        return cfg.base_lr * static_cast<double>(step) / static_cast<double>(cfg.warmup_steps);
    if (step >= total_steps) return 0.0;
    if (total_steps <= cfg.warmup_steps) return 0.0;
    return cfg.base_lr * static_cast<double>(total_steps - step) /
           static_cast<double>(total_steps - cfg.warmup_steps);
}

struct OptimizerState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    std::size_t t = 0;
};

inline OptimizerState init_optimizer(const std::vector<ParamRef>& params) {
    OptimizerState s;
    for (const auto& p : params) {
        s.m.emplace_back(p.tensor.numel(), 0.0);
        s.v.emplace_back(p.tensor.numel(), 0.0);
    }
    return s;
}

// One AdamW update from the gradients currently held by the parameters.
// Weight decay is decoupled and applied only where ParamRef::decay is set.
inline void adamw_step(const std::vector<ParamRef>& params, OptimizerState& state, double lr,
                       const TrainConfig& cfg) {
    if (state.m.size() != params.size() || state.v.size() != params.size())
        throw ShapeMismatch("optimizer state tracks " + std::to_string(state.m.size()) +
                            " tensors, model has " + std::to_string(params.size()));
    ++state.t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor tensor = params[i].tensor;
        const std::vector<double>& g = tensor.grad();
        std::vector<double>& m = state.m[i];
        std::vector<double>& v = state.v[i];
        if (m.size() != g.size())
            throw ShapeMismatch("state size " + std::to_string(m.size()) + " vs gradient " +
                                std::to_string(g.size()) + " for " + params[i].name);
        std::vector<double>& theta = tensor.mutable_data();
        const double decay = params[i].decay ? cfg.weight_decay : 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
            v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            theta[j] -= lr * (mhat / (std::sqrt(vhat) + cfg.eps) + decay * theta[j]);
        }
    }
}

struct EpochStats {
    double train_loss = 0.0;
    double val_macro_f1 = 0.0;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    std::size_t best_epoch = 0;  // 1-based index into epochs
    double best_val_f1 = 0.0;
};

namespace detail {

inline std::vector<EncodedExample> encode_all(const std::vector<LabeledRecord>& records,
                                              const Vocabulary& vocab, std::size_t max_len,
                                              const VariantWiring& w) {
    std::vector<EncodedExample> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(encode_record(r, vocab, max_len, w.marked, w.label));
    return out;
}

inline double eval_macro_f1(const Model& model, const std::vector<EncodedExample>& examples) {
    std::vector<SentimentLabel> gold, pred;
    gold.reserve(examples.size());
    pred.reserve(examples.size());
    for (const auto& ex : examples) {
        gold.push_back(ex.label);
        pred.push_back(from_logits(model_logits(model, ex)).label);
    }
    return macro_f1(confusion_matrix(gold, pred));
}

}  // namespace detail

// Trains the model in place. Per epoch: seeded shuffle, minibatch weighted
// cross entropy, AdamW with the warmup/decay schedule, then validation
// macro-F1. Keeps the best-scoring parameters and stops after `patience`
// epochs without improvement; the best parameters are restored on return.
inline TrainHistory train(Model& model, const std::vector<LabeledRecord>& train_set,
                          const std::vector<LabeledRecord>& val_set, const TrainConfig& cfg) {
    cfg.validate();
    if (train_set.empty()) throw ConfigError("empty training set");
    if (val_set.empty()) throw ConfigError("empty validation set");

    const VariantWiring w = wiring(model.variant);
    const std::size_t max_len = model.encoder.config.max_len;
    const auto train_ex = detail::encode_all(train_set, model.vocab, max_len, w);
    const auto val_ex = detail::encode_all(val_set, model.vocab, max_len, w);

    std::array<std::size_t, kNumClasses> counts{};
    for (const auto& ex : train_ex) ++counts[label_index(ex.label)];
    const auto weights_arr = class_weights(counts);
    const Tensor weights =
        Tensor::from({weights_arr[0], weights_arr[1], weights_arr[2]}, {kNumClasses});

    auto params = model_parameters(model);
    for (auto& p : params) p.tensor.zero_grad();
    OptimizerState opt = init_optimizer(params);
    Rng rng(cfg.seed);

    const std::size_t batches_per_epoch = (train_ex.size() + cfg.batch_size - 1) / cfg.batch_size;
    const std::size_t total_steps = batches_per_epoch * cfg.max_epochs;

    TrainHistory history;
    std::vector<std::vector<double>> best_params;
    std::size_t epochs_since_improve = 0;

    std::vector<std::size_t> order(train_ex.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        shuffle(order, rng);
        double loss_sum = 0.0;
        for (std::size_t b = 0; b < batches_per_epoch; ++b) {
            const std::size_t begin = b * cfg.batch_size;
            const std::size_t end = std::min(begin + cfg.batch_size, train_ex.size());
            std::vector<Tensor> logits;
            std::vector<int> golds;
            logits.reserve(end - begin);
            golds.reserve(end - begin);
            for (std::size_t k = begin; k < end; ++k) {
                const EncodedExample& ex = train_ex[order[k]];
                logits.push_back(model_logits(model, ex, true, &rng));
                golds.push_back(label_index(ex.label));
            }
            const Tensor loss = weighted_cross_entropy(stack_rows(logits), golds, weights);
            const double loss_val = loss.item();
            if (!std::isfinite(loss_val))
                throw NonFiniteLoss("epoch " + std::to_string(epoch) + " batch " +
                                    std::to_string(b) + ": loss " + std::to_string(loss_val));
            loss_sum += loss_val * static_cast<double>(end - begin);
            backward(loss);
            adamw_step(params, opt, lr_schedule(opt.t + 1, total_steps, cfg), cfg);
            for (auto& p : params) p.tensor.zero_grad();
        }

        EpochStats stats;
        stats.train_loss = loss_sum / static_cast<double>(train_ex.size());
        stats.val_macro_f1 = detail::eval_macro_f1(model, val_ex);
        history.epochs.push_back(stats);

        if (history.best_epoch == 0 || stats.val_macro_f1 > history.best_val_f1) {
            history.best_epoch = epoch;
            history.best_val_f1 = stats.val_macro_f1;
            best_params.clear();
            for (const auto& p : params) best_params.push_back(p.tensor.data());
            epochs_since_improve = 0;
        } else {
            ++epochs_since_improve;
            if (epochs_since_improve >= cfg.patience) break;
        }
    }

    for (std::size_t i = 0; i < params.size(); ++i) params[i].tensor.mutable_data() = best_params[i];
    return history;
}

}  // namespace tsa
