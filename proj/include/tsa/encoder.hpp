#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tsa/encode.hpp"
#include "tsa/errors.hpp"
#include "tsa/rng.hpp"
#include "tsa/tensor.hpp"

// Transformer encoder over encoded examples: token + position embeddings,
// then post-layer-norm blocks of masked multi-head self-attention and a
// GELU feed-forward network.

namespace tsa {

inline constexpr double kLayerNormEps = 1e-12;

struct EncoderConfig {
    std::size_t vocab_size = 0;
    std::size_t hidden_size = 64;
    std::size_t num_layers = 2;
    std::size_t num_heads = 4;
    std::size_t ffn_size = 128;
    std::size_t max_len = 48;
    double dropout_rate = 0.1;
    std::uint64_t seed = 0;

    std::size_t head_size() const { return hidden_size / num_heads; }

    void validate() const {
        if (vocab_size == 0) throw ConfigError("vocab_size must be set");
        if (num_layers == 0) throw ConfigError("num_layers must be positive");
        if (num_heads == 0 || hidden_size % num_heads != 0)
            throw ConfigError("hidden_size " + std::to_string(hidden_size) +
                              " not divisible by num_heads " + std::to_string(num_heads));
        if (ffn_size == 0) throw ConfigError("ffn_size must be positive");
        if (max_len < 4) throw ConfigError("max_len must be at least 4");
        if (dropout_rate < 0.0 || dropout_rate >= 1.0)
            throw ConfigError("dropout_rate must be in [0, 1)");
    }
};

struct LayerParameters {
    Tensor wq, bq, wk, bk, wv, bv, wo, bo;  // attention projections [h x h], [h]
    Tensor ln1_gamma, ln1_beta;
    Tensor w1, b1;  // [h x ffn], [ffn]
    Tensor w2, b2;  // [ffn x h], [h]
    Tensor ln2_gamma, ln2_beta;
};

struct EncoderParameters {
    EncoderConfig config;
    Tensor token_embeddings;     // [vocab x h]
    Tensor position_embeddings;  // [max_len x h]
    std::vector<LayerParameters> layers;
};

namespace detail {

inline Tensor init_weight(Rng& rng, std::size_t rows, std::size_t cols, double sigma) {
    std::vector<double> w(rows * cols);
    for (auto& v : w) v = truncated_normal(rng, sigma);
    return Tensor::param(std::move(w), {rows, cols});
}

inline Tensor init_zeros(std::size_t n) {
    return Tensor::param(std::vector<double>(n, 0.0), {n});
}

inline Tensor init_ones(std::size_t n) {
    return Tensor::param(std::vector<double>(n, 1.0), {n});
}

}  // namespace detail

// Weights and embeddings draw from a truncated normal (sigma 0.02, cut at
// two sigma); biases start at zero, layer-norm at identity. Sampling order
// is fixed, so the rng state alone determines the parameter set.
inline EncoderParameters init_encoder(const EncoderConfig& config, Rng& rng) {
    config.validate();
    constexpr double kSigma = 0.02;
    const std::size_t h = config.hidden_size;
    EncoderParameters p;
    p.config = config;
    p.token_embeddings = detail::init_weight(rng, config.vocab_size, h, kSigma);
    p.position_embeddings = detail::init_weight(rng, config.max_len, h, kSigma);
    p.layers.resize(config.num_layers);
    for (auto& layer : p.layers) {
        layer.wq = detail::init_weight(rng, h, h, kSigma);
        layer.bq = detail::init_zeros(h);
        layer.wk = detail::init_weight(rng, h, h, kSigma);
        layer.bk = detail::init_zeros(h);
        layer.wv = detail::init_weight(rng, h, h, kSigma);
        layer.bv = detail::init_zeros(h);
        layer.wo = detail::init_weight(rng, h, h, kSigma);
        layer.bo = detail::init_zeros(h);
        layer.ln1_gamma = detail::init_ones(h);
        layer.ln1_beta = detail::init_zeros(h);
        layer.w1 = detail::init_weight(rng, h, config.ffn_size, kSigma);
        layer.b1 = detail::init_zeros(config.ffn_size);
        layer.w2 = detail::init_weight(rng, config.ffn_size, h, kSigma);
        layer.b2 = detail::init_zeros(h);
        layer.ln2_gamma = detail::init_ones(h);
        layer.ln2_beta = detail::init_zeros(h);
    }
    return p;
}

inline EncoderParameters init_encoder(const EncoderConfig& config) {
    Rng rng(config.seed);
    return init_encoder(config, rng);
}

// Attention weights per layer and head, captured for inspection.
struct ForwardTrace {
    // attention[layer][head] holds the row-major [seq x seq] weight matrix
    std::vector<std::vector<std::vector<double>>> attention;
};

namespace detail {

// Inverted dropout: kept entries scale by 1/(1-p) so eval needs no rescale.
inline Tensor dropout(const Tensor& x, double p, bool train, Rng* rng) {
    if (!train || p <= 0.0) return x;
    if (rng == nullptr) throw ConfigError("dropout in train mode needs an rng");
    std::vector<double> mask(x.numel());
    const double keep_scale = 1.0 / (1.0 - p);
    for (auto& m : mask) m = uniform_real(*rng) < p ? 0.0 : keep_scale;
    return mul(x, Tensor::from(std::move(mask), x.shape()));
}

}  // namespace detail

// Runs the encoder over one example. Returns the [seq x hidden] output;
// pad positions are excluded as attention keys via an additive -inf mask,
// so no real position ever attends to padding. In train mode dropout is
// applied to attention weights and FFN activations using `rng`.
inline Tensor encoder_forward(const EncodedExample& example, const EncoderParameters& params,
                              bool train_mode = false, Rng* rng = nullptr,
                              ForwardTrace* trace = nullptr) {
    const EncoderConfig& cfg = params.config;
    const std::size_t seq = cfg.max_len;
    const std::size_t dh = cfg.head_size();
    if (example.ids.size() != seq || example.mask.size() != seq)
        throw ShapeMismatch("example length " + std::to_string(example.ids.size()) +
                            " vs max_len " + std::to_string(seq));

    // additive key mask: 0 on real positions, -inf on padding
    std::vector<double> mask_add(seq, 0.0);
    for (std::size_t j = 0; j < seq; ++j)
        if (example.mask[j] == 0) mask_add[j] = -std::numeric_limits<double>::infinity();
    const Tensor key_mask = Tensor::from(std::move(mask_add), {seq});

    Tensor x = add(gather_rows(params.token_embeddings, example.ids), params.position_embeddings);

    if (trace) trace->attention.assign(cfg.num_layers, {});
    const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));

    for (std::size_t li = 0; li < cfg.num_layers; ++li) {
        const LayerParameters& lp = params.layers[li];

        const Tensor q = add_rowwise(matmul(x, lp.wq), lp.bq);
        const Tensor k = add_rowwise(matmul(x, lp.wk), lp.bk);
        const Tensor v = add_rowwise(matmul(x, lp.wv), lp.bv);

        std::vector<Tensor> head_outputs;
        head_outputs.reserve(cfg.num_heads);
        for (std::size_t hi = 0; hi < cfg.num_heads; ++hi) {
            const std::size_t c0 = hi * dh, c1 = (hi + 1) * dh;
            const Tensor qh = slice_cols(q, c0, c1);
            const Tensor kh = slice_cols(k, c0, c1);
            const Tensor vh = slice_cols(v, c0, c1);
            Tensor scores = scale(matmul(qh, transpose(kh)), inv_sqrt_dh);
            scores = add_rowwise(scores, key_mask);
            Tensor weights = softmax(scores, 1);
            if (trace) trace->attention[li].push_back(weights.data());
            weights = detail::dropout(weights, cfg.dropout_rate, train_mode, rng);
            head_outputs.push_back(matmul(weights, vh));
        }
        const Tensor ctx = concat_cols(head_outputs);
        const Tensor attn_out = add_rowwise(matmul(ctx, lp.wo), lp.bo);
        x = layer_norm(add(x, attn_out), lp.ln1_gamma, lp.ln1_beta, kLayerNormEps);

        Tensor ff = gelu(add_rowwise(matmul(x, lp.w1), lp.b1));
        ff = detail::dropout(ff, cfg.dropout_rate, train_mode, rng);
        const Tensor ff_out = add_rowwise(matmul(ff, lp.w2), lp.b2);
        x = layer_norm(add(x, ff_out), lp.ln2_gamma, lp.ln2_beta, kLayerNormEps);
    }
    return x;
}

}  // namespace tsa
