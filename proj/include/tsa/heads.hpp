#pragma once

#include <cstddef>

#include "tsa/encode.hpp"
#include "tsa/errors.hpp"
#include "tsa/labels.hpp"
#include "tsa/rng.hpp"
#include "tsa/tensor.hpp"

// Output heads: each one reduces the encoder's [seq x hidden] states to a
// single vector and applies one linear layer producing 3-class logits.

namespace tsa {

struct ClassifierHead {
    Tensor weight;  // [hidden x 3]
    Tensor bias;    // [3]
};

inline ClassifierHead init_head(std::size_t hidden, Rng& rng) {
    constexpr double kSigma = 0.02;
    std::vector<double> w(hidden * kNumClasses);
    for (auto& v : w) v = truncated_normal(rng, kSigma);
    ClassifierHead head;
    head.weight = Tensor::param(std::move(w), {hidden, kNumClasses});
    head.bias = Tensor::param(std::vector<double>(kNumClasses, 0.0), {kNumClasses});
    return head;
}

namespace detail {

inline Tensor linear(const Tensor& x, const ClassifierHead& head) {
    const std::size_t h = head.weight.dim(0);
    const std::size_t c = head.weight.dim(1);
    return add(reshape(matmul(reshape(x, {1, h}), head.weight), {c}), head.bias);
}

}  // namespace detail

// Logits from the first-position ([CLS]) output row.
inline Tensor cls_head(const Tensor& hidden, const ClassifierHead& head) {
    return detail::linear(row(hidden, 0), head);
}

// Logits from the output row of the first marker token.
inline Tensor marker_head(const Tensor& hidden, const EncodedExample& example,
                          const ClassifierHead& head) {
    if (!example.marked) throw NotMarked("marker head on unmarked example");
    return detail::linear(row(hidden, example.first_marker_pos), head);
}

// Logits from the elementwise max over the target rows (markers included
// when present).
inline Tensor maxpool_head(const Tensor& hidden, const EncodedExample& example,
                           const ClassifierHead& head) {
    return detail::linear(masked_max_pool(hidden, example.target_first, example.target_last), head);
}

}  // namespace tsa
