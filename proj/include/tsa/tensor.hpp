#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <unordered_set>
#include <vector>

#include "tsa/errors.hpp"

// Dense 64-bit float tensor with reverse-mode gradients. Graphs are built
// define-by-run: every operation records its parents and a closure that
// pulls the output gradient back into them. A graph is confined to one
// thread; distinct graphs are independent.

namespace tsa {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& s) {
    std::size_t n = 1;
    for (auto d : s) n *= d;
    return n;
}

inline std::string shape_str(const Shape& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "x" : "") + std::to_string(s[i]);
    return out + "]";
}

struct TensorNode {
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad;  // allocated on first accumulation, kept until zeroed
    bool requires_grad = false;
    std::vector<std::shared_ptr<TensorNode>> parents;
    std::function<void(const std::vector<double>&)> backward_fn;

    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
    }
};

class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape, bool requires_grad = false) {
        const std::size_t n = shape_numel(shape);  // before the call: make's args may move shape first
        return make(std::vector<double>(n, 0.0), std::move(shape), requires_grad);
    }
    static Tensor from(std::vector<double> data, Shape shape, bool requires_grad = false) {
        if (data.size() != shape_numel(shape))
            throw ShapeMismatch("data size " + std::to_string(data.size()) + " vs shape " +
                                shape_str(shape));
        return make(std::move(data), std::move(shape), requires_grad);
    }
    static Tensor scalar(double v, bool requires_grad = false) {
        return make({v}, Shape{1}, requires_grad);
    }
    static Tensor param(std::vector<double> data, Shape shape) {
        return from(std::move(data), std::move(shape), true);
    }

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    std::size_t rank() const { return node_->shape.size(); }
    std::size_t numel() const { return node_->data.size(); }
    std::size_t dim(std::size_t i) const { return node_->shape.at(i); }

    const std::vector<double>& data() const { return node_->data; }
    std::vector<double>& mutable_data() { return node_->data; }

    bool requires_grad() const { return node_->requires_grad; }

    const std::vector<double>& grad() const {
        node_->ensure_grad();
        return node_->grad;
    }
    std::vector<double>& mutable_grad() {
        node_->ensure_grad();
        return node_->grad;
    }
    void zero_grad() { node_->grad.assign(node_->data.size(), 0.0); }

    double item() const {
        if (numel() != 1) throw NotScalar("tensor has " + std::to_string(numel()) + " elements");
        return node_->data[0];
    }

    std::shared_ptr<TensorNode> node() const { return node_; }

private:
    static Tensor make(std::vector<double> data, Shape shape, bool requires_grad) {
        Tensor t;
        t.node_ = std::make_shared<TensorNode>();
        t.node_->shape = std::move(shape);
        t.node_->data = std::move(data);
        t.node_->requires_grad = requires_grad;
        return t;
    }

    friend Tensor make_op_result(std::vector<double> data, Shape shape,
                                 std::vector<Tensor> parents,
                                 std::function<void(const std::vector<double>&)> bwd);

    std::shared_ptr<TensorNode> node_;
};

// Wires an op result into the graph. The backward closure is only attached
// when some parent needs gradients, so constant subtrees build no graph.
inline Tensor make_op_result(std::vector<double> data, Shape shape, std::vector<Tensor> parents,
                             std::function<void(const std::vector<double>&)> bwd) {
    Tensor t;
    t.node_ = std::make_shared<TensorNode>();
    t.node_->shape = std::move(shape);
    t.node_->data = std::move(data);
    bool needs = false;
    for (const auto& p : parents) needs = needs || p.requires_grad();
    t.node_->requires_grad = needs;
    if (needs) {
        t.node_->parents.reserve(parents.size());
        for (const auto& p : parents) t.node_->parents.push_back(p.node());
        t.node_->backward_fn = std::move(bwd);
    }
    return t;
}

namespace detail {

inline void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape())
        throw ShapeMismatch(std::string(op) + ": " + shape_str(a.shape()) + " vs " +
                            shape_str(b.shape()));
}

// C[m x n] += A[m x k] * B[k x n]
inline void mm_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                   std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a + i * k;
        double* ci = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ai[p];
            const double* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

// C[m x k] += A[m x n] * B[k x n]^T
inline void mm_nt_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t n,
                      std::size_t k) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a + i * n;
        double* ci = c + i * k;
        for (std::size_t l = 0; l < k; ++l) {
            const double* bl = b + l * n;
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += ai[j] * bl[j];
            ci[l] += acc;
        }
    }
}

// C[k x n] += A[m x k]^T * B[m x n]
inline void mm_tn_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                      std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a + i * k;
        const double* bi = b + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ai[p];
            double* cp = c + p * n;
            for (std::size_t j = 0; j < n; ++j) cp[j] += av * bi[j];
        }
    }
}

}  // namespace detail

// ---- elementwise and structural ops ----

inline Tensor add(const Tensor& a, const Tensor& b) {
    detail::check_same_shape(a, b, "add");
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
    auto an = a.node();
    auto bn = b.node();
    return make_op_result(std::move(out), a.shape(), {a, b}, [an, bn](const std::vector<double>& g) {
        if (an->requires_grad) {
            an->ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) an->grad[i] += g[i];
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) bn->grad[i] += g[i];
        }
    });
}

// A[m x n] + v[n] broadcast over rows; also carries additive attention
// masks, where v holds -inf on excluded columns.
inline Tensor add_rowwise(const Tensor& a, const Tensor& v) {
    if (a.rank() != 2 || v.rank() != 1 || a.dim(1) != v.dim(0))
        throw ShapeMismatch("add_rowwise: " + shape_str(a.shape()) + " vs " + shape_str(v.shape()));
    const std::size_t m = a.dim(0), n = a.dim(1);
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i * n + j] = a.data()[i * n + j] + v.data()[j];
    auto an = a.node();
    auto vn = v.node();
    return make_op_result(std::move(out), a.shape(), {a, v},
                          [an, vn, m, n](const std::vector<double>& g) {
                              if (an->requires_grad) {
                                  an->ensure_grad();
                                  for (std::size_t i = 0; i < g.size(); ++i) an->grad[i] += g[i];
                              }
                              if (vn->requires_grad) {
                                  vn->ensure_grad();
                                  for (std::size_t i = 0; i < m; ++i)
                                      for (std::size_t j = 0; j < n; ++j)
                                          vn->grad[j] += g[i * n + j];
                              }
                          });
}

inline Tensor mul(const Tensor& a, const Tensor& b) {
    detail::check_same_shape(a, b, "mul");
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
    auto an = a.node();
    auto bn = b.node();
    return make_op_result(std::move(out), a.shape(), {a, b}, [an, bn](const std::vector<double>& g) {
        if (an->requires_grad) {
            an->ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) an->grad[i] += g[i] * bn->data[i];
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) bn->grad[i] += g[i] * an->data[i];
        }
    });
}

inline Tensor scale(const Tensor& a, double c) {
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * c;
    auto an = a.node();
    return make_op_result(std::move(out), a.shape(), {a}, [an, c](const std::vector<double>& g) {
        if (!an->requires_grad) return;
        an->ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) an->grad[i] += g[i] * c;
    });
}

inline Tensor reshape(const Tensor& a, Shape shape) {
    if (shape_numel(shape) != a.numel())
        throw ShapeMismatch("reshape: " + shape_str(a.shape()) + " to " + shape_str(shape));
    auto an = a.node();
    return make_op_result(a.data(), std::move(shape), {a}, [an](const std::vector<double>& g) {
        if (!an->requires_grad) return;
        an->ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) an->grad[i] += g[i];
    });
}

inline Tensor transpose(const Tensor& a) {
    if (a.rank() != 2) throw ShapeMismatch("transpose: rank " + std::to_string(a.rank()));
    const std::size_t m = a.dim(0), n = a.dim(1);
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a.data()[i * n + j];
    auto an = a.node();
    return make_op_result(std::move(out), {n, m}, {a}, [an, m, n](const std::vector<double>& g) {
        if (!an->requires_grad) return;
        an->ensure_grad();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) an->grad[i * n + j] += g[j * m + i];
    });
}

inline Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
        throw ShapeMismatch("matmul: " + shape_str(a.shape()) + " * " + shape_str(b.shape()));
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    std::vector<double> out(m * n, 0.0);
    detail::mm_acc(a.data().data(), b.data().data(), out.data(), m, k, n);
    auto an = a.node();
    auto bn = b.node();
    return make_op_result(std::move(out), {m, n}, {a, b},
                          [an, bn, m, k, n](const std::vector<double>& g) {
                              if (an->requires_grad) {
                                  an->ensure_grad();
                                  detail::mm_nt_acc(g.data(), bn->data.data(), an->grad.data(), m,
                                                    n, k);
                              }
                              if (bn->requires_grad) {
                                  bn->ensure_grad();
                                  detail::mm_tn_acc(an->data.data(), g.data(), bn->grad.data(), m,
                                                    k, n);
                              }
                          });
}

inline Tensor slice_cols(const Tensor& a, std::size_t c0, std::size_t c1) {
    if (a.rank() != 2) throw ShapeMismatch("slice_cols: rank " + std::to_string(a.rank()));
    if (c0 >= c1 || c1 > a.dim(1))
        throw RangeOutOfBounds("slice_cols [" + std::to_string(c0) + ", " + std::to_string(c1) +
                               ") of " + shape_str(a.shape()));
    const std::size_t m = a.dim(0), n = a.dim(1), w = c1 - c0;
    std::vector<double> out(m * w);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < w; ++j) out[i * w + j] = a.data()[i * n + c0 + j];
    auto an = a.node();
    return make_op_result(std::move(out), {m, w}, {a},
                          [an, m, n, w, c0](const std::vector<double>& g) {
                              if (!an->requires_grad) return;
                              an->ensure_grad();
                              for (std::size_t i = 0; i < m; ++i)
                                  for (std::size_t j = 0; j < w; ++j)
                                      an->grad[i * n + c0 + j] += g[i * w + j];
                          });
}

inline Tensor concat_cols(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ShapeMismatch("concat_cols: no parts");
    const std::size_t m = parts[0].dim(0);
    std::size_t n = 0;
    for (const auto& p : parts) {
        if (p.rank() != 2 || p.dim(0) != m)
            throw ShapeMismatch("concat_cols: inconsistent part " + shape_str(p.shape()));
        n += p.dim(1);
    }
    std::vector<double> out(m * n);
    std::size_t off = 0;
    for (const auto& p : parts) {
        const std::size_t w = p.dim(1);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < w; ++j) out[i * n + off + j] = p.data()[i * w + j];
        off += w;
    }
    std::vector<std::shared_ptr<TensorNode>> nodes;
    std::vector<std::size_t> widths;
    for (const auto& p : parts) {
        nodes.push_back(p.node());
        widths.push_back(p.dim(1));
    }
    return make_op_result(std::move(out), {m, n}, parts,
                          [nodes, widths, m, n](const std::vector<double>& g) {
                              std::size_t off = 0;
                              for (std::size_t pi = 0; pi < nodes.size(); ++pi) {
                                  const std::size_t w = widths[pi];
                                  if (nodes[pi]->requires_grad) {
                                      nodes[pi]->ensure_grad();
                                      for (std::size_t i = 0; i < m; ++i)
                                          for (std::size_t j = 0; j < w; ++j)
                                              nodes[pi]->grad[i * w + j] += g[i * n + off + j];
                                  }
                                  off += w;
                              }
                          });
}

// Row i of a matrix, as a rank-1 tensor.
inline Tensor row(const Tensor& a, std::size_t i) {
    if (a.rank() != 2) throw ShapeMismatch("row: rank " + std::to_string(a.rank()));
    if (i >= a.dim(0)) throw RangeOutOfBounds("row " + std::to_string(i) + " of " +
                                              shape_str(a.shape()));
    const std::size_t n = a.dim(1);
    std::vector<double> out(a.data().begin() + i * n, a.data().begin() + (i + 1) * n);
    auto an = a.node();
    return make_op_result(std::move(out), {n}, {a}, [an, i, n](const std::vector<double>& g) {
        if (!an->requires_grad) return;
        an->ensure_grad();
        for (std::size_t j = 0; j < n; ++j) an->grad[i * n + j] += g[j];
    });
}

// Stacks rank-1 tensors of equal length into a [B x n] matrix.
inline Tensor stack_rows(const std::vector<Tensor>& rows) {
    if (rows.empty()) throw ShapeMismatch("stack_rows: no rows");
    const std::size_t n = rows[0].numel();
    std::vector<double> out;
    out.reserve(rows.size() * n);
    for (const auto& r : rows) {
        if (r.rank() != 1 || r.numel() != n)
            throw ShapeMismatch("stack_rows: inconsistent row " + shape_str(r.shape()));
        out.insert(out.end(), r.data().begin(), r.data().end());
    }
    std::vector<std::shared_ptr<TensorNode>> nodes;
    for (const auto& r : rows) nodes.push_back(r.node());
    return make_op_result(std::move(out), {rows.size(), n}, rows,
                          [nodes, n](const std::vector<double>& g) {
                              for (std::size_t i = 0; i < nodes.size(); ++i) {
                                  if (!nodes[i]->requires_grad) continue;
                                  nodes[i]->ensure_grad();
                                  for (std::size_t j = 0; j < n; ++j)
                                      nodes[i]->grad[j] += g[i * n + j];
                              }
                          });
}

inline Tensor sum(const Tensor& a) {
    double s = 0.0;
    for (double v : a.data()) s += v;
    auto an = a.node();
    return make_op_result({s}, Shape{1}, {a}, [an](const std::vector<double>& g) {
        if (!an->requires_grad) return;
        an->ensure_grad();
        for (auto& gv : an->grad) gv += g[0];
    });
}

// Embedding lookup: rows of `table` selected by token id.
inline Tensor gather_rows(const Tensor& table, const std::vector<std::uint32_t>& ids) {
    if (table.rank() != 2) throw ShapeMismatch("gather_rows: rank " + std::to_string(table.rank()));
    const std::size_t v = table.dim(0), h = table.dim(1);
    std::vector<double> out(ids.size() * h);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] >= v)
            throw IdOutOfRange(std::to_string(ids[i]) + " >= vocab size " + std::to_string(v));
        std::copy_n(table.data().begin() + ids[i] * h, h, out.begin() + i * h);
    }
    auto tn = table.node();
    auto ids_copy = ids;
    return make_op_result(std::move(out), {ids.size(), h}, {table},
                          [tn, ids_copy, h](const std::vector<double>& g) {
                              if (!tn->requires_grad) return;
                              tn->ensure_grad();
                              for (std::size_t i = 0; i < ids_copy.size(); ++i)
                                  for (std::size_t j = 0; j < h; ++j)
                                      tn->grad[ids_copy[i] * h + j] += g[i * h + j];
                          });
}

// ---- nonlinear ops ----

// Numerically stable softmax along `axis`. Entries of -inf get weight
// exactly 0, which is how attention masking excludes pad columns.
inline Tensor softmax(const Tensor& a, std::size_t axis) {
    if (axis >= a.rank()) throw ShapeMismatch("softmax: axis " + std::to_string(axis) +
                                              " for rank " + std::to_string(a.rank()));
    if (a.rank() > 2) throw ShapeMismatch("softmax: rank " + std::to_string(a.rank()));
    // treat as `slices` independent distributions of length `len`
    const bool rows = (a.rank() == 1) || (axis == 1);
    const std::size_t slices = a.rank() == 1 ? 1 : (rows ? a.dim(0) : a.dim(1));
    const std::size_t len = a.rank() == 1 ? a.dim(0) : (rows ? a.dim(1) : a.dim(0));
    const auto at = [rows, len, slices](std::size_t s, std::size_t i) {
        return rows ? s * len + i : i * slices + s;
    };

    std::vector<double> out(a.numel());
    for (std::size_t s = 0; s < slices; ++s) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < len; ++i) mx = std::max(mx, a.data()[at(s, i)]);
        double z = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
            const double e = std::exp(a.data()[at(s, i)] - mx);
            out[at(s, i)] = e;
            z += e;
        }
        for (std::size_t i = 0; i < len; ++i) out[at(s, i)] /= z;
    }
    auto an = a.node();
    auto y = out;  // captured for backward
    return make_op_result(std::move(out), a.shape(), {a},
                          [an, y, slices, len, at](const std::vector<double>& g) {
                              if (!an->requires_grad) return;
                              an->ensure_grad();
                              for (std::size_t s = 0; s < slices; ++s) {
                                  double dot = 0.0;
                                  for (std::size_t i = 0; i < len; ++i)
                                      dot += g[at(s, i)] * y[at(s, i)];
                                  for (std::size_t i = 0; i < len; ++i)
                                      an->grad[at(s, i)] += y[at(s, i)] * (g[at(s, i)] - dot);
                              }
                          });
}

// Per-row layer normalization over the last dimension: (x - mean) /
// sqrt(var + eps) * gamma + beta, with population variance.
inline Tensor layer_norm(const Tensor& a, const Tensor& gamma, const Tensor& beta, double eps) {
    const std::size_t n = a.rank() == 1 ? a.dim(0) : a.dim(1);
    const std::size_t m = a.rank() == 1 ? 1 : a.dim(0);
    if (a.rank() > 2 || gamma.rank() != 1 || beta.rank() != 1 || gamma.dim(0) != n ||
        beta.dim(0) != n)
        throw ShapeMismatch("layer_norm: " + shape_str(a.shape()) + ", gamma " +
                            shape_str(gamma.shape()) + ", beta " + shape_str(beta.shape()));

    std::vector<double> out(a.numel());
    std::vector<double> xhat(a.numel());
    std::vector<double> inv_std(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* xi = a.data().data() + i * n;
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) mean += xi[j];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t j = 0; j < n; ++j) var += (xi[j] - mean) * (xi[j] - mean);
        var /= static_cast<double>(n);
        const double is = 1.0 / std::sqrt(var + eps);
        inv_std[i] = is;
        for (std::size_t j = 0; j < n; ++j) {
            xhat[i * n + j] = (xi[j] - mean) * is;
            out[i * n + j] = xhat[i * n + j] * gamma.data()[j] + beta.data()[j];
        }
    }
    auto an = a.node();
    auto gn = gamma.node();
    auto bn = beta.node();
    return make_op_result(
        std::move(out), a.shape(), {a, gamma, beta},
        [an, gn, bn, xhat, inv_std, m, n](const std::vector<double>& g) {
            if (an->requires_grad) {
                an->ensure_grad();
                for (std::size_t i = 0; i < m; ++i) {
                    double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                        const double dxhat = g[i * n + j] * gn->data[j];
                        mean_dxhat += dxhat;
                        mean_dxhat_xhat += dxhat * xhat[i * n + j];
                    }
                    mean_dxhat /= static_cast<double>(n);
                    mean_dxhat_xhat /= static_cast<double>(n);
                    for (std::size_t j = 0; j < n; ++j) {
                        const double dxhat = g[i * n + j] * gn->data[j];
                        an->grad[i * n + j] +=
                            inv_std[i] * (dxhat - mean_dxhat - xhat[i * n + j] * mean_dxhat_xhat);
                    }
                }
            }
            if (gn->requires_grad) {
                gn->ensure_grad();
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j)
                        gn->grad[j] += g[i * n + j] * xhat[i * n + j];
            }
            if (bn->requires_grad) {
                bn->ensure_grad();
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) bn->grad[j] += g[i * n + j];
            }
        });
}

// GELU, tanh approximation: 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3))).
inline Tensor gelu(const Tensor& a) {
    constexpr double kSqrt2OverPi = 0.7978845608028654;
    constexpr double kCubic = 0.044715;
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = a.data()[i];
        out[i] = 0.5 * x * (1.0 + std::tanh(kSqrt2OverPi * (x + kCubic * x * x * x)));
    }
    auto an = a.node();
    return make_op_result(std::move(out), a.shape(), {a}, [an](const std::vector<double>& g) {
        if (!an->requires_grad) return;
        an->ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = an->data[i];
            const double u = kSqrt2OverPi * (x + kCubic * x * x * x);
            const double t = std::tanh(u);
            const double du = kSqrt2OverPi * (1.0 + 3.0 * kCubic * x * x);
            an->grad[i] += g[i] * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du);
        }
    });
}

// Elementwise max over rows first..last (inclusive) of H[seq x h]. The
// gradient routes to the argmax row per element; ties go to the lowest row.
inline Tensor masked_max_pool(const Tensor& h, std::size_t first, std::size_t last) {
    if (h.rank() != 2) throw ShapeMismatch("masked_max_pool: rank " + std::to_string(h.rank()));
    const std::size_t seq = h.dim(0), width = h.dim(1);
    if (first > last || last >= seq)
        throw RangeOutOfBounds("masked_max_pool rows [" + std::to_string(first) + ", " +
                               std::to_string(last) + "] of seq " + std::to_string(seq));
    std::vector<double> out(width, -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> arg(width, first);
    for (std::size_t i = first; i <= last; ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            const double v = h.data()[i * width + j];
            if (v > out[j]) {
                out[j] = v;
                arg[j] = i;
            }
        }
    }
    auto hn = h.node();
    return make_op_result(std::move(out), {width}, {h},
                          [hn, arg, width](const std::vector<double>& g) {
                              if (!hn->requires_grad) return;
                              hn->ensure_grad();
                              for (std::size_t j = 0; j < width; ++j)
                                  hn->grad[arg[j] * width + j] += g[j];
                          });
}

namespace detail {

// log softmax of one row, stable; returns log p[gold]
inline double log_prob_at(const double* logits, std::size_t n, std::size_t gold) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, logits[i]);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += std::exp(logits[i] - mx);
    return logits[gold] - mx - std::log(z);
}

inline void softmax_row(const double* logits, std::size_t n, double* probs) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, logits[i]);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        probs[i] = std::exp(logits[i] - mx);
        z += probs[i];
    }
    for (std::size_t i = 0; i < n; ++i) probs[i] /= z;
}

}  // namespace detail

// Class-weighted cross entropy. For a rank-1 logits vector the loss is
// -weights[gold] * log softmax(logits)[gold]; for a [B x C] batch it is the
// mean of the per-example weighted losses.
inline Tensor weighted_cross_entropy(const Tensor& logits, const std::vector<int>& golds,
                                     const Tensor& weights) {
    const std::size_t c = logits.rank() == 1 ? logits.dim(0) : logits.dim(1);
    const std::size_t b = logits.rank() == 1 ? 1 : logits.dim(0);
    if (logits.rank() > 2 || weights.rank() != 1 || weights.dim(0) != c)
        throw ShapeMismatch("weighted_cross_entropy: logits " + shape_str(logits.shape()) +
                            ", weights " + shape_str(weights.shape()));
    if (golds.size() != b)
        throw ShapeMismatch("weighted_cross_entropy: " + std::to_string(golds.size()) +
                            " golds for batch " + std::to_string(b));
    for (double w : weights.data())
        if (!(w > 0.0)) throw Error("class weights must be positive");
    for (int gci : golds)
        if (gci < 0 || static_cast<std::size_t>(gci) >= c)
            throw InvalidClass("gold " + std::to_string(gci) + " for " + std::to_string(c) +
                               " classes");

    double loss = 0.0;
    std::vector<double> logp(b);
    for (std::size_t i = 0; i < b; ++i) {
        logp[i] = detail::log_prob_at(logits.data().data() + i * c, c,
                                      static_cast<std::size_t>(golds[i]));
        loss -= weights.data()[static_cast<std::size_t>(golds[i])] * logp[i];
    }
    loss /= static_cast<double>(b);

    auto ln = logits.node();
    auto wn = weights.node();
    return make_op_result(
        {loss}, Shape{1}, {logits, weights},
        [ln, wn, golds, logp, b, c](const std::vector<double>& g) {
            const double gs = g[0] / static_cast<double>(b);
            if (ln->requires_grad) {
                ln->ensure_grad();
                std::vector<double> probs(c);
                for (std::size_t i = 0; i < b; ++i) {
                    detail::softmax_row(ln->data.data() + i * c, c, probs.data());
                    const auto gold = static_cast<std::size_t>(golds[i]);
                    const double w = wn->data[gold];
                    for (std::size_t j = 0; j < c; ++j)
                        ln->grad[i * c + j] += gs * w * (probs[j] - (j == gold ? 1.0 : 0.0));
                }
            }
            if (wn->requires_grad) {
                wn->ensure_grad();
                for (std::size_t i = 0; i < b; ++i)
                    wn->grad[static_cast<std::size_t>(golds[i])] -= gs * logp[i];
            }
        });
}

inline Tensor weighted_cross_entropy(const Tensor& logits, int gold, const Tensor& weights) {
    return weighted_cross_entropy(logits, std::vector<int>{gold}, weights);
}

// ---- reverse pass ----

// Accumulates d loss / d t into the grad buffer of every tensor reachable
// from `loss` that requires gradients. Grads add up across calls until
// zeroed.
inline void backward(const Tensor& loss) {
    if (loss.numel() != 1)
        throw NotScalar("backward needs a scalar, got " + shape_str(loss.shape()));

    // iterative post-order DFS; reverse gives topological order
    std::vector<std::shared_ptr<TensorNode>> order;
    std::unordered_set<TensorNode*> visited;
    std::vector<std::pair<std::shared_ptr<TensorNode>, std::size_t>> stack;
    if (loss.requires_grad()) stack.emplace_back(loss.node(), 0);
    visited.insert(loss.node().get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            auto parent = node->parents[next++];
            if (parent->requires_grad && visited.insert(parent.get()).second)
                stack.emplace_back(std::move(parent), 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    loss.node()->ensure_grad();
    loss.node()->grad[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        auto& node = *it;
        if (node->backward_fn) {
            node->ensure_grad();
            node->backward_fn(node->grad);
        }
    }
}

}  // namespace tsa
