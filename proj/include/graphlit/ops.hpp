#pragma once
// Differentiable primitives over Tape/Tensor. Each op computes the forward
// value eagerly and registers an exact vector-Jacobian product. Backward
// closures capture tape pointer + node ids only (the node vector may
// reallocate while the graph grows).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "graphlit/tensor.hpp"

namespace graphlit {

namespace detail {

template <class Real>
bool any_needs_grad(std::initializer_list<Tensor<Real>> ts) {
    for (const auto& t : ts)
        if (t.tape->node(t.id).needs_grad) return true;
    return false;
}

template <class Real>
void check_same_tape(std::initializer_list<Tensor<Real>> ts) {
    const Tape<Real>* tp = nullptr;
    for (const auto& t : ts) {
        if (!t.valid()) throw std::runtime_error("op received an invalid tensor");
        if (!tp) tp = t.tape;
        else if (tp != t.tape) throw std::runtime_error("op received tensors from different tapes");
    }
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise binary

template <class Real>
Tensor<Real> add(Tensor<Real> a, Tensor<Real> b) {
    detail::check_same_tape<Real>({a, b});
    detail::require(a.shape() == b.shape(),
                    "add: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    const auto& av = a.value();
    const auto& bv = b.value();
    std::vector<Real> out(av.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
    Tape<Real>* tp = a.tape;
    bool ng = detail::any_needs_grad<Real>({a, b});
    Tensor<Real> y;
    int aid = a.id, bid = b.id;
    y = tp->make(a.shape(), std::move(out), ng, nullptr);
    int yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, bid, yid]() {
            const auto& g = tp->grad_buf(yid);
            if (tp->node(aid).needs_grad) {
                auto& ga = tp->grad_buf(aid);
                for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
            }
            if (tp->node(bid).needs_grad) {
                auto& gb = tp->grad_buf(bid);
                for (size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
            }
        };
    return y;
}

template <class Real>
Tensor<Real> sub(Tensor<Real> a, Tensor<Real> b) {
    detail::check_same_tape<Real>({a, b});
    detail::require(a.shape() == b.shape(),
                    "sub: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    const auto& av = a.value();
    const auto& bv = b.value();
    std::vector<Real> out(av.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
    Tape<Real>* tp = a.tape;
    bool ng = detail::any_needs_grad<Real>({a, b});
    Tensor<Real> y = tp->make(a.shape(), std::move(out), ng, nullptr);
    int aid = a.id, bid = b.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, bid, yid]() {
            const auto& g = tp->grad_buf(yid);
            if (tp->node(aid).needs_grad) {
                auto& ga = tp->grad_buf(aid);
                for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
            }
            if (tp->node(bid).needs_grad) {
                auto& gb = tp->grad_buf(bid);
                for (size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
            }
        };
    return y;
}

template <class Real>
Tensor<Real> mul(Tensor<Real> a, Tensor<Real> b) {
    detail::check_same_tape<Real>({a, b});
    detail::require(a.shape() == b.shape(),
                    "mul: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    const auto& av = a.value();
    const auto& bv = b.value();
    std::vector<Real> out(av.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
    Tape<Real>* tp = a.tape;
    bool ng = detail::any_needs_grad<Real>({a, b});
    Tensor<Real> y = tp->make(a.shape(), std::move(out), ng, nullptr);
    int aid = a.id, bid = b.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, bid, yid]() {
            const auto& g = tp->grad_buf(yid);
            const auto& av2 = tp->node(aid).val;
            const auto& bv2 = tp->node(bid).val;
            if (tp->node(aid).needs_grad) {
                auto& ga = tp->grad_buf(aid);
                for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv2[i];
            }
            if (tp->node(bid).needs_grad) {
                auto& gb = tp->grad_buf(bid);
                for (size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av2[i];
            }
        };
    return y;
}

template <class Real>
Tensor<Real> divide(Tensor<Real> a, Tensor<Real> b) {
    detail::check_same_tape<Real>({a, b});
    detail::require(a.shape() == b.shape(),
                    "divide: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    const auto& av = a.value();
    const auto& bv = b.value();
    std::vector<Real> out(av.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] / bv[i];
    Tape<Real>* tp = a.tape;
    bool ng = detail::any_needs_grad<Real>({a, b});
    Tensor<Real> y = tp->make(a.shape(), std::move(out), ng, nullptr);
    int aid = a.id, bid = b.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, bid, yid]() {
            const auto& g = tp->grad_buf(yid);
            const auto& av2 = tp->node(aid).val;
            const auto& bv2 = tp->node(bid).val;
            if (tp->node(aid).needs_grad) {
                auto& ga = tp->grad_buf(aid);
                for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / bv2[i];
            }
            if (tp->node(bid).needs_grad) {
                auto& gb = tp->grad_buf(bid);
                for (size_t i = 0; i < g.size(); ++i) gb[i] -= g[i] * av2[i] / (bv2[i] * bv2[i]);
            }
        };
    return y;
}

// ---------------------------------------------------------------------------
// Elementwise unary

template <class Real, class F, class DF>
Tensor<Real> unary_op(Tensor<Real> a, F fwd, DF dfd, const char* /*name*/) {
    const auto& av = a.value();
    std::vector<Real> out(av.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = fwd(av[i]);
    Tape<Real>* tp = a.tape;
    bool ng = tp->node(a.id).needs_grad;
    Tensor<Real> y = tp->make(a.shape(), std::move(out), ng, nullptr);
    int aid = a.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, yid, dfd]() {
            const auto& g = tp->grad_buf(yid);
            const auto& x = tp->node(aid).val;
            const auto& v = tp->node(yid).val;
            auto& ga = tp->grad_buf(aid);
            for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * dfd(x[i], v[i]);
        };
    return y;
}

template <class Real>
Tensor<Real> neg(Tensor<Real> a) {
    return unary_op(
        a, [](Real x) { return -x; }, [](Real, Real) { return Real(-1); }, "neg");
}

template <class Real>
Tensor<Real> scale(Tensor<Real> a, Real c) {
    return unary_op(
        a, [c](Real x) { return c * x; }, [c](Real, Real) { return c; }, "scale");
}

template <class Real>
Tensor<Real> add_scalar(Tensor<Real> a, Real c) {
    return unary_op(
        a, [c](Real x) { return x + c; }, [](Real, Real) { return Real(1); }, "add_scalar");
}

template <class Real>
Tensor<Real> log_t(Tensor<Real> a) {
    return unary_op(
        a, [](Real x) { return std::log(x); }, [](Real x, Real) { return Real(1) / x; }, "log");
}

template <class Real>
Tensor<Real> exp_t(Tensor<Real> a) {
    return unary_op(
        a, [](Real x) { return std::exp(x); }, [](Real, Real y) { return y; }, "exp");
}

template <class Real>
Tensor<Real> sqrt_t(Tensor<Real> a) {
    return unary_op(
        a, [](Real x) { return std::sqrt(x); },
        [](Real, Real y) { return Real(0.5) / y; }, "sqrt");
}

// a must be positive for non-integer exponents.
template <class Real>
Tensor<Real> pow_scalar(Tensor<Real> a, Real p) {
    return unary_op(
        a, [p](Real x) { return std::pow(x, p); },
        [p](Real x, Real) { return p * std::pow(x, p - Real(1)); }, "pow");
}

template <class Real>
Tensor<Real> sigmoid(Tensor<Real> a) {
    auto fwd = [](Real x) {
        if (x >= Real(0)) return Real(1) / (Real(1) + std::exp(-x));
        Real e = std::exp(x);
        return e / (Real(1) + e);
    };
    return unary_op(
        a, fwd, [](Real, Real y) { return y * (Real(1) - y); }, "sigmoid");
}

// log(sigmoid(x)), numerically stable at both tails.
template <class Real>
Tensor<Real> log_sigmoid(Tensor<Real> a) {
    auto fwd = [](Real x) {
        if (x >= Real(0)) return -std::log1p(std::exp(-x));
        return x - std::log1p(std::exp(x));
    };
    auto bwd = [](Real x, Real) {
        if (x >= Real(0)) return Real(1) - Real(1) / (Real(1) + std::exp(-x));
        Real e = std::exp(x);
        return Real(1) - e / (Real(1) + e);
    };
    return unary_op(a, fwd, bwd, "log_sigmoid");
}

// GELU, tanh approximation.
template <class Real>
Tensor<Real> gelu(Tensor<Real> a) {
    constexpr double k = 0.7978845608028654;  // sqrt(2/pi)
    constexpr double c3 = 0.044715;
    auto fwd = [](Real x) {
        double xd = static_cast<double>(x);
        double u = k * (xd + c3 * xd * xd * xd);
        return static_cast<Real>(0.5 * xd * (1.0 + std::tanh(u)));
    };
    auto bwd = [](Real x, Real) {
        double xd = static_cast<double>(x);
        double u = k * (xd + c3 * xd * xd * xd);
        double t = std::tanh(u);
        double du = k * (1.0 + 3.0 * c3 * xd * xd);
        return static_cast<Real>(0.5 * (1.0 + t) + 0.5 * xd * (1.0 - t * t) * du);
    };
    return unary_op(a, fwd, bwd, "gelu");
}

template <class Real>
Tensor<Real> silu(Tensor<Real> a) {
    auto sig = [](Real x) {
        if (x >= Real(0)) return Real(1) / (Real(1) + std::exp(-x));
        Real e = std::exp(x);
        return e / (Real(1) + e);
    };
    return unary_op(
        a, [sig](Real x) { return x * sig(x); },
        [sig](Real x, Real) {
            Real s = sig(x);
            return s * (Real(1) + x * (Real(1) - s));
        },
        "silu");
}

// ---------------------------------------------------------------------------
// Matrix ops

template <class Real>
Tensor<Real> matmul(Tensor<Real> a, Tensor<Real> b) {
    detail::check_same_tape<Real>({a, b});
    detail::require(a.shape().size() == 2 && b.shape().size() == 2,
                    "matmul expects 2-D tensors, got " + shape_str(a.shape()) + " and " +
                        shape_str(b.shape()));
    int m = a.shape()[0], k = a.shape()[1], k2 = b.shape()[0], n = b.shape()[1];
    detail::require(k == k2, "matmul: inner dimensions differ " + shape_str(a.shape()) + " x " +
                                 shape_str(b.shape()));
    const auto& av = a.value();
    const auto& bv = b.value();
    std::vector<Real> out(static_cast<size_t>(m) * n, Real(0));
    for (int i = 0; i < m; ++i) {
        const Real* arow = av.data() + static_cast<size_t>(i) * k;
        Real* orow = out.data() + static_cast<size_t>(i) * n;
        for (int kk = 0; kk < k; ++kk) {
            Real s = arow[kk];
            if (s == Real(0)) continue;
            const Real* brow = bv.data() + static_cast<size_t>(kk) * n;
            for (int j = 0; j < n; ++j) orow[j] += s * brow[j];
        }
    }
    Tape<Real>* tp = a.tape;
    bool ng = detail::any_needs_grad<Real>({a, b});
    Tensor<Real> y = tp->make({m, n}, std::move(out), ng, nullptr);
    int aid = a.id, bid = b.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, bid, yid, m, n, k]() {
            const auto& g = tp->grad_buf(yid);
            const auto& av2 = tp->node(aid).val;
            const auto& bv2 = tp->node(bid).val;
            if (tp->node(aid).needs_grad) {
                // dA = dY * B^T
                auto& ga = tp->grad_buf(aid);
                for (int i = 0; i < m; ++i)
                    for (int kk = 0; kk < k; ++kk) {
                        Real s = 0;
                        const Real* grow = g.data() + static_cast<size_t>(i) * n;
                        const Real* brow = bv2.data() + static_cast<size_t>(kk) * n;
                        for (int j = 0; j < n; ++j) s += grow[j] * brow[j];
                        ga[static_cast<size_t>(i) * k + kk] += s;
                    }
            }
            if (tp->node(bid).needs_grad) {
                // dB = A^T * dY
                auto& gb = tp->grad_buf(bid);
                for (int kk = 0; kk < k; ++kk)
                    for (int i = 0; i < m; ++i) {
                        Real s = av2[static_cast<size_t>(i) * k + kk];
                        if (s == Real(0)) continue;
                        const Real* grow = g.data() + static_cast<size_t>(i) * n;
                        Real* gbrow = gb.data() + static_cast<size_t>(kk) * n;
                        for (int j = 0; j < n; ++j) gbrow[j] += s * grow[j];
                    }
            }
        };
    return y;
}

template <class Real>
Tensor<Real> transpose(Tensor<Real> a) {
    detail::require(a.shape().size() == 2, "transpose expects a 2-D tensor");
    int m = a.shape()[0], n = a.shape()[1];
    const auto& av = a.value();
    std::vector<Real> out(av.size());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) out[static_cast<size_t>(j) * m + i] = av[static_cast<size_t>(i) * n + j];
    Tape<Real>* tp = a.tape;
    bool ng = tp->node(a.id).needs_grad;
    Tensor<Real> y = tp->make({n, m}, std::move(out), ng, nullptr);
    int aid = a.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, yid, m, n]() {
            const auto& g = tp->grad_buf(yid);
            auto& ga = tp->grad_buf(aid);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j)
                    ga[static_cast<size_t>(i) * n + j] += g[static_cast<size_t>(j) * m + i];
        };
    return y;
}

// y = x * W + b with W shaped [in, out], b shaped [out].
template <class Real>
Tensor<Real> linear(Tensor<Real> x, Tensor<Real> w, Tensor<Real> b) {
    return add_rowvec(matmul(x, w), b);
}

template <class Real>
Tensor<Real> add_rowvec(Tensor<Real> a, Tensor<Real> b) {
    detail::check_same_tape<Real>({a, b});
    detail::require(a.shape().size() == 2, "add_rowvec expects a 2-D left operand");
    int m = a.shape()[0], n = a.shape()[1];
    detail::require(static_cast<int64_t>(n) == b.size(),
                    "add_rowvec: vector length " + std::to_string(b.size()) +
                        " does not match columns of " + shape_str(a.shape()));
    const auto& av = a.value();
    const auto& bv = b.value();
    std::vector<Real> out(av.size());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            out[static_cast<size_t>(i) * n + j] = av[static_cast<size_t>(i) * n + j] + bv[static_cast<size_t>(j)];
    Tape<Real>* tp = a.tape;
    bool ng = detail::any_needs_grad<Real>({a, b});
    Tensor<Real> y = tp->make(a.shape(), std::move(out), ng, nullptr);
    int aid = a.id, bid = b.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, bid, yid, m, n]() {
            const auto& g = tp->grad_buf(yid);
            if (tp->node(aid).needs_grad) {
                auto& ga = tp->grad_buf(aid);
                for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
            }
            if (tp->node(bid).needs_grad) {
                auto& gb = tp->grad_buf(bid);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < n; ++j) gb[static_cast<size_t>(j)] += g[static_cast<size_t>(i) * n + j];
            }
        };
    return y;
}

// Rows of a scaled by a constant per-row factor.
template <class Real>
Tensor<Real> scale_rows(Tensor<Real> a, const std::vector<Real>& s) {
    detail::require(a.shape().size() == 2, "scale_rows expects a 2-D tensor");
    int m = a.shape()[0], n = a.shape()[1];
    detail::require(static_cast<size_t>(m) == s.size(), "scale_rows: factor length mismatch");
    const auto& av = a.value();
    std::vector<Real> out(av.size());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            out[static_cast<size_t>(i) * n + j] = av[static_cast<size_t>(i) * n + j] * s[static_cast<size_t>(i)];
    Tape<Real>* tp = a.tape;
    bool ng = tp->node(a.id).needs_grad;
    Tensor<Real> y = tp->make(a.shape(), std::move(out), ng, nullptr);
    int aid = a.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, yid, m, n, s]() {
            const auto& g = tp->grad_buf(yid);
            auto& ga = tp->grad_buf(aid);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j)
                    ga[static_cast<size_t>(i) * n + j] += g[static_cast<size_t>(i) * n + j] * s[static_cast<size_t>(i)];
        };
    return y;
}

// Rows of a scaled by a per-row column tensor w of shape [N,1]; both receive grads.
template <class Real>
Tensor<Real> mul_colvec(Tensor<Real> a, Tensor<Real> w) {
    detail::check_same_tape<Real>({a, w});
    detail::require(a.shape().size() == 2 && w.shape().size() == 2 && w.shape()[1] == 1 &&
                        w.shape()[0] == a.shape()[0],
                    "mul_colvec: expected [N,C] and [N,1], got " + shape_str(a.shape()) + " and " +
                        shape_str(w.shape()));
    int m = a.shape()[0], n = a.shape()[1];
    const auto& av = a.value();
    const auto& wv = w.value();
    std::vector<Real> out(av.size());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            out[static_cast<size_t>(i) * n + j] = av[static_cast<size_t>(i) * n + j] * wv[static_cast<size_t>(i)];
    Tape<Real>* tp = a.tape;
    bool ng = detail::any_needs_grad<Real>({a, w});
    Tensor<Real> y = tp->make(a.shape(), std::move(out), ng, nullptr);
    int aid = a.id, wid = w.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, wid, yid, m, n]() {
            const auto& g = tp->grad_buf(yid);
            const auto& av2 = tp->node(aid).val;
            const auto& wv2 = tp->node(wid).val;
            if (tp->node(aid).needs_grad) {
                auto& ga = tp->grad_buf(aid);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < n; ++j)
                        ga[static_cast<size_t>(i) * n + j] += g[static_cast<size_t>(i) * n + j] * wv2[static_cast<size_t>(i)];
            }
            if (tp->node(wid).needs_grad) {
                auto& gw = tp->grad_buf(wid);
                for (int i = 0; i < m; ++i) {
                    Real s = 0;
                    for (int j = 0; j < n; ++j)
                        s += g[static_cast<size_t>(i) * n + j] * av2[static_cast<size_t>(i) * n + j];
                    gw[static_cast<size_t>(i)] += s;
                }
            }
        };
    return y;
}

// ---------------------------------------------------------------------------
// Shape ops

template <class Real>
Tensor<Real> concat_cols(Tensor<Real> a, Tensor<Real> b) {
    detail::check_same_tape<Real>({a, b});
    detail::require(a.shape().size() == 2 && b.shape().size() == 2 && a.shape()[0] == b.shape()[0],
                    "concat_cols: row counts differ " + shape_str(a.shape()) + " vs " +
                        shape_str(b.shape()));
    int m = a.shape()[0], ca = a.shape()[1], cb = b.shape()[1];
    const auto& av = a.value();
    const auto& bv = b.value();
    std::vector<Real> out(static_cast<size_t>(m) * (ca + cb));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < ca; ++j) out[static_cast<size_t>(i) * (ca + cb) + j] = av[static_cast<size_t>(i) * ca + j];
        for (int j = 0; j < cb; ++j) out[static_cast<size_t>(i) * (ca + cb) + ca + j] = bv[static_cast<size_t>(i) * cb + j];
    }
    Tape<Real>* tp = a.tape;
    bool ng = detail::any_needs_grad<Real>({a, b});
    Tensor<Real> y = tp->make({m, ca + cb}, std::move(out), ng, nullptr);
    int aid = a.id, bid = b.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, bid, yid, m, ca, cb]() {
            const auto& g = tp->grad_buf(yid);
            if (tp->node(aid).needs_grad) {
                auto& ga = tp->grad_buf(aid);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < ca; ++j)
                        ga[static_cast<size_t>(i) * ca + j] += g[static_cast<size_t>(i) * (ca + cb) + j];
            }
            if (tp->node(bid).needs_grad) {
                auto& gb = tp->grad_buf(bid);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < cb; ++j)
                        gb[static_cast<size_t>(i) * cb + j] += g[static_cast<size_t>(i) * (ca + cb) + ca + j];
            }
        };
    return y;
}

template <class Real>
Tensor<Real> concat_rows(const std::vector<Tensor<Real>>& parts) {
    detail::require(!parts.empty(), "concat_rows: empty input list");
    Tape<Real>* tp = parts[0].tape;
    int n = parts[0].shape().size() == 2 ? parts[0].shape()[1] : 1;
    int total = 0;
    bool ng = false;
    for (const auto& p : parts) {
        detail::require(p.tape == tp, "concat_rows: tensors from different tapes");
        int pc = p.shape().size() == 2 ? p.shape()[1] : 1;
        detail::require(pc == n, "concat_rows: column counts differ");
        total += p.shape()[0];
        ng = ng || tp->node(p.id).needs_grad;
    }
    std::vector<Real> out;
    out.reserve(static_cast<size_t>(total) * n);
    std::vector<int> ids;
    std::vector<int> row_counts;
    for (const auto& p : parts) {
        const auto& v = p.value();
        out.insert(out.end(), v.begin(), v.end());
        ids.push_back(p.id);
        row_counts.push_back(p.shape()[0]);
    }
    Tensor<Real> y = tp->make({total, n}, std::move(out), ng, nullptr);
    int yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, yid, ids, row_counts, n]() {
            const auto& g = tp->grad_buf(yid);
            size_t offset = 0;
            for (size_t p = 0; p < ids.size(); ++p) {
                size_t len = static_cast<size_t>(row_counts[p]) * n;
                if (tp->node(ids[p]).needs_grad) {
                    auto& gp = tp->grad_buf(ids[p]);
                    for (size_t i = 0; i < len; ++i) gp[i] += g[offset + i];
                }
                offset += len;
            }
        };
    return y;
}

template <class Real>
Tensor<Real> slice_rows(Tensor<Real> a, int start, int len) {
    detail::require(a.shape().size() >= 1, "slice_rows expects at least 1-D");
    int m = a.shape()[0];
    int n = a.shape().size() == 2 ? a.shape()[1] : 1;
    detail::require(start >= 0 && len >= 0 && start + len <= m, "slice_rows: out of range");
    const auto& av = a.value();
    std::vector<Real> out(av.begin() + static_cast<size_t>(start) * n,
                          av.begin() + static_cast<size_t>(start + len) * n);
    Shape sh = a.shape();
    sh[0] = len;
    Tape<Real>* tp = a.tape;
    bool ng = tp->node(a.id).needs_grad;
    Tensor<Real> y = tp->make(sh, std::move(out), ng, nullptr);
    int aid = a.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, yid, start, len, n]() {
            const auto& g = tp->grad_buf(yid);
            auto& ga = tp->grad_buf(aid);
            for (size_t i = 0; i < static_cast<size_t>(len) * n; ++i)
                ga[static_cast<size_t>(start) * n + i] += g[i];
        };
    return y;
}

template <class Real>
Tensor<Real> slice_cols(Tensor<Real> a, int start, int len) {
    detail::require(a.shape().size() == 2, "slice_cols expects a 2-D tensor");
    int m = a.shape()[0], n = a.shape()[1];
    detail::require(start >= 0 && len >= 0 && start + len <= n, "slice_cols: out of range");
    const auto& av = a.value();
    std::vector<Real> out(static_cast<size_t>(m) * len);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < len; ++j)
            out[static_cast<size_t>(i) * len + j] = av[static_cast<size_t>(i) * n + start + j];
    Tape<Real>* tp = a.tape;
    bool ng = tp->node(a.id).needs_grad;
    Tensor<Real> y = tp->make({m, len}, std::move(out), ng, nullptr);
    int aid = a.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, yid, m, n, start, len]() {
            const auto& g = tp->grad_buf(yid);
            auto& ga = tp->grad_buf(aid);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < len; ++j)
                    ga[static_cast<size_t>(i) * n + start + j] += g[static_cast<size_t>(i) * len + j];
        };
    return y;
}

template <class Real>
Tensor<Real> gather_rows(Tensor<Real> a, const std::vector<int>& idx) {
    detail::require(a.shape().size() >= 1, "gather_rows expects at least 1-D");
    int m = a.shape()[0];
    int n = a.shape().size() == 2 ? a.shape()[1] : 1;
    for (int i : idx)
        detail::require(i >= 0 && i < m, "gather_rows: index " + std::to_string(i) + " out of range");
    const auto& av = a.value();
    std::vector<Real> out(idx.size() * static_cast<size_t>(n));
    for (size_t r = 0; r < idx.size(); ++r)
        for (int j = 0; j < n; ++j)
            out[r * n + j] = av[static_cast<size_t>(idx[r]) * n + j];
    Shape sh = a.shape();
    sh[0] = static_cast<int>(idx.size());
    Tape<Real>* tp = a.tape;
    bool ng = tp->node(a.id).needs_grad;
    Tensor<Real> y = tp->make(sh, std::move(out), ng, nullptr);
    int aid = a.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, yid, idx, n]() {
            const auto& g = tp->grad_buf(yid);
            auto& ga = tp->grad_buf(aid);
            for (size_t r = 0; r < idx.size(); ++r)
                for (int j = 0; j < n; ++j)
                    ga[static_cast<size_t>(idx[r]) * n + j] += g[r * n + j];
        };
    return y;
}

// ---------------------------------------------------------------------------
// Softmax family

template <class Real>
Tensor<Real> softmax_rows(Tensor<Real> a) {
    detail::require(a.shape().size() == 2, "softmax_rows expects a 2-D tensor");
    int m = a.shape()[0], n = a.shape()[1];
    const auto& av = a.value();
    std::vector<Real> out(av.size());
    for (int i = 0; i < m; ++i) {
        const Real* row = av.data() + static_cast<size_t>(i) * n;
        Real* orow = out.data() + static_cast<size_t>(i) * n;
        Real mx = row[0];
        for (int j = 1; j < n; ++j) mx = std::max(mx, row[j]);
        Real denom = 0;
        for (int j = 0; j < n; ++j) {
            orow[j] = std::exp(row[j] - mx);
            denom += orow[j];
        }
        for (int j = 0; j < n; ++j) orow[j] /= denom;
    }
    Tape<Real>* tp = a.tape;
    bool ng = tp->node(a.id).needs_grad;
    Tensor<Real> y = tp->make(a.shape(), std::move(out), ng, nullptr);
    int aid = a.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, yid, m, n]() {
            const auto& g = tp->grad_buf(yid);
            const auto& v = tp->node(yid).val;
            auto& ga = tp->grad_buf(aid);
            for (int i = 0; i < m; ++i) {
                const Real* grow = g.data() + static_cast<size_t>(i) * n;
                const Real* vrow = v.data() + static_cast<size_t>(i) * n;
                Real dot = 0;
                for (int j = 0; j < n; ++j) dot += grow[j] * vrow[j];
                for (int j = 0; j < n; ++j)
                    ga[static_cast<size_t>(i) * n + j] += vrow[j] * (grow[j] - dot);
            }
        };
    return y;
}

// Softmax over rows sharing a group id, independently per column. Rows of one
// group need not be contiguous. Negative group ids are rejected.
template <class Real>
Tensor<Real> segment_softmax(Tensor<Real> a, const std::vector<int>& groups) {
    int m = a.shape()[0];
    int n = a.shape().size() == 2 ? a.shape()[1] : 1;
    detail::require(static_cast<size_t>(m) == groups.size(), "segment_softmax: group list length mismatch");
    int n_groups = 0;
    for (int g : groups) {
        detail::require(g >= 0, "segment_softmax: negative group id");
        n_groups = std::max(n_groups, g + 1);
    }
    const auto& av = a.value();
    std::vector<Real> out(av.size());
    std::vector<Real> mx(static_cast<size_t>(n_groups) * n, std::numeric_limits<Real>::lowest());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            mx[static_cast<size_t>(groups[i]) * n + j] =
                std::max(mx[static_cast<size_t>(groups[i]) * n + j], av[static_cast<size_t>(i) * n + j]);
    std::vector<Real> denom(static_cast<size_t>(n_groups) * n, Real(0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            Real e = std::exp(av[static_cast<size_t>(i) * n + j] - mx[static_cast<size_t>(groups[i]) * n + j]);
            out[static_cast<size_t>(i) * n + j] = e;
            denom[static_cast<size_t>(groups[i]) * n + j] += e;
        }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) out[static_cast<size_t>(i) * n + j] /= denom[static_cast<size_t>(groups[i]) * n + j];
    Tape<Real>* tp = a.tape;
    bool ng = tp->node(a.id).needs_grad;
    Tensor<Real> y = tp->make(a.shape(), std::move(out), ng, nullptr);
    int aid = a.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, yid, groups, m, n, n_groups]() {
            const auto& g = tp->grad_buf(yid);
            const auto& v = tp->node(yid).val;
            auto& ga = tp->grad_buf(aid);
            std::vector<Real> dot(static_cast<size_t>(n_groups) * n, Real(0));
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j)
                    dot[static_cast<size_t>(groups[i]) * n + j] +=
                        g[static_cast<size_t>(i) * n + j] * v[static_cast<size_t>(i) * n + j];
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j)
                    ga[static_cast<size_t>(i) * n + j] +=
                        v[static_cast<size_t>(i) * n + j] *
                        (g[static_cast<size_t>(i) * n + j] - dot[static_cast<size_t>(groups[i]) * n + j]);
        };
    return y;
}

// out[g, :] = sum of rows with group id g.
template <class Real>
Tensor<Real> segment_sum(Tensor<Real> a, const std::vector<int>& groups, int n_groups) {
    int m = a.shape()[0];
    int n = a.shape().size() == 2 ? a.shape()[1] : 1;
    detail::require(static_cast<size_t>(m) == groups.size(), "segment_sum: group list length mismatch");
    for (int g : groups)
        detail::require(g >= 0 && g < n_groups, "segment_sum: group id out of range");
    const auto& av = a.value();
    std::vector<Real> out(static_cast<size_t>(n_groups) * n, Real(0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            out[static_cast<size_t>(groups[i]) * n + j] += av[static_cast<size_t>(i) * n + j];
    Tape<Real>* tp = a.tape;
    bool ng = tp->node(a.id).needs_grad;
    Tensor<Real> y = tp->make({n_groups, n}, std::move(out), ng, nullptr);
    int aid = a.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, yid, groups, m, n]() {
            const auto& g = tp->grad_buf(yid);
            auto& ga = tp->grad_buf(aid);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j)
                    ga[static_cast<size_t>(i) * n + j] += g[static_cast<size_t>(groups[i]) * n + j];
        };
    return y;
}

// ---------------------------------------------------------------------------
// Normalization

template <class Real>
Tensor<Real> layer_norm(Tensor<Real> x, Tensor<Real> gain, Tensor<Real> bias, Real eps = Real(1e-5)) {
    detail::check_same_tape<Real>({x, gain, bias});
    detail::require(x.shape().size() == 2, "layer_norm expects a 2-D tensor");
    int m = x.shape()[0], n = x.shape()[1];
    detail::require(gain.size() == n && bias.size() == n, "layer_norm: gain/bias length mismatch");
    const auto& xv = x.value();
    const auto& gv = gain.value();
    const auto& bv = bias.value();
    std::vector<Real> out(xv.size());
    std::vector<Real> inv_std(static_cast<size_t>(m));
    std::vector<Real> means(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        const Real* row = xv.data() + static_cast<size_t>(i) * n;
        Real mu = 0;
        for (int j = 0; j < n; ++j) mu += row[j];
        mu /= n;
        Real var = 0;
        for (int j = 0; j < n; ++j) var += (row[j] - mu) * (row[j] - mu);
        var /= n;
        Real is = Real(1) / std::sqrt(var + eps);
        means[static_cast<size_t>(i)] = mu;
        inv_std[static_cast<size_t>(i)] = is;
        for (int j = 0; j < n; ++j)
            out[static_cast<size_t>(i) * n + j] = (row[j] - mu) * is * gv[static_cast<size_t>(j)] + bv[static_cast<size_t>(j)];
    }
    Tape<Real>* tp = x.tape;
    bool ng = detail::any_needs_grad<Real>({x, gain, bias});
    Tensor<Real> y = tp->make(x.shape(), std::move(out), ng, nullptr);
    int xid = x.id, gid = gain.id, bid = bias.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, xid, gid, bid, yid, m, n, means, inv_std]() {
            const auto& g = tp->grad_buf(yid);
            const auto& xv2 = tp->node(xid).val;
            const auto& gv2 = tp->node(gid).val;
            for (int i = 0; i < m; ++i) {
                Real mu = means[static_cast<size_t>(i)];
                Real is = inv_std[static_cast<size_t>(i)];
                const Real* grow = g.data() + static_cast<size_t>(i) * n;
                const Real* xrow = xv2.data() + static_cast<size_t>(i) * n;
                if (tp->node(xid).needs_grad) {
                    Real mean_gdy = 0, mean_gdy_xhat = 0;
                    for (int j = 0; j < n; ++j) {
                        Real xh = (xrow[j] - mu) * is;
                        Real gd = grow[j] * gv2[static_cast<size_t>(j)];
                        mean_gdy += gd;
                        mean_gdy_xhat += gd * xh;
                    }
                    mean_gdy /= n;
                    mean_gdy_xhat /= n;
                    auto& gx = tp->grad_buf(xid);
                    for (int j = 0; j < n; ++j) {
                        Real xh = (xrow[j] - mu) * is;
                        Real gd = grow[j] * gv2[static_cast<size_t>(j)];
                        gx[static_cast<size_t>(i) * n + j] += is * (gd - mean_gdy - xh * mean_gdy_xhat);
                    }
                }
                if (tp->node(gid).needs_grad) {
                    auto& gg = tp->grad_buf(gid);
                    for (int j = 0; j < n; ++j)
                        gg[static_cast<size_t>(j)] += grow[j] * (xrow[j] - mu) * is;
                }
                if (tp->node(bid).needs_grad) {
                    auto& gb = tp->grad_buf(bid);
                    for (int j = 0; j < n; ++j) gb[static_cast<size_t>(j)] += grow[j];
                }
            }
        };
    return y;
}

template <class Real>
Tensor<Real> rms_norm(Tensor<Real> x, Tensor<Real> gain, Real eps = Real(1e-5)) {
    detail::check_same_tape<Real>({x, gain});
    detail::require(x.shape().size() == 2, "rms_norm expects a 2-D tensor");
    int m = x.shape()[0], n = x.shape()[1];
    detail::require(gain.size() == n, "rms_norm: gain length mismatch");
    const auto& xv = x.value();
    const auto& gv = gain.value();
    std::vector<Real> out(xv.size());
    std::vector<Real> inv_rms(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        const Real* row = xv.data() + static_cast<size_t>(i) * n;
        Real ms = 0;
        for (int j = 0; j < n; ++j) ms += row[j] * row[j];
        ms /= n;
        Real ir = Real(1) / std::sqrt(ms + eps);
        inv_rms[static_cast<size_t>(i)] = ir;
        for (int j = 0; j < n; ++j)
            out[static_cast<size_t>(i) * n + j] = row[j] * ir * gv[static_cast<size_t>(j)];
    }
    Tape<Real>* tp = x.tape;
    bool ng = detail::any_needs_grad<Real>({x, gain});
    Tensor<Real> y = tp->make(x.shape(), std::move(out), ng, nullptr);
    int xid = x.id, gid = gain.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, xid, gid, yid, m, n, inv_rms]() {
            const auto& g = tp->grad_buf(yid);
            const auto& xv2 = tp->node(xid).val;
            const auto& gv2 = tp->node(gid).val;
            for (int i = 0; i < m; ++i) {
                Real ir = inv_rms[static_cast<size_t>(i)];
                const Real* grow = g.data() + static_cast<size_t>(i) * n;
                const Real* xrow = xv2.data() + static_cast<size_t>(i) * n;
                if (tp->node(xid).needs_grad) {
                    Real dot = 0;
                    for (int j = 0; j < n; ++j) dot += grow[j] * gv2[static_cast<size_t>(j)] * xrow[j];
                    auto& gx = tp->grad_buf(xid);
                    for (int j = 0; j < n; ++j)
                        gx[static_cast<size_t>(i) * n + j] +=
                            ir * grow[j] * gv2[static_cast<size_t>(j)] - xrow[j] * ir * ir * ir * dot / n;
                }
                if (tp->node(gid).needs_grad) {
                    auto& gg = tp->grad_buf(gid);
                    for (int j = 0; j < n; ++j) gg[static_cast<size_t>(j)] += grow[j] * xrow[j] * ir;
                }
            }
        };
    return y;
}

template <class Real>
Tensor<Real> l2_normalize_rows(Tensor<Real> x, Real eps = Real(1e-12)) {
    detail::require(x.shape().size() == 2, "l2_normalize_rows expects a 2-D tensor");
    int m = x.shape()[0], n = x.shape()[1];
    const auto& xv = x.value();
    std::vector<Real> out(xv.size());
    std::vector<Real> inv_norm(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        const Real* row = xv.data() + static_cast<size_t>(i) * n;
        Real s = 0;
        for (int j = 0; j < n; ++j) s += row[j] * row[j];
        Real nrm = std::sqrt(s);
        Real in = nrm > eps ? Real(1) / nrm : Real(0);
        inv_norm[static_cast<size_t>(i)] = in;
        for (int j = 0; j < n; ++j) out[static_cast<size_t>(i) * n + j] = row[j] * in;
    }
    Tape<Real>* tp = x.tape;
    bool ng = tp->node(x.id).needs_grad;
    Tensor<Real> y = tp->make(x.shape(), std::move(out), ng, nullptr);
    int xid = x.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, xid, yid, m, n, inv_norm]() {
            const auto& g = tp->grad_buf(yid);
            const auto& xv2 = tp->node(xid).val;
            auto& gx = tp->grad_buf(xid);
            for (int i = 0; i < m; ++i) {
                Real in = inv_norm[static_cast<size_t>(i)];
                if (in == Real(0)) continue;
                const Real* grow = g.data() + static_cast<size_t>(i) * n;
                const Real* xrow = xv2.data() + static_cast<size_t>(i) * n;
                Real dot = 0;
                for (int j = 0; j < n; ++j) dot += grow[j] * xrow[j];
                for (int j = 0; j < n; ++j)
                    gx[static_cast<size_t>(i) * n + j] += in * grow[j] - xrow[j] * in * in * in * dot;
            }
        };
    return y;
}

// ---------------------------------------------------------------------------
// Reductions

template <class Real>
Tensor<Real> sum(Tensor<Real> a) {
    const auto& av = a.value();
    Real s = 0;
    for (Real v : av) s += v;
    Tape<Real>* tp = a.tape;
    bool ng = tp->node(a.id).needs_grad;
    Tensor<Real> y = tp->make({1}, {s}, ng, nullptr);
    int aid = a.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, yid]() {
            Real g = tp->grad_buf(yid)[0];
            auto& ga = tp->grad_buf(aid);
            for (auto& v : ga) v += g;
        };
    return y;
}

template <class Real>
Tensor<Real> mean(Tensor<Real> a) {
    int64_t n = a.size();
    detail::require(n > 0, "mean of an empty tensor");
    return scale(sum(a), Real(1) / static_cast<Real>(n));
}

template <class Real>
Tensor<Real> rowwise_dot(Tensor<Real> a, Tensor<Real> b) {
    detail::check_same_tape<Real>({a, b});
    detail::require(a.shape() == b.shape() && a.shape().size() == 2,
                    "rowwise_dot: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    int m = a.shape()[0], n = a.shape()[1];
    const auto& av = a.value();
    const auto& bv = b.value();
    std::vector<Real> out(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        Real s = 0;
        for (int j = 0; j < n; ++j)
            s += av[static_cast<size_t>(i) * n + j] * bv[static_cast<size_t>(i) * n + j];
        out[static_cast<size_t>(i)] = s;
    }
    Tape<Real>* tp = a.tape;
    bool ng = detail::any_needs_grad<Real>({a, b});
    Tensor<Real> y = tp->make({m, 1}, std::move(out), ng, nullptr);
    int aid = a.id, bid = b.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, bid, yid, m, n]() {
            const auto& g = tp->grad_buf(yid);
            const auto& av2 = tp->node(aid).val;
            const auto& bv2 = tp->node(bid).val;
            if (tp->node(aid).needs_grad) {
                auto& ga = tp->grad_buf(aid);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < n; ++j)
                        ga[static_cast<size_t>(i) * n + j] += g[static_cast<size_t>(i)] * bv2[static_cast<size_t>(i) * n + j];
            }
            if (tp->node(bid).needs_grad) {
                auto& gb = tp->grad_buf(bid);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < n; ++j)
                        gb[static_cast<size_t>(i) * n + j] += g[static_cast<size_t>(i)] * av2[static_cast<size_t>(i) * n + j];
            }
        };
    return y;
}

// log(sum(exp(a))) over all entries, stabilized.
template <class Real>
Tensor<Real> logsumexp(Tensor<Real> a) {
    const auto& av = a.value();
    detail::require(!av.empty(), "logsumexp of an empty tensor");
    Real mx = av[0];
    for (Real v : av) mx = std::max(mx, v);
    Real s = 0;
    for (Real v : av) s += std::exp(v - mx);
    Real out = mx + std::log(s);
    Tape<Real>* tp = a.tape;
    bool ng = tp->node(a.id).needs_grad;
    Tensor<Real> y = tp->make({1}, {out}, ng, nullptr);
    int aid = a.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, aid, yid, out]() {
            Real g = tp->grad_buf(yid)[0];
            const auto& av2 = tp->node(aid).val;
            auto& ga = tp->grad_buf(aid);
            for (size_t i = 0; i < av2.size(); ++i) ga[i] += g * std::exp(av2[i] - out);
        };
    return y;
}

// ---------------------------------------------------------------------------
// Rotary position encoding: rows of x are [heads * head_dim]; each head's
// pairs (2k, 2k+1) are rotated by pos * base^(-2k/head_dim). An orthogonal
// per-row map, so the backward pass applies the inverse rotation.
template <class Real>
Tensor<Real> rope_rows(Tensor<Real> x, const std::vector<int>& positions, int head_dim,
                       double base = 10000.0) {
    detail::require(x.shape().size() == 2, "rope_rows expects a 2-D tensor");
    int m = x.shape()[0], n = x.shape()[1];
    detail::require(head_dim > 0 && head_dim % 2 == 0, "rope_rows: head_dim must be even");
    detail::require(n % head_dim == 0, "rope_rows: columns not divisible by head_dim");
    detail::require(positions.size() == static_cast<size_t>(m), "rope_rows: position list length mismatch");
    int heads = n / head_dim;
    const auto& xv = x.value();
    std::vector<Real> out(xv.size());
    auto rotate = [&](const Real* in, Real* o, int pos, int sign) {
        for (int h = 0; h < heads; ++h) {
            for (int k = 0; k < head_dim / 2; ++k) {
                double theta = pos * std::pow(base, -2.0 * k / head_dim) * sign;
                Real c = static_cast<Real>(std::cos(theta));
                Real s = static_cast<Real>(std::sin(theta));
                int i0 = h * head_dim + 2 * k, i1 = i0 + 1;
                Real a = in[i0], b = in[i1];
                o[i0] = a * c - b * s;
                o[i1] = a * s + b * c;
            }
        }
    };
    for (int i = 0; i < m; ++i)
        rotate(xv.data() + static_cast<size_t>(i) * n, out.data() + static_cast<size_t>(i) * n,
               positions[static_cast<size_t>(i)], 1);
    Tape<Real>* tp = x.tape;
    bool ng = tp->node(x.id).needs_grad;
    Tensor<Real> y = tp->make(x.shape(), std::move(out), ng, nullptr);
    int xid = x.id, yid = y.id;
    if (ng)
        tp->node(yid).back = [tp, xid, yid, positions, m, n, heads, head_dim, base]() {
            const auto& g = tp->grad_buf(yid);
            auto& gx = tp->grad_buf(xid);
            std::vector<Real> tmp(static_cast<size_t>(n));
            for (int i = 0; i < m; ++i) {
                const Real* grow = g.data() + static_cast<size_t>(i) * n;
                for (int h = 0; h < heads; ++h)
                    for (int k = 0; k < head_dim / 2; ++k) {
                        double theta = positions[static_cast<size_t>(i)] * std::pow(base, -2.0 * k / head_dim);
                        Real c = static_cast<Real>(std::cos(theta));
                        Real s = static_cast<Real>(std::sin(theta));
                        int i0 = h * head_dim + 2 * k, i1 = i0 + 1;
                        tmp[static_cast<size_t>(i0)] = grow[i0] * c + grow[i1] * s;
                        tmp[static_cast<size_t>(i1)] = -grow[i0] * s + grow[i1] * c;
                    }
                for (int j = 0; j < n; ++j) gx[static_cast<size_t>(i) * n + j] += tmp[static_cast<size_t>(j)];
            }
        };
    return y;
}

}  // namespace graphlit
