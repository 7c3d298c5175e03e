#pragma once
// Dense-tensor reverse-mode autodiff. A Tape owns every intermediate of one
// forward pass; Tensor is a cheap handle into it. Parameters live outside the
// tape (ParamStore) and are mounted as leaves, so a tape can be discarded
// after each optimizer step while gradients accumulate in the store.
//
// Real is float for training and double for finite-difference verification.

#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphlit/rng.hpp"

namespace graphlit {

using Shape = std::vector<int>;

inline int64_t shape_size(const Shape& s) {
    int64_t n = 1;
    for (int d : s) n *= d;
    return n;
}

inline std::string shape_str(const Shape& s) {
    std::string out = "[";
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

template <class Real>
struct ParamStore;

template <class Real>
class Tape;

template <class Real>
struct Tensor {
    Tape<Real>* tape = nullptr;
    int id = -1;

    bool valid() const { return tape != nullptr && id >= 0; }
    const Shape& shape() const;
    int64_t size() const;
    const std::vector<Real>& value() const;
    int rows() const { return shape().at(0); }
    int cols() const { return shape().size() > 1 ? shape().at(1) : 1; }
    Real scalar() const {
        if (size() != 1) throw std::runtime_error("tensor is not a scalar: " + shape_str(shape()));
        return value()[0];
    }
};

template <class Real>
class Tape {
public:
    struct Node {
        Shape shape;
        std::vector<Real> val;
        std::vector<Real> grad;
        bool needs_grad = false;
        // Propagates this node's grad to its inputs. Null for leaves.
        std::function<void()> back;
        // For parameter leaves: flush accumulated grad into the store.
        std::function<void()> flush;
    };

    bool debug_checks = false;

    Tensor<Real> leaf(Shape shape, std::vector<Real> data, bool needs_grad) {
        check_size(shape, data.size());
        nodes_.push_back(Node{std::move(shape), std::move(data), {}, needs_grad, nullptr, nullptr});
        return Tensor<Real>{this, static_cast<int>(nodes_.size()) - 1};
    }

    Tensor<Real> constant(Shape shape, std::vector<Real> data) {
        return leaf(std::move(shape), std::move(data), false);
    }

    Tensor<Real> scalar_constant(Real v) { return constant({1}, {v}); }

    Tensor<Real> make(Shape shape, std::vector<Real> data, bool needs_grad, std::function<void()> back) {
        check_size(shape, data.size());
        if (debug_checks) {
            for (Real v : data)
                if (!std::isfinite(static_cast<double>(v)))
                    throw std::runtime_error("non-finite value produced by a forward op");
        }
        nodes_.push_back(Node{std::move(shape), std::move(data), {}, needs_grad, std::move(back), nullptr});
        return Tensor<Real>{this, static_cast<int>(nodes_.size()) - 1};
    }

    Node& node(int id) { return nodes_.at(id); }
    const Node& node(int id) const { return nodes_.at(id); }

    std::vector<Real>& grad_buf(int id) {
        Node& n = nodes_.at(id);
        if (n.grad.empty()) n.grad.assign(n.val.size(), Real(0));
        return n.grad;
    }

    // Reverse pass from a scalar loss. Interior gradients are consumed as they
    // propagate, so several backward calls on one tape accumulate additively
    // at the leaves (and in the parameter store) without double counting.
    void backward(const Tensor<Real>& loss) {
        if (loss.tape != this) throw std::runtime_error("backward: tensor belongs to another tape");
        if (loss.size() != 1) throw std::runtime_error("backward requires a scalar loss");
        grad_buf(loss.id)[0] += Real(1);
        for (int i = loss.id; i >= 0; --i) {
            Node& n = nodes_[static_cast<size_t>(i)];
            if (!n.needs_grad || n.grad.empty()) continue;
            if (n.back) {
                n.back();
                n.grad.clear();
            } else if (n.flush) {
                n.flush();
                n.grad.clear();
            }
        }
    }

    size_t node_count() const { return nodes_.size(); }

private:
    static void check_size(const Shape& s, size_t len) {
        if (shape_size(s) != static_cast<int64_t>(len))
            throw std::runtime_error("shape " + shape_str(s) + " does not match buffer length " +
                                     std::to_string(len));
    }

    std::vector<Node> nodes_;
};

template <class Real>
const Shape& Tensor<Real>::shape() const { return tape->node(id).shape; }
template <class Real>
int64_t Tensor<Real>::size() const { return shape_size(tape->node(id).shape); }
template <class Real>
const std::vector<Real>& Tensor<Real>::value() const { return tape->node(id).val; }

// ---------------------------------------------------------------------------
// Parameters

template <class Real>
struct ParamStore {
    struct Entry {
        std::string name;
        Shape shape;
        std::vector<Real> value;
        std::vector<Real> grad;
        // AdamW moments.
        std::vector<Real> m, v;
    };

    std::vector<Entry> entries;
    std::map<std::string, int> index;

    int add(const std::string& name, Shape shape, std::vector<Real> init) {
        if (index.count(name)) throw std::runtime_error("duplicate parameter name: " + name);
        if (shape_size(shape) != static_cast<int64_t>(init.size()))
            throw std::runtime_error("parameter " + name + ": init size mismatch");
        Entry e;
        e.name = name;
        e.shape = std::move(shape);
        size_t n = init.size();
        e.value = std::move(init);
        e.grad.assign(n, Real(0));
        e.m.assign(n, Real(0));
        e.v.assign(n, Real(0));
        entries.push_back(std::move(e));
        index[name] = static_cast<int>(entries.size()) - 1;
        return index[name];
    }

    Entry& at(const std::string& name) {
        auto it = index.find(name);
        if (it == index.end()) throw std::runtime_error("unknown parameter: " + name);
        return entries[static_cast<size_t>(it->second)];
    }
    const Entry& at(const std::string& name) const {
        auto it = index.find(name);
        if (it == index.end()) throw std::runtime_error("unknown parameter: " + name);
        return entries[static_cast<size_t>(it->second)];
    }

    void zero_grad() {
        for (auto& e : entries) std::fill(e.grad.begin(), e.grad.end(), Real(0));
    }

    int64_t total_parameters() const {
        int64_t n = 0;
        for (const auto& e : entries) n += shape_size(e.shape);
        return n;
    }

    // Sum of parameter counts over entries whose name starts with prefix.
    int64_t count_prefix(const std::string& prefix) const {
        int64_t n = 0;
        for (const auto& e : entries)
            if (e.name.rfind(prefix, 0) == 0) n += shape_size(e.shape);
        return n;
    }

    template <class Other>
    ParamStore<Other> cast() const {
        ParamStore<Other> out;
        for (const auto& e : entries) {
            std::vector<Other> v(e.value.size());
            for (size_t i = 0; i < v.size(); ++i) v[i] = static_cast<Other>(e.value[i]);
            out.add(e.name, e.shape, std::move(v));
        }
        return out;
    }
};

// Mounts a parameter onto the tape; backward accumulates into entry.grad.
template <class Real>
Tensor<Real> use_param(Tape<Real>& tape, typename ParamStore<Real>::Entry& entry) {
    Tensor<Real> t = tape.leaf(entry.shape, entry.value, true);
    auto* node = &tape.node(t.id);
    auto* grad_out = &entry.grad;
    Tape<Real>* tp = t.tape;
    int id = t.id;
    node->flush = [tp, id, grad_out]() {
        auto& g = tp->grad_buf(id);
        for (size_t i = 0; i < g.size(); ++i) (*grad_out)[i] += g[i];
    };
    return t;
}

// ---------------------------------------------------------------------------
// Initializers

template <class Real>
std::vector<Real> init_linear_weight(int out_dim, int in_dim, Rng& rng) {
    double bound = std::sqrt(6.0 / (in_dim + out_dim));
    std::vector<Real> w(static_cast<size_t>(out_dim) * in_dim);
    for (auto& x : w) x = static_cast<Real>(rng.uniform(-bound, bound));
    return w;
}

template <class Real>
std::vector<Real> init_zeros(int64_t n) {
    return std::vector<Real>(static_cast<size_t>(n), Real(0));
}

template <class Real>
std::vector<Real> init_ones(int64_t n) {
    return std::vector<Real>(static_cast<size_t>(n), Real(1));
}

template <class Real>
std::vector<Real> init_normal(int64_t n, double stddev, Rng& rng) {
    std::vector<Real> v(static_cast<size_t>(n));
    for (auto& x : v) x = static_cast<Real>(rng.normal() * stddev);
    return v;
}

}  // namespace graphlit
