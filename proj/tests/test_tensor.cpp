#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "graphlit/grad_check.hpp"
#include "graphlit/ops.hpp"
#include "graphlit/optim.hpp"
#include "graphlit/rng.hpp"
#include "graphlit/tensor.hpp"

using namespace graphlit;

namespace {

std::vector<double> random_vec(size_t n, Rng& rng, double lo = -1.5, double hi = 1.5) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

// Builds a scalar probe loss sum(op_output * R) with a fixed random projection
// R so every output coordinate contributes to the gradient.
template <class OpFn>
GradCheckReport check_op(OpFn op, Shape in_shape, Rng& rng, double lo = -1.5, double hi = 1.5) {
    size_t n = static_cast<size_t>(shape_size(in_shape));
    std::vector<double> x0 = random_vec(n, rng, lo, hi);
    std::vector<double> proj;
    auto f = [&](const std::vector<double>& x, std::vector<double>* grad_out) -> double {
        Tape<double> tape;
        Tensor<double> in = tape.leaf(in_shape, x, true);
        Tensor<double> out = op(tape, in);
        if (proj.empty()) {
            Rng prng(99);
            proj = random_vec(static_cast<size_t>(out.size()), prng, 0.5, 1.5);
        }
        Tensor<double> p = tape.constant(out.shape(), std::vector<double>(proj.begin(), proj.end()));
        Tensor<double> loss = sum(mul(out, p));
        double val = loss.scalar();
        if (grad_out) {
            tape.backward(loss);
            *grad_out = tape.grad_buf(in.id);
        }
        return val;
    };
    return grad_check(f, x0);
}

}  // namespace

TEST_CASE("matmul against identity") {
    Tape<float> tape;
    auto a = tape.constant({2, 2}, {1, 2, 3, 4});
    auto eye = tape.constant({2, 2}, {1, 0, 0, 1});
    auto y = matmul(a, eye);
    CHECK(y.value() == std::vector<float>{1, 2, 3, 4});
}

TEST_CASE("softmax of equal logits is uniform") {
    Tape<float> tape;
    auto a = tape.constant({1, 2}, {0.f, 0.f});
    auto y = softmax_rows(a);
    CHECK(y.value()[0] == doctest::Approx(0.5));
    CHECK(y.value()[1] == doctest::Approx(0.5));
}

TEST_CASE("analytic gradient of sum of squares") {
    Tape<double> tape;
    auto x = tape.leaf({3}, {1, 2, 3}, true);
    auto loss = sum(mul(x, x));
    tape.backward(loss);
    auto& g = tape.grad_buf(x.id);
    CHECK(g[0] == doctest::Approx(2).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(4).epsilon(1e-12));
    CHECK(g[2] == doctest::Approx(6).epsilon(1e-12));

    auto f = [](const std::vector<double>& x, std::vector<double>* grad_out) {
        Tape<double> t;
        auto in = t.leaf({3}, x, true);
        auto l = sum(mul(in, in));
        if (grad_out) {
            t.backward(l);
            *grad_out = t.grad_buf(in.id);
        }
        return l.scalar();
    };
    auto rep = grad_check(f, {1, 2, 3});
    CHECK(rep.max_rel_error < 1e-7);
}

TEST_CASE("shape mismatch errors name the shapes") {
    Tape<float> tape;
    auto a = tape.constant({2, 3}, std::vector<float>(6, 1.f));
    auto b = tape.constant({2, 2}, std::vector<float>(4, 1.f));
    CHECK_THROWS_WITH_AS(add(a, b), doctest::Contains("[2,3]"), std::runtime_error);
}

TEST_CASE("finite differences over every primitive, randomized shapes, 3 seeds") {
    for (uint64_t seed : {11u, 22u, 33u}) {
        Rng rng(seed);
        int m = 2 + static_cast<int>(rng.next_below(3));
        int n = 2 + static_cast<int>(rng.next_below(3));
        Shape mat{m, n};

        auto expect_pass = [&](const char* name, GradCheckReport rep) {
            INFO(name << " max rel err " << rep.max_rel_error);
            CHECK(rep.passed(1e-6));
        };

        expect_pass("neg", check_op([](Tape<double>& t, Tensor<double> x) { return neg(x); }, mat, rng));
        expect_pass("scale", check_op([](Tape<double>& t, Tensor<double> x) { return scale(x, 1.7); }, mat, rng));
        expect_pass("add_scalar",
                    check_op([](Tape<double>& t, Tensor<double> x) { return add_scalar(x, 0.3); }, mat, rng));
        expect_pass("exp", check_op([](Tape<double>& t, Tensor<double> x) { return exp_t(x); }, mat, rng));
        expect_pass("log",
                    check_op([](Tape<double>& t, Tensor<double> x) { return log_t(x); }, mat, rng, 0.2, 2.0));
        expect_pass("sqrt",
                    check_op([](Tape<double>& t, Tensor<double> x) { return sqrt_t(x); }, mat, rng, 0.2, 2.0));
        expect_pass("pow",
                    check_op([](Tape<double>& t, Tensor<double> x) { return pow_scalar(x, 2.0); }, mat, rng, 0.2, 2.0));
        expect_pass("sigmoid", check_op([](Tape<double>& t, Tensor<double> x) { return sigmoid(x); }, mat, rng));
        expect_pass("log_sigmoid",
                    check_op([](Tape<double>& t, Tensor<double> x) { return log_sigmoid(x); }, mat, rng));
        expect_pass("gelu", check_op([](Tape<double>& t, Tensor<double> x) { return gelu(x); }, mat, rng));
        expect_pass("silu", check_op([](Tape<double>& t, Tensor<double> x) { return silu(x); }, mat, rng));
        expect_pass("softmax_rows",
                    check_op([](Tape<double>& t, Tensor<double> x) { return softmax_rows(x); }, mat, rng));
        expect_pass("transpose",
                    check_op([](Tape<double>& t, Tensor<double> x) { return transpose(x); }, mat, rng));
        expect_pass("sum", check_op([](Tape<double>& t, Tensor<double> x) { return sum(x); }, mat, rng));
        expect_pass("mean", check_op([](Tape<double>& t, Tensor<double> x) { return mean(x); }, mat, rng));
        expect_pass("logsumexp",
                    check_op([](Tape<double>& t, Tensor<double> x) { return logsumexp(x); }, mat, rng));
        expect_pass("l2_normalize_rows",
                    check_op([](Tape<double>& t, Tensor<double> x) { return l2_normalize_rows(x); }, mat, rng, 0.3, 1.5));
        expect_pass("slice_rows",
                    check_op([m](Tape<double>& t, Tensor<double> x) { return slice_rows(x, 1, m - 1); }, mat, rng));
        expect_pass("slice_cols",
                    check_op([n](Tape<double>& t, Tensor<double> x) { return slice_cols(x, 1, n - 1); }, mat, rng));

        std::vector<int> gather_idx = {0, m - 1, 0};
        expect_pass("gather_rows", check_op(
                                       [gather_idx](Tape<double>& t, Tensor<double> x) {
                                           return gather_rows(x, gather_idx);
                                       },
                                       mat, rng));

        std::vector<int> groups(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i) groups[static_cast<size_t>(i)] = i / 2;
        int n_groups = (m + 1) / 2;
        expect_pass("segment_softmax", check_op(
                                           [groups](Tape<double>& t, Tensor<double> x) {
                                               return segment_softmax(x, groups);
                                           },
                                           mat, rng));
        expect_pass("segment_sum", check_op(
                                       [groups, n_groups](Tape<double>& t, Tensor<double> x) {
                                           return segment_sum(x, groups, n_groups);
                                       },
                                       mat, rng));

        std::vector<int> positions(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i) positions[static_cast<size_t>(i)] = i;
        expect_pass("rope_rows", check_op(
                                     [positions](Tape<double>& t, Tensor<double> x) {
                                         return rope_rows(x, positions, 2);
                                     },
                                     Shape{m, 4}, rng));

        // Binary ops: check both operands jointly by splitting the flat input.
        auto check_binary = [&](const char* name, auto fn, Shape sa, Shape sb) {
            size_t na = static_cast<size_t>(shape_size(sa));
            size_t nb = static_cast<size_t>(shape_size(sb));
            std::vector<double> x0 = random_vec(na + nb, rng, 0.3, 1.5);
            std::vector<double> proj;
            auto f = [&](const std::vector<double>& x, std::vector<double>* grad_out) -> double {
                Tape<double> tape;
                auto a = tape.leaf(sa, std::vector<double>(x.begin(), x.begin() + na), true);
                auto b = tape.leaf(sb, std::vector<double>(x.begin() + na, x.end()), true);
                Tensor<double> out = fn(tape, a, b);
                if (proj.empty()) {
                    Rng prng(7);
                    proj = random_vec(static_cast<size_t>(out.size()), prng, 0.5, 1.5);
                }
                auto p = tape.constant(out.shape(), std::vector<double>(proj.begin(), proj.end()));
                auto loss = sum(mul(out, p));
                if (grad_out) {
                    tape.backward(loss);
                    grad_out->assign(na + nb, 0.0);
                    auto& ga = tape.grad_buf(a.id);
                    auto& gb = tape.grad_buf(b.id);
                    std::copy(ga.begin(), ga.end(), grad_out->begin());
                    std::copy(gb.begin(), gb.end(), grad_out->begin() + static_cast<long>(na));
                }
                return loss.scalar();
            };
            auto rep = grad_check(f, x0);
            INFO(name << " max rel err " << rep.max_rel_error);
            CHECK(rep.passed(1e-6));
        };

        check_binary("add", [](Tape<double>&, auto a, auto b) { return add(a, b); }, mat, mat);
        check_binary("sub", [](Tape<double>&, auto a, auto b) { return sub(a, b); }, mat, mat);
        check_binary("mul", [](Tape<double>&, auto a, auto b) { return mul(a, b); }, mat, mat);
        check_binary("divide", [](Tape<double>&, auto a, auto b) { return divide(a, b); }, mat, mat);
        check_binary("matmul", [](Tape<double>&, auto a, auto b) { return matmul(a, b); }, Shape{m, n},
                     Shape{n, m});
        check_binary("add_rowvec", [](Tape<double>&, auto a, auto b) { return add_rowvec(a, b); }, mat,
                     Shape{n});
        check_binary("concat_cols", [](Tape<double>&, auto a, auto b) { return concat_cols(a, b); }, mat, mat);
        check_binary("rowwise_dot", [](Tape<double>&, auto a, auto b) { return rowwise_dot(a, b); }, mat, mat);
        check_binary("mul_colvec", [](Tape<double>&, auto a, auto b) { return mul_colvec(a, b); }, mat,
                     Shape{m, 1});
        check_binary("concat_rows",
                     [](Tape<double>&, auto a, auto b) {
                         return concat_rows(std::vector<Tensor<double>>{a, b});
                     },
                     mat, mat);
        check_binary("layer_norm",
                     [](Tape<double>& t, auto a, auto b) {
                         auto bias = t.leaf({b.size() > 0 ? static_cast<int>(b.size()) : 1},
                                            std::vector<double>(static_cast<size_t>(b.size()), 0.1), true);
                         return layer_norm(a, b, bias);
                     },
                     mat, Shape{n});
        check_binary("rms_norm", [](Tape<double>&, auto a, auto b) { return rms_norm(a, b); }, mat, Shape{n});
    }
}

TEST_CASE("segment softmax examples") {
    Tape<float> tape;
    auto v = tape.constant({3, 1}, {0.f, 0.f, 0.f});
    auto y = segment_softmax(v, {0, 0, 1});
    CHECK(y.value()[0] == doctest::Approx(0.5));
    CHECK(y.value()[1] == doctest::Approx(0.5));
    CHECK(y.value()[2] == doctest::Approx(1.0));

    auto v2 = tape.constant({2, 1}, {std::log(2.f), 0.f});
    auto y2 = segment_softmax(v2, {0, 0});
    CHECK(y2.value()[0] == doctest::Approx(2.0 / 3.0));
    CHECK(y2.value()[1] == doctest::Approx(1.0 / 3.0));

    Rng rng(5);
    std::vector<float> vals(12);
    for (auto& x : vals) x = static_cast<float>(rng.uniform(-2, 2));
    std::vector<int> groups = {0, 0, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3};
    auto y3 = segment_softmax(tape.constant({12, 1}, vals), groups);
    std::vector<double> sums(4, 0.0);
    for (int i = 0; i < 12; ++i) sums[static_cast<size_t>(groups[static_cast<size_t>(i)])] += y3.value()[static_cast<size_t>(i)];
    for (double s : sums) CHECK(s == doctest::Approx(1.0).epsilon(1e-6));

    CHECK_THROWS_AS(segment_softmax(v, std::vector<int>{0, -1, 0}), std::runtime_error);
}

TEST_CASE("adamw single step matches hand evaluation") {
    // theta=1, g=1, lr=0.001, wd=0 -> theta' ~= 0.999
    ParamStore<double> ps;
    ps.add("w", {1}, {1.0});
    ps.at("w").grad[0] = 1.0;
    AdamWConfig cfg;
    cfg.lr = 0.001;
    cfg.weight_decay = 0.0;
    AdamW<double> opt(cfg);
    opt.step(ps);
    CHECK(ps.at("w").value[0] == doctest::Approx(1.0 - 0.001 * (1.0 / (1.0 + 1e-8))).epsilon(1e-12));

    // g=0, wd=0 -> unchanged
    ParamStore<double> ps2;
    ps2.add("w", {1}, {1.0});
    AdamW<double> opt2(cfg);
    opt2.step(ps2);
    CHECK(ps2.at("w").value[0] == doctest::Approx(1.0).epsilon(1e-15));

    // decoupled decay only: wd=0.001, g=0, lr=0.0005, theta=1 -> 0.9999995
    ParamStore<double> ps3;
    ps3.add("w", {1}, {1.0});
    AdamWConfig cfg3;
    cfg3.lr = 0.0005;
    cfg3.weight_decay = 0.001;
    AdamW<double> opt3(cfg3);
    opt3.step(ps3);
    CHECK(ps3.at("w").value[0] == doctest::Approx(0.9999995).epsilon(1e-12));
}

TEST_CASE("nan gradient aborts the step") {
    ParamStore<double> ps;
    ps.add("w", {1}, {1.0});
    ps.at("w").grad[0] = std::nan("");
    AdamW<double> opt;
    CHECK_THROWS_AS(opt.step(ps), std::runtime_error);
}

TEST_CASE("backward accumulation is linear") {
    auto run = [](bool joint) {
        Tape<double> tape;
        auto x = tape.leaf({2}, {0.7, -0.3}, true);
        auto l1 = sum(mul(x, x));
        auto l2 = sum(exp_t(x));
        if (joint) {
            tape.backward(add(l1, l2));
        } else {
            tape.backward(l1);
            tape.backward(l2);
        }
        return tape.grad_buf(x.id);
    };
    auto a = run(true);
    auto b = run(false);
    CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-12));
    CHECK(a[1] == doctest::Approx(b[1]).epsilon(1e-12));
}

TEST_CASE("identical seeds give bit-identical parameter trajectories") {
    auto run = [](uint64_t seed) {
        Rng rng(seed);
        ParamStore<float> ps;
        ps.add("w", {4, 4}, init_linear_weight<float>(4, 4, rng));
        AdamW<float> opt;
        for (int step = 0; step < 25; ++step) {
            Tape<float> tape;
            auto w = use_param(tape, ps.at("w"));
            auto loss = sum(mul(w, w));
            ps.zero_grad();
            tape.backward(loss);
            opt.step(ps);
        }
        return ps.at("w").value;
    };
    auto a = run(123), b = run(123);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
}
