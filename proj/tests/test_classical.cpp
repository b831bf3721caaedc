#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "wsie/classical.hpp"
#include "wsie/errors.hpp"

using namespace wsie;

namespace {

std::vector<double> random_vector(std::size_t n, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

std::vector<double> oracle_f(const ProblemInstance& p, const Discretization& d) {
    std::vector<double> f;
    for (double t : d.rule.nodes) {
        f.push_back(d.line_integral == LineIntegralSource::Exact
                        ? exact_line_integral(p.kernel, p.a, p.b, t)
                        : oracle::midpoint_line_integral(p, static_cast<int>(d.rule.size()), d.delta_n, t));
    }
    return f;
}

// p = 1 rule at s = 0 with exact f(0) = 1: F_n(x) = x - N(x) - y
std::pair<ProblemInstance, Discretization> one_node_problem(Nonlinearity nl, double y) {
    auto [p, d] = register_example(1);
    p.nonlinearity = std::move(nl);
    p.forcing = [y](double) { return y; };
    p.exact_solution.reset();
    p.forcing_mode = ForcingMode::ClosedForm;
    d.rule = left_endpoint_rule(0, 1, 2);
    d.delta_n = 1e-3;
    d.line_integral = LineIntegralSource::Exact;
    return {p, d};
}

}  // namespace

TEST_CASE("F_n agrees with an entrywise evaluation of its defining formula") {
    std::mt19937_64 rng(1);
    for (int id : {1, 2}) {
        auto [p, d] = register_example(id);
        for (auto source : {LineIntegralSource::CoarseMidpoint, LineIntegralSource::Exact}) {
            d.line_integral = source;
            const auto c = build_coarse_system(p, d);
            const auto f = oracle_f(p, d);
            for (int trial = 0; trial < 5; ++trial) {
                const auto x = random_vector(c.size(), -2, 2, rng);
                const auto got = assemble_residual_Fn(x, p, c);
                const auto want = oracle::classical_residual(p, d.rule, d.delta_n, f, x);
                for (std::size_t i = 0; i < x.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("F_n at the exact solutions") {
    {
        const auto [p, d] = register_example(2);
        const auto F = assemble_residual_Fn(GridFunction{d.rule.nodes, std::vector<double>(100, -0.5)}, p, d);
        // nonzero through the midpoint line integral; value from the oracle
        CHECK(sup_norm(F) == doctest::Approx(0.0117328679514).epsilon(1e-9));
        auto exact = d;
        exact.line_integral = LineIntegralSource::Exact;
        CHECK(sup_norm(assemble_residual_Fn(GridFunction{d.rule.nodes, std::vector<double>(100, -0.5)}, p, exact)) < 1e-14);
    }
    {
        const auto [p, d] = register_example(1);
        const auto F = assemble_residual_Fn(GridFunction{d.rule.nodes, std::vector<double>(50, 7.0)}, p, d);
        CHECK(sup_norm(F) == doctest::Approx(2.43323185316e-05).epsilon(1e-8));
        CHECK(sup_norm(F) / sup_norm(assemble_residual_Fn(zero_grid(d.rule), p, d)) < 1e-5);
    }
}

TEST_CASE("F_n with N = 0 is x - y") {
    auto [p, d] = register_example(2);
    p.nonlinearity = {[](double, double, double) { return 0.0; }, [](double, double, double) { return 0.0; }};
    std::mt19937_64 rng(2);
    const auto x = random_vector(d.rule.size(), -1, 1, rng);
    const auto F = assemble_residual_Fn(GridFunction{d.rule.nodes, x}, p, d);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(F[i] == x[i] - p.forcing(d.rule.nodes[i]));
}

TEST_CASE("grid mismatches are rejected") {
    const auto [p, d] = register_example(2);
    CHECK_THROWS_AS(assemble_residual_Fn(GridFunction{{0.0}, {1.0}}, p, d), GridMismatchError);
    CHECK_THROWS_AS(assemble_newton_system(std::vector<double>(3), p, build_coarse_system(p, d)), GridMismatchError);
}

TEST_CASE("derivative-free nonlinearities give a one-step fixed point system") {
    auto [p, d] = register_example(1);
    p.nonlinearity = {[](double s, double t, double) { return s + t; }, [](double, double, double) { return 0.0; }};
    const auto c = build_coarse_system(p, d);
    const std::vector<double> x(c.size(), 3.0);
    const auto sys = assemble_newton_system(x, p, c);
    CHECK(sys.matrix == DenseMatrix::identity(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double ti = c.nodes[i];
        double sum = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) sum += c.weighted_kernel(i, j) * (ti + c.nodes[j]);
        CHECK(sys.rhs[i] == doctest::Approx(c.forcing[i] + sum + 2 * ti * (c.line_integrals[i] - c.row_sums[i])));
    }
}

TEST_CASE("example 2 derivative block at the null vector") {
    const auto [p, d] = register_example(2);
    const auto c = build_coarse_system(p, d);
    const auto a = assemble_derivative_block(std::vector<double>(c.size(), 0.0), p, c);
    const TruncatedKernel g{p.kernel, d.delta_n};
    for (std::size_t i = 0; i < c.size(); i += 9) {
        for (std::size_t j = 0; j < c.size(); j += 7) {
            const double expected = 0.01 * eval_truncated(g, std::abs(c.nodes[i] - c.nodes[j])) / std::numbers::ln2;
            CHECK(a(i, j) == doctest::Approx(expected).epsilon(1e-14));
            // symmetric kernel, uniform weights, u-only derivative
            CHECK(a(i, j) * c.weights[i] == doctest::Approx(a(j, i) * c.weights[j]).epsilon(1e-14));
        }
    }
}

TEST_CASE("Newton right-hand side equals J x - F_n(x)") {
    std::mt19937_64 rng(3);
    for (int id : {1, 2}) {
        const auto [p, d] = register_example(id);
        const auto c = build_coarse_system(p, d);
        for (int trial = 0; trial < 5; ++trial) {
            const auto x = random_vector(c.size(), -1, 1, rng);
            const auto sys = assemble_newton_system(x, p, c);
            const auto jx = sys.matrix.multiply(x);
            const auto F = assemble_residual_Fn(x, p, c);
            for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(sys.rhs[i] - (jx[i] - F[i])) <= 1e-10);
        }
    }
}

TEST_CASE("Jacobian agrees with forward differences on five nodes") {
    std::mt19937_64 rng(4);
    const double eps = 1e-6;
    for (int id : {1, 2}) {
        auto [p, d] = register_example(id);
        d.rule = left_endpoint_rule(0, 1, 6);
        refresh_forcing(p, d);
        const auto c = build_coarse_system(p, d);
        for (int trial = 0; trial < 10; ++trial) {
            const auto x = random_vector(5, -1, 1, rng);
            const auto J = assemble_newton_system(x, p, c).matrix;
            const auto F = assemble_residual_Fn(x, p, c);
            for (std::size_t j = 0; j < 5; ++j) {
                auto xp = x;
                xp[j] += eps;
                const auto Fp = assemble_residual_Fn(xp, p, c);
                for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs((Fp[i] - F[i]) / eps - J(i, j)) <= 1e-5);
            }
        }
    }
}

TEST_CASE("each Newton step solves the linearized equation") {
    const auto [p, d] = register_example(2);
    const auto c = build_coarse_system(p, d);
    std::vector<double> x(c.size(), 0.0);
    for (int k = 0; k < 5; ++k) {
        const auto sys = assemble_newton_system(x, p, c);
        const auto next = lu_solve(sys.matrix, sys.rhs);
        std::vector<double> step(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) step[i] = next[i] - x[i];
        const auto js = sys.matrix.multiply(step);
        const auto F = assemble_residual_Fn(x, p, c);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(js[i] + F[i]) <= 1e-8);
        x = next;
    }
}

TEST_CASE("classical runs match frozen histories") {
    struct Case {
        int id;
        int p;
        std::vector<double> log_r;
        std::vector<double> e;
    };
    // from an independent dense numpy implementation of the same scheme
    const std::vector<Case> cases{
        {2, 1000, {0, -0.197762, -1.068006, -2.404887, -2.757748, -2.758148},
         {1, 3.492721e-01, 5.488505e-02, 2.595358e-03, 1.152542e-03, 1.151479e-03}},
        {2, 100, {0, -0.162347, -0.961715, -1.693098, -1.752233, -1.752288},
         {1, 3.740547e-01, 6.957665e-02, 1.329279e-02, 1.161057e-02, 1.160912e-02}},
        {1, 200, {0, -0.981022, -3.570407, -4.475118, -4.475078, -4.475078},
         {1, 1.269471e-01, 3.267998e-04, 4.070202e-05, 4.070572e-05, 4.070572e-05}},
    };
    for (const auto& tc : cases) {
        auto [p, d] = register_example(tc.id);
        d.rule = left_endpoint_rule(0, 1, tc.p + 1);
        const auto [state, solution] = solve_classical(p, d, zero_grid(d.rule));
        REQUIRE(state.history.size() == 6);
        CHECK(state.k == 5);
        for (std::size_t k = 0; k < 6; ++k) {
            CHECK(state.history[k].log10_r == doctest::Approx(tc.log_r[k]).epsilon(1e-5));
            CHECK(*state.history[k].e == doctest::Approx(tc.e[k]).epsilon(1e-5));
        }
        CHECK(state.history[0].r == 1.0);
        CHECK(solution.values == state.iterate.values);

        if (tc.id == 2 && tc.p == 1000) {
            // quadratic phase: steps grow until the plateau
            const auto& h = state.history;
            CHECK(std::abs(*h[2].delta_log10_r) >= std::abs(*h[1].delta_log10_r));
            CHECK(std::abs(*h[3].delta_log10_r) >= std::abs(*h[2].delta_log10_r));
        }
    }
}

TEST_CASE("starting at the discrete solution stops at once") {
    const auto [p, d] = register_example(2);
    const auto first = solve_classical(p, d, zero_grid(d.rule)).second;
    auto short_run = d;
    short_run.k_max = 1;
    const auto [state, again] = solve_classical(p, short_run, first);
    for (std::size_t i = 0; i < again.size(); ++i) CHECK(std::abs(again.values[i] - first.values[i]) < 1e-11);
    CHECK(*state.history.back().scheme_residual < 1e-13);
}

TEST_CASE("stalled iterations stop early") {
    auto [p, d] = register_example(1);
    d.k_max = 30;
    const auto state = solve_classical(p, d, zero_grid(d.rule)).first;
    CHECK(state.k < 30);
    const auto& h = state.history;
    CHECK(std::abs(std::log10(*h.back().scheme_residual) - std::log10(*h[h.size() - 2].scheme_residual)) < d.stall_eps);
}

TEST_CASE("a singular Newton matrix names its iteration") {
    // dN = 1 and f(0) = 1 make I - A - B vanish
    const auto [p, d] = one_node_problem({[](double, double, double u) { return u; }, [](double, double, double) { return 1.0; }}, 1.0);
    try {
        solve_classical(p, d, zero_grid(d.rule));
        FAIL("expected a singular matrix");
    } catch (const SingularMatrixError& e) {
        CHECK(e.iteration == 1);
    }
}

TEST_CASE("divergent Newton iterations are stopped") {
    // F_n(x) = cbrt(x - 1): every Newton step doubles the distance to the root
    const auto [p, d0] = one_node_problem(
        {[](double, double, double u) { return u - std::cbrt(u - 1.0); },
         [](double, double, double u) { return 1.0 - 1.0 / (3.0 * std::cbrt((u - 1.0) * (u - 1.0))); }},
        0.0);
    auto d = d0;
    d.k_max = 200;
    try {
        solve_classical(p, d, zero_grid(d.rule));
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.iteration > 50);
        CHECK(e.iteration < 70);
    }
}
