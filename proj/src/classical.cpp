#include "wsie/classical.hpp"

#include <cmath>
#include <string>

#include "wsie/errors.hpp"

namespace wsie {

namespace {

void check_grid(std::span<const double> x, const CoarseSystem& c) {
    if (x.size() != c.size()) throw GridMismatchError("grid function size differs from the rule's node count");
}

void check_nodes(const GridFunction& x, const QuadratureRule& rule) {
    if (x.nodes != rule.nodes || x.values.size() != rule.size()) {
        throw GridMismatchError("grid function is not on the rule's nodes");
    }
}

}  // namespace

GridFunction zero_grid(const QuadratureRule& rule) { return {rule.nodes, std::vector<double>(rule.size(), 0.0)}; }

std::vector<double> assemble_residual_Fn(std::span<const double> x, const ProblemInstance& p, const CoarseSystem& c) {
    check_grid(x, c);
    const auto& n = p.nonlinearity.n_eval;
    const auto& t = c.nodes;
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto row = c.weighted_kernel.row(i);
        double sum = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) sum += row[j] * n(t[i], t[j], x[j]);
        out[i] = x[i] - sum + n(t[i], t[i], x[i]) * (c.row_sums[i] - c.line_integrals[i]) - c.forcing[i];
    }
    return out;
}

std::vector<double> assemble_residual_Fn(const GridFunction& x, const ProblemInstance& p, const Discretization& d) {
    check_nodes(x, d.rule);
    return assemble_residual_Fn(x.values, p, build_coarse_system(p, d));
}

DenseMatrix assemble_derivative_block(std::span<const double> x, const ProblemInstance& p, const CoarseSystem& c) {
    check_grid(x, c);
    const auto& dn = p.nonlinearity.dn_du;
    const auto& t = c.nodes;
    DenseMatrix a(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto kernel_row = c.weighted_kernel.row(i);
        auto row = a.row(i);
        for (std::size_t j = 0; j < c.size(); ++j) row[j] = kernel_row[j] * dn(t[i], t[j], x[j]);
    }
    return a;
}

LinearSystem assemble_newton_system(std::span<const double> x, const ProblemInstance& p, const CoarseSystem& c) {
    const auto& n = p.nonlinearity.n_eval;
    const auto& dn = p.nonlinearity.dn_du;
    const auto& t = c.nodes;
    const std::size_t size = c.size();

    LinearSystem sys{.matrix = assemble_derivative_block(x, p, c), .rhs = std::vector<double>(size)};
    for (std::size_t i = 0; i < size; ++i) {
        const auto kernel_row = c.weighted_kernel.row(i);
        double sum = 0.0;
        for (std::size_t j = 0; j < size; ++j) {
            sum += kernel_row[j] * (n(t[i], t[j], x[j]) - dn(t[i], t[j], x[j]) * x[j]);
        }
        const double defect = c.line_integrals[i] - c.row_sums[i];
        const double n_ii = n(t[i], t[i], x[i]);
        const double dn_ii = dn(t[i], t[i], x[i]);
        sys.rhs[i] = c.forcing[i] + (n_ii - x[i] * dn_ii) * defect + sum;

        auto row = sys.matrix.row(i);
        for (std::size_t j = 0; j < size; ++j) row[j] = -row[j];
        row[i] += 1.0 - dn_ii * defect;
    }
    return sys;
}

LinearSystem assemble_newton_system(const GridFunction& x, const ProblemInstance& p, const Discretization& d) {
    check_nodes(x, d.rule);
    return assemble_newton_system(x.values, p, build_coarse_system(p, d));
}

std::pair<ClassicalState, GridFunction> solve_classical(const ProblemInstance& p, const Discretization& d,
                                                        const GridFunction& x0) {
    check_nodes(x0, d.rule);
    validate(d);
    const CoarseSystem coarse = build_coarse_system(p, d);
    const ResidualEvaluator diagnostics(p, d);
    const double scheme_norm0 = sup_norm(assemble_residual_Fn(std::vector<double>(coarse.size(), 0.0), p, coarse));
    const auto fine_nodes = diagnostics.fine_nodes();

    ClassicalState state{.iterate = x0};
    double initial_scheme_residual = 0.0;

    auto record = [&](int k) {
        GridFunction& x = state.iterate;
        std::vector<double> at_fine;
        at_fine.reserve(fine_nodes.size());
        for (double tau : fine_nodes) at_fine.push_back(interpolate_linear(x, tau));
        const double r = diagnostics.relative(x.values, at_fine);
        std::optional<double> e;
        if (p.exact_solution) {
            e = grid_relative_error([&](double s) { return interpolate_linear(x, s); }, *p.exact_solution, d.rule);
        }
        auto rec = make_record(k, r, e, state.history.empty() ? nullptr : &state.history.back());
        const double scheme = sup_norm(assemble_residual_Fn(x.values, p, coarse));
        rec.scheme_residual = scheme_norm0 > 0.0 ? scheme / scheme_norm0 : scheme;
        if (k == 0) initial_scheme_residual = scheme;
        if (k > 0 && scheme > 1e6 * initial_scheme_residual && initial_scheme_residual > 0.0) {
            throw DivergenceError("classical Newton diverged at iteration " + std::to_string(k), k);
        }
        state.history.push_back(rec);
        state.k = k;
    };

    auto stalled = [&] {
        const auto& h = state.history;
        if (h.back().r <= d.residual_tol || *h.back().scheme_residual == 0.0) return true;
        if (h.size() < 3) return false;
        auto step = [&](std::size_t i) {
            return std::abs(std::log10(*h[i].scheme_residual) - std::log10(*h[i - 1].scheme_residual));
        };
        return step(h.size() - 1) < d.stall_eps && step(h.size() - 2) < d.stall_eps;
    };

    record(0);
    for (int k = 1; k <= d.k_max && !stalled(); ++k) {
        const auto sys = assemble_newton_system(state.iterate.values, p, coarse);
        try {
            state.iterate.values = lu_solve(sys.matrix, sys.rhs);
        } catch (const SingularMatrixError& err) {
            throw SingularMatrixError("classical Newton step " + std::to_string(k) + ": " + err.what(), k);
        }
        record(k);
    }
    GridFunction solution = state.iterate;
    return {std::move(state), std::move(solution)};
}

}  // namespace wsie
