#include "wsie/linearize_first.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "wsie/errors.hpp"

namespace wsie {

NkContext::NkContext(ProblemInstance p, Discretization d)
    : problem(std::move(p)),
      discretization(std::move(d)),
      coarse(build_coarse_system(problem, discretization)),
      integrator(problem, discretization) {
    for (double tau : integrator.nodes()) forcing_at_fine.push_back(problem.forcing(tau));
}

namespace {

// Pieces of the linearized equation at a point s, frozen at iterate w_k.
struct Linearization {
    double fine_n = 0.0;    // ∫ g(|s-t|) N(s,t,phi_k(t)) dt
    double fine_dn = 0.0;   // ∫ g(|s-t|) dN/du(s,t,phi_k(t)) dt
    double coarse_dn = 0.0; // sum_j w_j g_delta(|s-t_j|) dN/du(s,t_j,w_k(j))
    double coarse_shift = 0.0;  // sum_j (same weights) (w_k(j) - phi_k(s))
    std::vector<double> coarse_weights;
};

Linearization linearize_at(const NkIterate& w_k, double s, double phi_s) {
    const auto& ctx = w_k.context();
    const auto& nl = ctx.problem.nonlinearity;
    const auto fine_nodes = ctx.integrator.nodes();
    const auto fine_values = w_k.fine_values();

    Linearization lin;
    const auto row = ctx.integrator.row(s);
    std::vector<double> h_n(fine_nodes.size()), h_dn(fine_nodes.size());
    for (std::size_t l = 0; l < fine_nodes.size(); ++l) {
        h_n[l] = nl.n_eval(s, fine_nodes[l], fine_values[l]);
        h_dn[l] = nl.dn_du(s, fine_nodes[l], fine_values[l]);
    }
    lin.fine_n = ctx.integrator.integrate(row, h_n, nl.n_eval(s, s, phi_s), s);
    lin.fine_dn = ctx.integrator.integrate(row, h_dn, nl.dn_du(s, s, phi_s), s);

    const auto& t = ctx.coarse.nodes;
    const auto& grid = w_k.grid_values().values;
    const TruncatedKernel g{ctx.problem.kernel, ctx.discretization.delta_n};
    lin.coarse_weights.resize(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) {
        const double c = ctx.coarse.weights[j] * eval_truncated(g, std::abs(s - t[j])) * nl.dn_du(s, t[j], grid[j]);
        lin.coarse_weights[j] = c;
        lin.coarse_dn += c;
        lin.coarse_shift += c * (grid[j] - phi_s);
    }
    return lin;
}

std::ptrdiff_t fine_index(std::span<const double> nodes, double s) {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), s);
    if (it != nodes.end() && *it == s) return it - nodes.begin();
    return -1;
}

}  // namespace

std::shared_ptr<const NkIterate> NkIterate::bootstrap(std::shared_ptr<const NkContext> context,
                                                      std::function<double(double)> phi0) {
    std::shared_ptr<NkIterate> it(new NkIterate());
    it->context_ = std::move(context);
    it->phi0_ = std::move(phi0);
    it->grid_.nodes = it->context_->coarse.nodes;
    for (double t : it->grid_.nodes) it->grid_.values.push_back(it->phi0_(t));
    for (double tau : it->context_->integrator.nodes()) it->fine_.push_back(it->phi0_(tau));
    return it;
}

std::shared_ptr<const NkIterate> NkIterate::advance(std::shared_ptr<const NkIterate> previous,
                                                    std::vector<double> grid_values) {
    if (grid_values.size() != previous->grid_.size()) throw GridMismatchError("advance: grid size changed");
    std::shared_ptr<NkIterate> it(new NkIterate());
    it->k_ = previous->k_ + 1;
    it->context_ = previous->context_;
    it->grid_ = {previous->grid_.nodes, std::move(grid_values)};
    const auto fine_nodes = it->context_->integrator.nodes();
    it->fine_.reserve(fine_nodes.size());
    if (it->context_->discretization.interpolation == Interpolation::PiecewiseLinear) {
        for (double tau : fine_nodes) it->fine_.push_back(interpolate_linear(it->grid_, tau));
    } else {
        for (double tau : fine_nodes) {
            const auto nv = natural_interpolate(it->grid_.values, *previous, tau);
            it->fine_.push_back(nv.value);
            it->min_denominator_ = std::min(it->min_denominator_, std::abs(nv.denominator));
        }
    }
    it->previous_ = std::move(previous);
    return it;
}

double NkIterate::eval_at(double s) const {
    if (k_ == 0) return phi0_(s);
    if (const auto l = fine_index(context_->integrator.nodes(), s); l >= 0) return fine_[l];
    {
        std::lock_guard lock(memo_mutex_);
        if (const auto it = memo_.find(s); it != memo_.end()) return it->second;
    }
    const double value = context_->discretization.interpolation == Interpolation::PiecewiseLinear
                             ? interpolate_linear(grid_, s)
                             : natural_interpolate(grid_.values, *previous_, s).value;
    std::lock_guard lock(memo_mutex_);
    memo_.emplace(s, value);
    return value;
}

NaturalValue natural_interpolate(std::span<const double> w_next, const NkIterate& w_k, double s) {
    const auto& ctx = w_k.context();
    if (w_next.size() != ctx.coarse.size()) throw GridMismatchError("natural_interpolate: grid size mismatch");
    if (s < ctx.problem.a || s > ctx.problem.b) throw DomainError("natural_interpolate: s outside [a,b]");

    const double phi_s = w_k.eval_at(s);
    const auto l = fine_index(ctx.integrator.nodes(), s);
    const double y_s = l >= 0 ? ctx.forcing_at_fine[l] : ctx.problem.forcing(s);
    const auto lin = linearize_at(w_k, s, phi_s);

    // K(phi_k)(s) - T_n(phi_k) phi_k (s) + y(s)
    const double z = lin.fine_n - (lin.coarse_shift + phi_s * lin.fine_dn) + y_s;
    double coupled = 0.0;
    for (std::size_t j = 0; j < w_next.size(); ++j) coupled += lin.coarse_weights[j] * w_next[j];
    const double denominator = 1.0 - lin.fine_dn + lin.coarse_dn;
    if (!(std::abs(denominator) > 0.5)) {
        throw InterpolationDegeneracyError(
            fmt::format("natural interpolation denominator {:.3g} at s = {:.17g} (need |.| > 1/2)", denominator, s), s,
            denominator);
    }
    return {(coupled + z) / denominator, denominator};
}

DenseMatrix assemble_nk_derivative_block(const NkIterate& w_k) {
    const auto& ctx = w_k.context();
    const auto& dn = ctx.problem.nonlinearity.dn_du;
    const auto& t = ctx.coarse.nodes;
    const auto& grid = w_k.grid_values().values;
    DenseMatrix c(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j < grid.size(); ++j) c(i, j) = ctx.coarse.weighted_kernel(i, j) * dn(t[i], t[j], grid[j]);
    }
    return c;
}

LinearSystem assemble_nk_system(const NkIterate& w_k) {
    const auto& ctx = w_k.context();
    const auto& grid = w_k.grid_values().values;
    const std::size_t size = grid.size();

    LinearSystem sys{.matrix = assemble_nk_derivative_block(w_k), .rhs = std::vector<double>(size)};
    for (std::size_t i = 0; i < size; ++i) {
        const double s = ctx.coarse.nodes[i];
        const auto lin = linearize_at(w_k, s, grid[i]);
        auto row = sys.matrix.row(i);
        double c_sum = 0.0;
        double shift = 0.0;
        for (std::size_t j = 0; j < size; ++j) {
            c_sum += row[j];
            shift += row[j] * (grid[i] - grid[j]);
        }
        const double d_ii = lin.fine_dn - c_sum;
        sys.rhs[i] = ctx.coarse.forcing[i] + (lin.fine_n - grid[i] * lin.fine_dn) + shift;
        for (std::size_t j = 0; j < size; ++j) row[j] = -row[j];
        row[i] += 1.0 - d_ii;
    }
    return sys;
}

NkResult solve_linearize_first(const ProblemInstance& p, const Discretization& d, std::function<double(double)> phi0) {
    validate(d);
    auto context = std::make_shared<const NkContext>(p, d);
    const ResidualEvaluator diagnostics(p, d);

    NkResult result{.final_iterate = NkIterate::bootstrap(context, std::move(phi0))};
    auto& history = result.history;

    auto record = [&](const NkIterate& w) {
        std::vector<double> at_grid;
        for (double t : context->coarse.nodes) at_grid.push_back(w.eval_at(t));
        const double r = diagnostics.relative(at_grid, w.fine_values());
        std::optional<double> e;
        if (p.exact_solution) e = grid_relative_error([&](double s) { return w.eval_at(s); }, *p.exact_solution, d.rule);
        if (w.k() > 0 && r > 1e6 * history.front().r) {
            throw DivergenceError("linearize-first iteration diverged at iteration " + std::to_string(w.k()), w.k());
        }
        history.push_back(make_record(w.k(), r, e, history.empty() ? nullptr : &history.back()));
    };

    auto stalled = [&] {
        if (history.back().r <= d.residual_tol) return true;
        if (history.size() < 3) return false;
        const auto n = history.size();
        return std::abs(*history[n - 1].delta_log10_r) < d.stall_eps &&
               std::abs(*history[n - 2].delta_log10_r) < d.stall_eps;
    };

    record(*result.final_iterate);
    for (int k = 1; k <= d.k_max && !stalled(); ++k) {
        const auto sys = assemble_nk_system(*result.final_iterate);
        std::vector<double> next;
        try {
            next = lu_solve(sys.matrix, sys.rhs);
        } catch (const SingularMatrixError& err) {
            throw SingularMatrixError("linearize-first step " + std::to_string(k) + ": " + err.what(), k);
        }
        result.final_iterate = NkIterate::advance(result.final_iterate, std::move(next));
        record(*result.final_iterate);
    }
    return result;
}

}  // namespace wsie
