#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wsie/classical.hpp"
#include "wsie/diagnostics.hpp"
#include "wsie/linalg.hpp"
#include "wsie/problem.hpp"

namespace wsie {

/// Everything a linearize-first run reads but never mutates.
struct NkContext {
    NkContext(ProblemInstance problem, Discretization discretization);

    ProblemInstance problem;
    Discretization discretization;
    CoarseSystem coarse;
    FineIntegrator integrator;
    std::vector<double> forcing_at_fine;  // y(tau_l)
};

/// Iterate k of the Newton-Kantorovich sequence: grid values from the linear
/// solve plus a continuous extension. Iterate 0 is the starting function itself.
class NkIterate {
public:
    static std::shared_ptr<const NkIterate> bootstrap(std::shared_ptr<const NkContext> context,
                                                      std::function<double(double)> phi0);

    /// Wraps the solution of the next linear system. Evaluates the extension at
    /// every fine node; throws InterpolationDegeneracyError if |denominator| <= 1/2.
    static std::shared_ptr<const NkIterate> advance(std::shared_ptr<const NkIterate> previous,
                                                    std::vector<double> grid_values);

    int k() const { return k_; }
    const GridFunction& grid_values() const { return grid_; }
    std::span<const double> fine_values() const { return fine_; }
    const NkContext& context() const { return *context_; }
    const std::shared_ptr<const NkContext>& shared_context() const { return context_; }
    const std::shared_ptr<const NkIterate>& previous() const { return previous_; }

    /// Smallest |denominator| met while building this iterate; +inf for k = 0
    /// and for piecewise-linear extensions.
    double min_denominator() const { return min_denominator_; }

    double eval_at(double s) const;

private:
    NkIterate() = default;

    int k_ = 0;
    std::shared_ptr<const NkContext> context_;
    std::shared_ptr<const NkIterate> previous_;
    std::function<double(double)> phi0_;  // k = 0 only
    GridFunction grid_;
    std::vector<double> fine_;
    double min_denominator_ = std::numeric_limits<double>::infinity();
    mutable std::mutex memo_mutex_;
    mutable std::unordered_map<double, double> memo_;
};

/// I - C - D and b for the linear equation solved at step k -> k+1.
/// C(i,j) = w_j g_delta(|t_i-t_j|) dN/du(t_i,t_j,w_k(j));
/// D(i,i) = ∫ g(|t_i-t|) dN/du(t_i,t,phi_k(t)) dt - sum_l C(i,l).
LinearSystem assemble_nk_system(const NkIterate& w_k);

DenseMatrix assemble_nk_derivative_block(const NkIterate& w_k);

struct NaturalValue {
    double value;
    double denominator;  // 1 - I_k(s) + Q_k(s)
};

/// Continuous extension of the grid solution w_next of the step taken from
/// w_k, evaluated at s. Throws InterpolationDegeneracyError if |denominator| <= 1/2.
NaturalValue natural_interpolate(std::span<const double> w_next, const NkIterate& w_k, double s);

struct NkResult {
    std::vector<IterationRecord> history;
    std::shared_ptr<const NkIterate> final_iterate;
};

/// Iterates until k_max, r <= residual_tol, or two successive steps change
/// log10 r by less than stall_eps.
NkResult solve_linearize_first(const ProblemInstance& p, const Discretization& d,
                               std::function<double(double)> phi0);

}  // namespace wsie
