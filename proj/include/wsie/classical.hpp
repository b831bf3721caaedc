#pragma once

#include <span>
#include <utility>
#include <vector>

#include "wsie/diagnostics.hpp"
#include "wsie/linalg.hpp"
#include "wsie/problem.hpp"

namespace wsie {

/// Discretize-first scheme: Newton on the p-dimensional system
/// F_n(x)(i) = x_i - sum_j w_j g_delta(|t_i-t_j|) N(t_i,t_j,x_j)
///             + N(t_i,t_i,x_i) (sum_j w_j g_delta(|t_i-t_j|) - f(t_i)) - y(t_i).
struct ClassicalState {
    GridFunction iterate;
    int k = 0;
    std::vector<IterationRecord> history;  // size k+1
};

struct LinearSystem {
    DenseMatrix matrix;
    std::vector<double> rhs;
};

std::vector<double> assemble_residual_Fn(std::span<const double> x, const ProblemInstance& p, const CoarseSystem& c);
std::vector<double> assemble_residual_Fn(const GridFunction& x, const ProblemInstance& p, const Discretization& d);

/// A(i,j) = w_j g_delta(|t_i-t_j|) dN/du(t_i,t_j,x_j)
DenseMatrix assemble_derivative_block(std::span<const double> x, const ProblemInstance& p, const CoarseSystem& c);

/// I - A - B and a, where B = diag(dN/du(t_i,t_i,x_i) (f(t_i) - sum_l w_l g_delta(|t_i-t_l|))).
/// I - A - B is the Jacobian of F_n at x and a = (I-A-B) x - F_n(x).
LinearSystem assemble_newton_system(std::span<const double> x, const ProblemInstance& p, const CoarseSystem& c);
LinearSystem assemble_newton_system(const GridFunction& x, const ProblemInstance& p, const Discretization& d);

/// Newton from x0 until k_max, r <= residual_tol, or two successive steps
/// change log10 |F_n| / |F_n(0)| by less than stall_eps.
std::pair<ClassicalState, GridFunction> solve_classical(const ProblemInstance& p, const Discretization& d,
                                                        const GridFunction& x0);

/// Null initial function on the rule's nodes.
GridFunction zero_grid(const QuadratureRule& rule);

}  // namespace wsie
