#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wsie/kernels.hpp"
#include "wsie/linalg.hpp"
#include "wsie/quadrature.hpp"

namespace wsie {

enum class ForcingMode { ClosedForm, ManufacturedViaFineQuadrature };

/// phi = K(phi) + y on [a,b] with K(x)(s) = ∫ g(|s-t|) N(s,t,x(t)) dt.
struct ProblemInstance {
    std::string name;
    double a = 0.0;
    double b = 1.0;
    SingularKernel kernel;
    Nonlinearity nonlinearity;
    std::function<double(double)> forcing;
    std::optional<std::function<double(double)>> exact_solution;
    ForcingMode forcing_mode = ForcingMode::ClosedForm;
};

/// Where the classical scheme takes f(t_i) = ∫ g(|t_i-t|) dt from.
enum class LineIntegralSource {
    Exact,           // primitive of g
    CoarseMidpoint,  // midpoint rectangles on the scheme's basic grid, applied to g_delta
    Fine,            // fine quadrature
};

/// Continuous extension of a linearize-first grid iterate.
enum class Interpolation { Natural, PiecewiseLinear };

enum class NodePlacement {
    LeftEndpoint,  // t_j = a + (j-1) h
    Midpoint,      // t_j = a + (j-1/2) h
};

struct Discretization {
    QuadratureRule rule;
    double delta_n = 1e-6;
    FineQuadratureSpec fine;
    int k_max = 5;
    double residual_tol = 1e-14;  // stop once r falls below
    double stall_eps = 0.05;      // log10 units
    LineIntegralSource line_integral = LineIntegralSource::CoarseMidpoint;
    Interpolation interpolation = Interpolation::Natural;
};

QuadratureRule make_rule(NodePlacement placement, double a, double b, int p);

/// Throws ParameterError on invalid values, warns when delta leaves
/// [alpha1 h, beta1 h] or when mu >= delta.
void validate(const Discretization& d, double alpha1 = 1e-6, double beta1 = 1.0);

/// y(s) = phi(s) - K(phi)(s) with K by the fine rule; memoized per s.
std::function<double(double)> manufacture_forcing(const ProblemInstance& p, const Discretization& d);

/// Rebuilds a manufactured forcing after the fine rule changed; no-op otherwise.
void refresh_forcing(ProblemInstance& p, const Discretization& d);

using ProblemFactory = std::function<std::pair<ProblemInstance, Discretization>()>;

void register_problem(const std::string& name, ProblemFactory factory);
std::pair<ProblemInstance, Discretization> make_problem(const std::string& name);
std::vector<std::string> registered_problems();

/// "example1" or "example2".
std::pair<ProblemInstance, Discretization> register_example(int id);

/// Integrals ∫ g(|s-t|) h(t) dt through the fine rule. Closed-form problems
/// whose kernel has a primitive subtract h(s) and add h(s) f(s) exactly;
/// manufactured problems use the plain rule that produced their forcing.
class FineIntegrator {
public:
    FineIntegrator(const ProblemInstance& p, const Discretization& d);

    bool subtracted() const { return subtracted_; }
    std::span<const double> nodes() const { return rule_.nodes(); }
    std::vector<double> row(double s) const { return rule_.kernel_row(s); }

    /// h sampled at the fine nodes, h_s = h(s).
    double integrate(std::span<const double> row, std::span<const double> h, double h_s, double s) const;
    double line_integral(double s) const;

private:
    FineRule rule_;
    double a_;
    double b_;
    bool subtracted_;
};

/// Quantities on the scheme's own grid shared by both solvers.
struct CoarseSystem {
    std::vector<double> nodes;
    std::vector<double> weights;
    DenseMatrix weighted_kernel;         // w_j g_delta(|t_i - t_j|)
    std::vector<double> row_sums;        // sum_j w_j g_delta(|t_i - t_j|)
    std::vector<double> line_integrals;  // f(t_i) per Discretization::line_integral
    std::vector<double> forcing;         // y(t_i)

    std::size_t size() const { return nodes.size(); }
};

CoarseSystem build_coarse_system(const ProblemInstance& p, const Discretization& d);

}  // namespace wsie
