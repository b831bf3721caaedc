#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wsie/kernels.hpp"

namespace wsie {

/// Composite rule on [a,b]: strictly increasing nodes, positive weights.
struct QuadratureRule {
    double a = 0.0;
    double b = 1.0;
    std::vector<double> nodes;
    std::vector<double> weights;
    double gamma_hat = 2.0;  // bound on (sum of weights in J) / |J|
    double mesh_h = 0.0;     // basic-grid subinterval length

    std::size_t size() const { return nodes.size(); }
};

// Basic grid of n points; p = n-1 nodes at the subinterval midpoints.
QuadratureRule midpoint_rule(double a, double b, int n);
// Basic grid of n points; p = n-1 nodes at the left ends of the subintervals.
QuadratureRule left_endpoint_rule(double a, double b, int n);
// p = n nodes at the basic grid points.
QuadratureRule trapezoid_rule(double a, double b, int n);
// p = 2n-1 nodes: the basic grid points and the subinterval midpoints.
QuadratureRule simpson_rule(double a, double b, int n);

struct HypothesisReport {
    double max_ratio = 0.0;
    bool passes = true;
    std::size_t intervals_checked = 0;
};

inline constexpr std::uint64_t kDefaultHypothesisSeed = 0x5eedf00dULL;

/// Samples half-open J = ]c,d] or [c,d[ with mesh_h <= d-c and checks
/// sum_{t_j in J} w_j <= gamma_hat (d-c). Shorter J are not sampled since a
/// lone node in a vanishing J makes the ratio unbounded for every rule.
HypothesisReport verify_hypothesis_H(const QuadratureRule& rule, std::size_t trials,
                                     std::uint64_t seed = kDefaultHypothesisSeed);

enum class FineRuleKind { Midpoint };

struct FineQuadratureSpec {
    int big_p = 500;
    double mu = 2e-6;
    FineRuleKind rule_kind = FineRuleKind::Midpoint;
};

/// Midpoint rule with P nodes applied to g_mu(|s-t|) h(t).
class FineRule {
public:
    FineRule(SingularKernel kernel, FineQuadratureSpec spec, double a, double b);

    std::span<const double> nodes() const { return nodes_; }
    double weight() const { return weight_; }
    const FineQuadratureSpec& spec() const { return spec_; }
    const SingularKernel& kernel() const { return truncated_.base; }

    /// rho g_mu(|s - tau_l|) for every fine node.
    std::vector<double> kernel_row(double s) const;

    /// sum_l row_l h_l
    static double apply(std::span<const double> row, std::span<const double> h);
    /// sum_l row_l (h_l - h_s) + h_s line_integral; exact for constant h.
    static double apply_subtracted(std::span<const double> row, std::span<const double> h, double h_s,
                                   double line_integral);

private:
    TruncatedKernel truncated_;
    FineQuadratureSpec spec_;
    double a_;
    double b_;
    double weight_;
    std::vector<double> nodes_;
};

double fine_singular_integral(const SingularKernel& k, const std::function<double(double)>& weight_fn,
                              const FineQuadratureSpec& spec, double a, double b, double s);

}  // namespace wsie
