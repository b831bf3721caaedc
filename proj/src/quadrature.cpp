#include "wsie/quadrature.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "wsie/errors.hpp"

namespace wsie {

namespace {

void check_interval(double a, double b, int n, int min_n, const char* who) {
    if (n < min_n) throw ParameterError(std::string(who) + ": too few grid points");
    if (!(a < b)) throw ParameterError(std::string(who) + ": need a < b");
}

QuadratureRule uniform_rule(double a, double b, int n, double offset) {
    const double h = (b - a) / (n - 1);
    QuadratureRule rule{.a = a, .b = b, .gamma_hat = 2.0, .mesh_h = h};
    rule.nodes.reserve(n - 1);
    for (int j = 0; j < n - 1; ++j) rule.nodes.push_back(a + (j + offset) * h);
    rule.weights.assign(n - 1, h);
    return rule;
}

}  // namespace

QuadratureRule midpoint_rule(double a, double b, int n) {
    check_interval(a, b, n, 2, "midpoint_rule");
    return uniform_rule(a, b, n, 0.5);
}

QuadratureRule left_endpoint_rule(double a, double b, int n) {
    check_interval(a, b, n, 2, "left_endpoint_rule");
    return uniform_rule(a, b, n, 0.0);
}

QuadratureRule trapezoid_rule(double a, double b, int n) {
    check_interval(a, b, n, 2, "trapezoid_rule");
    const double h = (b - a) / (n - 1);
    QuadratureRule rule{.a = a, .b = b, .gamma_hat = 2.0, .mesh_h = h};
    for (int j = 0; j < n; ++j) {
        rule.nodes.push_back(j == n - 1 ? b : a + j * h);
        rule.weights.push_back((j == 0 || j == n - 1) ? 0.5 * h : h);
    }
    return rule;
}

QuadratureRule simpson_rule(double a, double b, int n) {
    check_interval(a, b, n, 2, "simpson_rule");
    const double h = (b - a) / (n - 1);
    QuadratureRule rule{.a = a, .b = b, .gamma_hat = 2.0, .mesh_h = h};
    for (int j = 0; j < n; ++j) {
        rule.nodes.push_back(j == n - 1 ? b : a + j * h);
        rule.weights.push_back((j == 0 || j == n - 1) ? h / 6.0 : h / 3.0);
        if (j < n - 1) {
            rule.nodes.push_back(a + (j + 0.5) * h);
            rule.weights.push_back(2.0 * h / 3.0);
        }
    }
    return rule;
}

HypothesisReport verify_hypothesis_H(const QuadratureRule& rule, std::size_t trials, std::uint64_t seed) {
    const auto& t = rule.nodes;
    std::vector<double> prefix(t.size() + 1, 0.0);
    for (std::size_t j = 0; j < t.size(); ++j) prefix[j + 1] = prefix[j] + rule.weights[j];

    HypothesisReport report;
    // open_left: J = ]c,d], otherwise J = [c,d[
    auto check = [&](double c, double d, bool open_left) {
        if (!(c < d) || c < rule.a || d > rule.b) return;
        std::ptrdiff_t lo, hi;
        if (open_left) {
            lo = std::upper_bound(t.begin(), t.end(), c) - t.begin();
            hi = std::upper_bound(t.begin(), t.end(), d) - t.begin();
        } else {
            lo = std::lower_bound(t.begin(), t.end(), c) - t.begin();
            hi = std::lower_bound(t.begin(), t.end(), d) - t.begin();
        }
        const double ratio = (prefix[hi] - prefix[lo]) / (d - c);
        report.max_ratio = std::max(report.max_ratio, ratio);
        ++report.intervals_checked;
    };

    const double h = rule.mesh_h;
    const double length = rule.b - rule.a;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < trials; ++i) {
        const double span = h + (length - h) * unit(rng);
        const double c = rule.a + (length - span) * unit(rng);
        check(c, std::min(c + span, rule.b), (rng() & 1u) != 0);
    }

    // adversarial: single basic subintervals and length-h windows anchored at nodes
    const auto cells = static_cast<std::ptrdiff_t>(std::llround(length / h));
    for (std::ptrdiff_t k = 0; k < cells; ++k) {
        const double c = rule.a + k * h;
        const double d = (k == cells - 1) ? rule.b : c + h;
        check(c, d, true);
        check(c, d, false);
    }
    for (double node : t) {
        check(node - h, node, true);
        check(node, node + h, false);
    }

    // the bound is attained exactly by two-node windows; allow node rounding
    report.passes = report.max_ratio <= rule.gamma_hat * (1.0 + 1e-12);
    return report;
}

FineRule::FineRule(SingularKernel kernel, FineQuadratureSpec spec, double a, double b)
    : truncated_{std::move(kernel), spec.mu}, spec_(spec), a_(a), b_(b) {
    if (spec.big_p < 1) throw ParameterError("fine quadrature needs P >= 1");
    if (!(spec.mu > 0.0)) throw ParameterError("fine quadrature needs mu > 0");
    if (!(a < b)) throw ParameterError("fine quadrature needs a < b");
    weight_ = (b - a) / spec.big_p;
    nodes_.reserve(spec.big_p);
    for (int l = 0; l < spec.big_p; ++l) nodes_.push_back(a + (l + 0.5) * weight_);
}

std::vector<double> FineRule::kernel_row(double s) const {
    if (s < a_ || s > b_) throw DomainError("fine quadrature: s outside [a,b]");
    std::vector<double> row(nodes_.size());
    for (std::size_t l = 0; l < nodes_.size(); ++l) {
        row[l] = weight_ * eval_truncated(truncated_, std::abs(s - nodes_[l]));
    }
    return row;
}

double FineRule::apply(std::span<const double> row, std::span<const double> h) {
    if (row.size() != h.size()) throw GridMismatchError("fine quadrature: value count != node count");
    double sum = 0.0;
    for (std::size_t l = 0; l < row.size(); ++l) sum += row[l] * h[l];
    return sum;
}

double FineRule::apply_subtracted(std::span<const double> row, std::span<const double> h, double h_s,
                                  double line_integral) {
    if (row.size() != h.size()) throw GridMismatchError("fine quadrature: value count != node count");
    double sum = 0.0;
    for (std::size_t l = 0; l < row.size(); ++l) sum += row[l] * (h[l] - h_s);
    return sum + h_s * line_integral;
}

double fine_singular_integral(const SingularKernel& k, const std::function<double(double)>& weight_fn,
                              const FineQuadratureSpec& spec, double a, double b, double s) {
    const FineRule rule(k, spec, a, b);
    std::vector<double> h;
    h.reserve(rule.nodes().size());
    for (double tau : rule.nodes()) h.push_back(weight_fn(tau));
    return FineRule::apply(rule.kernel_row(s), h);
}

}  // namespace wsie
