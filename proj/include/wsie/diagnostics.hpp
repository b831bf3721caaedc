#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wsie/problem.hpp"

namespace wsie {

struct IterationRecord {
    int k = 0;
    double r = 0.0;  // sup_grid |F(candidate)| / sup_grid |F(0)|
    double log10_r = 0.0;
    std::optional<double> delta_log10_r;
    std::optional<double> e;  // sup_grid |candidate - exact| / sup_grid |exact|
    std::optional<double> e_over_r;
    std::optional<double> r_over_e;
    std::optional<double> scheme_residual;  // solver-internal, not exported
};

IterationRecord make_record(int k, double r, std::optional<double> e, const IterationRecord* previous);

/// F(x)(t_i) = x(t_i) - K(x)(t_i) - y(t_i) on the scheme's grid with K by the
/// fine rule. Caches y(t_i), the fine kernel rows and |F(0)|.
class ResidualEvaluator {
public:
    ResidualEvaluator(const ProblemInstance& p, const Discretization& d);

    std::vector<double> residual(const std::function<double(double)>& candidate) const;
    /// Same, with the candidate already sampled at the grid and the fine nodes.
    std::vector<double> residual(std::span<const double> at_grid, std::span<const double> at_fine) const;

    double relative(const std::function<double(double)>& candidate) const;
    double relative(std::span<const double> at_grid, std::span<const double> at_fine) const;

    double zero_norm() const { return zero_norm_; }
    std::span<const double> fine_nodes() const { return integrator_.nodes(); }

private:
    Nonlinearity nonlinearity_;
    std::vector<double> nodes_;
    FineIntegrator integrator_;
    std::vector<std::vector<double>> rows_;
    std::vector<double> forcing_;
    double zero_norm_ = 0.0;
};

double grid_relative_residual(const std::function<double(double)>& candidate, const ProblemInstance& p,
                              const Discretization& d);

double grid_relative_error(const std::function<double(double)>& candidate, const std::function<double(double)>& exact,
                           const QuadratureRule& rule);

std::string build_table(std::span<const IterationRecord> records);
std::vector<std::pair<int, double>> plot_series(std::span<const IterationRecord> records);

inline constexpr const char* kCsvHeader = "k,r,log10_r,delta_log10_r,e,e_over_r,r_over_e";
void write_csv(std::ostream& out, std::span<const IterationRecord> records);
void write_plot_data(std::ostream& out, std::span<const IterationRecord> records);

}  // namespace wsie
