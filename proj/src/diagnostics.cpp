#include "wsie/diagnostics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "wsie/errors.hpp"

namespace wsie {

IterationRecord make_record(int k, double r, std::optional<double> e, const IterationRecord* previous) {
    IterationRecord rec{.k = k, .r = r, .log10_r = std::log10(r)};
    if (previous) rec.delta_log10_r = rec.log10_r - previous->log10_r;
    if (e) {
        rec.e = *e;
        if (r > 0.0) rec.e_over_r = *e / r;
        if (*e > 0.0) rec.r_over_e = r / *e;
    }
    return rec;
}

ResidualEvaluator::ResidualEvaluator(const ProblemInstance& p, const Discretization& d)
    : nonlinearity_(p.nonlinearity), nodes_(d.rule.nodes), integrator_(p, d) {
    rows_.reserve(nodes_.size());
    for (double s : nodes_) {
        rows_.push_back(integrator_.row(s));
        forcing_.push_back(p.forcing(s));
    }
    const std::vector<double> zero_grid(nodes_.size(), 0.0);
    const std::vector<double> zero_fine(integrator_.nodes().size(), 0.0);
    zero_norm_ = sup_norm(residual(zero_grid, zero_fine));
    if (!(zero_norm_ > 0.0)) throw NormalizationError("|F(0)| vanishes on the grid; r is undefined");
}

std::vector<double> ResidualEvaluator::residual(std::span<const double> at_grid,
                                                std::span<const double> at_fine) const {
    if (at_grid.size() != nodes_.size() || at_fine.size() != integrator_.nodes().size()) {
        throw GridMismatchError("residual: sample counts do not match the grids");
    }
    const auto& n = nonlinearity_.n_eval;
    const auto fine = integrator_.nodes();
    std::vector<double> out(nodes_.size());
    std::vector<double> integrand(fine.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double s = nodes_[i];
        for (std::size_t l = 0; l < fine.size(); ++l) integrand[l] = n(s, fine[l], at_fine[l]);
        const double k = integrator_.integrate(rows_[i], integrand, n(s, s, at_grid[i]), s);
        out[i] = at_grid[i] - k - forcing_[i];
    }
    return out;
}

std::vector<double> ResidualEvaluator::residual(const std::function<double(double)>& candidate) const {
    std::vector<double> at_grid, at_fine;
    for (double s : nodes_) at_grid.push_back(candidate(s));
    for (double tau : integrator_.nodes()) at_fine.push_back(candidate(tau));
    return residual(at_grid, at_fine);
}

double ResidualEvaluator::relative(const std::function<double(double)>& candidate) const {
    return sup_norm(residual(candidate)) / zero_norm_;
}

double ResidualEvaluator::relative(std::span<const double> at_grid, std::span<const double> at_fine) const {
    return sup_norm(residual(at_grid, at_fine)) / zero_norm_;
}

double grid_relative_residual(const std::function<double(double)>& candidate, const ProblemInstance& p,
                              const Discretization& d) {
    return ResidualEvaluator(p, d).relative(candidate);
}

double grid_relative_error(const std::function<double(double)>& candidate, const std::function<double(double)>& exact,
                           const QuadratureRule& rule) {
    std::vector<double> diff, ref;
    for (double t : rule.nodes) {
        const double phi = exact(t);
        diff.push_back(candidate(t) - phi);
        ref.push_back(phi);
    }
    const double norm = sup_norm(ref);
    if (!(norm > 0.0)) throw NormalizationError("exact solution vanishes on the grid; e is undefined");
    return sup_norm(diff) / norm;
}

namespace {

std::string sci1(std::optional<double> v) { return v ? fmt::format("{:.0e}", *v) : std::string(); }

std::string fixed1(std::optional<double> v) { return v ? fmt::format("{:.1f}", *v) : std::string(); }

std::string ratio(std::optional<double> v) {
    if (!v) return {};
    if (*v >= 100.0) return fmt::format("{:.0f}", *v);
    if (*v >= 0.1) return fmt::format("{:.1f}", *v);
    return fmt::format("{:.1g}", *v);
}

std::string full(std::optional<double> v) { return v ? fmt::format("{:.17g}", *v) : std::string("NA"); }

}  // namespace

std::string build_table(std::span<const IterationRecord> records) {
    if (records.empty()) return {};
    std::string out = fmt::format("{:>3}  {:>8}  {:>9}  {:>10}  {:>8}  {:>8}  {:>8}\n", "k", "r", "log10 r",
                                  "dlog10 r", "e", "e/r", "r/e");
    for (const auto& rec : records) {
        out += fmt::format("{:>3}  {:>8}  {:>9}  {:>10}  {:>8}  {:>8}  {:>8}\n", rec.k, sci1(rec.r),
                           fixed1(rec.log10_r), fixed1(rec.delta_log10_r), sci1(rec.e), ratio(rec.e_over_r),
                           ratio(rec.r_over_e));
    }
    return out;
}

std::vector<std::pair<int, double>> plot_series(std::span<const IterationRecord> records) {
    std::vector<std::pair<int, double>> series;
    for (const auto& rec : records) series.emplace_back(rec.k, rec.log10_r);
    return series;
}

void write_csv(std::ostream& out, std::span<const IterationRecord> records) {
    out << kCsvHeader << '\n';
    for (const auto& rec : records) {
        out << fmt::format("{},{},{},{},{},{},{}\n", rec.k, full(rec.r), full(rec.log10_r), full(rec.delta_log10_r),
                           full(rec.e), full(rec.e_over_r), full(rec.r_over_e));
    }
}

void write_plot_data(std::ostream& out, std::span<const IterationRecord> records) {
    out << "k,log10_r\n";
    for (const auto& [k, v] : plot_series(records)) out << fmt::format("{},{:.17g}\n", k, v);
}

}  // namespace wsie
