#include "wsie/problem.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include <fmt/format.h>

#include "wsie/errors.hpp"

namespace wsie {

QuadratureRule make_rule(NodePlacement placement, double a, double b, int p) {
    if (p < 1) throw ParameterError("need at least one quadrature node");
    return placement == NodePlacement::Midpoint ? midpoint_rule(a, b, p + 1) : left_endpoint_rule(a, b, p + 1);
}

void validate(const Discretization& d, double alpha1, double beta1) {
    if (d.rule.size() == 0) throw ParameterError("quadrature rule has no nodes");
    if (!(d.delta_n > 0.0)) throw ParameterError("delta must be positive");
    if (!(d.fine.mu > 0.0)) throw ParameterError("fine mu must be positive");
    if (d.fine.big_p < 1) throw ParameterError("fine P must be positive");
    if (d.k_max < 0) throw ParameterError("k_max must be nonnegative");
    if (d.delta_n >= d.rule.b - d.rule.a) throw ParameterError("delta must be below b-a");
    const double h = d.rule.mesh_h;
    if (d.delta_n < alpha1 * h || d.delta_n > beta1 * h) {
        warn(fmt::format("delta = {:g} outside [{:g}, {:g}] for mesh h = {:g}", d.delta_n, alpha1 * h, beta1 * h, h));
    }
    if (d.fine.mu >= d.delta_n) {
        warn(fmt::format("fine mu = {:g} is not below delta = {:g}", d.fine.mu, d.delta_n));
    }
}

std::function<double(double)> manufacture_forcing(const ProblemInstance& p, const Discretization& d) {
    if (!p.exact_solution) throw ParameterError("manufactured forcing needs an exact solution");

    struct State {
        State(FineRule r, Nonlinearity n, std::function<double(double)> f)
            : rule(std::move(r)), nonlinearity(std::move(n)), phi(std::move(f)) {}
        FineRule rule;
        Nonlinearity nonlinearity;
        std::function<double(double)> phi;
        std::vector<double> phi_at_nodes;
        std::mutex mutex;
        std::unordered_map<double, double> cache;
    };
    auto state = std::make_shared<State>(FineRule(p.kernel, d.fine, p.a, p.b), p.nonlinearity, *p.exact_solution);
    for (double tau : state->rule.nodes()) state->phi_at_nodes.push_back(state->phi(tau));

    return [state](double s) {
        {
            std::lock_guard lock(state->mutex);
            if (auto it = state->cache.find(s); it != state->cache.end()) return it->second;
        }
        const auto row = state->rule.kernel_row(s);
        const auto nodes = state->rule.nodes();
        std::vector<double> integrand(nodes.size());
        for (std::size_t l = 0; l < nodes.size(); ++l) {
            integrand[l] = state->nonlinearity.n_eval(s, nodes[l], state->phi_at_nodes[l]);
        }
        const double y = state->phi(s) - FineRule::apply(row, integrand);
        std::lock_guard lock(state->mutex);
        state->cache.emplace(s, y);
        return y;
    };
}

void refresh_forcing(ProblemInstance& p, const Discretization& d) {
    if (p.forcing_mode == ForcingMode::ManufacturedViaFineQuadrature) p.forcing = manufacture_forcing(p, d);
}

namespace {

std::pair<ProblemInstance, Discretization> example1() {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    ProblemInstance p{
        .name = "example1",
        .a = 0.0,
        .b = 1.0,
        .kernel = kernels::inverse_sqrt(1.0),
        .nonlinearity =
            {
                .n_eval = [](double s, double t, double u) {
                    return std::cos(two_pi * u) / (1.0 + s + t + u * u * u * u);
                },
                .dn_du =
                    [](double s, double t, double u) {
                        const double den = 1.0 + s + t + u * u * u * u;
                        return (-two_pi * std::sin(two_pi * u) * den - 4.0 * u * u * u * std::cos(two_pi * u)) /
                               (den * den);
                    },
            },
        .exact_solution = [](double) { return 7.0; },
        .forcing_mode = ForcingMode::ManufacturedViaFineQuadrature,
    };
    Discretization d{
        .rule = left_endpoint_rule(0.0, 1.0, 51),
        .delta_n = 2e-5,
        .fine = {.big_p = 500, .mu = 2e-6},
        .k_max = 5,
    };
    p.forcing = manufacture_forcing(p, d);
    return {std::move(p), std::move(d)};
}

std::pair<ProblemInstance, Discretization> example2() {
    constexpr double ln2 = std::numbers::ln2;
    ProblemInstance p{
        .name = "example2",
        .a = 0.0,
        .b = 1.0,
        .kernel = kernels::periodic_log(),
        .nonlinearity =
            {
                .n_eval = [](double, double, double u) { return u / ln2 + u * u * u; },
                .dn_du = [](double, double, double u) { return 1.0 / ln2 + 3.0 * u * u; },
            },
        .forcing = [](double) { return 0.5 + 0.25 * ln2; },
        .exact_solution = [](double) { return -0.5; },
        .forcing_mode = ForcingMode::ClosedForm,
    };
    Discretization d{
        .rule = left_endpoint_rule(0.0, 1.0, 101),
        .delta_n = 1e-6,
        .fine = {.big_p = 1000, .mu = 1e-7},
        .k_max = 5,
    };
    return {std::move(p), std::move(d)};
}

struct Registry {
    std::mutex mutex;
    std::map<std::string, ProblemFactory> factories{{"example1", &example1}, {"example2", &example2}};
};

Registry& registry() {
    static Registry r;
    return r;
}

}  // namespace

void register_problem(const std::string& name, ProblemFactory factory) {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    r.factories[name] = std::move(factory);
}

std::pair<ProblemInstance, Discretization> make_problem(const std::string& name) {
    ProblemFactory factory;
    {
        auto& r = registry();
        std::lock_guard lock(r.mutex);
        const auto it = r.factories.find(name);
        if (it == r.factories.end()) throw ParameterError("unknown problem '" + name + "'");
        factory = it->second;
    }
    return factory();
}

std::vector<std::string> registered_problems() {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    std::vector<std::string> names;
    for (const auto& [name, _] : r.factories) names.push_back(name);
    return names;
}

std::pair<ProblemInstance, Discretization> register_example(int id) {
    if (id != 1 && id != 2) throw ParameterError(fmt::format("unknown example id {}", id));
    return make_problem(fmt::format("example{}", id));
}

FineIntegrator::FineIntegrator(const ProblemInstance& p, const Discretization& d)
    : rule_(p.kernel, d.fine, p.a, p.b),
      a_(p.a),
      b_(p.b),
      subtracted_(p.forcing_mode == ForcingMode::ClosedForm && p.kernel.primitive.has_value()) {}

double FineIntegrator::integrate(std::span<const double> row, std::span<const double> h, double h_s,
                                 double s) const {
    if (subtracted_) return FineRule::apply_subtracted(row, h, h_s, line_integral(s));
    return FineRule::apply(row, h);
}

double FineIntegrator::line_integral(double s) const {
    if (rule_.kernel().primitive) return exact_line_integral(rule_.kernel(), a_, b_, s);
    double sum = 0.0;
    for (double v : rule_.kernel_row(s)) sum += v;
    return sum;
}

CoarseSystem build_coarse_system(const ProblemInstance& p, const Discretization& d) {
    const auto& rule = d.rule;
    if (rule.a != p.a || rule.b != p.b) throw GridMismatchError("quadrature rule interval differs from the problem's");
    const std::size_t n = rule.size();
    const TruncatedKernel g{p.kernel, d.delta_n};

    CoarseSystem sys{.nodes = rule.nodes, .weights = rule.weights, .weighted_kernel = DenseMatrix(n)};
    sys.row_sums.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = sys.weighted_kernel.row(i);
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row[j] = rule.weights[j] * eval_truncated(g, std::abs(rule.nodes[i] - rule.nodes[j]));
            sum += row[j];
        }
        sys.row_sums[i] = sum;
    }

    sys.line_integrals.resize(n);
    switch (d.line_integral) {
        case LineIntegralSource::Exact:
            for (std::size_t i = 0; i < n; ++i) sys.line_integrals[i] = exact_line_integral(p.kernel, p.a, p.b, rule.nodes[i]);
            break;
        case LineIntegralSource::CoarseMidpoint: {
            const auto cells = static_cast<std::size_t>(std::llround((p.b - p.a) / rule.mesh_h));
            const double h = (p.b - p.a) / static_cast<double>(cells);
            for (std::size_t i = 0; i < n; ++i) {
                double sum = 0.0;
                for (std::size_t k = 0; k < cells; ++k) {
                    sum += h * eval_truncated(g, std::abs(rule.nodes[i] - (p.a + (k + 0.5) * h)));
                }
                sys.line_integrals[i] = sum;
            }
            break;
        }
        case LineIntegralSource::Fine: {
            const FineRule fine(p.kernel, d.fine, p.a, p.b);
            for (std::size_t i = 0; i < n; ++i) {
                double sum = 0.0;
                for (double v : fine.kernel_row(rule.nodes[i])) sum += v;
                sys.line_integrals[i] = sum;
            }
            break;
        }
    }

    sys.forcing.resize(n);
    for (std::size_t i = 0; i < n; ++i) sys.forcing[i] = p.forcing(rule.nodes[i]);
    return sys;
}

}  // namespace wsie
