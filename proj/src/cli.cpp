#include "wsie/cli.hpp"

#include <fstream>
#include <future>
#include <map>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "wsie/classical.hpp"
#include "wsie/errors.hpp"
#include "wsie/linearize_first.hpp"

namespace wsie::cli {

namespace {

struct Job {
    std::string approach;
    int p;
};

Discretization configure(const RunConfig& config, const Discretization& base, const ProblemInstance& problem, int p) {
    Discretization d = base;
    d.rule = make_rule(config.nodes, problem.a, problem.b, p);
    if (config.delta) d.delta_n = *config.delta;
    if (config.fine_p) d.fine.big_p = *config.fine_p;
    if (config.fine_mu) d.fine.mu = *config.fine_mu;
    if (config.k_max) d.k_max = *config.k_max;
    if (config.line_integral) d.line_integral = *config.line_integral;
    d.interpolation = config.interpolation;
    return d;
}

std::vector<IterationRecord> solve(const Job& job, const ProblemInstance& problem, const Discretization& d) {
    if (job.approach == "classical") return solve_classical(problem, d, zero_grid(d.rule)).first.history;
    return solve_linearize_first(problem, d, [](double) { return 0.0; }).history;
}

}  // namespace

std::vector<RunOutput> execute(const RunConfig& config, std::ostream& out) {
    auto [problem, base] = make_problem(config.problem);
    if (config.delta && !(*config.delta > 0.0)) throw ParameterError("--delta must be positive");
    if (config.fine_p && *config.fine_p < 1) throw ParameterError("--fine-p must be positive");
    if (config.fine_mu && !(*config.fine_mu > 0.0)) throw ParameterError("--fine-mu must be positive");
    if (config.k_max && *config.k_max < 0) throw ParameterError("--kmax must be nonnegative");

    std::vector<int> pn = config.pn;
    if (pn.empty()) pn.push_back(static_cast<int>(base.rule.size()));
    for (int p : pn) {
        if (p < 1) throw ParameterError("--pn entries must be positive");
    }

    std::vector<Job> jobs;
    for (int p : pn) {
        if (config.approach != Approach::LinearizeFirst) jobs.push_back({"classical", p});
        if (config.approach != Approach::Classical) jobs.push_back({"linearize-first", p});
    }

    // the manufactured forcing only depends on the fine rule, shared by every job
    const Discretization shared = configure(config, base, problem, pn.front());
    refresh_forcing(problem, shared);
    std::vector<Discretization> discretizations;
    for (const auto& job : jobs) {
        discretizations.push_back(configure(config, base, problem, job.p));
        validate(discretizations.back());
    }

    std::vector<std::vector<IterationRecord>> histories(jobs.size());
    if (config.parallel && jobs.size() > 1) {
        std::vector<std::future<std::vector<IterationRecord>>> futures;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            futures.push_back(std::async(std::launch::async, [&, i] { return solve(jobs[i], problem, discretizations[i]); }));
        }
        for (std::size_t i = 0; i < jobs.size(); ++i) histories[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < jobs.size(); ++i) histories[i] = solve(jobs[i], problem, discretizations[i]);
    }

    std::filesystem::create_directories(config.out_dir);
    std::vector<RunOutput> outputs;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const std::string stem = fmt::format("{}_{}_p{}", problem.name, jobs[i].approach, jobs[i].p);
        RunOutput o{.approach = jobs[i].approach,
                    .p = jobs[i].p,
                    .records = std::move(histories[i]),
                    .csv_path = config.out_dir / (stem + ".csv"),
                    .plot_path = config.out_dir / (stem + "_plot.csv")};
        std::ofstream csv(o.csv_path);
        write_csv(csv, o.records);
        std::ofstream plot(o.plot_path);
        write_plot_data(plot, o.records);
        if (!csv || !plot) throw Error("cannot write output under " + config.out_dir.string());
        out << fmt::format("{} / {} / p = {}\n", problem.name, o.approach, o.p) << build_table(o.records) << '\n';
        outputs.push_back(std::move(o));
    }
    return outputs;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        execute(config, out);
        return kExitOk;
    } catch (const ParameterError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SingularMatrixError& e) {
        err << "solver failure at iteration " << e.iteration << ": " << e.what() << '\n';
        return kExitSolverFailure;
    } catch (const DivergenceError& e) {
        err << "solver failure at iteration " << e.iteration << ": " << e.what() << '\n';
        return kExitSolverFailure;
    } catch (const InterpolationDegeneracyError& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitSolverFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitSolverFailure;
    }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Solvers for nonlinear weakly singular integral equations"};
    app.set_config("--config", "", "INI-style key = value file; command-line flags take precedence");
    app.require_subcommand(1, 1);
    auto* run_cmd = app.add_subcommand("run", "solve a registered problem and write tables, CSV and plot data");
    run_cmd->fallthrough();
    run_cmd->footer("Run options are listed by `wsie --help`.");

    RunConfig config;
    int example = 2;
    std::string problem_name;
    std::string approach = "both";
    std::string nodes = "paper";
    std::string line_integral;
    std::string interp = "natural";
    std::string out_dir = "results";
    bool sequential = false;

    app.add_option("--example", example, "registered example id")->check(CLI::IsMember({1, 2}));
    app.add_option("--problem", problem_name, "registered problem name (overrides --example)");
    app.add_option("--approach", approach)->check(CLI::IsMember({"classical", "linearize-first", "both"}));
    app.add_option("--pn", config.pn, "comma-separated node counts")->delimiter(',');
    app.add_option("--delta", config.delta, "kernel truncation width");
    app.add_option("--fine-p", config.fine_p, "fine quadrature node count");
    app.add_option("--fine-mu", config.fine_mu, "fine quadrature truncation width");
    app.add_option("--kmax", config.k_max, "maximum Newton iterations");
    app.add_option("--nodes", nodes)->check(CLI::IsMember({"paper", "midpoint"}));
    app.add_option("--line-integral", line_integral, "classical f(t_i) source")
        ->check(CLI::IsMember({"exact", "midpoint", "fine"}));
    app.add_option("--interp", interp, "linearize-first continuous extension")
        ->check(CLI::IsMember({"natural", "linear"}));
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--sequential", sequential, "solve sweeps one at a time");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    }

    config.problem = problem_name.empty() ? fmt::format("example{}", example) : problem_name;
    config.approach = approach == "classical"         ? Approach::Classical
                      : approach == "linearize-first" ? Approach::LinearizeFirst
                                                      : Approach::Both;
    config.nodes = nodes == "midpoint" ? NodePlacement::Midpoint : NodePlacement::LeftEndpoint;
    if (!line_integral.empty()) {
        static const std::map<std::string, LineIntegralSource> sources{
            {"exact", LineIntegralSource::Exact},
            {"midpoint", LineIntegralSource::CoarseMidpoint},
            {"fine", LineIntegralSource::Fine}};
        config.line_integral = sources.at(line_integral);
    }
    config.interpolation = interp == "linear" ? Interpolation::PiecewiseLinear : Interpolation::Natural;
    config.out_dir = out_dir;
    config.parallel = !sequential;
    return run(config, out, err);
}

}  // namespace wsie::cli
