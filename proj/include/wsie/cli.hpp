#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wsie/diagnostics.hpp"
#include "wsie/problem.hpp"

namespace wsie::cli {

enum class Approach { Classical, LinearizeFirst, Both };

struct RunConfig {
    std::string problem = "example2";  // registered problem name
    Approach approach = Approach::Both;
    std::vector<int> pn;  // empty: the problem's registered grid
    std::optional<double> delta;
    std::optional<int> fine_p;
    std::optional<double> fine_mu;
    std::optional<int> k_max;
    NodePlacement nodes = NodePlacement::LeftEndpoint;
    std::optional<LineIntegralSource> line_integral;
    Interpolation interpolation = Interpolation::Natural;
    std::filesystem::path out_dir = "results";
    bool parallel = true;
};

struct RunOutput {
    std::string approach;
    int p = 0;
    std::vector<IterationRecord> records;
    std::filesystem::path csv_path;
    std::filesystem::path plot_path;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolverFailure = 3;

/// Throws ParameterError for an invalid configuration; solver errors propagate.
std::vector<RunOutput> execute(const RunConfig& config, std::ostream& out);

/// Runs and maps failures to exit codes, reporting on err.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Command-line entry point: `run --example 2 --approach both ...`.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wsie::cli
