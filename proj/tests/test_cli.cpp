#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "wsie/cli.hpp"
#include "wsie/problem.hpp"

namespace fs = std::filesystem;
using namespace wsie;

namespace {

int invoke(std::vector<std::string> args, std::string* out_text = nullptr) {
    args.insert(args.begin(), "wsie");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str() + err.str();
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("kmax 0 writes a single normalized row per approach") {
    const fs::path dir = "cli_k0";
    fs::remove_all(dir);
    std::string text;
    REQUIRE(invoke({"run", "--example", "2", "--approach", "both", "--kmax", "0", "--out", dir.string()}, &text) == 0);
    for (const char* name : {"example2_classical_p100.csv", "example2_linearize-first_p100.csv"}) {
        const auto csv = lines(slurp(dir / name));
        REQUIRE(csv.size() == 2);
        CHECK(csv[1] == "0,1,0,NA,1,1,1");
    }
    CHECK(lines(slurp(dir / "example2_classical_p100_plot.csv")) == std::vector<std::string>{"k,log10_r", "0,0"});
    CHECK(text.find("example2 / linearize-first / p = 100") != std::string::npos);
}

TEST_CASE("p sweeps produce one file set per grid") {
    const fs::path dir = "cli_sweep";
    fs::remove_all(dir);
    REQUIRE(invoke({"run", "--example", "1", "--approach", "classical", "--pn", "20,40", "--kmax", "2", "--out",
                    dir.string()}) == 0);
    CHECK(lines(slurp(dir / "example1_classical_p20.csv")).size() == 4);
    CHECK(lines(slurp(dir / "example1_classical_p40.csv")).size() == 4);
    CHECK(fs::exists(dir / "example1_classical_p40_plot.csv"));
}

TEST_CASE("identical runs give identical bytes") {
    fs::remove_all("cli_a");
    fs::remove_all("cli_b");
    for (const char* dir : {"cli_a", "cli_b"}) {
        REQUIRE(invoke({"run", "--example", "1", "--approach", "both", "--pn", "30,50", "--out", dir}) == 0);
    }
    for (const char* name : {"example1_classical_p30.csv", "example1_linearize-first_p50.csv"}) {
        const auto a = slurp(fs::path("cli_a") / name);
        CHECK_FALSE(a.empty());
        CHECK(a == slurp(fs::path("cli_b") / name));
    }
}

TEST_CASE("config files are read and flags win") {
    const fs::path dir = "cli_cfg";
    fs::remove_all(dir);
    {
        std::ofstream cfg("run.ini");
        cfg << "example = 2\napproach = linearize-first\nkmax = 3\nout = " << dir.string() << "\n";
    }
    REQUIRE(invoke({"run", "--config", "run.ini"}) == 0);
    CHECK(lines(slurp(dir / "example2_linearize-first_p100.csv")).size() == 5);
    REQUIRE(invoke({"run", "--config", "run.ini", "--kmax", "1"}) == 0);
    CHECK(lines(slurp(dir / "example2_linearize-first_p100.csv")).size() == 3);
    CHECK_FALSE(fs::exists(dir / "example2_classical_p100.csv"));
}

TEST_CASE("invalid configurations are usage errors") {
    CHECK(invoke({"run", "--approach", "sideways"}) == cli::kExitUsage);
    CHECK(invoke({"run", "--example", "3"}) == cli::kExitUsage);
    CHECK(invoke({"run", "--pn", "0", "--out", "cli_bad"}) == cli::kExitUsage);
    CHECK(invoke({"run", "--delta", "-1", "--out", "cli_bad"}) == cli::kExitUsage);
    CHECK(invoke({"run", "--problem", "missing", "--out", "cli_bad"}) == cli::kExitUsage);
    CHECK(invoke({"run", "--config", "no_such_file.ini"}) == cli::kExitUsage);
    CHECK(invoke({}) == cli::kExitUsage);
}

TEST_CASE("solver failures exit nonzero and name the iteration") {
    register_problem("cli_singular", [] {
        auto [p, d] = register_example(1);
        p.name = "cli_singular";
        p.nonlinearity = {[](double, double, double u) { return u; }, [](double, double, double) { return 1.0; }};
        p.forcing = [](double) { return 1.0; };
        p.exact_solution.reset();
        p.forcing_mode = ForcingMode::ClosedForm;
        return std::pair{p, d};
    });
    std::string text;
    CHECK(invoke({"run", "--problem", "cli_singular", "--approach", "classical", "--pn", "1", "--delta", "1e-3",
                  "--line-integral", "exact", "--out", "cli_fail"},
                 &text) == cli::kExitSolverFailure);
    CHECK(text.find("iteration 1") != std::string::npos);
}
