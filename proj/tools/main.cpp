// dgrecon: command-line front end for the verification suites and studies.
//
//   dgrecon verify-reconstruction --ell 2 --family geometric:T=1,N=32,sigma=0.5 --seed 7
//   dgrecon solve --problem heat --ell 0 --family uniform:T=1,N=10
//   dgrecon --config run.ini --p 1.5
//
// Exit codes: 0 success, 1 a checked invariant failed, 2 usage or config error.

#include <filesystem>
#include <iostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "commands.hpp"
#include "dgrecon/errors.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

} // namespace

int main(int argc, char** argv)
{
    using namespace dgrecon::cli;

    CLI::App app{"DG-in-time reconstruction and compactness diagnostics"};
    app.option_defaults()->always_capture_default();
    RunConfig config;
    std::string p = "2", r = "2", q;
    std::string config_path;

    app.add_option("command,--command", config.command, "Command to run")
        ->required()
        ->check(CLI::IsMember(command_names()));
    app.set_config("--config", "", "key=value config file; flags override it");
    app.add_option("--ell", config.ell, "Polynomial degree in time")->check(CLI::Range(0, 6));
    app.add_option("--p", p, "Exponent p (number >= 1 or inf)");
    app.add_option("--r", r, "Exponent r (number >= 1 or inf)");
    app.add_option("--q", q, "Distance exponent q (defaults to p)");
    app.add_option("--family", config.family, "Partition family, e.g. geometric:T=1,N=16,sigma=0.5");
    app.add_option("--levels", config.levels, "Refinement levels (interval or layer counts)")->delimiter(',');
    app.add_option("--problem", config.problem, "Problem preset with overrides, e.g. heat:u0=mode:2");
    app.add_option("--space", config.space, "Space triplet, e.g. spectral:m=64,laplace1d");
    app.add_option("--seed", config.seed, "Seed for all random draws");
    app.add_option("--trials", config.trials, "Random trials per level")->check(CLI::PositiveNumber);
    app.add_option("--tol", config.tol, "Newton tolerance")->check(CLI::PositiveNumber);
    app.add_option("--out", config.out, "Output stem (relative stems go under $DGRECON_OUT_DIR)");

    try {
        // CLI11 applies the file only to options not given on the command line.
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            if (arg == "--config" && i + 1 < argc)
                config_path = argv[i + 1];
            else if (arg.starts_with("--config="))
                config_path = arg.substr(9);
        }
        if (!config_path.empty() && !std::filesystem::is_regular_file(config_path)) {
            std::cerr << "error: config file not found: " << config_path << "\n";
            return kExitUsage;
        }
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        config.p = parse_exponent(p, "--p");
        config.r = parse_exponent(r, "--r");
        if (!q.empty())
            config.q = parse_exponent(q, "--q");
        const auto failures = run_command(config, std::cout);
        if (failures.empty()) {
            std::cout << config.command << ": all checks passed\n";
            return 0;
        }
        for (const auto& f : failures)
            std::cerr << "FAILED invariant: " << f << "\n";
        return kExitFailure;
    } catch (const dgrecon::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
