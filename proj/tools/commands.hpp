#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace dgrecon::cli {

struct RunConfig {
    std::string command;
    std::string problem = "heat";
    std::string family;
    std::optional<std::string> space;
    std::vector<int> levels;
    int ell = 1;
    double p = 2.0;
    double r = 2.0;
    std::optional<double> q;
    std::uint64_t seed = 0;
    int trials = 100;
    double tol = 1e-12;
    std::string out;
};

/// Thrown for bad flags or configs; mapped to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names{"verify-reconstruction", "verify-identities", "solve",
                                                "convergence",           "compactness",       "constants"};
    return names;
}

/// Parses "inf"/"infinity" or a number >= 1.
double parse_exponent(const std::string& text, const char* flag);

/// <dir>/<stem> where dir is DGRECON_OUT_DIR for relative stems.
std::filesystem::path output_stem(const RunConfig& config);

/// Runs one command; returns the names of violated invariants (empty on
/// success). Progress lines go to `log`.
std::vector<std::string> run_command(const RunConfig& config, std::ostream& log);

} // namespace dgrecon::cli
