#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>

#include <fmt/format.h>

#include "dgrecon/compactness.hpp"
#include "dgrecon/dg_parabolic.hpp"
#include "dgrecon/reconstruction.hpp"
#include "dgrecon/serialization.hpp"
#include "json.hpp"

namespace dgrecon::cli {

namespace {

constexpr double kBoundSlack = 1e-9;
constexpr double kContinuityTol = 1e-12;
constexpr double kIdentityTol = 1e-11;
constexpr double kGalerkinTol = 1e-11;
constexpr double kEnergyTol = 1e-10;

std::string num(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", x);
}

/// Family specs contain commas, so they are quoted in CSV rows.
std::string csv_field(const std::string& text)
{
    if (text.find_first_of(",\"") == std::string::npos)
        return text;
    std::string out = "\"";
    for (char c : text)
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

Vector random_vector(std::uint64_t seed, int dim)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(-1.0, 1.0);
    Vector v(dim);
    for (int k = 0; k < dim; ++k)
        v[k] = coin(rng);
    return v;
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t level, int trial)
{
    return base + 1000003ULL * level + static_cast<std::uint64_t>(trial);
}

void write_file(const std::filesystem::path& path, const std::string& text, std::ostream& log)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError(fmt::format("cannot write {}", path.string()));
    out << text;
    log << "wrote " << path.string() << "\n";
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const std::string& suffix)
{
    return stem.string() + suffix;
}

std::vector<int> default_levels(const FamilySpec& spec)
{
    if (spec.kind == FamilyKind::geometric)
        return {4, 6, 8, 10};
    return {8, 16, 32, 64};
}

/// --levels builds a refinement family; otherwise the spec must carry N.
std::vector<TimePartition> partitions_for(const RunConfig& config, const std::string& fallback)
{
    const FamilySpec spec = parse_family_spec(config.family.empty() ? fallback : config.family);
    if (!config.levels.empty())
        return PartitionFamily{spec, config.levels}.generate();
    if (!spec.intervals)
        throw UsageError("family spec needs N=<intervals> or --levels");
    return {build_partition(spec)};
}

PartitionFamily family_for(const RunConfig& config, const std::string& fallback)
{
    FamilySpec spec = parse_family_spec(config.family.empty() ? fallback : config.family);
    spec.intervals.reset();
    return PartitionFamily{spec, config.levels.empty() ? default_levels(spec) : config.levels};
}

std::string family_label(const RunConfig& config, const std::string& fallback)
{
    return config.family.empty() ? fallback : config.family;
}

SpaceTriplet space_for(const RunConfig& config, const std::string& fallback)
{
    return parse_triplet_spec(config.space.value_or(fallback));
}

ParabolicProblem problem_for(const RunConfig& config)
{
    std::optional<SpaceTriplet> space;
    if (config.space)
        space = parse_triplet_spec(*config.space);
    return parse_problem_spec(config.problem, space);
}

/// Largest trace of u or its reconstruction seen at the nodes, plus one.
double node_scale(const PiecewisePoly& u, const Vector& u0, const SpaceTriplet& space)
{
    double scale = space.norm(Norm::B, u0);
    for (int n = 0; n < u.intervals(); ++n)
        scale = std::max({scale, space.norm(Norm::B, u.right_limit(n)), space.norm(Norm::B, u.left_limit(n + 1))});
    return 1.0 + scale;
}

/// max_n |R u(t_n^+) - R u(t_n^-)| and |R u(t_n^-) - u(t_n^-)|, relative to node_scale.
double node_mismatch(const PiecewisePoly& u, const Vector& u0, const SpaceTriplet& space)
{
    const PiecewisePoly recon = reconstruct(u, u0);
    double worst = 0.0;
    for (int n = 0; n < u.intervals(); ++n) {
        const Vector before = n == 0 ? u0 : recon.left_limit(n);
        worst = std::max(worst, space.norm(Norm::B, recon.right_limit(n) - before));
        worst = std::max(worst, space.norm(Norm::B, recon.left_limit(n + 1) - u.left_limit(n + 1)));
    }
    return worst / node_scale(u, u0, space);
}

std::vector<std::string> verify_reconstruction(const RunConfig& config, std::ostream& log)
{
    const std::string fallback = "geometric:T=1,N=32,sigma=0.5";
    const auto partitions = partitions_for(config, fallback);
    const std::string label = family_label(config, fallback);
    const SpaceTriplet space = space_for(config, "euclidean:m=3");
    const double c_r = reconstruction_constant(config.ell, config.p);

    std::string csv = "ell,p,family,level,intervals,trial,defect_norm_LpB,jump_functional_LpB,ratio,"
                      "C_R_closed_form,node_mismatch_rel,derivative_identity_residual\n";
    double worst_ratio = 0.0, worst_mismatch = 0.0, worst_identity = 0.0;
    int bound_violations = 0, continuity_violations = 0, identity_violations = 0;
    for (std::size_t level = 0; level < partitions.size(); ++level) {
        const TimePartition& partition = partitions[level];
        for (int t = 0; t < config.trials; ++t) {
            const std::uint64_t seed = trial_seed(config.seed, level, t);
            const PiecewisePoly u = random_piecewise_poly(partition, config.ell, space.dim(), seed);
            const Vector u0 = random_vector(seed, space.dim());
            const PiecewisePoly v = random_piecewise_poly(partition, config.ell, space.dim(), seed ^ 0x5bd1e995ULL);
            const double defect = defect_norm(u, u0, config.p, space, Norm::B);
            const double jumps = jump_functional(u, u0, config.p, space, Norm::B);
            const double ratio = jumps > 0.0 ? defect / jumps : 0.0;
            const double mismatch = node_mismatch(u, u0, space);
            const double identity = verify_derivative_identity(u, u0, v, space);
            bound_violations += defect > c_r * jumps * (1.0 + kBoundSlack);
            continuity_violations += mismatch > kContinuityTol;
            identity_violations += identity > kIdentityTol;
            worst_ratio = std::max(worst_ratio, ratio);
            worst_mismatch = std::max(worst_mismatch, mismatch);
            worst_identity = std::max(worst_identity, identity);
            csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", config.ell, num(config.p), csv_field(label),
                               level, partition.size(), t, num(defect), num(jumps), num(ratio), num(c_r),
                               num(mismatch), num(identity));
        }
    }
    write_file(with_suffix(output_stem(config), "_trials.csv"), csv, log);
    log << fmt::format("max ratio {} (C_R = {}), max node mismatch {}, max identity residual {}\n", num(worst_ratio),
                       num(c_r), num(worst_mismatch), num(worst_identity));

    std::vector<std::string> failures;
    if (bound_violations)
        failures.push_back(fmt::format("defect_norm <= C_R * jump_functional ({} violations)", bound_violations));
    if (continuity_violations)
        failures.push_back(fmt::format("node continuity of R u ({} violations)", continuity_violations));
    if (identity_violations)
        failures.push_back(fmt::format("derivative identity ({} violations)", identity_violations));
    return failures;
}

struct CheckTally {
    std::string name;
    int trials = 0;
    int violations = 0;
    double worst = 0.0; ///< max lhs / rhs

    void add(const InequalitySides& sides, double slack = 1e-12)
    {
        ++trials;
        violations += !sides.holds(slack);
        if (sides.rhs > 0.0)
            worst = std::max(worst, sides.lhs / sides.rhs);
    }
};

std::vector<std::string> verify_identities(const RunConfig& config, std::ostream& log)
{
    const std::string fallback = "random:T=1,N=16,seed=1,cap=2";
    const auto partitions = partitions_for(config, fallback);
    const SpaceTriplet space = space_for(config, "spectral:m=16,laplace1d");
    const double p = config.p;
    const double c_tr = inverse_trace_bound(config.ell, p);
    const double c_r = reconstruction_constant(config.ell, p);

    CheckTally identity{"derivative_identity"};
    CheckTally trace{"inverse_trace"};
    CheckTally step{p < 2.0 ? "holder_step" : "vector_norm_step"};
    CheckTally interpolation{"interpolation_theta_half"};
    CheckTally stability{"reconstruction_stability"};
    for (int t = 0; t < config.trials; ++t) {
        const std::size_t level = static_cast<std::size_t>(t) % partitions.size();
        const TimePartition& partition = partitions[level];
        const std::uint64_t seed = trial_seed(config.seed, level, t);
        const PiecewisePoly u = random_piecewise_poly(partition, config.ell, space.dim(), seed);
        const Vector u0 = random_vector(seed, space.dim());
        const PiecewisePoly v = random_piecewise_poly(partition, config.ell, space.dim(), seed ^ 0x5bd1e995ULL);

        identity.add({verify_derivative_identity(u, u0, v, space), kIdentityTol}, 0.0);
        trace.add(inverse_trace_check(u, u0, static_cast<int>(seed % static_cast<std::uint64_t>(partition.size())),
                                      p, space, Norm::B, c_tr));
        std::vector<double> jumps, taus;
        for (int n = 0; n < partition.size(); ++n) {
            jumps.push_back(space.norm(Norm::B, jump(u, n, u0)));
            taus.push_back(partition.step(n));
        }
        if (p < 2.0)
            step.add(holder_step_check(jumps, taus, p, partition.node(partition.size()), partition.tau_max()));
        else
            step.add(vector_norm_step_check(jumps, taus, p));
        const Vector w = random_vector(seed ^ 0x9e3779b9ULL, space.dim());
        interpolation.add({interpolation_ratio(space, w), 1.0});
        stability.add(reconstruction_stability_check(u, u0, p, space, c_r, c_tr));
    }

    std::string csv = "check,ell,p,trials,violations,max_lhs_over_rhs\n";
    std::vector<std::string> failures;
    for (const CheckTally* c : {&identity, &trace, &step, &interpolation, &stability}) {
        csv += fmt::format("{},{},{},{},{},{}\n", c->name, config.ell, num(p), c->trials, c->violations,
                           num(c->worst));
        log << fmt::format("{}: {} trials, {} violations, max lhs/rhs {}\n", c->name, c->trials, c->violations,
                           num(c->worst));
        if (c->violations)
            failures.push_back(fmt::format("{} ({} violations)", c->name, c->violations));
    }
    write_file(with_suffix(output_stem(config), "_checks.csv"), csv, log);
    return failures;
}

std::vector<std::string> solve_command(const RunConfig& config, std::ostream& log)
{
    const std::string fallback = "uniform:T=1,N=10";
    const FamilySpec spec = parse_family_spec(config.family.empty() ? fallback : config.family);
    if (!spec.intervals)
        throw UsageError("solve needs a family spec with N=<intervals>");
    const TimePartition partition = build_partition(spec);
    const ParabolicProblem problem = problem_for(config);
    const PiecewisePoly u = solve(problem, partition, config.ell, NewtonOptions{config.tol, 50});
    const SpaceTriplet& space = problem.space;

    std::string csv = "n,t_n,u_minus_B_norm,jump_B_norm,u_minus_coord1\n";
    csv += fmt::format("0,{},{},,{}\n", num(0.0), num(space.norm(Norm::B, problem.initial)), num(problem.initial[0]));
    for (int n = 1; n <= partition.size(); ++n) {
        const Vector left = u.left_limit(n);
        csv += fmt::format("{},{},{},{},{}\n", n, num(partition.node(n)), num(space.norm(Norm::B, left)),
                           num(space.norm(Norm::B, jump(u, n - 1, problem.initial))), num(left[0]));
    }
    const auto stem = output_stem(config);
    write_file(with_suffix(stem, "_nodes.csv"), csv, log);
    write_file(with_suffix(stem, "_solution.json"), to_json(u) + "\n", log);

    const StabilityLedger ledger = stability_ledger(problem, u, config.p, config.r);
    const double residual = galerkin_residual(problem, u);
    nlohmann::ordered_json j;
    j["problem"] = config.problem;
    j["family"] = spec.to_string();
    j["ell"] = config.ell;
    j["p"] = num(config.p);
    j["r"] = num(config.r);
    j["final_B_norm_sq"] = num(ledger.final_b_norm_sq);
    j["h1_energy_LpX"] = num(ledger.energy);
    j["h2_dt_recon_LrY"] = num(ledger.dt_recon_dual);
    j["h3_jump_sum_B_sq"] = num(ledger.jump_sum_b_sq);
    j["F_dual_LrY"] = num(ledger.f_dual);
    j["projection_slack"] = num(ledger.projection_slack);
    j["energy_identity_residual"] = num(ledger.energy_identity_residual);
    j["galerkin_residual"] = num(residual);
    write_file(with_suffix(stem, "_ledger.json"), j.dump(2) + "\n", log);
    log << fmt::format("solved {} slabs, |u(T)|_B = {}, galerkin residual {}\n", partition.size(),
                       num(space.norm(Norm::B, u.left_limit(partition.size()))), num(residual));

    std::vector<std::string> failures;
    if (!(residual <= kGalerkinTol))
        failures.push_back(fmt::format("galerkin orthogonality (residual {})", num(residual)));
    if (problem.is_homogeneous() && !(ledger.energy_identity_residual <= kEnergyTol))
        failures.push_back(fmt::format("energy identity (residual {})", num(ledger.energy_identity_residual)));
    return failures;
}

std::vector<std::string> report_failures(const RefinementReport& report, const RunConfig& config, std::ostream& log)
{
    for (const auto& path : write_report(report, output_stem(config).string()))
        log << "wrote " << path << "\n";
    for (std::size_t k = 0; k < report.cauchy.size(); ++k)
        log << fmt::format("d_{} = {}\n", k, num(report.cauchy[k]));
    if (report.error_rate)
        log << fmt::format("L2(0,T;B) error rate {}\n", num(*report.error_rate));
    if (report.nodal_rate)
        log << fmt::format("nodal error rate {}\n", num(*report.nodal_rate));
    return report.failures;
}

std::vector<std::string> convergence(const RunConfig& config, std::ostream& log)
{
    const ParabolicProblem problem = problem_for(config);
    if (!problem.is_homogeneous() || !problem.space.is_spectral())
        throw UsageError("convergence needs a homogeneous problem on a spectral triplet (exact solution)");
    const PartitionFamily family = family_for(config, "uniform:T=1");
    StudyOptions options;
    options.p = config.p;
    options.r = config.r;
    options.q = config.q;
    options.newton.tolerance = config.tol;
    options.seed = config.seed;
    options.expected_order = config.ell + 1;
    options.rate_tolerance = 0.2;
    options.exact = [problem](double t) {
        return exact_heat_solution(problem.space, problem.initial, t, problem.operator_scale);
    };
    return report_failures(run_refinement_study(problem, family, config.ell, options), config, log);
}

std::vector<std::string> compactness(const RunConfig& config, std::ostream& log)
{
    const ParabolicProblem problem = problem_for(config);
    const PartitionFamily family = family_for(config, "geometric:T=1,sigma=0.5");
    StudyOptions options;
    options.p = config.p;
    options.r = config.r;
    options.q = config.q;
    options.newton.tolerance = config.tol;
    options.seed = config.seed;
    const QRange range = admissible_q_range(config.p, config.r);
    if (range.admissible)
        log << fmt::format("admissible q < {}\n", num(range.q_max));
    else
        log << "no admissible q for these (p, r)\n";
    return report_failures(run_refinement_study(problem, family, config.ell, options), config, log);
}

std::vector<std::string> constants(const RunConfig& config, std::ostream& log)
{
    const PartitionFamily family = family_for(config, "geometric:T=1,sigma=0.5");
    const auto partitions = family.generate();
    std::set<double> exponents{1.0, 2.0, kInfinity, config.p};

    std::string csv = "ell,p,C_R_closed_form,C_R_estimate,C_tr_bound,C_tr_estimate\n";
    std::vector<std::string> failures;
    for (int ell = 0; ell <= config.ell; ++ell)
        for (double p : exponents) {
            const double exact = reconstruction_constant(ell, p);
            const double estimate =
                estimate_reconstruction_constant(partitions, ell, p, config.trials, config.seed).estimate;
            const double bound = inverse_trace_bound(ell, p);
            const double trace = estimate_inverse_trace_constant(ell, p, config.trials, config.seed);
            csv += fmt::format("{},{},{},{},{},{}\n", ell, num(p), num(exact), num(estimate), num(bound), num(trace));
            if (estimate > exact * (1.0 + kBoundSlack))
                failures.push_back(fmt::format("C_R estimate above closed form (ell={}, p={})", ell, num(p)));
            if (trace > bound * (1.0 + 1e-12))
                failures.push_back(fmt::format("inverse-trace estimate above bound (ell={}, p={})", ell, num(p)));
        }
    write_file(with_suffix(output_stem(config), "_constants.csv"), csv, log);
    return failures;
}

} // namespace

double parse_exponent(const std::string& text, const char* flag)
{
    if (text == "inf" || text == "infinity" || text == "Inf")
        return kInfinity;
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty())
        throw UsageError(fmt::format("{}: '{}' is not a number or 'inf'", flag, text));
    if (!(value >= 1.0))
        throw UsageError(fmt::format("{}: exponent {} is below 1", flag, text));
    return value;
}

std::filesystem::path output_stem(const RunConfig& config)
{
    const std::filesystem::path stem = config.out.empty() ? config.command : config.out;
    if (stem.is_absolute())
        return stem;
    if (const char* dir = std::getenv("DGRECON_OUT_DIR"); dir && *dir)
        return std::filesystem::path(dir) / stem;
    return stem;
}

std::vector<std::string> run_command(const RunConfig& config, std::ostream& log)
{
    if (config.command == "verify-reconstruction")
        return verify_reconstruction(config, log);
    if (config.command == "verify-identities")
        return verify_identities(config, log);
    if (config.command == "solve")
        return solve_command(config, log);
    if (config.command == "convergence")
        return convergence(config, log);
    if (config.command == "compactness")
        return compactness(config, log);
    if (config.command == "constants")
        return constants(config, log);
    throw UsageError(fmt::format("unknown command '{}'", config.command));
}

} // namespace dgrecon::cli
