#include "dgrecon/compactness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include "json.hpp"

#include "dgrecon/errors.hpp"
#include "dgrecon/reconstruction.hpp"

namespace dgrecon {

namespace {

constexpr int kDenseSamples = 2048;
constexpr double kRoundoff = 1e-9;

/// Least-squares line through (x, y); returns (slope, intercept).
std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("rate fit needs at least two distinct step sizes");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

std::pair<double, double> log_fit(std::span<const double> values, std::span<const double> taus)
{
    if (values.size() != taus.size())
        throw std::invalid_argument("rate fit: value and step lists differ in length");
    if (values.size() < 2)
        throw std::invalid_argument("rate fit needs at least two pairs");
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!(values[k] > 0.0) || !(taus[k] > 0.0))
            throw std::invalid_argument(
                fmt::format("rate fit needs positive pairs, got ({}, {})", values[k], taus[k]));
        lx.push_back(std::log(taus[k]));
        ly.push_back(std::log(values[k]));
    }
    return fit_line(lx, ly);
}

BoundednessCheck check_bounded(std::string name, std::vector<double> values, double cap, double growth)
{
    BoundednessCheck check;
    check.quantity = std::move(name);
    check.cap = cap;
    double running = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double bound = k == 0 ? values[0] : std::max((1.0 + growth) * running, cap);
        check.bounds.push_back(bound);
        if (!(values[k] <= bound * (1.0 + kRoundoff) + kRoundoff * cap))
            check.holds = false;
        running = std::max(running, values[k]);
    }
    check.values = std::move(values);
    return check;
}

double c0_distance_approx(const PiecewisePoly& a, const PiecewisePoly& b, const Vector& initial,
                          const SpaceTriplet& space)
{
    const PiecewisePoly ra = reconstruct(a, initial);
    const PiecewisePoly rb = reconstruct(b, initial);
    const double T = a.partition().final_time();
    double best = 0.0;
    for (int j = 0; j <= kDenseSamples; ++j) {
        const double t = T * j / kDenseSamples;
        // R u is continuous, so either one-sided evaluation gives the value.
        const Side side = j == 0 ? Side::right : Side::left;
        best = std::max(best, space.norm(Norm::B, ra.eval(t, side) - rb.eval(t, side)));
    }
    return best;
}

std::string num(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", x);
}

nlohmann::ordered_json jnum(double x)
{
    if (std::isfinite(x))
        return x;
    return num(x);
}

template <class T>
nlohmann::ordered_json jlist(const std::vector<T>& xs)
{
    auto out = nlohmann::ordered_json::array();
    for (const auto& x : xs)
        out.push_back(jnum(static_cast<double>(x)));
    return out;
}

} // namespace

double fit_rate(std::span<const double> values, std::span<const double> taus)
{
    return log_fit(values, taus).first;
}

ShiftStudy shift_exponent_study(const PiecewisePoly& u, std::span<const double> deltas, double r,
                                const SpaceTriplet& space, Norm which)
{
    if (deltas.size() < 3)
        throw std::invalid_argument("shift study needs at least three shifts");
    ShiftStudy out;
    for (double delta : deltas) {
        out.deltas.push_back(delta);
        out.values.push_back(shift_difference(u, delta, r, space, which));
    }
    const auto [slope, intercept] = log_fit(out.values, out.deltas);
    out.exponent = slope;
    out.constant = std::exp(intercept);
    return out;
}

double conjugate_exponent(double p)
{
    if (!(p >= 1.0))
        throw std::invalid_argument(fmt::format("exponent {} is below 1", p));
    if (p == 1.0)
        return std::numeric_limits<double>::infinity();
    if (std::isinf(p))
        return 1.0;
    return p / (p - 1.0);
}

QRange admissible_q_range(double p, double r, double theta)
{
    if (!(p >= 1.0) || !(r >= 1.0))
        throw std::invalid_argument("exponents must be at least 1");
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument(fmt::format("interpolation exponent {} outside (0, 1]", theta));
    const double inf = std::numeric_limits<double>::infinity();
    QRange out;
    if (std::isinf(p) || std::isinf(r))
        return {true, inf};
    const double lhs = (r - 1.0) * p / r;
    const double rhs = theta == 1.0 ? inf : theta / (1.0 - theta);
    if (lhs > rhs)
        return out;
    const double denominator = (1.0 - theta) * (1.0 - r) * p + theta * r;
    out.admissible = true;
    out.q_max = denominator <= 0.0 ? inf : r * p / denominator;
    return out;
}

std::array<double, 3> stability_caps(const ParabolicProblem& problem, double p, double r)
{
    if (!problem.is_homogeneous() || p != 2.0 || r != 2.0 || !(problem.operator_scale > 0.0))
        return {0.0, 0.0, 0.0};
    const double half_sq = 0.5 * std::pow(problem.space.norm(Norm::B, problem.initial), 2);
    const double s = problem.operator_scale;
    return {problem.coercivity / s * half_sq, std::sqrt(s * half_sq), 2.0 * half_sq};
}

RefinementReport run_refinement_study(const ParabolicProblem& problem, std::span<const TimePartition> partitions,
                                      int degree, const StudyOptions& options, const std::string& family_label)
{
    if (partitions.size() < 3)
        throw std::invalid_argument("refinement study needs at least three levels");
    for (std::size_t k = 1; k < partitions.size(); ++k) {
        if (!(partitions[k].tau_max() < partitions[k - 1].tau_max()))
            throw std::invalid_argument(fmt::format("level {} does not refine level {} (tau_max)", k, k - 1));
        if (partitions[k].final_time() != partitions[0].final_time())
            throw std::invalid_argument("levels have different final times");
    }
    RefinementReport report;
    report.family = family_label;
    report.degree = degree;
    report.p = options.p;
    report.r = options.r;
    report.q = options.q.value_or(options.p);
    const SpaceTriplet& space = problem.space;

    for (std::size_t k = 0; k < partitions.size(); ++k) {
        const TimePartition& partition = partitions[k];
        PiecewisePoly u = [&] {
            try {
                return solve(problem, partition, degree, options.newton);
            } catch (const NumericalFailure& e) {
                throw NumericalFailure(fmt::format("level {}: {}", k, e.what()), e.interval(), e.residual());
            }
        }();
        LevelReport level;
        level.intervals = partition.size();
        level.tau_max = partition.tau_max();
        level.tau_min = partition.tau_min();
        level.step_ratio = step_ratio_constant(partition);
        level.quasi_uniformity = quasi_uniformity_ratio(partition);
        level.ledger = stability_ledger(problem, u, options.p, options.r);
        const double jumps = jump_functional(u, problem.initial, options.p, space, Norm::B);
        level.defect_ratio = jumps > 0.0 ? defect_norm(u, problem.initial, options.p, space, Norm::B) / jumps : 0.0;
        const TimePartition single[] = {partition};
        level.c_r_estimate =
            estimate_reconstruction_constant(single, degree, options.p, 4, options.seed + k).estimate;
        if (options.exact) {
            const auto& exact = *options.exact;
            level.error = sampled_bochner_norm(
                partition, [&](int n, double t) -> Vector { return u.eval_on_interval(n, t) - exact(t); }, space,
                NormSpec{2.0, Norm::B, 2}, 2 * degree + 6);
            double nodal = 0.0;
            for (int n = 1; n <= partition.size(); ++n)
                nodal = std::max(nodal, space.norm(Norm::B, u.left_limit(n) - exact(partition.node(n))));
            level.nodal_error = nodal;
        }
        if (jumps > 0.0 && !(level.defect_ratio <= level.c_r_estimate * (1.0 + kRoundoff)))
            report.failures.push_back(fmt::format("level {}: reconstruction defect exceeds C_R", k));
        report.levels.push_back(std::move(level));
        report.solutions.push_back(std::move(u));
    }

    const NormSpec distance{report.q, Norm::B, 2};
    const auto& finest = report.solutions.back();
    for (std::size_t k = 0; k + 1 < report.solutions.size(); ++k) {
        report.cauchy.push_back(bochner_distance(report.solutions[k], report.solutions[k + 1], space, distance));
        report.to_finest.push_back(bochner_distance(report.solutions[k], finest, space, distance));
        report.c0_distance.push_back(
            c0_distance_approx(report.solutions[k], report.solutions[k + 1], problem.initial, space));
    }
    for (std::size_t k = 0; k + 1 < report.cauchy.size(); ++k) {
        const double a = report.cauchy[k];
        const double b = report.cauchy[k + 1];
        if (!(b < a || (a == 0.0 && b == 0.0)))
            report.cauchy_decreasing = false;
    }
    if (!report.cauchy_decreasing)
        report.failures.push_back("cauchy distances not monotonically decreasing");

    const auto caps = stability_caps(problem, options.p, options.r);
    std::vector<double> h1, h2, h3;
    for (const auto& level : report.levels) {
        h1.push_back(level.ledger.energy);
        h2.push_back(level.ledger.dt_recon_dual);
        h3.push_back(level.ledger.jump_sum_b_sq);
    }
    report.bounds.push_back(check_bounded("h1_energy_LpX", std::move(h1), caps[0], options.growth_tolerance));
    report.bounds.push_back(check_bounded("h2_dt_recon_LrY", std::move(h2), caps[1], options.growth_tolerance));
    report.bounds.push_back(check_bounded("h3_jump_sum_B_sq", std::move(h3), caps[2], options.growth_tolerance));
    for (const auto& check : report.bounds)
        if (!check.holds)
            report.failures.push_back(check.quantity + " not bounded across levels");

    if (options.exact) {
        std::vector<double> taus, errors, nodal;
        for (const auto& level : report.levels) {
            taus.push_back(level.tau_max);
            errors.push_back(*level.error);
            nodal.push_back(*level.nodal_error);
        }
        if (std::all_of(errors.begin(), errors.end(), [](double e) { return e > 0.0; }))
            report.error_rate = fit_rate(errors, taus);
        if (std::all_of(nodal.begin(), nodal.end(), [](double e) { return e > 0.0; }))
            report.nodal_rate = fit_rate(nodal, taus);
        if (options.expected_order && report.error_rate &&
            *report.error_rate < *options.expected_order - options.rate_tolerance)
            report.failures.push_back(
                fmt::format("error rate {:.3f} below expected order {}", *report.error_rate, *options.expected_order));
    }

    if (options.shift_study && finest.coefficient_scale() > 0.0) {
        const double T = finest.partition().final_time();
        const std::vector<double> deltas{T / 8.0, T / 16.0, T / 32.0, T / 64.0};
        try {
            report.shift = shift_exponent_study(finest, deltas, options.r, space, Norm::Y);
        } catch (const std::invalid_argument&) {
            // Identically zero shift differences; nothing to fit.
        }
    }
    return report;
}

RefinementReport run_refinement_study(const ParabolicProblem& problem, const PartitionFamily& family, int degree,
                                      const StudyOptions& options)
{
    const auto partitions = family.generate();
    std::string label = family.spec.to_string() + ";levels=";
    for (std::size_t k = 0; k < family.levels.size(); ++k)
        label += (k ? "/" : "") + std::to_string(family.levels[k]);
    return run_refinement_study(problem, partitions, degree, options, label);
}

std::string levels_csv(const RefinementReport& report)
{
    std::string out =
        "level,N,tau_max,tau_min,C_star_step_ratio,quasi_uniformity_ratio,h1_energy_LpX,h1_bound,"
        "h2_dt_recon_LrY,h2_bound,h3_jump_sum_B_sq,h3_bound,final_B_norm_sq,F_dual_LrY,projection_slack,"
        "energy_identity_residual,defect_jump_ratio_B,C_R_estimate,error_L2B,nodal_error_B\n";
    for (std::size_t k = 0; k < report.levels.size(); ++k) {
        const auto& l = report.levels[k];
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", k, l.intervals,
                           num(l.tau_max), num(l.tau_min), num(l.step_ratio), num(l.quasi_uniformity),
                           num(report.bounds[0].values[k]), num(report.bounds[0].bounds[k]),
                           num(report.bounds[1].values[k]), num(report.bounds[1].bounds[k]),
                           num(report.bounds[2].values[k]), num(report.bounds[2].bounds[k]),
                           num(l.ledger.final_b_norm_sq), num(l.ledger.f_dual), num(l.ledger.projection_slack),
                           num(l.ledger.energy_identity_residual), num(l.defect_ratio), num(l.c_r_estimate),
                           l.error ? num(*l.error) : "", l.nodal_error ? num(*l.nodal_error) : "");
    }
    return out;
}

std::string cauchy_csv(const RefinementReport& report)
{
    std::string out = "level,next_level,cauchy_dist_LqB,dist_to_finest_LqB,c0_dist_B_approx\n";
    for (std::size_t k = 0; k < report.cauchy.size(); ++k)
        out += fmt::format("{},{},{},{},{}\n", k, k + 1, num(report.cauchy[k]), num(report.to_finest[k]),
                           num(report.c0_distance[k]));
    return out;
}

std::string shift_csv(const RefinementReport& report)
{
    std::string out = "delta,shift_diff_LrY\n";
    if (report.shift)
        for (std::size_t k = 0; k < report.shift->deltas.size(); ++k)
            out += fmt::format("{},{}\n", num(report.shift->deltas[k]), num(report.shift->values[k]));
    return out;
}

std::string summary_json(const RefinementReport& report)
{
    nlohmann::ordered_json j;
    j["family"] = report.family;
    j["degree"] = report.degree;
    j["p"] = jnum(report.p);
    j["r"] = jnum(report.r);
    j["q"] = jnum(report.q);
    j["levels"] = report.levels.size();
    j["cauchy_dist_LqB"] = jlist(report.cauchy);
    j["cauchy_decreasing"] = report.cauchy_decreasing;
    j["c0_dist_B_approx"] = jlist(report.c0_distance);
    j["c0_note"] = "approximate: dense sampling of the reconstruction";
    auto bounds = nlohmann::ordered_json::object();
    for (const auto& check : report.bounds) {
        bounds[check.quantity] = {{"values", jlist(check.values)},
                                  {"bounds", jlist(check.bounds)},
                                  {"cap", jnum(check.cap)},
                                  {"holds", check.holds}};
    }
    j["hypotheses"] = bounds;
    std::vector<double> quasi;
    for (const auto& level : report.levels)
        quasi.push_back(level.quasi_uniformity);
    j["quasi_uniformity_ratio"] = jlist(quasi);
    j["error_rate"] = report.error_rate ? jnum(*report.error_rate) : nlohmann::ordered_json();
    j["nodal_rate"] = report.nodal_rate ? jnum(*report.nodal_rate) : nlohmann::ordered_json();
    if (report.shift)
        j["shift"] = {{"s", jnum(report.shift->exponent)}, {"C_s", jnum(report.shift->constant)}};
    j["failures"] = report.failures;
    j["passed"] = report.passed();
    return j.dump(2) + "\n";
}

std::vector<std::string> write_report(const RefinementReport& report, const std::string& stem)
{
    const std::vector<std::pair<std::string, std::string>> files{
        {stem + "_levels.csv", levels_csv(report)},
        {stem + "_cauchy.csv", cauchy_csv(report)},
        {stem + "_shift.csv", shift_csv(report)},
        {stem + "_summary.json", summary_json(report)},
    };
    std::vector<std::string> paths;
    for (const auto& [path, text] : files) {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write " + path);
        out << text;
        paths.push_back(path);
    }
    return paths;
}

} // namespace dgrecon
