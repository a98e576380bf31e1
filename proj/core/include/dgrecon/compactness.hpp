#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dgrecon/dg_parabolic.hpp"
#include "dgrecon/time_mesh.hpp"

namespace dgrecon {

/// Least-squares slope of log(value) against log(tau). Needs >= 2 pairs of
/// positive numbers; throws std::invalid_argument otherwise.
double fit_rate(std::span<const double> values, std::span<const double> taus);

struct ShiftStudy {
    std::vector<double> deltas;
    std::vector<double> values; ///< |sigma_delta u - u|_{L^r(0,T-delta;Y)}
    double exponent = 0.0;      ///< s in C_s delta^s
    double constant = 0.0;      ///< C_s from the fitted intercept
};

/// Fits |sigma_delta u - u| ~ C_s delta^s. Needs >= 3 shifts in (0, T).
ShiftStudy shift_exponent_study(const PiecewisePoly& u, std::span<const double> deltas, double r,
                                const SpaceTriplet& space, Norm which = Norm::Y);

/// Exponents q for which strong L^q(0,T;B) convergence follows from bounds in
/// L^p(0,T;X) and L^r(0,T;Y) with interpolation exponent theta.
struct QRange {
    bool admissible = false;
    double q_max = 0.0; ///< exclusive upper end; infinity when unbounded
};

QRange admissible_q_range(double p, double r, double theta = 0.5);

/// Conjugate exponent p' (infinity for p = 1, 1 for p = infinity).
double conjugate_exponent(double p);

struct LevelReport {
    int intervals = 0;
    double tau_max = 0.0;
    double tau_min = 0.0;
    double step_ratio = 0.0;       ///< C_star
    double quasi_uniformity = 0.0; ///< tau_max / tau_min
    StabilityLedger ledger;
    double defect_ratio = 0.0;     ///< |R u - u| / jump functional, L^p(0,T;B)
    double c_r_estimate = 0.0;     ///< sampled C_R on this partition
    std::optional<double> error;   ///< L^2(0,T;B) error against the exact solution
    std::optional<double> nodal_error;
};

/// One hypothesis quantity across levels with the bounds it was checked against.
struct BoundednessCheck {
    std::string quantity;
    std::vector<double> values;
    std::vector<double> bounds; ///< max(1.1 running max, cap); bounds[0] = values[0]
    double cap = 0.0;
    bool holds = true;
};

using ExactSolution = TimeFunction;

struct StudyOptions {
    double p = 2.0;
    double r = 2.0;
    std::optional<double> q; ///< defaults to p
    NewtonOptions newton;
    std::optional<ExactSolution> exact;
    std::optional<double> expected_order;
    double rate_tolerance = 0.3;
    double growth_tolerance = 0.1;
    std::uint64_t seed = 0;
    bool shift_study = true;
};

struct RefinementReport {
    std::string family;
    int degree = 0;
    double p = 2.0;
    double r = 2.0;
    double q = 2.0;
    std::vector<LevelReport> levels;
    std::vector<PiecewisePoly> solutions;
    std::vector<double> cauchy;        ///< d_k = |u_k - u_{k+1}|_{L^q(0,T;B)}
    std::vector<double> to_finest;     ///< |u_k - u_finest|_{L^q(0,T;B)}
    std::vector<double> c0_distance;   ///< approximate sup_t |R u_k - R u_{k+1}|_B (dense sampling)
    std::vector<BoundednessCheck> bounds;
    bool cauchy_decreasing = true;
    std::optional<double> error_rate;
    std::optional<double> nodal_rate;
    std::optional<ShiftStudy> shift;
    std::vector<std::string> failures; ///< names of violated invariants

    bool passed() const { return failures.empty(); }
};

/// Absolute caps on (h1, h2, h3) implied by the energy identity of a linear
/// homogeneous problem at p = r = 2; zero (no cap) otherwise.
std::array<double, 3> stability_caps(const ParabolicProblem& problem, double p, double r);

/// Solves on every partition (>= 3, strictly refining) and fills the report.
/// A failed solve is rethrown as NumericalFailure naming the level.
RefinementReport run_refinement_study(const ParabolicProblem& problem, std::span<const TimePartition> partitions,
                                      int degree, const StudyOptions& options, const std::string& family_label = "");

RefinementReport run_refinement_study(const ParabolicProblem& problem, const PartitionFamily& family, int degree,
                                      const StudyOptions& options);

/// Writes <stem>_levels.csv, <stem>_cauchy.csv, <stem>_shift.csv and
/// <stem>_summary.json. Returns the paths written.
std::vector<std::string> write_report(const RefinementReport& report, const std::string& stem);

std::string levels_csv(const RefinementReport& report);
std::string cauchy_csv(const RefinementReport& report);
std::string shift_csv(const RefinementReport& report);
std::string summary_json(const RefinementReport& report);

} // namespace dgrecon
