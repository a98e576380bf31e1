#pragma once

#include <functional>
#include <limits>
#include <span>

#include "dgrecon/model_spaces.hpp"
#include "dgrecon/piecewise_poly.hpp"

namespace dgrecon {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Selects the Bochner norm L^p(0, T; Z) with Z one of the triplet norms.
struct NormSpec {
    double p = 2.0;
    Norm which = Norm::B;
    /// Gauss point multiplier for integrands |u(t)|^p that are not polynomial.
    int oversampling = 2;

    /// Throws std::invalid_argument for p < 1 or oversampling < 1.
    void validate() const;
};

/// (sum_n int_{I_n} |u(t)|_Z^p dt)^{1/p}, or the sampled maximum for p = inf.
///
/// Even integer p is integrated exactly. Other p are integrated with
/// oversampled Gauss rules on panels split at the critical points of
/// |u(t)|_Z^2, so zeros of u inside an interval do not spoil convergence;
/// panels are bisected until halves agree with the whole to 1e-14 of the
/// interval integral (near-zeros of u give |u|^p a near-kink). For
/// p = inf, |u|_Z is sampled at 33 Chebyshev points, the endpoints and those
/// critical points of every interval.
double bochner_norm(const PiecewisePoly& u, const SpaceTriplet& space, const NormSpec& spec);

/// int_{I_n} |u(t)|_Z^p dt for p < inf and the interval maximum for p = inf.
double interval_norm_power(const PiecewisePoly& u, int interval, const SpaceTriplet& space,
                           const NormSpec& spec);

/// |u|_{L^p(I_n; Z)}.
double interval_norm(const PiecewisePoly& u, int interval, const SpaceTriplet& space, const NormSpec& spec);

/// |u1 - u2|_{L^p(0,T;Z)}, both re-expanded exactly on the merged partition.
double bochner_distance(const PiecewisePoly& u1, const PiecewisePoly& u2, const SpaceTriplet& space,
                        const NormSpec& spec);

/// |u(. + delta) - u|_{L^r(0, T - delta; Z)} on the union of the nodes of u and
/// of u shifted by -delta. Throws std::invalid_argument unless 0 < delta < T.
double shift_difference(const PiecewisePoly& u, double delta, double r, const SpaceTriplet& space,
                        Norm which);

/// Value of a general function on interval n at time t (t in the closure).
using IntervalFunction = std::function<Vector(int interval, double t)>;

/// Bochner norm of a non-polynomial function by `points` Gauss points per
/// interval (p < inf) or Chebyshev sampling (p = inf).
double sampled_bochner_norm(const TimePartition& partition, const IntervalFunction& f,
                            const SpaceTriplet& space, const NormSpec& spec, int points);

struct InequalitySides {
    double lhs = 0.0;
    double rhs = 0.0;

    bool holds(double relative_slack = 1e-12) const { return lhs <= rhs * (1.0 + relative_slack) + 1e-300; }
};

/// (sum tau_n j_n^p)^{1/p} <= T^{(2-p)/(2p)} tau^{1/2} (sum j_n^2)^{1/2}, 1 <= p < 2.
InequalitySides holder_step_check(std::span<const double> jump_norms, std::span<const double> taus, double p,
                                  double final_time, double tau_max);

/// (sum tau_n j_n^p)^{1/p} <= tau^{1/p} (sum j_n^2)^{1/2}, p >= 2, tau = max tau_n.
InequalitySides vector_norm_step_check(std::span<const double> jump_norms, std::span<const double> taus,
                                       double p);

} // namespace dgrecon
