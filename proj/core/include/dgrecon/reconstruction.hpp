#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dgrecon/bochner_norms.hpp"
#include "dgrecon/model_spaces.hpp"
#include "dgrecon/piecewise_poly.hpp"
#include "dgrecon/time_mesh.hpp"

namespace dgrecon {

/// The lifting of a jump z onto interval n: the degree-l polynomial
/// (z / tau_n) sum_i (-1)^i (2i+1) L_{n,i}. Its integral over the interval is z
/// and it reproduces point evaluation at the left endpoint against P^l.
struct LiftedJump {
    int interval = 0;
    Vector jump;
    /// m x (l+1) modal coefficients on the interval.
    Matrix coefficients;

    Vector eval(const TimePartition& partition, double t) const;
};

/// Throws std::invalid_argument for an interval index outside 0..N-1.
LiftedJump lift(const Vector& jump_value, const TimePartition& partition, int interval, int degree);

/// Continuous reconstruction R u of degree l+1:
///   R u = u - [u]_n + int_{t_n}^t L([u]_n) ds  on interval n,
/// with [u]_0 = u(0^+) - u0. R u(0) = u0 and R u(t_n) = u(t_n^-).
PiecewisePoly reconstruct(const PiecewisePoly& u, const Vector& initial);

/// |R u - u|_{L^p(0,T;Z)}.
double defect_norm(const PiecewisePoly& u, const Vector& initial, double p, const SpaceTriplet& space, Norm which);

enum class JumpWeighting {
    /// (sum_n tau_n |[u]_{n-1}|^p)^{1/p}; max_n |[u]_{n-1}| for p = inf.
    tau_weighted,
    /// sum_n |[u]_{n-1}|^2 (p ignored).
    unweighted_squares,
};

double jump_functional(const PiecewisePoly& u, const Vector& initial, double p, const SpaceTriplet& space,
                       Norm which, JumpWeighting weighting = JumpWeighting::tau_weighted);

/// sum_n |[u]_{n-1}|_B^2.
double jump_sum_b_squared(const PiecewisePoly& u, const Vector& initial, const SpaceTriplet& space);

/// |d/dt R u|_{L^r(0,T;Z)}, Z = Y by default.
double dt_reconstruction_norm(const PiecewisePoly& u, const Vector& initial, double r, const SpaceTriplet& space,
                              Norm which = Norm::Y);

/// |LHS - RHS| / (1 + |LHS|) for
///   int_0^T (d/dt R u, v)_B = sum_n int_{I_n} (d/dt u, v)_B + ([u]_{n-1}, v(t_{n-1}^+))_B,
/// both sides by Gauss rules exact for the integrands.
double verify_derivative_identity(const PiecewisePoly& u, const Vector& initial, const PiecewisePoly& test,
                                  const SpaceTriplet& space);

/// Uniformly random modal coefficients in [-1, 1] on every interval.
PiecewisePoly random_piecewise_poly(const TimePartition& partition, int degree, int space_dim, std::uint64_t seed);

struct ConstantEstimate {
    double estimate = 0.0;
    /// Supremum per partition.
    std::vector<double> per_partition;
    int trials = 0;
    /// Trials skipped because the jump functional vanished.
    int skipped = 0;
};

/// Sup over random u (and partitions) of defect_norm / jump_functional in
/// L^p(0,T;B). Coefficients and u0 uniform in [-1, 1], reproducible in seed.
ConstantEstimate estimate_reconstruction_constant(std::span<const TimePartition> partitions, int degree, double p,
                                                  int trials, std::uint64_t seed,
                                                  const SpaceTriplet& space = SpaceTriplet::euclidean(3));
ConstantEstimate estimate_reconstruction_constant(const PartitionFamily& family, int degree, double p, int trials,
                                                  std::uint64_t seed,
                                                  const SpaceTriplet& space = SpaceTriplet::euclidean(3));

/// Exact C_R(l, p). On every interval R u - u = -z (-1)^l (P_l - P_{l+1}) / 2
/// with z the jump entering it, so the ratio defect / jump functional equals
/// the normalized L^p(-1, 1) norm of (P_l - P_{l+1}) / 2 for every u and every
/// partition.
double reconstruction_constant(int degree, double p);

/// Analytic inverse-trace constant for degree l polynomials and exponent p:
///   |v(t_n^{+/-})| <= C tau^{-1/p} |v|_{L^p(I)},  C = (l+1)^{max(1, 2/p)} (1 for p = inf),
/// valid for any Hilbert norm Z.
double inverse_trace_bound(int degree, double p);

/// Sampled estimate of the sharp inverse-trace constant: sup over random
/// polynomials of |v(endpoint)| / (tau^{-1/p} |v|_{L^p(I)}).
double estimate_inverse_trace_constant(int degree, double p, int trials, std::uint64_t seed);

/// Inverse-trace step at node n:
///   lhs = |[u]_n|_Z,
///   rhs = C (tau_{n}^{-1/p} |u|_{L^p(I_n)} + tau_{n-1}^{-1/p} |u|_{L^p(I_{n-1})})   (n >= 1)
///   rhs = C tau_0^{-1/p} |u|_{L^p(I_0)} + |u0|_Z                                      (n = 0)
/// (intervals indexed from 0, so I_n starts at node n).
InequalitySides inverse_trace_check(const PiecewisePoly& u, const Vector& initial, int node, double p,
                                    const SpaceTriplet& space, Norm which, double c_tr);

/// The combined reconstruction bound
///   |R u - u|_{L^p(X)} <= C_R (C_tr (1 + C_star) |u|_{L^p(X)} + |u0|_X).
InequalitySides reconstruction_stability_check(const PiecewisePoly& u, const Vector& initial, double p,
                                               const SpaceTriplet& space, double c_r, double c_tr);

} // namespace dgrecon
