#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "dgrecon/bochner_norms.hpp"
#include "dgrecon/model_spaces.hpp"
#include "dgrecon/piecewise_poly.hpp"

namespace dgrecon {

/// Scalar nonlinearity g applied pointwise to produce the source f(u).
struct PointwiseNonlinearity {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> slope;
    /// Declared Lipschitz constant of g on [-trust_radius, trust_radius].
    double lipschitz = 0.0;
    double trust_radius = 0.0;
};

PointwiseNonlinearity logistic_source();   ///< g(u) = u (1 - u)
PointwiseNonlinearity cubic_source();      ///< g(u) = -u^3
PointwiseNonlinearity allen_cahn_source(); ///< g(u) = u - u^3

/// How a pointwise nonlinearity acts on coefficient vectors.
enum class SourceMap {
    /// g applied to each coordinate; (f(u), v)_B = v' M g(u).
    componentwise,
    /// Spectral laplace1d coordinates are sine coefficients: g is applied to
    /// physical values on a uniform grid and mapped back by the discrete sine
    /// transform.
    sine_collocation,
};

/// Find u in P^l(X_tau) with, for all v,
///   sum_n int_{I_n} (u', v)_B + ([u]_{n-1}, v(t_{n-1}^+))_B + int s a(u, v) = int (f, v)_B,
/// where a(u, v) = u'Kv, s = operator_scale and f is time-dependent data plus
/// an optional pointwise nonlinearity.
struct ParabolicProblem {
    SpaceTriplet space = SpaceTriplet::laplace1d(64);
    double operator_scale = 1.0;
    /// f(t) in B coordinates (nodal values for matrix triplets); empty for none.
    TimeFunction data;
    std::optional<PointwiseNonlinearity> nonlinearity;
    SourceMap source_map = SourceMap::componentwise;
    Vector initial;
    /// a(u, u) >= C_a |u|_X^p; for the linear operator C_a = operator_scale, p = 2.
    double coercivity = 1.0;
    double growth_exponent = 2.0;

    bool is_linear() const { return !nonlinearity.has_value(); }
    bool is_homogeneous() const { return !data && !nonlinearity.has_value(); }
    /// Throws std::invalid_argument on inconsistent dimensions or settings.
    void validate() const;
};

/// Sampled spot checks of a(u, u) >= C_a |u|_X^p and of the declared
/// Lipschitz constant of the nonlinearity on its trust region.
struct AssumptionCheck {
    bool coercive = true;
    bool lipschitz = true;
    double min_coercivity_ratio = 0.0; ///< min a(u,u) / (C_a |u|_X^p); +inf when C_a = 0
    double max_lipschitz_ratio = 0.0;  ///< max |g(x) - g(y)| / (L |x - y|)
};

AssumptionCheck check_problem_assumptions(const ParabolicProblem& problem, int samples, std::uint64_t seed);

/// Linear problem solved slab by slab; spectral triplets decouple into m
/// independent (l+1) x (l+1) systems. Throws NumericalFailure on a singular
/// slab matrix.
PiecewisePoly solve_linear(const ParabolicProblem& problem, const TimePartition& partition, int degree);

struct NewtonOptions {
    double tolerance = 1e-12;
    int max_iterations = 50;
};

/// Per-slab Newton iteration from the constant extension of the left trace.
/// Converged when the residual norm is at most tol (1 + |c|) or the Newton
/// update is at most tol (1 + |c|). Throws NumericalFailure carrying the slab
/// index and last residual after max_iterations.
PiecewisePoly solve_semilinear(const ParabolicProblem& problem, const TimePartition& partition, int degree,
                               const NewtonOptions& options = {});

/// Dispatches on problem.is_linear().
PiecewisePoly solve(const ParabolicProblem& problem, const TimePartition& partition, int degree,
                    const NewtonOptions& options = {});

/// Max over slabs and test functions L_{n,j} e_k of the discrete variational
/// residual, relative to the summed magnitude of that slab's terms. All integrals are
/// re-evaluated by quadrature, independently of the slab assembly.
double galerkin_residual(const ParabolicProblem& problem, const PiecewisePoly& u);

/// |1/2 |u(T)|_B^2 + 1/2 sum |[u]|_B^2 + int s a(u,u) - 1/2 |u0|_B^2| / (1/2 |u0|_B^2),
/// the relative defect of the energy identity (linear homogeneous problems).
double energy_identity_residual(const ParabolicProblem& problem, const PiecewisePoly& u);

/// Hypothesis quantities of one discrete solution.
struct StabilityLedger {
    double final_b_norm_sq = 0.0; ///< |u(T)|_B^2
    double jump_sum_b_sq = 0.0;   ///< sum_n |[u]_{n-1}|_B^2                 (h3)
    double energy = 0.0;          ///< C_a |u|_{L^p(0,T;X)}^p                (h1)
    double dt_recon_dual = 0.0;   ///< |d/dt R u|_{L^r(0,T;Y)}              (h2)
    double f_dual = 0.0;          ///< |F|_{L^r(0,T;Y)}, F = f(u) - s A u
    /// max(0, dt_recon_dual / f_dual - 1): slack of the time projection.
    double projection_slack = 0.0;
    /// Energy identity residual for linear homogeneous problems, else NaN.
    double energy_identity_residual = 0.0;
    double p = 2.0;
    double r = 2.0;
};

StabilityLedger stability_ledger(const ParabolicProblem& problem, const PiecewisePoly& u, double p, double r);

/// e^{-mu_k t} times the initial coefficient: mode k (1-based) of the
/// homogeneous heat flow in a spectral triplet.
double exact_heat_reference(const SpaceTriplet& space, int mode, double t, double initial_coefficient = 1.0);

/// All modes of the exact homogeneous heat flow (spectral triplet, scale s).
Vector exact_heat_solution(const SpaceTriplet& space, const Vector& initial, double t, double operator_scale = 1.0);

/// Problem from "heat", "semilinear", "logistic", "dissipative" presets with
/// optional overrides, e.g. "heat:u0=mode:2" or
/// "custom:operator=laplace,source=cubic,u0=0.5;0.1". `space` replaces the
/// preset's triplet when given.
ParabolicProblem parse_problem_spec(const std::string& text, const std::optional<SpaceTriplet>& space = std::nullopt);

} // namespace dgrecon
