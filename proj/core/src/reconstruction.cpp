#include "dgrecon/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace dgrecon {

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

Vector random_vector(std::mt19937_64& rng, int dim)
{
    std::uniform_real_distribution<double> coin(-1.0, 1.0);
    Vector v(dim);
    for (int k = 0; k < dim; ++k)
        v[k] = coin(rng);
    return v;
}

double pair_integral(const PiecewisePoly& f, const PiecewisePoly& g, int interval, const SpaceTriplet& space,
                     const QuadratureRule& rule)
{
    double sum = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
        const double x = rule.points[static_cast<std::size_t>(q)];
        sum += rule.weights[static_cast<std::size_t>(q)] *
               space.inner(Norm::B, f.eval_reference(interval, x), g.eval_reference(interval, x));
    }
    return 0.5 * f.partition().step(interval) * sum;
}

} // namespace

Vector LiftedJump::eval(const TimePartition& partition, double t) const
{
    const double x = to_reference(partition, interval, t);
    std::vector<double> p(static_cast<std::size_t>(coefficients.cols()));
    legendre_values(static_cast<int>(coefficients.cols()) - 1, x, p);
    Vector out = Vector::Zero(coefficients.rows());
    for (Eigen::Index i = 0; i < coefficients.cols(); ++i)
        out += p[static_cast<std::size_t>(i)] * coefficients.col(i);
    return out;
}

LiftedJump lift(const Vector& jump_value, const TimePartition& partition, int interval, int degree)
{
    if (interval < 0 || interval >= partition.size())
        throw std::invalid_argument(
            fmt::format("lifting interval {} outside 0..{}", interval, partition.size() - 1));
    if (degree < 0)
        throw std::invalid_argument("lifting degree must be non-negative");
    LiftedJump out;
    out.interval = interval;
    out.jump = jump_value;
    out.coefficients.resize(jump_value.size(), degree + 1);
    const double tau = partition.step(interval);
    for (int i = 0; i <= degree; ++i)
        out.coefficients.col(i) = ((i % 2 == 0 ? 1.0 : -1.0) * (2 * i + 1) / tau) * jump_value;
    return out;
}

PiecewisePoly reconstruct(const PiecewisePoly& u, const Vector& initial)
{
    if (initial.size() != u.space_dim())
        throw std::invalid_argument("initial datum has the wrong dimension for reconstruction");
    const int degree = u.degree() + 1;
    Matrix out = Matrix::Zero(u.space_dim(), u.intervals() * (degree + 1));
    for (int n = 0; n < u.intervals(); ++n) {
        const Vector z = jump(u, n, initial);
        const LiftedJump lifted = lift(z, u.partition(), n, u.degree());
        // int_{t_n}^t of the lifting: tau/2 times the reference primitive.
        std::vector<double> c(static_cast<std::size_t>(u.modes()));
        const double half_tau = 0.5 * u.partition().step(n);
        for (int k = 0; k < u.space_dim(); ++k) {
            for (int i = 0; i < u.modes(); ++i)
                c[static_cast<std::size_t>(i)] = lifted.coefficients(k, i);
            const auto primitive = legendre_integral_coefficients(c);
            for (int i = 0; i <= degree; ++i) {
                const double base = i < u.modes() ? u.coefficients()(k, n * u.modes() + i) : 0.0;
                out(k, n * (degree + 1) + i) = base + half_tau * primitive[static_cast<std::size_t>(i)];
            }
            out(k, n * (degree + 1)) -= z[k];
        }
    }
    return PiecewisePoly(u.partition(), degree, std::move(out));
}

double defect_norm(const PiecewisePoly& u, const Vector& initial, double p, const SpaceTriplet& space, Norm which)
{
    const PiecewisePoly recon = reconstruct(u, initial);
    return bochner_norm(recon - u, space, NormSpec{p, which, 2});
}

double jump_functional(const PiecewisePoly& u, const Vector& initial, double p, const SpaceTriplet& space,
                       Norm which, JumpWeighting weighting)
{
    if (weighting == JumpWeighting::tau_weighted && !(p >= 1.0))
        throw std::invalid_argument(fmt::format("jump functional exponent {} is below 1", p));
    double acc = 0.0;
    for (int n = 0; n < u.intervals(); ++n) {
        const double j = space.norm(which, jump(u, n, initial));
        if (weighting == JumpWeighting::unweighted_squares)
            acc += j * j;
        else if (std::isinf(p))
            acc = std::max(acc, j);
        else
            acc += u.partition().step(n) * std::pow(j, p);
    }
    if (weighting == JumpWeighting::unweighted_squares || std::isinf(p))
        return acc;
    return std::pow(acc, 1.0 / p);
}

double jump_sum_b_squared(const PiecewisePoly& u, const Vector& initial, const SpaceTriplet& space)
{
    return jump_functional(u, initial, 2.0, space, Norm::B, JumpWeighting::unweighted_squares);
}

double dt_reconstruction_norm(const PiecewisePoly& u, const Vector& initial, double r, const SpaceTriplet& space,
                              Norm which)
{
    return bochner_norm(derivative(reconstruct(u, initial)), space, NormSpec{r, which, 2});
}

double verify_derivative_identity(const PiecewisePoly& u, const Vector& initial, const PiecewisePoly& test,
                                  const SpaceTriplet& space)
{
    if (!(u.partition() == test.partition()))
        throw std::invalid_argument("derivative identity needs u and v on the same partition");
    if (u.space_dim() != test.space_dim())
        throw std::invalid_argument("derivative identity needs u and v of the same space dimension");
    if (test.degree() > u.degree())
        throw std::invalid_argument("test function degree exceeds the trial degree");
    const PiecewisePoly dt_recon = derivative(reconstruct(u, initial));
    const PiecewisePoly dt_u = derivative(u);
    const auto rule = gauss_rule(u.degree() + test.degree() / 2 + 2);
    double lhs = 0.0;
    double rhs = 0.0;
    for (int n = 0; n < u.intervals(); ++n) {
        lhs += pair_integral(dt_recon, test, n, space, rule);
        rhs += pair_integral(dt_u, test, n, space, rule) +
               space.inner(Norm::B, jump(u, n, initial), test.right_limit(n));
    }
    return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

PiecewisePoly random_piecewise_poly(const TimePartition& partition, int degree, int space_dim, std::uint64_t seed)
{
    auto rng = make_rng(seed, 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> coin(-1.0, 1.0);
    Matrix coeffs(space_dim, partition.size() * (degree + 1));
    for (Eigen::Index c = 0; c < coeffs.cols(); ++c)
        for (Eigen::Index k = 0; k < coeffs.rows(); ++k)
            coeffs(k, c) = coin(rng);
    return PiecewisePoly(partition, degree, std::move(coeffs));
}

ConstantEstimate estimate_reconstruction_constant(std::span<const TimePartition> partitions, int degree, double p,
                                                  int trials, std::uint64_t seed, const SpaceTriplet& space)
{
    if (trials < 1)
        throw std::invalid_argument("constant estimation needs at least one trial");
    ConstantEstimate out;
    for (std::size_t level = 0; level < partitions.size(); ++level) {
        double best = 0.0;
        for (int t = 0; t < trials; ++t) {
            const std::uint64_t trial_seed = seed + 7919ULL * level + 104729ULL * static_cast<std::uint64_t>(t);
            const PiecewisePoly u = random_piecewise_poly(partitions[level], degree, space.dim(), trial_seed);
            auto rng = make_rng(trial_seed, 17);
            const Vector u0 = random_vector(rng, space.dim());
            const double jumps = jump_functional(u, u0, p, space, Norm::B);
            ++out.trials;
            if (jumps == 0.0) {
                ++out.skipped;
                continue;
            }
            best = std::max(best, defect_norm(u, u0, p, space, Norm::B) / jumps);
        }
        out.per_partition.push_back(best);
        out.estimate = std::max(out.estimate, best);
    }
    return out;
}

ConstantEstimate estimate_reconstruction_constant(const PartitionFamily& family, int degree, double p, int trials,
                                                  std::uint64_t seed, const SpaceTriplet& space)
{
    const auto partitions = family.generate();
    return estimate_reconstruction_constant(partitions, degree, p, trials, seed, space);
}

double reconstruction_constant(int degree, double p)
{
    if (degree < 0)
        throw std::invalid_argument("reconstruction degree must be non-negative");
    if (!(p >= 1.0))
        throw std::invalid_argument(fmt::format("reconstruction exponent {} is below 1", p));
    // On (0, 1) the L^p norm is already the normalized one on (-1, 1).
    Matrix c = Matrix::Zero(1, degree + 2);
    c(0, degree) = 0.5;
    c(0, degree + 1) = -0.5;
    const PiecewisePoly g(build_uniform(1.0, 1), degree + 1, std::move(c));
    return bochner_norm(g, SpaceTriplet::euclidean(1), NormSpec{p, Norm::B, 4});
}

double inverse_trace_bound(int degree, double p)
{
    if (!(p >= 1.0))
        throw std::invalid_argument("inverse-trace exponent must be at least 1");
    if (std::isinf(p))
        return 1.0;
    return std::pow(degree + 1.0, std::max(1.0, 2.0 / p));
}

double estimate_inverse_trace_constant(int degree, double p, int trials, std::uint64_t seed)
{
    const TimePartition reference = build_uniform(2.0, 1);
    const SpaceTriplet scalar = SpaceTriplet::euclidean(1);
    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
        const PiecewisePoly v = random_piecewise_poly(reference, degree, 1, seed + static_cast<std::uint64_t>(t));
        const double trace = std::max(std::abs(v.left_limit(1)[0]), std::abs(v.right_limit(0)[0]));
        const double volume = std::isinf(p) ? interval_norm(v, 0, scalar, NormSpec{p, Norm::B, 2})
                                            : std::pow(0.5, 1.0 / p) * interval_norm(v, 0, scalar, NormSpec{p, Norm::B, 2});
        if (volume > 0.0)
            best = std::max(best, trace / volume);
    }
    return best;
}

InequalitySides inverse_trace_check(const PiecewisePoly& u, const Vector& initial, int node, double p,
                                    const SpaceTriplet& space, Norm which, double c_tr)
{
    const NormSpec spec{p, which, 2};
    auto scaled = [&](int interval) {
        const double tau = u.partition().step(interval);
        const double norm = interval_norm(u, interval, space, spec);
        return std::isinf(p) ? norm : std::pow(tau, -1.0 / p) * norm;
    };
    const double lhs = space.norm(which, jump(u, node, initial));
    if (node == 0)
        return {lhs, c_tr * scaled(0) + space.norm(which, initial)};
    return {lhs, c_tr * (scaled(node) + scaled(node - 1))};
}

InequalitySides reconstruction_stability_check(const PiecewisePoly& u, const Vector& initial, double p,
                                               const SpaceTriplet& space, double c_r, double c_tr)
{
    const double c_star = step_ratio_constant(u.partition());
    const double lhs = defect_norm(u, initial, p, space, Norm::X);
    const double u_norm = bochner_norm(u, space, NormSpec{p, Norm::X, 2});
    return {lhs, c_r * (c_tr * (1.0 + c_star) * u_norm + space.norm(Norm::X, initial))};
}

} // namespace dgrecon
