#include "dgrecon/bochner_norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

namespace dgrecon {

namespace {

constexpr int kChebyshevSamples = 33;
constexpr double kNodeTolerance = 1e-14;
constexpr double kRelativeTolerance = 1e-14;
// Tolerance is not halved per level: that pushes it below roundoff and the
// recursion then runs to full depth everywhere.
constexpr int kMaxBisections = 30;

bool is_even_integer(double p)
{
    return std::isfinite(p) && p == std::floor(p) && static_cast<long long>(p) % 2 == 0;
}

/// |u(x)|_Z^2 = P(x)' G P(x) on one interval in reference coordinates.
class SquaredNorm {
public:
    SquaredNorm(const PiecewisePoly& u, int interval, const SpaceTriplet& space, Norm which)
        : degree_(u.degree()), gram_(u.modes(), u.modes()), p_(static_cast<std::size_t>(u.modes())),
          dp_(static_cast<std::size_t>(u.modes()))
    {
        const auto block = u.interval_coefficients(interval);
        for (int i = 0; i < u.modes(); ++i) {
            for (int j = i; j < u.modes(); ++j) {
                const double g = space.inner(which, block.col(i), block.col(j));
                gram_(i, j) = g;
                gram_(j, i) = g;
            }
        }
    }

    bool is_zero() const { return gram_.cwiseAbs().maxCoeff() == 0.0; }

    double value(double x) const
    {
        legendre_values(degree_, x, p_);
        const Eigen::Map<const Vector> p(p_.data(), static_cast<Eigen::Index>(p_.size()));
        return std::max(p.dot(gram_ * p), 0.0);
    }

    double slope(double x) const
    {
        legendre_values(degree_, x, p_);
        legendre_derivative_values(degree_, x, dp_);
        const Eigen::Map<const Vector> p(p_.data(), static_cast<Eigen::Index>(p_.size()));
        const Eigen::Map<const Vector> dp(dp_.data(), static_cast<Eigen::Index>(dp_.size()));
        return 2.0 * dp.dot(gram_ * p);
    }

    /// Interior critical points of the squared norm, in increasing order.
    std::vector<double> critical_points() const
    {
        std::vector<double> roots;
        if (degree_ == 0)
            return roots;
        const int samples = std::max(32, 8 * (degree_ + 1));
        double x_prev = -1.0;
        double s_prev = slope(x_prev);
        for (int j = 1; j <= samples; ++j) {
            const double x = -std::cos(std::numbers::pi * j / samples);
            const double s = slope(x);
            if (s == 0.0 && j < samples) {
                roots.push_back(x);
            } else if (s_prev != 0.0 && s != 0.0 && (s_prev < 0.0) != (s < 0.0)) {
                boost::uintmax_t max_iter = 100;
                const auto bracket = boost::math::tools::toms748_solve(
                    [this](double y) { return slope(y); }, x_prev, x, s_prev, s,
                    boost::math::tools::eps_tolerance<double>(52), max_iter);
                roots.push_back(0.5 * (bracket.first + bracket.second));
            }
            x_prev = x;
            s_prev = s;
        }
        std::sort(roots.begin(), roots.end());
        return roots;
    }

    int degree() const { return degree_; }

private:
    int degree_;
    Matrix gram_;
    mutable std::vector<double> p_;
    mutable std::vector<double> dp_;
};

int exact_points(double p, int degree)
{
    // |u|^p = q^{p/2} with deg q = 2 degree.
    const double even = is_even_integer(p) ? p : 2.0 * std::ceil(p / 2.0);
    return static_cast<int>(std::ceil((even * degree + 1.0) / 2.0)) + (is_even_integer(p) ? 0 : 1);
}

double gauss_on(const SquaredNorm& q, double p, const QuadratureRule& rule, double a, double c)
{
    double sum = 0.0;
    for (int k = 0; k < rule.size(); ++k) {
        const double x = a + 0.5 * (rule.points[static_cast<std::size_t>(k)] + 1.0) * (c - a);
        sum += rule.weights[static_cast<std::size_t>(k)] * std::pow(q.value(x), p / 2.0);
    }
    return 0.5 * (c - a) * sum;
}

/// Bisects until the two halves agree with the whole panel to `tol`; needed
/// where |u(t)| nearly vanishes and |u|^p has a near-kink.
double adaptive_panel(const SquaredNorm& q, double p, const QuadratureRule& rule, double a, double c, double whole,
                      double tol, int depth)
{
    const double mid = 0.5 * (a + c);
    const double left = gauss_on(q, p, rule, a, mid);
    const double right = gauss_on(q, p, rule, mid, c);
    if (depth >= kMaxBisections || std::abs(left + right - whole) <= tol)
        return left + right;
    return adaptive_panel(q, p, rule, a, mid, left, tol, depth + 1) +
           adaptive_panel(q, p, rule, mid, c, right, tol, depth + 1);
}

double integrate_power(const SquaredNorm& q, double p, int oversampling)
{
    const int degree = q.degree();
    if (is_even_integer(p))
        return gauss_on(q, p, gauss_rule(std::max(1, exact_points(p, degree))), -1.0, 1.0);
    std::vector<double> breaks{-1.0};
    for (double x : q.critical_points())
        breaks.push_back(x);
    breaks.push_back(1.0);
    const auto rule = gauss_rule(oversampling * std::max(2, exact_points(p, degree)));
    std::vector<double> panels;
    double total = 0.0;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        panels.push_back(breaks[b + 1] > breaks[b] ? gauss_on(q, p, rule, breaks[b], breaks[b + 1]) : 0.0);
        total += panels.back();
    }
    const double tol = kRelativeTolerance * total;
    double sum = 0.0;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b)
        if (breaks[b + 1] > breaks[b])
            sum += adaptive_panel(q, p, rule, breaks[b], breaks[b + 1], panels[b], tol, 0);
    return sum;
}

double sampled_max(const SquaredNorm& q)
{
    double best = std::max(q.value(-1.0), q.value(1.0));
    for (int j = 0; j < kChebyshevSamples; ++j)
        best = std::max(best, q.value(std::cos(std::numbers::pi * (j + 0.5) / kChebyshevSamples)));
    for (double x : q.critical_points())
        best = std::max(best, q.value(x));
    return std::sqrt(best);
}

double finish(double accumulated, double p)
{
    return std::isinf(p) ? accumulated : std::pow(accumulated, 1.0 / p);
}

} // namespace

void NormSpec::validate() const
{
    if (!(p >= 1.0))
        throw std::invalid_argument(fmt::format("Bochner exponent p = {} is below 1", p));
    if (oversampling < 1)
        throw std::invalid_argument("quadrature oversampling must be at least 1");
}

double interval_norm_power(const PiecewisePoly& u, int interval, const SpaceTriplet& space, const NormSpec& spec)
{
    spec.validate();
    const SquaredNorm q(u, interval, space, spec.which);
    if (q.is_zero())
        return 0.0;
    if (std::isinf(spec.p))
        return sampled_max(q);
    return 0.5 * u.partition().step(interval) * integrate_power(q, spec.p, spec.oversampling);
}

double interval_norm(const PiecewisePoly& u, int interval, const SpaceTriplet& space, const NormSpec& spec)
{
    return finish(interval_norm_power(u, interval, space, spec), spec.p);
}

double bochner_norm(const PiecewisePoly& u, const SpaceTriplet& space, const NormSpec& spec)
{
    spec.validate();
    double acc = 0.0;
    for (int n = 0; n < u.intervals(); ++n) {
        const double part = interval_norm_power(u, n, space, spec);
        acc = std::isinf(spec.p) ? std::max(acc, part) : acc + part;
    }
    return finish(acc, spec.p);
}

double bochner_distance(const PiecewisePoly& u1, const PiecewisePoly& u2, const SpaceTriplet& space,
                        const NormSpec& spec)
{
    if (u1.space_dim() != u2.space_dim())
        throw std::invalid_argument("Bochner distance between functions of different space dimension");
    const TimePartition merged = merge(u1.partition(), u2.partition());
    const int degree = std::max(u1.degree(), u2.degree());
    const PiecewisePoly a = resample(elevate(u1, degree), merged);
    const PiecewisePoly b = resample(elevate(u2, degree), merged);
    return bochner_norm(a - b, space, spec);
}

double shift_difference(const PiecewisePoly& u, double delta, double r, const SpaceTriplet& space, Norm which)
{
    const double T = u.partition().final_time();
    if (!(delta > 0.0 && delta < T))
        throw std::invalid_argument(fmt::format("shift {} must lie in (0, T = {})", delta, T));
    const double length = T - delta;
    const double tol = kNodeTolerance * T;
    std::vector<double> candidates;
    for (double t : u.partition().nodes()) {
        candidates.push_back(t);
        candidates.push_back(t - delta);
    }
    std::sort(candidates.begin(), candidates.end());
    std::vector<double> nodes{0.0};
    for (double t : candidates) {
        if (t - nodes.back() > tol && t < length - tol)
            nodes.push_back(t);
    }
    nodes.push_back(length);
    const TimePartition target(std::move(nodes));
    const PiecewisePoly shifted = resample(u, target, delta);
    const PiecewisePoly base = resample(u, target, 0.0);
    return bochner_norm(shifted - base, space, NormSpec{r, which, 2});
}

double sampled_bochner_norm(const TimePartition& partition, const IntervalFunction& f, const SpaceTriplet& space,
                            const NormSpec& spec, int points)
{
    spec.validate();
    if (points < 1)
        throw std::invalid_argument("sampled Bochner norm needs at least one point per interval");
    double acc = 0.0;
    if (std::isinf(spec.p)) {
        for (int n = 0; n < partition.size(); ++n) {
            acc = std::max({acc, space.norm(spec.which, f(n, partition.node(n))),
                            space.norm(spec.which, f(n, partition.node(n + 1)))});
            for (int j = 0; j < kChebyshevSamples; ++j) {
                const double x = std::cos(std::numbers::pi * (j + 0.5) / kChebyshevSamples);
                acc = std::max(acc, space.norm(spec.which, f(n, to_time(partition, n, x))));
            }
        }
        return acc;
    }
    const auto rule = gauss_rule(points);
    for (int n = 0; n < partition.size(); ++n) {
        double part = 0.0;
        for (int k = 0; k < rule.size(); ++k) {
            const double t = to_time(partition, n, rule.points[static_cast<std::size_t>(k)]);
            part += rule.weights[static_cast<std::size_t>(k)] * std::pow(space.norm(spec.which, f(n, t)), spec.p);
        }
        acc += 0.5 * partition.step(n) * part;
    }
    return std::pow(acc, 1.0 / spec.p);
}

InequalitySides holder_step_check(std::span<const double> jump_norms, std::span<const double> taus, double p,
                                  double final_time, double tau_max)
{
    if (!(p >= 1.0 && p < 2.0))
        throw std::invalid_argument(fmt::format("Hoelder step needs 1 <= p < 2, got {}", p));
    if (jump_norms.size() != taus.size())
        throw std::invalid_argument("jump and step lists differ in length");
    double weighted = 0.0;
    double squares = 0.0;
    for (std::size_t n = 0; n < taus.size(); ++n) {
        weighted += taus[n] * std::pow(jump_norms[n], p);
        squares += jump_norms[n] * jump_norms[n];
    }
    return {std::pow(weighted, 1.0 / p),
            std::pow(final_time, (2.0 - p) / (2.0 * p)) * std::sqrt(tau_max) * std::sqrt(squares)};
}

InequalitySides vector_norm_step_check(std::span<const double> jump_norms, std::span<const double> taus, double p)
{
    if (!(p >= 2.0))
        throw std::invalid_argument(fmt::format("vector-norm step needs p >= 2, got {}", p));
    if (jump_norms.size() != taus.size())
        throw std::invalid_argument("jump and step lists differ in length");
    double squares = 0.0;
    double tau = 0.0;
    for (std::size_t n = 0; n < taus.size(); ++n) {
        squares += jump_norms[n] * jump_norms[n];
        tau = std::max(tau, taus[n]);
    }
    if (std::isinf(p)) {
        double largest = 0.0;
        for (double j : jump_norms)
            largest = std::max(largest, j);
        return {largest, std::sqrt(squares)};
    }
    double weighted = 0.0;
    for (std::size_t n = 0; n < taus.size(); ++n)
        weighted += taus[n] * std::pow(jump_norms[n], p);
    return {std::pow(weighted, 1.0 / p), std::pow(tau, 1.0 / p) * std::sqrt(squares)};
}

} // namespace dgrecon
