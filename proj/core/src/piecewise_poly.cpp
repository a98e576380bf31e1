#include "dgrecon/piecewise_poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "dgrecon/errors.hpp"

namespace dgrecon {

namespace {

constexpr double kNodeTolerance = 1e-14;

std::vector<double> basis_at(int degree, double x)
{
    std::vector<double> p(static_cast<std::size_t>(degree) + 1);
    legendre_values(degree, x, p);
    return p;
}

void require_same_layout(const PiecewisePoly& a, const PiecewisePoly& b)
{
    if (!(a.partition() == b.partition()))
        throw std::invalid_argument("piecewise polynomials live on different partitions");
    if (a.space_dim() != b.space_dim())
        throw std::invalid_argument("piecewise polynomials have different space dimensions");
}

} // namespace

PiecewisePoly::PiecewisePoly(TimePartition partition, int degree, int space_dim)
    : partition_(std::move(partition)), degree_(degree)
{
    if (degree < 0 || space_dim < 1)
        throw std::invalid_argument("piecewise polynomial needs degree >= 0 and space_dim >= 1");
    coeffs_ = Matrix::Zero(space_dim, partition_.size() * (degree + 1));
}

PiecewisePoly::PiecewisePoly(TimePartition partition, int degree, Matrix coefficients)
    : partition_(std::move(partition)), degree_(degree), coeffs_(std::move(coefficients))
{
    if (degree < 0 || coeffs_.rows() < 1)
        throw std::invalid_argument("piecewise polynomial needs degree >= 0 and space_dim >= 1");
    if (coeffs_.cols() != partition_.size() * (degree + 1))
        throw std::invalid_argument(fmt::format(
            "coefficient matrix has {} columns, expected N (l+1) = {}", coeffs_.cols(),
            partition_.size() * (degree + 1)));
}

Vector PiecewisePoly::eval_reference(int interval, double x) const
{
    const auto p = basis_at(degree_, x);
    const auto block = interval_coefficients(interval);
    Vector out = Vector::Zero(space_dim());
    for (int i = 0; i <= degree_; ++i)
        out += p[static_cast<std::size_t>(i)] * block.col(i);
    return out;
}

Vector PiecewisePoly::eval_on_interval(int interval, double t) const
{
    return eval_reference(interval, to_reference(partition_, interval, t));
}

Vector PiecewisePoly::eval(double t, Side side) const
{
    const double T = partition_.final_time();
    if (!(t >= 0.0 && t <= T))
        throw std::invalid_argument(fmt::format("evaluation time {} outside [0, {}]", t, T));
    if (side == Side::left && t == 0.0)
        throw std::invalid_argument("left limit requested at t = 0");
    if (side == Side::right && t == T)
        throw std::invalid_argument("right limit requested at t = T");
    const int n = partition_.locate(t, side == Side::left);
    return eval_on_interval(n, t);
}

Vector PiecewisePoly::left_limit(int node) const
{
    if (node < 1 || node > intervals())
        throw std::invalid_argument(fmt::format("no left limit at node {}", node));
    // Sum of coefficients since P_i(1) = 1.
    return interval_coefficients(node - 1).rowwise().sum();
}

Vector PiecewisePoly::right_limit(int node) const
{
    if (node < 0 || node >= intervals())
        throw std::invalid_argument(fmt::format("no right limit at node {}", node));
    return eval_reference(node, -1.0);
}

double PiecewisePoly::coefficient_scale() const
{
    if (coeffs_.cols() == 0)
        return 0.0;
    return coeffs_.colwise().norm().maxCoeff();
}

PiecewisePoly operator+(const PiecewisePoly& a, const PiecewisePoly& b)
{
    require_same_layout(a, b);
    const int degree = std::max(a.degree(), b.degree());
    return PiecewisePoly(a.partition(), degree,
                         elevate(a, degree).coefficients() + elevate(b, degree).coefficients());
}

PiecewisePoly operator-(const PiecewisePoly& a, const PiecewisePoly& b)
{
    return a + (-1.0) * b;
}

PiecewisePoly operator*(double alpha, const PiecewisePoly& u)
{
    return PiecewisePoly(u.partition(), u.degree(), alpha * u.coefficients());
}

double to_time(const TimePartition& partition, int interval, double x)
{
    return partition.node(interval) + 0.5 * (x + 1.0) * partition.step(interval);
}

double to_reference(const TimePartition& partition, int interval, double t)
{
    return 2.0 * (t - partition.node(interval)) / partition.step(interval) - 1.0;
}

double mapped_legendre(const TimePartition& partition, int interval, int mode, double t)
{
    const double a = partition.node(interval);
    const double b = partition.node(interval + 1);
    if (t < a || t > b)
        throw std::invalid_argument(
            fmt::format("time {} outside the closure of interval [{}, {}]", t, a, b));
    // Endpoints map exactly onto -1 and 1.
    const double x = t == a ? -1.0 : (t == b ? 1.0 : to_reference(partition, interval, t));
    return legendre(mode, x);
}

Vector jump(const PiecewisePoly& u, int node, const Vector& initial)
{
    if (node < 0 || node >= u.intervals())
        throw std::invalid_argument(fmt::format("jump index {} outside 0..{}", node, u.intervals() - 1));
    if (node == 0) {
        if (initial.size() != u.space_dim())
            throw std::invalid_argument("initial datum has the wrong dimension");
        return u.right_limit(0) - initial;
    }
    return u.right_limit(node) - u.left_limit(node);
}

PiecewisePoly derivative(const PiecewisePoly& u)
{
    const int degree = std::max(u.degree() - 1, 0);
    Matrix out = Matrix::Zero(u.space_dim(), u.intervals() * (degree + 1));
    std::vector<double> c(static_cast<std::size_t>(u.modes()));
    for (int n = 0; n < u.intervals(); ++n) {
        const double scale = 2.0 / u.partition().step(n);
        for (int k = 0; k < u.space_dim(); ++k) {
            for (int i = 0; i < u.modes(); ++i)
                c[static_cast<std::size_t>(i)] = u.coefficients()(k, n * u.modes() + i);
            const auto d = legendre_derivative_coefficients(c);
            for (int j = 0; j <= degree && j < static_cast<int>(d.size()); ++j)
                out(k, n * (degree + 1) + j) = scale * d[static_cast<std::size_t>(j)];
        }
    }
    return PiecewisePoly(u.partition(), degree, std::move(out));
}

PiecewisePoly local_antiderivative(const PiecewisePoly& u)
{
    const int degree = u.degree() + 1;
    Matrix out = Matrix::Zero(u.space_dim(), u.intervals() * (degree + 1));
    std::vector<double> c(static_cast<std::size_t>(u.modes()));
    for (int n = 0; n < u.intervals(); ++n) {
        const double scale = 0.5 * u.partition().step(n);
        for (int k = 0; k < u.space_dim(); ++k) {
            for (int i = 0; i < u.modes(); ++i)
                c[static_cast<std::size_t>(i)] = u.coefficients()(k, n * u.modes() + i);
            const auto a = legendre_integral_coefficients(c);
            for (int j = 0; j <= degree; ++j)
                out(k, n * (degree + 1) + j) = scale * a[static_cast<std::size_t>(j)];
        }
    }
    return PiecewisePoly(u.partition(), degree, std::move(out));
}

PiecewisePoly elevate(const PiecewisePoly& u, int degree)
{
    if (degree < u.degree())
        throw std::invalid_argument("cannot lower the degree by elevation");
    if (degree == u.degree())
        return u;
    Matrix out = Matrix::Zero(u.space_dim(), u.intervals() * (degree + 1));
    for (int n = 0; n < u.intervals(); ++n)
        out.middleCols(n * (degree + 1), u.modes()) = u.interval_coefficients(n);
    return PiecewisePoly(u.partition(), degree, std::move(out));
}

PiecewisePoly resample(const PiecewisePoly& u, const TimePartition& target, double shift)
{
    const TimePartition& source = u.partition();
    const double tol = kNodeTolerance * source.final_time();
    const int degree = u.degree();
    const auto rule = gauss_rule(degree + 1);
    Matrix out = Matrix::Zero(u.space_dim(), target.size() * (degree + 1));
    std::vector<double> p(static_cast<std::size_t>(degree) + 1);
    for (int j = 0; j < target.size(); ++j) {
        const double a = target.node(j) + shift;
        const double b = target.node(j + 1) + shift;
        const double mid = 0.5 * (a + b);
        const int n = source.locate(std::clamp(mid, 0.0, source.final_time()));
        if (a < source.node(n) - tol || b > source.node(n + 1) + tol)
            throw std::invalid_argument(fmt::format(
                "target interval [{}, {}] straddles a node of the source partition", a, b));
        // Exact projection: the restriction is a polynomial of the same degree.
        for (int q = 0; q < rule.size(); ++q) {
            const double y = rule.points[static_cast<std::size_t>(q)];
            const double w = rule.weights[static_cast<std::size_t>(q)];
            const double t = a + 0.5 * (y + 1.0) * (b - a);
            const Vector value = u.eval_on_interval(n, t);
            legendre_values(degree, y, p);
            for (int i = 0; i <= degree; ++i)
                out.col(j * (degree + 1) + i) += (0.5 * (2 * i + 1) * w * p[static_cast<std::size_t>(i)]) * value;
        }
    }
    return PiecewisePoly(target, degree, std::move(out));
}

PiecewisePoly project_time(const TimeFunction& f, const TimePartition& partition, int degree,
                           int space_dim, const QuadratureRule& rule)
{
    if (rule.exactness() < 2 * degree)
        throw ConfigurationError(fmt::format(
            "quadrature exactness {} is below 2l = {} needed for the time projection",
            rule.exactness(), 2 * degree));
    Matrix out = Matrix::Zero(space_dim, partition.size() * (degree + 1));
    std::vector<double> p(static_cast<std::size_t>(degree) + 1);
    for (int n = 0; n < partition.size(); ++n) {
        for (int q = 0; q < rule.size(); ++q) {
            const double x = rule.points[static_cast<std::size_t>(q)];
            const double w = rule.weights[static_cast<std::size_t>(q)];
            const Vector value = f(to_time(partition, n, x));
            if (value.size() != space_dim)
                throw std::invalid_argument("projected function returned the wrong dimension");
            legendre_values(degree, x, p);
            // (2i+1)/tau int f L_i dt = (2i+1)/2 int_{-1}^{1} f P_i dx
            for (int i = 0; i <= degree; ++i)
                out.col(n * (degree + 1) + i) += (0.5 * (2 * i + 1) * w * p[static_cast<std::size_t>(i)]) * value;
        }
    }
    return PiecewisePoly(partition, degree, std::move(out));
}

} // namespace dgrecon
