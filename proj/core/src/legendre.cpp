#include "dgrecon/legendre.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dgrecon {

double legendre(int i, double x)
{
    if (i < 0)
        throw std::invalid_argument("Legendre index must be non-negative");
    if (i == 0)
        return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int k = 1; k < i; ++k) {
        const double next = ((2 * k + 1) * x * cur - k * prev) / (k + 1);
        prev = cur;
        cur = next;
    }
    return cur;
}

void legendre_values(int degree, double x, std::span<double> out)
{
    out[0] = 1.0;
    if (degree >= 1)
        out[1] = x;
    for (int k = 1; k < degree; ++k)
        out[static_cast<std::size_t>(k + 1)] =
            ((2 * k + 1) * x * out[static_cast<std::size_t>(k)] - k * out[static_cast<std::size_t>(k - 1)]) /
            (k + 1);
}

void legendre_derivative_values(int degree, double x, std::span<double> out)
{
    // P'_{k+1} = P'_{k-1} + (2k + 1) P_k
    std::vector<double> p(static_cast<std::size_t>(degree) + 1);
    legendre_values(degree, x, p);
    out[0] = 0.0;
    if (degree >= 1)
        out[1] = 1.0;
    for (int k = 1; k < degree; ++k)
        out[static_cast<std::size_t>(k + 1)] =
            out[static_cast<std::size_t>(k - 1)] + (2 * k + 1) * p[static_cast<std::size_t>(k)];
}

QuadratureRule gauss_rule(int points)
{
    if (points < 1)
        throw std::invalid_argument("Gauss rule needs at least one point");
    QuadratureRule rule;
    rule.points.resize(static_cast<std::size_t>(points));
    rule.weights.resize(static_cast<std::size_t>(points));
    const int n = points;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 1; k < n; ++k) {
                const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
                p0 = p1;
                p1 = p2;
            }
            // P_n = p1, P_{n-1} = p0
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x)))
                break;
        }
        // Recompute the derivative at the converged node for the weight.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 1; k < n; ++k) {
            const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[static_cast<std::size_t>(i)] = -x;
        rule.points[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1)
        rule.points[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

std::vector<double> legendre_derivative_coefficients(std::span<const double> c)
{
    const int degree = static_cast<int>(c.size()) - 1;
    if (degree <= 0)
        return {0.0};
    // d_j = (2j + 1) sum_{i > j, i - j odd} c_i
    std::vector<double> d(static_cast<std::size_t>(degree), 0.0);
    double odd_tail = 0.0;  // sum of c_i with i = j+1, j+3, ...
    double even_tail = 0.0; // sum of c_i with i = j+2, j+4, ...
    for (int j = degree - 1; j >= 0; --j) {
        const double next = odd_tail;
        odd_tail = c[static_cast<std::size_t>(j + 1)] + even_tail;
        even_tail = next;
        d[static_cast<std::size_t>(j)] = (2 * j + 1) * odd_tail;
    }
    return d;
}

std::vector<double> legendre_integral_coefficients(std::span<const double> c)
{
    // int_{-1}^x P_0 = P_0 + P_1,  int_{-1}^x P_i = (P_{i+1} - P_{i-1}) / (2i + 1)
    std::vector<double> out(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i == 0) {
            out[0] += c[0];
            out[1] += c[0];
        } else {
            const double scale = c[i] / static_cast<double>(2 * i + 1);
            out[i + 1] += scale;
            out[i - 1] -= scale;
        }
    }
    return out;
}

} // namespace dgrecon
