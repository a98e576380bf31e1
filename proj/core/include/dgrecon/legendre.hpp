#pragma once

#include <span>
#include <vector>

namespace dgrecon {

/// Legendre polynomial P_i on [-1, 1], normalized so that P_i(1) = 1.
double legendre(int i, double x);

/// P_0(x), ..., P_degree(x) by the three-term recurrence.
void legendre_values(int degree, double x, std::span<double> out);

/// P_0'(x), ..., P_degree'(x).
void legendre_derivative_values(int degree, double x, std::span<double> out);

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
    std::vector<double> points;
    std::vector<double> weights;

    int size() const noexcept { return static_cast<int>(points.size()); }
    /// Highest polynomial degree integrated exactly (2k - 1).
    int exactness() const noexcept { return 2 * size() - 1; }
};

/// k-point Gauss-Legendre rule; nodes by Newton iteration on P_k.
QuadratureRule gauss_rule(int points);

/// Legendre coefficients of d/dx of the series sum_i c_i P_i. The result has
/// max(degree, 1) entries (a constant maps to the zero constant).
std::vector<double> legendre_derivative_coefficients(std::span<const double> coefficients);

/// Legendre coefficients (one more entry) of x -> int_{-1}^{x} sum_i c_i P_i.
std::vector<double> legendre_integral_coefficients(std::span<const double> coefficients);

} // namespace dgrecon
