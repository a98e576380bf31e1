#pragma once

#include <functional>

#include <Eigen/Dense>

#include "dgrecon/legendre.hpp"
#include "dgrecon/time_mesh.hpp"

namespace dgrecon {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Side { left, right };

/// A function in P^l(X) over a time partition: on each interval n a degree-l
/// polynomial sum_i c_{n,i} L_{n,i}(t) with vector coefficients c_{n,i} in R^m,
/// where L_{n,i} is P_i mapped affinely from [-1, 1] onto the interval.
///
/// Coefficients are stored as an m x (N (l+1)) matrix; column n (l+1) + i holds
/// c_{n,i}.
class PiecewisePoly {
public:
    /// The zero function.
    PiecewisePoly(TimePartition partition, int degree, int space_dim);
    PiecewisePoly(TimePartition partition, int degree, Matrix coefficients);

    const TimePartition& partition() const noexcept { return partition_; }
    int degree() const noexcept { return degree_; }
    int space_dim() const noexcept { return static_cast<int>(coeffs_.rows()); }
    int intervals() const noexcept { return partition_.size(); }
    int modes() const noexcept { return degree_ + 1; }

    const Matrix& coefficients() const noexcept { return coeffs_; }
    auto coefficient(int interval, int mode) const { return coeffs_.col(interval * modes() + mode); }
    /// m x (l+1) block of interval n.
    auto interval_coefficients(int interval) const
    {
        return coeffs_.middleCols(interval * modes(), modes());
    }

    /// Polynomial of interval n at reference coordinate x in [-1, 1]; no range
    /// check, so the interval polynomial may be extrapolated.
    Vector eval_reference(int interval, double x) const;
    /// Polynomial of interval n at time t (may lie outside the interval).
    Vector eval_on_interval(int interval, double t) const;

    /// One-sided value at t in [0, T]. At an interior node, left uses the
    /// interval ending there and right the one starting there. Throws
    /// std::invalid_argument outside [0, T].
    Vector eval(double t, Side side) const;

    Vector left_limit(int node) const;  ///< u(t_node^-), node >= 1
    Vector right_limit(int node) const; ///< u(t_node^+), node <= N-1

    /// Max Euclidean norm over all coefficient vectors.
    double coefficient_scale() const;

private:
    TimePartition partition_;
    int degree_;
    Matrix coeffs_;
};

PiecewisePoly operator+(const PiecewisePoly& a, const PiecewisePoly& b);
PiecewisePoly operator-(const PiecewisePoly& a, const PiecewisePoly& b);
PiecewisePoly operator*(double alpha, const PiecewisePoly& u);

/// Affine map of the reference coordinate x in [-1, 1] onto interval n.
double to_time(const TimePartition& partition, int interval, double x);
double to_reference(const TimePartition& partition, int interval, double t);

/// P_i mapped onto interval n, evaluated at t in its closure.
double mapped_legendre(const TimePartition& partition, int interval, int mode, double t);

/// Jump [u]_n = u(t_n^+) - u(t_n^-) for n >= 1, and u(0^+) - u0 for n = 0.
Vector jump(const PiecewisePoly& u, int node, const Vector& initial);

/// Interval-wise time derivative, exact in modal coordinates. Degree
/// max(l - 1, 0); a degree-0 input gives the zero function of degree 0.
PiecewisePoly derivative(const PiecewisePoly& u);

/// Interval-wise time antiderivative vanishing at every left node (degree l+1).
PiecewisePoly local_antiderivative(const PiecewisePoly& u);

/// Same function represented with higher degree (zero padded modes).
PiecewisePoly elevate(const PiecewisePoly& u, int degree);

/// Re-expands t -> u(t + shift) on `target`. Every target interval shifted by
/// `shift` must lie inside a single interval of u's partition (up to node
/// tolerance); the re-expansion is then exact.
PiecewisePoly resample(const PiecewisePoly& u, const TimePartition& target, double shift = 0.0);

using TimeFunction = std::function<Vector(double)>;

/// L2(0,T)-orthogonal projection onto P^l: c_{n,i} = (2i+1)/tau_n int f L_{n,i},
/// evaluated with `rule` mapped to each interval. Throws ConfigurationError if
/// the rule's exactness is below 2l.
PiecewisePoly project_time(const TimeFunction& f, const TimePartition& partition, int degree,
                           int space_dim, const QuadratureRule& rule);

} // namespace dgrecon
