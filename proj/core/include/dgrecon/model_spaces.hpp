#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dgrecon {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Norm { X, B, Y };

const char* to_string(Norm which);

/// Finite-dimensional Gelfand triplet X -> B -> Y = X'.
///
/// Spectral variant: coordinates are B-orthonormal eigen-coefficients and
///   |u|_B^2 = sum u_k^2,  |u|_X^2 = sum mu_k u_k^2,  |u|_Y^2 = sum u_k^2 / mu_k.
/// Matrix variant: SPD mass M and stiffness K,
///   |u|_B^2 = u'Mu,  |u|_X^2 = u'Ku,  |u|_Y^2 = (Mu)' K^{-1} (Mu).
///
/// Cholesky factors of M and K are computed once at construction and shared
/// between copies; the object is immutable.
class SpaceTriplet {
public:
    /// Throws std::invalid_argument for non-positive or decreasing eigenvalues.
    static SpaceTriplet spectral(Vector eigenvalues, double theta = 0.5, double c_theta = 1.0);
    /// Dirichlet Laplacian on (0, 1) in its sine basis: mu_k = (k pi)^2.
    static SpaceTriplet laplace1d(int modes);
    /// X = B = Y = Euclidean R^m (all eigenvalues one).
    static SpaceTriplet euclidean(int dim);
    /// Throws std::invalid_argument if M or K is not SPD.
    static SpaceTriplet matrix(Matrix mass, Matrix stiffness, double theta = 0.5, double c_theta = 1.0);
    /// P1 finite elements for -u'' on (0, 1) with homogeneous Dirichlet data
    /// and `interior_nodes` unknowns.
    static SpaceTriplet p1_laplace1d(int interior_nodes);

    int dim() const noexcept;
    bool is_spectral() const noexcept { return static_cast<bool>(spectral_); }
    double theta() const noexcept { return theta_; }
    double c_theta() const noexcept { return c_theta_; }
    /// True for the laplace1d construction (enables the sine collocation map).
    bool is_laplace1d() const noexcept { return laplace1d_; }

    /// Spectral variant only.
    const Vector& eigenvalues() const;
    /// Matrix variant only.
    const Matrix& mass() const;
    const Matrix& stiffness() const;

    double norm(Norm which, const Vector& u) const;
    double inner(Norm which, const Vector& u, const Vector& v) const;

    /// Mu (identity for spectral): the functional v -> (u, v)_B.
    Vector apply_mass(const Vector& u) const;
    /// Ku (mu .* u for spectral): the functional v -> a(u, v) of the operator.
    Vector apply_stiffness(const Vector& u) const;
    /// M^{-1} g: B-Riesz representative of a functional given as a dual vector.
    Vector riesz(const Vector& functional) const;
    /// |g|_{X'} of a functional g given as a dual vector: sqrt(g' K^{-1} g).
    double dual_norm(const Vector& functional) const;

    /// Constant C with |u|_Y <= C |u|_B and |u|_B <= C |u|_X.
    double embedding_constant() const;

private:
    struct Spectral {
        Vector mu;
    };
    struct Dense {
        Matrix mass;
        Matrix stiffness;
        Eigen::LLT<Matrix> mass_llt;
        Eigen::LLT<Matrix> stiffness_llt;
        double min_generalized_eigenvalue = 0.0;
    };

    void require_dim(const Vector& u) const;

    std::shared_ptr<const Spectral> spectral_;
    std::shared_ptr<const Dense> dense_;
    double theta_ = 0.5;
    double c_theta_ = 1.0;
    bool laplace1d_ = false;
};

/// |u|_B / (C_theta |u|_X^theta |u|_Y^(1-theta)) -- at most 1 whenever the
/// interpolation inequality holds with constant C_theta. Stored theta and
/// C_theta of the triplet are used. Throws std::invalid_argument for u = 0.
double interpolation_ratio(const SpaceTriplet& space, const Vector& u);

/// Defines X_tau. For a spectral triplet `truncation` keeps the first m_tau
/// modes; for a matrix triplet a basis (columns) must be supplied.
struct SubspaceSelector {
    int truncation = 0;
    std::optional<Matrix> basis;
};

/// B-orthogonal projection onto X_tau. Throws UnsupportedConfiguration for a
/// matrix triplet without a basis.
Vector b_project(const SpaceTriplet& space, const SubspaceSelector& selector, const Vector& u);

/// <F, v> realized as (F, v)_B for F in B coordinates.
double riesz_dual_pairing(const SpaceTriplet& space, const Vector& functional, const Vector& v);

/// Dense matrix from a Matrix Market coordinate file (symmetric storage
/// expanded). Throws std::runtime_error naming the path on failure.
Matrix load_matrix_market(const std::string& path);

/// Triplet from "spectral:m=64,laplace1d", "spectral:mu=1;4;9",
/// "euclidean:m=3", "p1:n=31" or "matrix:M=<file>,K=<file>".
SpaceTriplet parse_triplet_spec(const std::string& text);

} // namespace dgrecon
