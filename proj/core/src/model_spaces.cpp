#include "dgrecon/model_spaces.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <fmt/format.h>
#include <unsupported/Eigen/SparseExtra>

#include "dgrecon/errors.hpp"

namespace dgrecon {

const char* to_string(Norm which)
{
    switch (which) {
    case Norm::X:
        return "X";
    case Norm::B:
        return "B";
    case Norm::Y:
        return "Y";
    }
    return "?";
}

SpaceTriplet SpaceTriplet::spectral(Vector eigenvalues, double theta, double c_theta)
{
    if (eigenvalues.size() < 1)
        throw std::invalid_argument("spectral triplet needs at least one eigenvalue");
    for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
        if (!(eigenvalues[k] > 0.0) || !std::isfinite(eigenvalues[k]))
            throw std::invalid_argument(fmt::format("eigenvalue {} is not positive", k + 1));
        if (k > 0 && eigenvalues[k] < eigenvalues[k - 1])
            throw std::invalid_argument("eigenvalues must be nondecreasing");
    }
    if (!(theta > 0.0 && theta < 1.0) || !(c_theta > 0.0))
        throw std::invalid_argument("interpolation exponent must lie in (0, 1) with C_theta > 0");
    SpaceTriplet out;
    out.spectral_ = std::make_shared<const Spectral>(Spectral{std::move(eigenvalues)});
    out.theta_ = theta;
    out.c_theta_ = c_theta;
    return out;
}

SpaceTriplet SpaceTriplet::laplace1d(int modes)
{
    if (modes < 1)
        throw std::invalid_argument("laplace1d triplet needs at least one mode");
    Vector mu(modes);
    for (int k = 0; k < modes; ++k)
        mu[k] = std::pow((k + 1) * std::numbers::pi, 2);
    auto out = spectral(std::move(mu));
    out.laplace1d_ = true;
    return out;
}

SpaceTriplet SpaceTriplet::euclidean(int dim)
{
    if (dim < 1)
        throw std::invalid_argument("euclidean triplet needs dim >= 1");
    return spectral(Vector::Ones(dim));
}

SpaceTriplet SpaceTriplet::matrix(Matrix mass, Matrix stiffness, double theta, double c_theta)
{
    if (mass.rows() != mass.cols() || stiffness.rows() != stiffness.cols() ||
        mass.rows() != stiffness.rows() || mass.rows() < 1)
        throw std::invalid_argument("mass and stiffness must be square matrices of equal size");
    if (!mass.isApprox(mass.transpose()) || !stiffness.isApprox(stiffness.transpose()))
        throw std::invalid_argument("mass and stiffness must be symmetric");
    if (!(theta > 0.0 && theta < 1.0) || !(c_theta > 0.0))
        throw std::invalid_argument("interpolation exponent must lie in (0, 1) with C_theta > 0");
    Dense dense;
    dense.mass_llt.compute(mass);
    if (dense.mass_llt.info() != Eigen::Success)
        throw std::invalid_argument("mass matrix is not symmetric positive definite");
    dense.stiffness_llt.compute(stiffness);
    if (dense.stiffness_llt.info() != Eigen::Success)
        throw std::invalid_argument("stiffness matrix is not symmetric positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> eig(stiffness, mass, Eigen::EigenvaluesOnly);
    dense.min_generalized_eigenvalue = eig.eigenvalues().minCoeff();
    dense.mass = std::move(mass);
    dense.stiffness = std::move(stiffness);

    SpaceTriplet out;
    out.dense_ = std::make_shared<const Dense>(std::move(dense));
    out.theta_ = theta;
    out.c_theta_ = c_theta;
    return out;
}

SpaceTriplet SpaceTriplet::p1_laplace1d(int interior_nodes)
{
    if (interior_nodes < 1)
        throw std::invalid_argument("P1 triplet needs at least one interior node");
    const int n = interior_nodes;
    const double h = 1.0 / (n + 1);
    Matrix mass = Matrix::Zero(n, n);
    Matrix stiffness = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        mass(i, i) = 4.0 * h / 6.0;
        stiffness(i, i) = 2.0 / h;
        if (i + 1 < n) {
            mass(i, i + 1) = mass(i + 1, i) = h / 6.0;
            stiffness(i, i + 1) = stiffness(i + 1, i) = -1.0 / h;
        }
    }
    return matrix(std::move(mass), std::move(stiffness));
}

int SpaceTriplet::dim() const noexcept
{
    return spectral_ ? static_cast<int>(spectral_->mu.size()) : static_cast<int>(dense_->mass.rows());
}

const Vector& SpaceTriplet::eigenvalues() const
{
    if (!spectral_)
        throw UnsupportedConfiguration("eigenvalues are only stored for spectral triplets");
    return spectral_->mu;
}

const Matrix& SpaceTriplet::mass() const
{
    if (!dense_)
        throw UnsupportedConfiguration("mass matrix is only stored for matrix triplets");
    return dense_->mass;
}

const Matrix& SpaceTriplet::stiffness() const
{
    if (!dense_)
        throw UnsupportedConfiguration("stiffness matrix is only stored for matrix triplets");
    return dense_->stiffness;
}

void SpaceTriplet::require_dim(const Vector& u) const
{
    if (u.size() != dim())
        throw std::invalid_argument(
            fmt::format("vector of length {} used with a triplet of dimension {}", u.size(), dim()));
}

double SpaceTriplet::inner(Norm which, const Vector& u, const Vector& v) const
{
    require_dim(u);
    require_dim(v);
    if (spectral_) {
        const Vector& mu = spectral_->mu;
        switch (which) {
        case Norm::B:
            return u.dot(v);
        case Norm::X:
            return (u.array() * mu.array() * v.array()).sum();
        case Norm::Y:
            return (u.array() * v.array() / mu.array()).sum();
        }
    }
    switch (which) {
    case Norm::B:
        return u.dot(dense_->mass * v);
    case Norm::X:
        return u.dot(dense_->stiffness * v);
    case Norm::Y: {
        const Vector mu = dense_->mass * u;
        const Vector mv = dense_->mass * v;
        return mu.dot(dense_->stiffness_llt.solve(mv));
    }
    }
    return 0.0;
}

double SpaceTriplet::norm(Norm which, const Vector& u) const
{
    return std::sqrt(std::max(inner(which, u, u), 0.0));
}

Vector SpaceTriplet::apply_mass(const Vector& u) const
{
    require_dim(u);
    return spectral_ ? u : Vector(dense_->mass * u);
}

Vector SpaceTriplet::apply_stiffness(const Vector& u) const
{
    require_dim(u);
    if (spectral_)
        return spectral_->mu.cwiseProduct(u);
    return dense_->stiffness * u;
}

Vector SpaceTriplet::riesz(const Vector& functional) const
{
    require_dim(functional);
    return spectral_ ? functional : Vector(dense_->mass_llt.solve(functional));
}

double SpaceTriplet::dual_norm(const Vector& functional) const
{
    require_dim(functional);
    if (spectral_)
        return std::sqrt((functional.array().square() / spectral_->mu.array()).sum());
    return std::sqrt(std::max(functional.dot(dense_->stiffness_llt.solve(functional)), 0.0));
}

double SpaceTriplet::embedding_constant() const
{
    const double lambda_min = spectral_ ? spectral_->mu[0] : dense_->min_generalized_eigenvalue;
    return 1.0 / std::sqrt(lambda_min);
}

double interpolation_ratio(const SpaceTriplet& space, const Vector& u)
{
    const double b = space.norm(Norm::B, u);
    if (b == 0.0)
        throw std::invalid_argument("interpolation ratio is undefined for the zero vector");
    const double x = space.norm(Norm::X, u);
    const double y = space.norm(Norm::Y, u);
    const double theta = space.theta();
    return b / (space.c_theta() * std::pow(x, theta) * std::pow(y, 1.0 - theta));
}

Vector b_project(const SpaceTriplet& space, const SubspaceSelector& selector, const Vector& u)
{
    if (u.size() != space.dim())
        throw std::invalid_argument("projected vector has the wrong dimension");
    if (selector.basis) {
        const Matrix& V = *selector.basis;
        if (V.rows() != space.dim())
            throw std::invalid_argument("subspace basis has the wrong number of rows");
        Matrix MV(V.rows(), V.cols());
        for (Eigen::Index j = 0; j < V.cols(); ++j)
            MV.col(j) = space.apply_mass(V.col(j));
        const Matrix gram = V.transpose() * MV;
        Eigen::LLT<Matrix> llt(gram);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("subspace basis is linearly dependent");
        return V * llt.solve(MV.transpose() * u);
    }
    if (!space.is_spectral())
        throw UnsupportedConfiguration("B-projection on a matrix triplet needs an explicit subspace basis");
    if (selector.truncation < 0 || selector.truncation > space.dim())
        throw std::invalid_argument("truncation dimension outside 0..m");
    Vector out = Vector::Zero(u.size());
    out.head(selector.truncation) = u.head(selector.truncation);
    return out;
}

double riesz_dual_pairing(const SpaceTriplet& space, const Vector& functional, const Vector& v)
{
    return space.inner(Norm::B, functional, v);
}

Matrix load_matrix_market(const std::string& path)
{
    if (!std::filesystem::exists(path))
        throw std::runtime_error("matrix file not found: " + path);
    int symmetry = 0;
    bool is_complex = false;
    bool is_vector = false;
    if (!Eigen::getMarketHeader(path, symmetry, is_complex, is_vector) || is_complex || is_vector)
        throw std::runtime_error("not a real coordinate Matrix Market file: " + path);
    Eigen::SparseMatrix<double> sparse;
    if (!Eigen::loadMarket(sparse, path))
        throw std::runtime_error("cannot read Matrix Market file: " + path);
    Matrix dense(sparse);
    if (symmetry == Eigen::Symmetric) {
        Matrix lower = dense.triangularView<Eigen::StrictlyLower>();
        dense += lower.transpose();
    }
    return dense;
}

SpaceTriplet parse_triplet_spec(const std::string& text)
{
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    std::vector<std::pair<std::string, std::string>> fields;
    if (colon != std::string::npos) {
        std::istringstream in(text.substr(colon + 1));
        std::string field;
        while (std::getline(in, field, ',')) {
            const auto eq = field.find('=');
            if (eq == std::string::npos)
                fields.emplace_back(field, "");
            else
                fields.emplace_back(field.substr(0, eq), field.substr(eq + 1));
        }
    }
    auto lookup = [&](const std::string& key) -> std::optional<std::string> {
        for (const auto& [k, v] : fields)
            if (k == key)
                return v;
        return std::nullopt;
    };
    auto to_int = [&](const std::string& key, int fallback) {
        const auto v = lookup(key);
        if (!v)
            return fallback;
        try {
            return std::stoi(*v);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad integer for '" + key + "' in space spec: " + *v);
        }
    };
    const double theta = lookup("theta") ? std::stod(*lookup("theta")) : 0.5;
    const double c_theta = lookup("ctheta") ? std::stod(*lookup("ctheta")) : 1.0;

    if (kind == "spectral") {
        if (const auto mu = lookup("mu")) {
            std::vector<double> values;
            std::istringstream in(*mu);
            std::string item;
            while (std::getline(in, item, ';'))
                values.push_back(std::stod(item));
            return SpaceTriplet::spectral(Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size())),
                                          theta, c_theta);
        }
        const int m = to_int("m", 64);
        if (lookup("laplace1d") || fields.size() <= 1)
            return SpaceTriplet::laplace1d(m);
        throw std::invalid_argument("spectral space spec needs 'laplace1d' or 'mu=...'");
    }
    if (kind == "euclidean")
        return SpaceTriplet::euclidean(to_int("m", 1));
    if (kind == "p1")
        return SpaceTriplet::p1_laplace1d(to_int("n", 31));
    if (kind == "matrix") {
        const auto m_path = lookup("M");
        const auto k_path = lookup("K");
        if (!m_path || !k_path)
            throw std::invalid_argument("matrix space spec needs M=<file> and K=<file>");
        return SpaceTriplet::matrix(load_matrix_market(*m_path), load_matrix_market(*k_path), theta, c_theta);
    }
    throw std::invalid_argument("unknown space spec '" + kind + "'");
}

} // namespace dgrecon
