#include "dgrecon/dg_parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "dgrecon/errors.hpp"
#include "dgrecon/reconstruction.hpp"

namespace dgrecon {

namespace {

/// Reference-interval time matrices for degree l. Row j is the test mode.
struct SlabMatrices {
    /// int P_i' P_j dx + P_i(-1) P_j(-1)
    Matrix transport;
    /// int P_i P_j dx / 2 = 1/(2i+1) on the diagonal
    Vector half_mass;

    explicit SlabMatrices(int degree) : transport(degree + 1, degree + 1), half_mass(degree + 1)
    {
        for (int j = 0; j <= degree; ++j) {
            half_mass[j] = 1.0 / (2 * j + 1);
            for (int i = 0; i <= degree; ++i) {
                const double derivative = (j < i && (i - j) % 2 == 1) ? 2.0 : 0.0;
                const double upwind = (i + j) % 2 == 0 ? 1.0 : -1.0;
                transport(j, i) = derivative + upwind;
            }
        }
    }
};

int source_points(int degree)
{
    return 2 * degree + 6;
}

/// f(u) as a B-dual vector and its Jacobian.
class SourceEvaluator {
public:
    explicit SourceEvaluator(const ParabolicProblem& problem) : problem_(problem)
    {
        if (problem.nonlinearity && problem.source_map == SourceMap::sine_collocation) {
            const int m = problem.space.dim();
            const int grid = 2 * m + 1;
            to_physical_.resize(grid, m);
            for (int j = 0; j < grid; ++j) {
                const double x = (j + 1.0) / (grid + 1.0);
                for (int k = 0; k < m; ++k)
                    to_physical_(j, k) = std::numbers::sqrt2 * std::sin((k + 1) * std::numbers::pi * x);
            }
            to_modal_ = to_physical_.transpose() / (grid + 1.0);
        }
    }

    bool collocated() const { return to_physical_.size() > 0; }

    Vector functional(double t, const Vector& u) const
    {
        Vector out = nonlinear(u);
        if (problem_.data)
            out += problem_.space.apply_mass(problem_.data(t));
        return out;
    }

    Vector nonlinear(const Vector& u) const
    {
        Vector out = Vector::Zero(u.size());
        if (problem_.nonlinearity) {
            const auto& g = problem_.nonlinearity->value;
            if (collocated()) {
                Vector phys = to_physical_ * u;
                for (Eigen::Index j = 0; j < phys.size(); ++j)
                    phys[j] = g(phys[j]);
                out += to_modal_ * phys;
            } else {
                Vector values = u;
                for (Eigen::Index k = 0; k < values.size(); ++k)
                    values[k] = g(values[k]);
                out += problem_.space.apply_mass(values);
            }
        }
        return out;
    }

    Matrix jacobian(const Vector& u) const
    {
        const auto m = u.size();
        if (!problem_.nonlinearity)
            return Matrix::Zero(m, m);
        const auto& dg = problem_.nonlinearity->slope;
        if (collocated()) {
            Vector slopes = to_physical_ * u;
            for (Eigen::Index j = 0; j < slopes.size(); ++j)
                slopes[j] = dg(slopes[j]);
            return to_modal_ * slopes.asDiagonal() * to_physical_;
        }
        Vector slopes = u;
        for (Eigen::Index k = 0; k < m; ++k)
            slopes[k] = dg(slopes[k]);
        if (problem_.space.is_spectral())
            return Matrix(slopes.asDiagonal());
        return problem_.space.mass() * slopes.asDiagonal();
    }

private:
    const ParabolicProblem& problem_;
    Matrix to_physical_;
    Matrix to_modal_;
};

Matrix dense_mass(const SpaceTriplet& space)
{
    return space.is_spectral() ? Matrix(Matrix::Identity(space.dim(), space.dim())) : space.mass();
}

Matrix dense_stiffness(const SpaceTriplet& space)
{
    return space.is_spectral() ? Matrix(space.eigenvalues().asDiagonal()) : space.stiffness();
}

/// Slab operator acting on the stacked unknowns (index i*m + k).
Matrix slab_operator(const SlabMatrices& ref, const Matrix& mass, const Matrix& stiffness, double tau, double scale)
{
    const auto modes = ref.transport.rows();
    const auto m = mass.rows();
    Matrix A = Matrix::Zero(modes * m, modes * m);
    for (Eigen::Index j = 0; j < modes; ++j) {
        for (Eigen::Index i = 0; i < modes; ++i) {
            auto block = A.block(j * m, i * m, m, m);
            block = ref.transport(j, i) * mass;
            if (i == j)
                block += (tau * ref.half_mass[i] * scale) * stiffness;
        }
    }
    return A;
}

/// (-1)^j M u^- for every test mode j, plus the data term when present.
Vector slab_constant_rhs(const ParabolicProblem& problem, const TimePartition& partition, int interval, int degree,
                         const Vector& left_trace, const QuadratureRule& rule)
{
    const int m = problem.space.dim();
    Vector rhs = Vector::Zero((degree + 1) * m);
    const Vector upwind = problem.space.apply_mass(left_trace);
    for (int j = 0; j <= degree; ++j)
        rhs.segment(j * m, m) = (j % 2 == 0 ? 1.0 : -1.0) * upwind;
    if (problem.data) {
        std::vector<double> p(static_cast<std::size_t>(degree) + 1);
        const double half_tau = 0.5 * partition.step(interval);
        for (int q = 0; q < rule.size(); ++q) {
            const double x = rule.points[static_cast<std::size_t>(q)];
            const Vector f = problem.space.apply_mass(problem.data(to_time(partition, interval, x)));
            legendre_values(degree, x, p);
            for (int j = 0; j <= degree; ++j)
                rhs.segment(j * m, m) += (half_tau * rule.weights[static_cast<std::size_t>(q)] *
                                          p[static_cast<std::size_t>(j)]) * f;
        }
    }
    return rhs;
}

void store(Matrix& coeffs, const Vector& c, int interval, int degree, int m)
{
    for (int i = 0; i <= degree; ++i)
        coeffs.col(interval * (degree + 1) + i) = c.segment(i * m, m);
}

Vector trailing_trace(const Vector& c, int degree, int m)
{
    Vector u = Vector::Zero(m);
    for (int i = 0; i <= degree; ++i)
        u += c.segment(i * m, m);
    return u;
}

Vector solve_checked(const Matrix& A, const Vector& b, int interval)
{
    Eigen::PartialPivLU<Matrix> lu(A);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-15))
        throw NumericalFailure(fmt::format("singular slab matrix on interval {} (rcond {:.3e})", interval, rcond),
                               interval, std::numeric_limits<double>::quiet_NaN());
    Vector x = lu.solve(b);
    if (!x.allFinite())
        throw NumericalFailure(fmt::format("non-finite slab solution on interval {}", interval), interval,
                               std::numeric_limits<double>::quiet_NaN());
    return x;
}

} // namespace

PointwiseNonlinearity logistic_source()
{
    return {"logistic", [](double u) { return u * (1.0 - u); }, [](double u) { return 1.0 - 2.0 * u; }, 3.0, 1.0};
}

PointwiseNonlinearity cubic_source()
{
    return {"cubic", [](double u) { return -u * u * u; }, [](double u) { return -3.0 * u * u; }, 12.0, 2.0};
}

PointwiseNonlinearity allen_cahn_source()
{
    return {"allen_cahn", [](double u) { return u - u * u * u; }, [](double u) { return 1.0 - 3.0 * u * u; }, 11.0,
            2.0};
}

void ParabolicProblem::validate() const
{
    if (initial.size() != space.dim())
        throw std::invalid_argument(
            fmt::format("initial datum has length {}, space dimension is {}", initial.size(), space.dim()));
    if (!(operator_scale >= 0.0))
        throw std::invalid_argument("operator scale must be non-negative");
    if (nonlinearity && source_map == SourceMap::sine_collocation && !space.is_laplace1d())
        throw std::invalid_argument("sine collocation needs the laplace1d spectral triplet");
    if (nonlinearity && (!nonlinearity->value || !nonlinearity->slope))
        throw std::invalid_argument("nonlinearity needs both value and slope");
}

AssumptionCheck check_problem_assumptions(const ParabolicProblem& problem, int samples, std::uint64_t seed)
{
    problem.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(-1.0, 1.0);
    AssumptionCheck out;
    out.min_coercivity_ratio = std::numeric_limits<double>::infinity();
    const int m = problem.space.dim();
    for (int s = 0; s < samples; ++s) {
        Vector u(m);
        for (int k = 0; k < m; ++k)
            u[k] = coin(rng);
        const double a = problem.operator_scale * u.dot(problem.space.apply_stiffness(u));
        const double lower = problem.coercivity * std::pow(problem.space.norm(Norm::X, u), problem.growth_exponent);
        if (lower > 0.0)
            out.min_coercivity_ratio = std::min(out.min_coercivity_ratio, a / lower);
    }
    out.coercive = out.min_coercivity_ratio >= 1.0 - 1e-12;
    if (problem.nonlinearity) {
        const auto& g = *problem.nonlinearity;
        const double radius = g.trust_radius;
        for (int s = 0; s < samples; ++s) {
            const double x = radius * coin(rng);
            const double y = radius * coin(rng);
            if (x == y)
                continue;
            const double ratio = std::abs(g.value(x) - g.value(y)) / (g.lipschitz * std::abs(x - y));
            out.max_lipschitz_ratio = std::max(out.max_lipschitz_ratio, ratio);
        }
        out.lipschitz = out.max_lipschitz_ratio <= 1.0 + 1e-12;
    }
    return out;
}

PiecewisePoly solve_linear(const ParabolicProblem& problem, const TimePartition& partition, int degree)
{
    problem.validate();
    if (!problem.is_linear())
        throw std::invalid_argument("solve_linear called on a problem with a nonlinear source");
    if (degree < 0)
        throw std::invalid_argument("DG degree must be non-negative");
    const int m = problem.space.dim();
    const SlabMatrices ref(degree);
    const auto rule = gauss_rule(source_points(degree));
    Matrix coeffs = Matrix::Zero(m, partition.size() * (degree + 1));
    Vector left = problem.initial;

    const bool decoupled = problem.space.is_spectral();
    const Matrix mass = decoupled ? Matrix() : dense_mass(problem.space);
    const Matrix stiffness = decoupled ? Matrix() : dense_stiffness(problem.space);

    for (int n = 0; n < partition.size(); ++n) {
        const double tau = partition.step(n);
        const Vector rhs = slab_constant_rhs(problem, partition, n, degree, left, rule);
        Vector c(rhs.size());
        if (decoupled) {
            const Vector& mu = problem.space.eigenvalues();
            Vector b(degree + 1);
            for (int k = 0; k < m; ++k) {
                Matrix A = ref.transport;
                for (int i = 0; i <= degree; ++i)
                    A(i, i) += tau * ref.half_mass[i] * problem.operator_scale * mu[k];
                for (int j = 0; j <= degree; ++j)
                    b[j] = rhs[j * m + k];
                const Vector x = solve_checked(A, b, n);
                for (int i = 0; i <= degree; ++i)
                    c[i * m + k] = x[i];
            }
        } else {
            c = solve_checked(slab_operator(ref, mass, stiffness, tau, problem.operator_scale), rhs, n);
        }
        store(coeffs, c, n, degree, m);
        left = trailing_trace(c, degree, m);
    }
    return PiecewisePoly(partition, degree, std::move(coeffs));
}

PiecewisePoly solve_semilinear(const ParabolicProblem& problem, const TimePartition& partition, int degree,
                               const NewtonOptions& options)
{
    problem.validate();
    if (degree < 0)
        throw std::invalid_argument("DG degree must be non-negative");
    if (!(options.tolerance > 0.0) || options.max_iterations < 1)
        throw std::invalid_argument("Newton options need tol > 0 and max_iter >= 1");
    const int m = problem.space.dim();
    const int modes = degree + 1;
    const SlabMatrices ref(degree);
    const auto rule = gauss_rule(source_points(degree));
    const SourceEvaluator source(problem);
    const Matrix mass = dense_mass(problem.space);
    const Matrix stiffness = dense_stiffness(problem.space);

    // Basis values at the nonlinear quadrature points.
    Matrix basis(rule.size(), modes);
    {
        std::vector<double> p(static_cast<std::size_t>(modes));
        for (int q = 0; q < rule.size(); ++q) {
            legendre_values(degree, rule.points[static_cast<std::size_t>(q)], p);
            for (int i = 0; i < modes; ++i)
                basis(q, i) = p[static_cast<std::size_t>(i)];
        }
    }

    Matrix coeffs = Matrix::Zero(m, partition.size() * modes);
    Vector left = problem.initial;
    for (int n = 0; n < partition.size(); ++n) {
        const double tau = partition.step(n);
        const double half_tau = 0.5 * tau;
        const Matrix A = slab_operator(ref, mass, stiffness, tau, problem.operator_scale);
        const Vector b0 = slab_constant_rhs(problem, partition, n, degree, left, rule);

        Vector c = Vector::Zero(modes * m);
        c.segment(0, m) = left;

        auto nonlinear_part = [&](const Vector& coeff, Matrix* jac) {
            Vector F = Vector::Zero(modes * m);
            if (jac)
                jac->setZero(modes * m, modes * m);
            for (int q = 0; q < rule.size(); ++q) {
                Vector u = Vector::Zero(m);
                for (int i = 0; i < modes; ++i)
                    u += basis(q, i) * coeff.segment(i * m, m);
                const Vector g = source.nonlinear(u);
                const double w = half_tau * rule.weights[static_cast<std::size_t>(q)];
                for (int j = 0; j < modes; ++j)
                    F.segment(j * m, m) += (w * basis(q, j)) * g;
                if (jac) {
                    const Matrix J = source.jacobian(u);
                    for (int j = 0; j < modes; ++j)
                        for (int i = 0; i < modes; ++i)
                            jac->block(j * m, i * m, m, m) += (w * basis(q, j) * basis(q, i)) * J;
                }
            }
            return F;
        };

        double residual_norm = std::numeric_limits<double>::quiet_NaN();
        bool converged = false;
        Matrix jac;
        for (int iter = 0; iter < options.max_iterations; ++iter) {
            const Vector residual = A * c - b0 - nonlinear_part(c, &jac);
            residual_norm = residual.norm();
            const double threshold = options.tolerance * (1.0 + c.norm());
            if (residual_norm <= threshold) {
                converged = true;
                break;
            }
            const Vector step = solve_checked(A - jac, residual, n);
            c -= step;
            if (!c.allFinite())
                break;
            if (step.norm() <= options.tolerance * (1.0 + c.norm())) {
                residual_norm = (A * c - b0 - nonlinear_part(c, nullptr)).norm();
                converged = true;
                break;
            }
        }
        if (!converged)
            throw NumericalFailure(fmt::format("Newton iteration did not converge on interval {} (residual {:.3e})",
                                               n, residual_norm),
                                   n, residual_norm);
        store(coeffs, c, n, degree, m);
        left = trailing_trace(c, degree, m);
    }
    return PiecewisePoly(partition, degree, std::move(coeffs));
}

PiecewisePoly solve(const ParabolicProblem& problem, const TimePartition& partition, int degree,
                    const NewtonOptions& options)
{
    return problem.is_linear() ? solve_linear(problem, partition, degree)
                               : solve_semilinear(problem, partition, degree, options);
}

double galerkin_residual(const ParabolicProblem& problem, const PiecewisePoly& u)
{
    problem.validate();
    const SourceEvaluator source(problem);
    const SpaceTriplet& space = problem.space;
    const int degree = u.degree();
    const PiecewisePoly du = derivative(u);
    const auto rule = gauss_rule(source_points(degree));
    std::vector<double> p(static_cast<std::size_t>(degree) + 1);
    // Relative to the size of the slab's equations: the top test modes alone
    // can have all terms near zero, which would make a per-row ratio meaningless.
    double worst = 0.0;
    for (int n = 0; n < u.intervals(); ++n) {
        const double half_tau = 0.5 * u.partition().step(n);
        const Vector incoming = space.apply_mass(n == 0 ? problem.initial : u.left_limit(n));
        const Vector outgoing = space.apply_mass(u.right_limit(n));
        double slab_scale = 0.0;
        double slab_worst = 0.0;
        for (int j = 0; j <= degree; ++j) {
            Vector transport = Vector::Zero(space.dim());
            Vector diffusion = Vector::Zero(space.dim());
            Vector forcing = Vector::Zero(space.dim());
            for (int q = 0; q < rule.size(); ++q) {
                const double x = rule.points[static_cast<std::size_t>(q)];
                const double t = to_time(u.partition(), n, x);
                const double w = half_tau * rule.weights[static_cast<std::size_t>(q)];
                legendre_values(degree, x, p);
                const double pj = p[static_cast<std::size_t>(j)];
                const Vector value = u.eval_reference(n, x);
                transport += (w * pj) * space.apply_mass(du.eval_reference(n, x));
                diffusion += (w * pj * problem.operator_scale) * space.apply_stiffness(value);
                forcing += (w * pj) * source.functional(t, value);
            }
            const double sign = j % 2 == 0 ? 1.0 : -1.0;
            const Vector r = transport + sign * (outgoing - incoming) + diffusion - forcing;
            slab_scale += transport.norm() + outgoing.norm() + incoming.norm() + diffusion.norm() + forcing.norm();
            slab_worst = std::max(slab_worst, r.norm());
        }
        if (slab_scale > 0.0)
            worst = std::max(worst, slab_worst / slab_scale);
    }
    return worst;
}

double energy_identity_residual(const ParabolicProblem& problem, const PiecewisePoly& u)
{
    const SpaceTriplet& space = problem.space;
    const double final_sq = std::pow(space.norm(Norm::B, u.left_limit(u.intervals())), 2);
    const double jumps = jump_sum_b_squared(u, problem.initial, space);
    const double dissipation =
        problem.operator_scale * std::pow(bochner_norm(u, space, NormSpec{2.0, Norm::X, 1}), 2);
    const double initial_sq = std::pow(space.norm(Norm::B, problem.initial), 2);
    const double defect = std::abs(0.5 * final_sq + 0.5 * jumps + dissipation - 0.5 * initial_sq);
    return initial_sq > 0.0 ? defect / (0.5 * initial_sq) : defect;
}

StabilityLedger stability_ledger(const ParabolicProblem& problem, const PiecewisePoly& u, double p, double r)
{
    problem.validate();
    const SpaceTriplet& space = problem.space;
    StabilityLedger ledger;
    ledger.p = p;
    ledger.r = r;
    ledger.final_b_norm_sq = std::pow(space.norm(Norm::B, u.left_limit(u.intervals())), 2);
    ledger.jump_sum_b_sq = jump_sum_b_squared(u, problem.initial, space);
    const double x_norm = bochner_norm(u, space, NormSpec{p, Norm::X, 2});
    ledger.energy = problem.coercivity * (std::isinf(p) ? x_norm : std::pow(x_norm, p));
    ledger.dt_recon_dual = dt_reconstruction_norm(u, problem.initial, r, space, Norm::Y);

    const SourceEvaluator source(problem);
    const IntervalFunction residual_functional = [&](int n, double t) {
        const Vector value = u.eval_on_interval(n, t);
        Vector g = source.functional(t, value) - problem.operator_scale * space.apply_stiffness(value);
        return space.riesz(g);
    };
    ledger.f_dual = sampled_bochner_norm(u.partition(), residual_functional, space, NormSpec{r, Norm::Y, 2},
                                         source_points(u.degree()));
    ledger.projection_slack = ledger.f_dual > 0.0 ? std::max(0.0, ledger.dt_recon_dual / ledger.f_dual - 1.0) : 0.0;
    ledger.energy_identity_residual = problem.is_homogeneous() ? energy_identity_residual(problem, u)
                                                               : std::numeric_limits<double>::quiet_NaN();
    return ledger;
}

double exact_heat_reference(const SpaceTriplet& space, int mode, double t, double initial_coefficient)
{
    const Vector& mu = space.eigenvalues();
    if (mode < 1 || mode > mu.size())
        throw std::invalid_argument(fmt::format("mode {} outside 1..{}", mode, mu.size()));
    return initial_coefficient * std::exp(-mu[mode - 1] * t);
}

Vector exact_heat_solution(const SpaceTriplet& space, const Vector& initial, double t, double operator_scale)
{
    const Vector& mu = space.eigenvalues();
    return (initial.array() * (-operator_scale * mu.array() * t).exp()).matrix();
}

namespace {

std::vector<std::pair<std::string, std::string>> split_fields(const std::string& text)
{
    std::vector<std::pair<std::string, std::string>> fields;
    std::istringstream in(text);
    std::string field;
    while (std::getline(in, field, ',')) {
        if (field.empty())
            continue;
        const auto eq = field.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("expected key=value in problem spec, got '" + field + "'");
        fields.emplace_back(field.substr(0, eq), field.substr(eq + 1));
    }
    return fields;
}

TimeFunction tabulated_source(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open tabulated source file: " + path);
    std::vector<double> times;
    std::vector<Vector> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0])))
            continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> numbers;
        while (std::getline(row, cell, ','))
            numbers.push_back(std::stod(cell));
        if (numbers.size() < 2)
            throw std::runtime_error("tabulated source rows need t and at least one value: " + path);
        times.push_back(numbers.front());
        values.emplace_back(Eigen::Map<Vector>(numbers.data() + 1, static_cast<Eigen::Index>(numbers.size() - 1)));
    }
    if (times.empty())
        throw std::runtime_error("tabulated source file is empty: " + path);
    return [times, values](double t) -> Vector {
        if (t <= times.front())
            return values.front();
        if (t >= times.back())
            return values.back();
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const auto hi = static_cast<std::size_t>(it - times.begin());
        const double s = (t - times[hi - 1]) / (times[hi] - times[hi - 1]);
        return (1.0 - s) * values[hi - 1] + s * values[hi];
    };
}

} // namespace

ParabolicProblem parse_problem_spec(const std::string& text, const std::optional<SpaceTriplet>& space)
{
    const auto colon = text.find(':');
    const std::string preset = text.substr(0, colon);
    ParabolicProblem problem;
    std::string initial = "mode:1";
    if (preset == "heat" || preset == "custom") {
        problem.space = SpaceTriplet::laplace1d(64);
    } else if (preset == "semilinear") {
        problem.space = SpaceTriplet::laplace1d(64);
        problem.nonlinearity = allen_cahn_source();
        problem.source_map = SourceMap::sine_collocation;
    } else if (preset == "dissipative") {
        problem.space = SpaceTriplet::laplace1d(64);
        problem.nonlinearity = cubic_source();
        problem.source_map = SourceMap::sine_collocation;
    } else if (preset == "logistic") {
        problem.space = SpaceTriplet::euclidean(1);
        problem.operator_scale = 0.0;
        problem.coercivity = 0.0;
        problem.nonlinearity = logistic_source();
        initial = "0.1";
    } else {
        throw std::invalid_argument("unknown problem preset '" + preset + "'");
    }
    if (space)
        problem.space = *space;

    std::string map_choice;
    if (colon != std::string::npos) {
        for (const auto& [key, value] : split_fields(text.substr(colon + 1))) {
            if (key == "operator") {
                if (value == "laplace" || value == "laplace1d") {
                    problem.operator_scale = 1.0;
                } else if (value == "zero") {
                    problem.operator_scale = 0.0;
                } else if (value.rfind("scale:", 0) == 0) {
                    problem.operator_scale = std::stod(value.substr(6));
                } else {
                    throw std::invalid_argument("unknown operator '" + value + "'");
                }
                problem.coercivity = problem.operator_scale;
            } else if (key == "source") {
                problem.data = nullptr;
                problem.nonlinearity.reset();
                if (value == "zero") {
                } else if (value == "logistic") {
                    problem.nonlinearity = logistic_source();
                } else if (value == "cubic") {
                    problem.nonlinearity = cubic_source();
                } else if (value == "allen_cahn") {
                    problem.nonlinearity = allen_cahn_source();
                } else if (value.rfind("tabulated:", 0) == 0) {
                    problem.data = tabulated_source(value.substr(10));
                } else {
                    throw std::invalid_argument("unknown source '" + value + "'");
                }
            } else if (key == "u0") {
                initial = value;
            } else if (key == "map") {
                map_choice = value;
            } else {
                throw std::invalid_argument("unknown problem spec key '" + key + "'");
            }
        }
    }
    if (map_choice == "sine")
        problem.source_map = SourceMap::sine_collocation;
    else if (map_choice == "componentwise")
        problem.source_map = SourceMap::componentwise;
    else if (!map_choice.empty())
        throw std::invalid_argument("unknown source map '" + map_choice + "'");
    if (problem.source_map == SourceMap::sine_collocation && !problem.space.is_laplace1d())
        problem.source_map = SourceMap::componentwise;

    const int m = problem.space.dim();
    if (initial.rfind("mode:", 0) == 0) {
        const int k = std::stoi(initial.substr(5));
        if (k < 1 || k > m)
            throw std::invalid_argument(fmt::format("initial mode {} outside 1..{}", k, m));
        problem.initial = Vector::Unit(m, k - 1);
    } else if (initial.rfind("random:", 0) == 0) {
        std::mt19937_64 rng(std::stoull(initial.substr(7)));
        std::uniform_real_distribution<double> coin(-1.0, 1.0);
        problem.initial.resize(m);
        for (int k = 0; k < m; ++k)
            problem.initial[k] = coin(rng);
    } else {
        std::vector<double> values;
        std::istringstream in(initial);
        std::string item;
        while (std::getline(in, item, ';'))
            values.push_back(std::stod(item));
        if (static_cast<int>(values.size()) != m)
            throw std::invalid_argument(
                fmt::format("initial datum lists {} values, space dimension is {}", values.size(), m));
        problem.initial = Eigen::Map<Vector>(values.data(), m);
    }
    problem.validate();
    return problem;
}

} // namespace dgrecon
