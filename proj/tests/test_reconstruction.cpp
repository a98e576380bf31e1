#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "dgrecon/reconstruction.hpp"
#include "oracles.hpp"

using namespace dgrecon;

namespace {

std::vector<TimePartition> test_partitions()
{
    return {build_uniform(1.0, 8), build_geometric(1.0, 12, 0.5), build_random(1.0, 10, 6, 3.0)};
}

Vector random_initial(std::uint64_t seed, int m)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(-1.0, 1.0);
    Vector v(m);
    for (int k = 0; k < m; ++k)
        v[k] = coin(rng);
    return v;
}

/// Continuous piecewise polynomial obtained by projecting a smooth curve of
/// degree <= l; it is reproduced exactly, so it is continuous at the nodes.
PiecewisePoly continuous_poly(const TimePartition& P, int degree)
{
    auto f = [degree](double t) { return Vector{{std::pow(t, degree) + 1.0, 2.0 - t * (degree > 0)}}; };
    return project_time(f, P, degree, 2, gauss_rule(degree + 2));
}

} // namespace

TEST_CASE("lifting")
{
    const auto P = build_geometric(1.0, 5, 0.5);
    const Vector z{{2.0, -1.0}};
    SUBCASE("l = 0 is z / tau")
    {
        const auto L = lift(z, P, 2, 0);
        CHECK((L.eval(P, 0.2) - z / P.step(2)).norm() <= 1e-14);
    }
    SUBCASE("l = 1 at the left endpoint is 4 z / tau")
    {
        const auto L = lift(z, P, 3, 1);
        CHECK((L.eval(P, P.node(3)) - 4.0 * z / P.step(3)).norm() <= 1e-12);
    }
    SUBCASE("integral over the interval returns z")
    {
        for (int degree = 0; degree <= 6; ++degree) {
            const auto L = lift(z, P, 1, degree);
            for (int k = 0; k < 2; ++k) {
                const double integral =
                    oracle::integrate([&](double t) { return L.eval(P, t)[k]; }, P.node(1), P.node(2));
                CHECK(integral == doctest::Approx(z[k]).epsilon(1e-13));
            }
            // Right endpoint: sum_i (-1)^i (2i+1) = (-1)^l (l+1).
            CHECK((L.eval(P, P.node(2)) - (degree % 2 ? -1.0 : 1.0) * (degree + 1) * z / P.step(1)).norm() <=
                  1e-10 * z.norm() / P.step(1));
        }
    }
    SUBCASE("reproduces the trace against degree <= l")
    {
        const int degree = 3;
        const auto L = lift(z, P, 1, degree);
        for (int j = 0; j <= degree; ++j) {
            const double pairing = oracle::integrate(
                [&](double t) { return L.eval(P, t)[0] * mapped_legendre(P, 1, j, t); }, P.node(1), P.node(2));
            CHECK(pairing == doctest::Approx(z[0] * (j % 2 ? -1.0 : 1.0)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(lift(z, P, 5, 1), std::invalid_argument);
    CHECK_THROWS_AS(lift(z, P, -1, 1), std::invalid_argument);
}

TEST_CASE("reconstruction: continuity and left-limit interpolation")
{
    for (const auto& P : test_partitions()) {
        for (int degree = 0; degree <= 4; ++degree) {
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                const auto u = random_piecewise_poly(P, degree, 3, seed * 31 + degree);
                const Vector u0 = random_initial(seed, 3);
                const auto R = reconstruct(u, u0);
                REQUIRE(R.degree() == degree + 1);
                const double scale = 1.0 + u.coefficient_scale();
                CHECK((R.right_limit(0) - u0).norm() <= 1e-12 * scale);
                for (int n = 1; n <= P.size(); ++n) {
                    CHECK((R.left_limit(n) - u.left_limit(n)).norm() <= 1e-12 * scale);
                    if (n < P.size())
                        CHECK((R.right_limit(n) - R.left_limit(n)).norm() <= 1e-12 * scale);
                }
            }
        }
    }
}

TEST_CASE("reconstruction: identity on continuous functions")
{
    for (int degree = 1; degree <= 4; ++degree) {
        const auto P = build_geometric(1.0, 7, 0.5);
        const auto u = continuous_poly(P, degree);
        const Vector u0 = u.right_limit(0);
        const auto R = reconstruct(u, u0);
        CHECK((R.coefficients() - elevate(u, degree + 1).coefficients()).norm() <= 1e-12);
        CHECK(defect_norm(u, u0, 2.0, SpaceTriplet::euclidean(2), Norm::B) <= 1e-13);
        CHECK(jump_functional(u, u0, 2.0, SpaceTriplet::euclidean(2), Norm::B) <= 1e-13);
    }
}

TEST_CASE("reconstruction: l = 0 is the piecewise-linear interpolant of left limits")
{
    const TimePartition P({0.0, 0.2, 0.5, 1.0});
    Matrix c(1, 3);
    c << 1.0, -2.0, 0.5;
    const PiecewisePoly u(P, 0, c);
    const Vector u0 = Vector::Constant(1, 3.0);
    const auto R = reconstruct(u, u0);
    const std::vector<double> left{3.0, 1.0, -2.0, 0.5};
    for (int n = 0; n < 3; ++n)
        for (double s : {0.0, 0.3, 0.8, 1.0}) {
            const double t = P.node(n) + s * P.step(n);
            CHECK(R.eval_on_interval(n, t)[0] == doctest::Approx(left[n] + s * (left[n + 1] - left[n])).epsilon(1e-14));
        }
    const auto E = SpaceTriplet::euclidean(1);
    // |slope| in L^2: sum tau |delta / tau|^2.
    const double expected = std::sqrt(4.0 / 0.2 + 9.0 / 0.3 + 6.25 / 0.5);
    CHECK(dt_reconstruction_norm(u, u0, 2.0, E, Norm::B) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("reconstruction: closed-form defect")
{
    // R u - u = -z (-1)^l (P_l - P_{l+1}) / 2 on every interval.
    const auto P = build_random(1.0, 6, 2, 2.0);
    for (int degree = 0; degree <= 4; ++degree) {
        const auto u = random_piecewise_poly(P, degree, 2, 50 + degree);
        const Vector u0 = random_initial(degree, 2);
        const auto D = reconstruct(u, u0) - u;
        for (int n = 0; n < P.size(); ++n) {
            const Vector z = jump(u, n, u0);
            for (double x : {-1.0, -0.4, 0.2, 0.9}) {
                const Vector expected = -z * (degree % 2 ? -1.0 : 1.0) * 0.5 *
                                        (boost::math::legendre_p(degree, x) - boost::math::legendre_p(degree + 1, x));
                CHECK((D.eval_reference(n, x) - expected).norm() <= 1e-12 * (1 + z.norm()));
            }
        }
    }
}

TEST_CASE("reconstruction is linear")
{
    const auto P = build_geometric(1.0, 6, 0.5);
    const auto u = random_piecewise_poly(P, 3, 2, 1);
    const auto w = random_piecewise_poly(P, 3, 2, 2);
    const Vector u0 = random_initial(1, 2), w0 = random_initial(2, 2);
    const double a = 1.7, b = -0.4;
    const auto lhs = reconstruct(a * u + b * w, a * u0 + b * w0);
    const auto rhs = a * reconstruct(u, u0) + b * reconstruct(w, w0);
    CHECK((lhs.coefficients() - rhs.coefficients()).norm() <= 1e-12 * (1 + rhs.coefficients().norm()));
    CHECK_THROWS_AS(reconstruct(u, Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("defect norm")
{
    const auto E = SpaceTriplet::euclidean(1);
    SUBCASE("l = 0, p = inf, single jump")
    {
        Matrix c(1, 3);
        c << 1.0, 1.0, 3.5;
        const PiecewisePoly u(build_uniform(1.0, 3), 0, c);
        CHECK(defect_norm(u, Vector::Constant(1, 1.0), kInfinity, E, Norm::B) == doctest::Approx(2.5).epsilon(1e-14));
    }
    SUBCASE("homogeneous of degree one")
    {
        const auto S = SpaceTriplet::laplace1d(3);
        const auto u = random_piecewise_poly(build_geometric(1.0, 8, 0.5), 2, 3, 4);
        const Vector u0 = random_initial(4, 3);
        for (double p : {1.0, 2.0, 3.0, kInfinity})
            CHECK(defect_norm(-3.0 * u, -3.0 * u0, p, S, Norm::X) ==
                  doctest::Approx(3.0 * defect_norm(u, u0, p, S, Norm::X)).epsilon(1e-12));
    }
}

TEST_CASE("jump functional")
{
    const auto E = SpaceTriplet::euclidean(1);
    Matrix c(1, 4);
    c << 0.0, 2.0, 2.0, 2.0;
    const PiecewisePoly u(build_uniform(1.0, 4), 0, c);
    CHECK(jump_functional(u, Vector::Zero(1), 2.0, E, Norm::B, JumpWeighting::unweighted_squares) == 4.0);
    CHECK(jump_sum_b_squared(u, Vector::Zero(1), E) == 4.0);
    Matrix d(1, 3);
    d << 1.0, 4.0, 2.0;
    const PiecewisePoly w(build_uniform(1.0, 3), 0, d);
    CHECK(jump_functional(w, Vector::Zero(1), kInfinity, E, Norm::B) == 3.0);
    CHECK(jump_functional(w, Vector::Zero(1), 1.0, E, Norm::B) == doctest::Approx(2.0));
    CHECK_THROWS_AS(jump_functional(w, Vector::Zero(1), 0.5, E, Norm::B), std::invalid_argument);
}

TEST_CASE("derivative identity")
{
    const auto S = SpaceTriplet::laplace1d(3);
    SUBCASE("random pairs")
    {
        double worst = 0.0;
        for (const auto& P : test_partitions())
            for (int degree = 0; degree <= 4; ++degree)
                for (std::uint64_t seed = 0; seed < 10; ++seed) {
                    const auto u = random_piecewise_poly(P, degree, 3, 1000 + seed);
                    const auto v = random_piecewise_poly(P, static_cast<int>(seed % (degree + 1)), 3, 2000 + seed);
                    worst = std::max(worst, verify_derivative_identity(u, random_initial(seed, 3), v, S));
                }
        CHECK(worst <= 1e-12);
    }
    SUBCASE("l = 0 reduces to jump pairings")
    {
        const auto P = build_geometric(1.0, 6, 0.5);
        const auto u = random_piecewise_poly(P, 0, 3, 1);
        const auto v = random_piecewise_poly(P, 0, 3, 2);
        CHECK(verify_derivative_identity(u, random_initial(9, 3), v, S) <= 1e-13);
    }
    SUBCASE("continuous u")
    {
        const auto P = build_uniform(1.0, 5);
        const auto u = continuous_poly(P, 3);
        const auto v = random_piecewise_poly(P, 3, 2, 5);
        CHECK(verify_derivative_identity(u, u.right_limit(0), v, SpaceTriplet::euclidean(2)) <= 1e-13);
    }
    SUBCASE("preconditions")
    {
        const auto u = random_piecewise_poly(build_uniform(1.0, 4), 1, 3, 1);
        CHECK_THROWS_AS(verify_derivative_identity(u, Vector::Zero(3), random_piecewise_poly(build_uniform(1.0, 5), 1, 3, 1), S),
                        std::invalid_argument);
        CHECK_THROWS_AS(verify_derivative_identity(u, Vector::Zero(3), random_piecewise_poly(build_uniform(1.0, 4), 2, 3, 1), S),
                        std::invalid_argument);
    }
}

TEST_CASE("dt of the reconstruction")
{
    const auto S = SpaceTriplet::laplace1d(2);
    const PiecewisePoly c(build_uniform(1.0, 3), 0, Matrix::Constant(2, 3, 1.5));
    CHECK(dt_reconstruction_norm(c, Vector::Constant(2, 1.5), 2.0, S) == 0.0);
    const auto u = random_piecewise_poly(build_geometric(1.0, 5, 0.5), 2, 2, 3);
    const Vector u0 = random_initial(3, 2);
    CHECK(dt_reconstruction_norm(2.5 * u, 2.5 * u0, 2.0, S) ==
          doctest::Approx(2.5 * dt_reconstruction_norm(u, u0, 2.0, S)).epsilon(1e-12));
}

TEST_CASE("reconstruction constant")
{
    SUBCASE("l = 0, p = inf is one")
    {
        const PartitionFamily F{parse_family_spec("geometric:T=1,sigma=0.5"), {4, 6, 8}};
        const auto est = estimate_reconstruction_constant(F, 0, kInfinity, 100, 1);
        CHECK(est.estimate <= 1.0 + 1e-10);
        CHECK(est.estimate >= 1.0 - 1e-3);
        CHECK(est.trials == 300);
    }
    SUBCASE("matches the closed form and is partition-independent")
    {
        for (int degree : {0, 1, 2, 4})
            for (double p : {1.0, 2.0, 3.0, kInfinity}) {
                const double exact = oracle::reconstruction_constant(degree, p);
                const std::vector<TimePartition> a{build_uniform(1.0, 8)};
                const std::vector<TimePartition> b{build_geometric(1.0, 64, 0.5)};
                const double ea = estimate_reconstruction_constant(a, degree, p, 5, 1).estimate;
                const double eb = estimate_reconstruction_constant(b, degree, p, 5, 2).estimate;
                CHECK(ea == doctest::Approx(exact).epsilon(1e-6));
                CHECK(eb == doctest::Approx(exact).epsilon(1e-6));
            }
        CHECK(oracle::reconstruction_constant(0, 2.0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    }
    SUBCASE("library closed form")
    {
        for (int degree = 0; degree <= 6; ++degree)
            for (double p : {1.0, 1.5, 2.0, 4.0, kInfinity})
                CHECK(reconstruction_constant(degree, p) ==
                      doctest::Approx(oracle::reconstruction_constant(degree, p)).epsilon(1e-9));
        CHECK(reconstruction_constant(0, kInfinity) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK_THROWS_AS(reconstruction_constant(1, 0.5), std::invalid_argument);
    }
    SUBCASE("scaling invariance")
    {
        const std::vector<TimePartition> P{build_random(1.0, 9, 1, 2.0)};
        const auto S = SpaceTriplet::euclidean(2);
        double unscaled = 0.0, scaled = 0.0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto u = random_piecewise_poly(P[0], 2, 2, seed);
            const Vector u0 = random_initial(seed, 2);
            unscaled = std::max(unscaled, defect_norm(u, u0, 1.5, S, Norm::B) / jump_functional(u, u0, 1.5, S, Norm::B));
            scaled = std::max(scaled, defect_norm(10.0 * u, 10.0 * u0, 1.5, S, Norm::B) /
                                          jump_functional(10.0 * u, 10.0 * u0, 1.5, S, Norm::B));
        }
        CHECK(scaled == doctest::Approx(unscaled).epsilon(1e-10));
    }
    CHECK_THROWS_AS(estimate_reconstruction_constant(std::vector<TimePartition>{build_uniform(1.0, 2)}, 1, 2.0, 0, 1),
                    std::invalid_argument);
}

TEST_CASE("inverse trace")
{
    for (int degree = 0; degree <= 4; ++degree) {
        CHECK(inverse_trace_bound(degree, kInfinity) == 1.0);
        CHECK(inverse_trace_bound(degree, 2.0) == doctest::Approx(degree + 1.0));
        for (double p : {1.0, 2.0, 4.0, kInfinity}) {
            const double sampled = estimate_inverse_trace_constant(degree, p, 200, 3);
            CHECK(sampled <= inverse_trace_bound(degree, p) * (1 + 1e-12));
        }
    }
    SUBCASE("the p = 2 bound is attained")
    {
        // v = sum (2i+1) P_i on (-1, 1): v(1)^2 = (l+1)^4 and |v|^2 = 2 (l+1)^2.
        for (int degree = 0; degree <= 4; ++degree) {
            Matrix c(1, degree + 1);
            for (int i = 0; i <= degree; ++i)
                c(0, i) = 2 * i + 1;
            const PiecewisePoly v(build_uniform(2.0, 1), degree, c);
            const double ratio = v.left_limit(1)[0] /
                                 (std::pow(2.0, -0.5) * bochner_norm(v, SpaceTriplet::euclidean(1), {2.0, Norm::B, 2}));
            CHECK(ratio == doctest::Approx(inverse_trace_bound(degree, 2.0)).epsilon(1e-12));
        }
    }
    SUBCASE("jump check on random functions")
    {
        const auto S = SpaceTriplet::laplace1d(3);
        for (const auto& P : test_partitions())
            for (int degree = 0; degree <= 3; ++degree) {
                const auto u = random_piecewise_poly(P, degree, 3, 7 + degree);
                const Vector u0 = random_initial(degree, 3);
                for (double p : {1.0, 2.0, kInfinity})
                    for (int n = 0; n < P.size(); ++n)
                        CHECK(inverse_trace_check(u, u0, n, p, S, Norm::X, inverse_trace_bound(degree, p)).holds());
            }
    }
    CHECK_THROWS_AS(inverse_trace_bound(1, 0.5), std::invalid_argument);
}

TEST_CASE("reconstruction stability")
{
    const auto S = SpaceTriplet::laplace1d(3);
    for (const auto& P : test_partitions())
        for (int degree = 0; degree <= 3; ++degree)
            for (double p : {1.0, 2.0, kInfinity}) {
                const auto u = random_piecewise_poly(P, degree, 3, 3 + degree);
                const Vector u0 = random_initial(degree + 10, 3);
                const double c_r = oracle::reconstruction_constant(degree, p) * (1 + 1e-8);
                CHECK(reconstruction_stability_check(u, u0, p, S, c_r, inverse_trace_bound(degree, p)).holds());
            }
}
