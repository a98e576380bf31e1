#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "dgrecon/compactness.hpp"
#include "dgrecon/dg_parabolic.hpp"
#include "dgrecon/errors.hpp"
#include "dgrecon/reconstruction.hpp"
#include "oracles.hpp"

using namespace dgrecon;
using std::numbers::pi;

namespace {

ParabolicProblem scalar_decay(double lambda, double u0)
{
    ParabolicProblem prob;
    prob.space = SpaceTriplet::spectral(Vector::Constant(1, lambda));
    prob.initial = Vector::Constant(1, u0);
    return prob;
}

ParabolicProblem heat(int modes, Vector u0)
{
    ParabolicProblem prob;
    prob.space = SpaceTriplet::laplace1d(modes);
    prob.initial = std::move(u0);
    return prob;
}

PointwiseNonlinearity zero_source()
{
    return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; }, 0.0, 1.0};
}

Vector smooth_initial(int m)
{
    Vector u0(m);
    for (int k = 0; k < m; ++k)
        u0[k] = 1.0 / ((k + 1.0) * (k + 1.0));
    return u0;
}

} // namespace

TEST_CASE("DG(0) is implicit Euler")
{
    const auto P = build_random(1.0, 10, 17, 3.0);
    for (double lambda : {1.0, 7.5}) {
        const auto u = solve_linear(scalar_decay(lambda, 1.0), P, 0);
        const auto reference = oracle::implicit_euler(lambda, P, 1.0);
        for (int n = 1; n <= P.size(); ++n)
            CHECK(std::abs(u.left_limit(n)[0] - reference[n]) <= 1e-13);
    }
    const auto one = solve_linear(scalar_decay(1.0, 1.0), build_uniform(0.1, 1), 0);
    CHECK(one.left_limit(1)[0] == doctest::Approx(1.0 / 1.1).epsilon(1e-15));
    CHECK(one.left_limit(1)[0] == doctest::Approx(0.9090909090909091).epsilon(1e-15));
}

TEST_CASE("linear solver: Galerkin residual and dissipativity")
{
    const auto S = SpaceTriplet::laplace1d(16);
    for (const auto& P : {build_uniform(1.0, 8), build_geometric(1.0, 10, 0.5), build_random(1.0, 12, 3, 3.0)})
        for (int degree = 0; degree <= 3; ++degree) {
            const auto prob = heat(16, smooth_initial(16));
            const auto u = solve_linear(prob, P, degree);
            CHECK(galerkin_residual(prob, u) <= 1e-11);
            CHECK(S.norm(Norm::B, u.left_limit(P.size())) <= S.norm(Norm::B, prob.initial));
            CHECK(energy_identity_residual(prob, u) <= 1e-10);
        }
}

TEST_CASE("linear solver: dense path agrees with spectral decoupling")
{
    const Vector mu = SpaceTriplet::laplace1d(6).eigenvalues();
    ParabolicProblem spectral = heat(6, smooth_initial(6));
    ParabolicProblem dense = spectral;
    dense.space = SpaceTriplet::matrix(Matrix::Identity(6, 6), Matrix(mu.asDiagonal()));
    const auto P = build_geometric(1.0, 8, 0.5);
    for (int degree = 0; degree <= 3; ++degree) {
        const auto a = solve_linear(spectral, P, degree);
        const auto b = solve_linear(dense, P, degree);
        CHECK((a.coefficients() - b.coefficients()).norm() <= 1e-12);
    }
}

TEST_CASE("linear solver: P1 finite elements with time-dependent data")
{
    ParabolicProblem prob;
    prob.space = SpaceTriplet::p1_laplace1d(15);
    prob.initial = Vector::Zero(15);
    prob.data = [](double t) { return Vector::Constant(15, std::cos(3 * t)); };
    const auto P = build_random(1.0, 9, 2, 2.0);
    for (int degree = 0; degree <= 2; ++degree) {
        const auto u = solve_linear(prob, P, degree);
        CHECK(galerkin_residual(prob, u) <= 1e-11);
    }
}

TEST_CASE("solver preconditions")
{
    auto prob = heat(4, Vector::Zero(3));
    CHECK_THROWS_AS(solve_linear(prob, build_uniform(1.0, 2), 1), std::invalid_argument);
    prob.initial = Vector::Zero(4);
    CHECK_THROWS_AS(solve_linear(prob, build_uniform(1.0, 2), -1), std::invalid_argument);
    prob.nonlinearity = cubic_source();
    CHECK_THROWS_AS(solve_linear(prob, build_uniform(1.0, 2), 1), std::invalid_argument);
    CHECK_THROWS_AS(solve_semilinear(prob, build_uniform(1.0, 2), 1, {0.0, 10}), std::invalid_argument);
    auto euclid = prob;
    euclid.space = SpaceTriplet::euclidean(4);
    euclid.source_map = SourceMap::sine_collocation;
    CHECK_THROWS_AS(euclid.validate(), std::invalid_argument);
}

TEST_CASE("semilinear solver")
{
    SUBCASE("zero nonlinearity reduces to the linear solver")
    {
        auto prob = heat(8, smooth_initial(8));
        const auto P = build_geometric(1.0, 8, 0.5);
        const auto linear = solve_linear(prob, P, 2);
        prob.nonlinearity = zero_source();
        const auto semi = solve_semilinear(prob, P, 2);
        CHECK((linear.coefficients() - semi.coefficients()).norm() <= 1e-12 * linear.coefficients().norm());
    }
    SUBCASE("logistic ODE against the closed form")
    {
        auto prob = parse_problem_spec("logistic");
        CHECK(prob.operator_scale == 0.0);
        const auto u = solve_semilinear(prob, build_uniform(2.0, 40), 2);
        CHECK(std::abs(u.left_limit(40)[0] - oracle::logistic(0.1, 2.0)) <= 1e-6);
        CHECK(galerkin_residual(prob, u) <= 1e-11);
    }
    SUBCASE("dissipative cubic source")
    {
        for (int degree = 0; degree <= 2; ++degree) {
            auto prob = parse_problem_spec("dissipative:u0=mode:1", SpaceTriplet::laplace1d(16));
            prob.initial *= 3.0;
            const auto u = solve_semilinear(prob, build_geometric(1.0, 10, 0.5), degree);
            CHECK(prob.space.norm(Norm::B, u.left_limit(10)) <= prob.space.norm(Norm::B, prob.initial));
            CHECK(galerkin_residual(prob, u) <= 1e-11);
        }
    }
    SUBCASE("Allen-Cahn with sine collocation")
    {
        const auto prob = parse_problem_spec("semilinear", SpaceTriplet::laplace1d(16));
        const auto u = solve_semilinear(prob, build_random(1.0, 16, 4, 2.0), 2);
        CHECK(galerkin_residual(prob, u) <= 1e-11);
    }
    SUBCASE("componentwise source on a matrix triplet")
    {
        ParabolicProblem prob;
        prob.space = SpaceTriplet::p1_laplace1d(9);
        prob.nonlinearity = allen_cahn_source();
        prob.initial = Vector::Constant(9, 0.5);
        const auto u = solve_semilinear(prob, build_uniform(0.5, 6), 1);
        CHECK(galerkin_residual(prob, u) <= 1e-11);
    }
    SUBCASE("Newton failure reports the slab")
    {
        auto prob = parse_problem_spec("logistic:u0=-1");
        try {
            solve_semilinear(prob, build_uniform(1.0, 1), 0, {1e-12, 20});
            FAIL("expected NumericalFailure");
        } catch (const NumericalFailure& e) {
            CHECK(e.interval() == 0);
            CHECK(std::isfinite(e.residual()));
        }
    }
}

TEST_CASE("stability ledger")
{
    SUBCASE("zero data gives a zero ledger")
    {
        const auto prob = heat(8, Vector::Zero(8));
        const auto u = solve(prob, build_uniform(1.0, 4), 1);
        const auto L = stability_ledger(prob, u, 2.0, 2.0);
        CHECK(L.final_b_norm_sq == 0.0);
        CHECK(L.jump_sum_b_sq == 0.0);
        CHECK(L.energy == 0.0);
        CHECK(L.dt_recon_dual == 0.0);
        CHECK(L.f_dual == 0.0);
        CHECK(L.projection_slack == 0.0);
    }
    SUBCASE("linear homogeneous: energy identity and h2 chain")
    {
        const auto prob = heat(32, smooth_initial(32));
        for (const auto& P : {build_uniform(1.0, 16), build_geometric(1.0, 12, 0.5), build_random(1.0, 20, 9, 3.0)})
            for (int degree = 0; degree <= 3; ++degree) {
                const auto u = solve_linear(prob, P, degree);
                const auto L = stability_ledger(prob, u, 2.0, 2.0);
                CHECK(L.energy_identity_residual <= 1e-10);
                CHECK(L.dt_recon_dual == doctest::Approx(L.f_dual).epsilon(1e-10));
                CHECK(L.projection_slack <= 1e-10);
                const double half = 0.5 * prob.initial.squaredNorm();
                CHECK(0.5 * L.final_b_norm_sq + 0.5 * L.jump_sum_b_sq + L.energy == doctest::Approx(half).epsilon(1e-10));
            }
    }
    SUBCASE("semilinear ledger is finite and the identity is not applicable")
    {
        const auto prob = parse_problem_spec("semilinear", SpaceTriplet::laplace1d(16));
        const auto u = solve(prob, build_geometric(1.0, 8, 0.5), 1);
        const auto L = stability_ledger(prob, u, 2.0, 2.0);
        CHECK(std::isnan(L.energy_identity_residual));
        for (double v : {L.final_b_norm_sq, L.jump_sum_b_sq, L.energy, L.dt_recon_dual, L.f_dual})
            CHECK((std::isfinite(v) && v >= 0.0));
        CHECK(L.dt_recon_dual <= L.f_dual * (1 + L.projection_slack) * (1 + 1e-12));
    }
}

TEST_CASE("exact heat reference")
{
    const auto S = SpaceTriplet::laplace1d(4);
    CHECK(exact_heat_reference(S, 2, 0.0, 0.3) == 0.3);
    CHECK(exact_heat_reference(S, 1, 1.0) == doctest::Approx(5.1723e-5).epsilon(1e-4));
    CHECK(exact_heat_reference(S, 1, 1.0) == doctest::Approx(std::exp(-pi * pi)).epsilon(1e-15));
    double previous = 2.0;
    for (double t = 0.0; t <= 1.0; t += 0.05) {
        CHECK(exact_heat_reference(S, 3, t) < previous);
        previous = exact_heat_reference(S, 3, t);
    }
    CHECK_THROWS_AS(exact_heat_reference(S, 5, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(exact_heat_reference(S, 0, 0.1), std::invalid_argument);
    CHECK(exact_heat_solution(S, Vector::Unit(4, 0), 1.0)[0] == doctest::Approx(std::exp(-pi * pi)));
}

TEST_CASE("convergence on the spectral heat problem")
{
    const auto prob = heat(16, Vector::Unit(16, 0));
    const auto exact = [&](double t) { return exact_heat_solution(prob.space, prob.initial, t); };
    for (int degree : {1, 2}) {
        std::vector<double> taus, errors, nodal;
        for (int N : {8, 16, 32, 64}) {
            const auto P = build_uniform(1.0, N);
            const auto u = solve_linear(prob, P, degree);
            taus.push_back(P.tau_max());
            errors.push_back(sampled_bochner_norm(
                P, [&](int n, double t) -> Vector { return u.eval_on_interval(n, t) - exact(t); }, prob.space,
                {2.0, Norm::B, 2}, 12));
            double worst = 0.0;
            for (int n = 1; n <= N; ++n)
                worst = std::max(worst, std::abs(u.left_limit(n)[0] - exact(P.node(n))[0]));
            nodal.push_back(worst);
        }
        CHECK(fit_rate(errors, taus) == doctest::Approx(degree + 1.0).epsilon(0.2 / (degree + 1.0)));
        if (degree == 1)
            CHECK(fit_rate(nodal, taus) == doctest::Approx(3.0).epsilon(0.1));
    }
}

TEST_CASE("problem assumptions are spot-checked")
{
    const auto heat_problem = parse_problem_spec("heat");
    CHECK(check_problem_assumptions(heat_problem, 100, 1).coercive);
    for (const char* spec : {"semilinear", "logistic", "dissipative"}) {
        const auto c = check_problem_assumptions(parse_problem_spec(spec), 1000, 2);
        CHECK(c.coercive);
        CHECK(c.lipschitz);
    }
    auto wrong = parse_problem_spec("heat");
    wrong.coercivity = 2.0;
    CHECK_FALSE(check_problem_assumptions(wrong, 10, 3).coercive);
    auto steep = parse_problem_spec("dissipative");
    steep.nonlinearity->lipschitz = 1.0;
    CHECK_FALSE(check_problem_assumptions(steep, 1000, 3).lipschitz);
}

TEST_CASE("problem specs")
{
    const auto h = parse_problem_spec("heat");
    CHECK(h.space.dim() == 64);
    CHECK(h.is_linear());
    CHECK(h.is_homogeneous());
    CHECK(h.initial == Vector::Unit(64, 0));
    CHECK(parse_problem_spec("heat:u0=mode:3").initial[2] == 1.0);
    CHECK(parse_problem_spec("heat:operator=scale:2.5").operator_scale == 2.5);
    CHECK(parse_problem_spec("heat:u0=1;2;3", SpaceTriplet::euclidean(3)).initial[1] == 2.0);
    CHECK(parse_problem_spec("semilinear").source_map == SourceMap::sine_collocation);
    CHECK(parse_problem_spec("custom:source=cubic,map=componentwise").nonlinearity->name == "cubic");
    CHECK(parse_problem_spec("heat:u0=random:4") .initial == parse_problem_spec("heat:u0=random:4").initial);
    CHECK_THROWS_AS(parse_problem_spec("wave"), std::invalid_argument);
    CHECK_THROWS_AS(parse_problem_spec("heat:u0=mode:65"), std::invalid_argument);
    CHECK_THROWS_AS(parse_problem_spec("heat:u0=1;2", SpaceTriplet::euclidean(3)), std::invalid_argument);
    CHECK_THROWS_AS(parse_problem_spec("heat:colour=red"), std::invalid_argument);
    CHECK_THROWS_AS(parse_problem_spec("heat:source=tabulated:/nonexistent/file.csv"), std::runtime_error);

    SUBCASE("tabulated source")
    {
        const auto path = std::filesystem::temp_directory_path() / "dgrecon_source.csv";
        {
            std::ofstream out(path);
            out << "t,f1,f2\n0,0,1\n1,2,1\n";
        }
        const auto prob = parse_problem_spec("heat:source=tabulated:" + path.string() + ",u0=0;0",
                                             SpaceTriplet::laplace1d(2));
        CHECK(prob.data(0.25)[0] == doctest::Approx(0.5));
        CHECK(prob.data(3.0)[0] == doctest::Approx(2.0));
        const auto u = solve(prob, build_uniform(1.0, 4), 1);
        CHECK(galerkin_residual(prob, u) <= 1e-11);
        std::filesystem::remove(path);
    }
}
