#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "dgrecon/time_mesh.hpp"

using namespace dgrecon;

namespace {

void check_nodes(const TimePartition& P, std::initializer_list<double> expected)
{
    REQUIRE(P.nodes().size() == expected.size());
    std::size_t k = 0;
    for (double t : expected)
        CHECK(P.nodes()[k++] == doctest::Approx(t).epsilon(1e-15));
}

double step_sum(const TimePartition& P)
{
    double s = 0.0;
    for (double tau : P.steps())
        s += tau;
    return s;
}

} // namespace

TEST_CASE("partition construction validates nodes")
{
    CHECK_THROWS_AS(TimePartition({0.0}), std::invalid_argument);
    CHECK_THROWS_AS(TimePartition({0.1, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(TimePartition({0.0, 0.5, 0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(TimePartition({0.0, 0.6, 0.5, 1.0}), std::invalid_argument);
    const TimePartition P({0.0, 0.1, 0.5, 1.0});
    CHECK(P.size() == 3);
    CHECK(P.tau_max() == doctest::Approx(0.5));
    CHECK(P.tau_min() == doctest::Approx(0.1));
}

TEST_CASE("build_uniform")
{
    check_nodes(build_uniform(1.0, 4), {0.0, 0.25, 0.5, 0.75, 1.0});
    check_nodes(build_uniform(1.0, 1), {0.0, 1.0});
    CHECK(build_uniform(2.0, 4).tau_max() == doctest::Approx(0.5));
    CHECK(build_uniform(3.0, 7).final_time() == 3.0);
    CHECK_THROWS_AS(build_uniform(0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(build_uniform(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_uniform(-1.0, 2), std::invalid_argument);
}

TEST_CASE("build_geometric")
{
    const auto P = build_geometric(1.0, 4, 0.5);
    check_nodes(P, {0.0, 0.125, 0.25, 0.5, 1.0});
    const auto steps = P.steps();
    CHECK(steps[0] == doctest::Approx(0.125));
    CHECK(steps[1] == doctest::Approx(0.125));
    CHECK(steps[2] == doctest::Approx(0.25));
    CHECK(steps[3] == doctest::Approx(0.5));
    CHECK(step_ratio_constant(P) == doctest::Approx(2.0));
    CHECK(quasi_uniformity_ratio(build_geometric(1.0, 10, 0.5)) == doctest::Approx(256.0));
    CHECK_THROWS_AS(build_geometric(1.0, 4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_geometric(1.0, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_geometric(1.0, 4, -0.3), std::invalid_argument);

    SUBCASE("step ratio bounded while quasi-uniformity grows")
    {
        for (double sigma : {0.2, 0.5, 0.8}) {
            const double bound = std::max(1.0 / sigma, (1.0 - sigma) / sigma);
            double previous = 0.0;
            for (int N = 2; N <= 30; ++N) {
                const auto G = build_geometric(1.0, N, sigma);
                CHECK(step_ratio_constant(G) <= bound * (1 + 1e-12));
                // Strict growth for sigma <= 1/2; larger sigma plateaus for small N.
                if (sigma <= 0.5)
                    CHECK(quasi_uniformity_ratio(G) > previous);
                else
                    CHECK(quasi_uniformity_ratio(G) >= previous * (1 - 1e-12));
                previous = quasi_uniformity_ratio(G);
                CHECK(std::abs(step_sum(G) - 1.0) <= 1e-14);
            }
        }
    }

    SUBCASE("grading toward the end mirrors the nodes")
    {
        const auto E = build_geometric(1.0, 4, 0.5, Grading::toward_end);
        check_nodes(E, {0.0, 0.5, 0.75, 0.875, 1.0});
    }
}

TEST_CASE("build_random")
{
    const auto a = build_random(1.0, 8, 42, 3.0);
    const auto b = build_random(1.0, 8, 42, 3.0);
    CHECK(a == b);
    CHECK_FALSE(a == build_random(1.0, 8, 43, 3.0));
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto P = build_random(2.5, 1 + static_cast<int>(seed % 40), seed, 3.0);
        CHECK(std::abs(step_sum(P) - 2.5) <= 1e-14 * 2.5);
        CHECK(P.final_time() == 2.5);
        CHECK(step_ratio_constant(P) <= 3.0 * (1 + 1e-12));
    }
    CHECK(build_random(1.0, 5, 1, 1.0) == build_uniform(1.0, 5));
    CHECK_THROWS_AS(build_random(1.0, 5, 1, 0.5), std::invalid_argument);
}

TEST_CASE("step_ratio_constant")
{
    CHECK(step_ratio_constant(build_uniform(1.0, 9)) == doctest::Approx(1.0));
    CHECK(step_ratio_constant(TimePartition({0.0, 0.1, 0.5, 0.7})) == doctest::Approx(4.0));
    CHECK(step_ratio_constant(build_uniform(1.0, 1)) == 1.0);
}

TEST_CASE("merge")
{
    check_nodes(merge(TimePartition({0.0, 0.5, 1.0}), TimePartition({0.0, 0.25, 1.0})), {0.0, 0.25, 0.5, 1.0});
    const auto G = build_geometric(1.0, 7, 0.3);
    CHECK(merge(G, G) == G);
    CHECK(merge(build_uniform(1.0, 2), build_uniform(1.0, 4)) == build_uniform(1.0, 4));
    CHECK_THROWS_AS(merge(build_uniform(1.0, 2), build_uniform(2.0, 2)), std::invalid_argument);

    SUBCASE("contains all nodes of both inputs")
    {
        const auto A = build_random(1.0, 13, 5, 2.0);
        const auto B = build_geometric(1.0, 9, 0.5);
        const auto C = merge(A, B);
        for (const auto* P : {&A, &B})
            for (double t : P->nodes()) {
                bool found = false;
                for (double s : C.nodes())
                    found = found || std::abs(s - t) <= 1e-14;
                CHECK(found);
            }
    }
    SUBCASE("near-coincident nodes collapse")
    {
        const auto C = merge(TimePartition({0.0, 0.5, 1.0}), TimePartition({0.0, 0.5 + 1e-16, 1.0}));
        CHECK(C.size() == 2);
    }
}

TEST_CASE("locate and subdivide")
{
    const auto P = build_uniform(1.0, 4);
    CHECK(P.locate(0.0) == 0);
    CHECK(P.locate(1.0) == 3);
    CHECK(P.locate(0.25) == 1);
    CHECK(P.locate(0.25, true) == 0);
    CHECK(P.locate(0.3) == 1);
    CHECK(subdivide(build_uniform(1.0, 2), 4) == build_uniform(1.0, 8));
    CHECK(subdivide(build_geometric(1.0, 5, 0.5), 2).size() == 10);
}

TEST_CASE("family specs")
{
    const auto spec = parse_family_spec("geometric:T=1,N=16,sigma=0.5");
    CHECK(spec.kind == FamilyKind::geometric);
    CHECK(spec.final_time == 1.0);
    CHECK(spec.intervals == 16);
    CHECK(spec.sigma == 0.5);
    CHECK(build_partition(spec) == build_geometric(1.0, 16, 0.5));
    CHECK(parse_family_spec(spec.to_string()).to_string() == spec.to_string());

    const auto r = parse_family_spec("random:T=2,N=5,seed=9,cap=3");
    CHECK(build_partition(r) == build_random(2.0, 5, 9, 3.0));
    CHECK(parse_family_spec("uniform:T=1,N=10").intervals == 10);
    CHECK_THROWS_AS(parse_family_spec("spiral:T=1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_family_spec("uniform:T=1,N=ten"), std::invalid_argument);
    CHECK_THROWS_AS(parse_family_spec("uniform:T=1,bogus=3"), std::invalid_argument);
    CHECK_THROWS_AS(build_partition(parse_family_spec("uniform:T=1")), std::invalid_argument);
}

TEST_CASE("partition families refine with bounded step ratio")
{
    SUBCASE("uniform")
    {
        const PartitionFamily F{parse_family_spec("uniform:T=1"), {4, 8, 16}};
        const auto levels = F.generate();
        CHECK(levels[2] == build_uniform(1.0, 16));
    }
    SUBCASE("geometric levels are layer counts with 2^k subdivision")
    {
        const PartitionFamily F{parse_family_spec("geometric:T=1,sigma=0.5"), {4, 6, 8, 10}};
        const auto levels = F.generate();
        REQUIRE(levels.size() == 4);
        for (std::size_t k = 0; k < levels.size(); ++k) {
            CHECK(step_ratio_constant(levels[k]) <= 2.0 + 1e-12);
            if (k > 0)
                CHECK(levels[k].tau_max() < levels[k - 1].tau_max());
        }
        CHECK(levels[1] == subdivide(build_geometric(1.0, 6, 0.5), 2));
        CHECK(quasi_uniformity_ratio(levels[3]) / quasi_uniformity_ratio(levels[0]) >= 8.0);
    }
    SUBCASE("random")
    {
        const PartitionFamily F{parse_family_spec("random:T=1,seed=3,cap=2"), {8, 32, 128}};
        const auto levels = F.generate();
        for (std::size_t k = 0; k < levels.size(); ++k) {
            CHECK(step_ratio_constant(levels[k]) <= 2.0 + 1e-12);
            if (k > 0)
                CHECK(levels[k].tau_max() < levels[k - 1].tau_max());
        }
        CHECK(levels == F.generate());
    }
    SUBCASE("non-refining levels are rejected")
    {
        const PartitionFamily F{parse_family_spec("uniform:T=1"), {8, 8, 16}};
        CHECK_THROWS_AS(F.generate(), std::invalid_argument);
    }
}
