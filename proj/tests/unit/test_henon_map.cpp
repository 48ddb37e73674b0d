#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "henon/error.hpp"
#include "henon/henon_map.hpp"

#include <cmath>
#include <random>

using namespace henon;
using namespace henon::dimension;

TEST_CASE("generalized dimension")
{
    CHECK(generalized_dimension(3, 2).M == doctest::Approx(2.5));
    for (int N = 2; N <= 7; ++N) CHECK(generalized_dimension(N, 0).M == doctest::Approx(N));
    for (double a : {0.0, 0.5, 1.0, 3.0, 17.0}) CHECK(generalized_dimension(2, a).M == doctest::Approx(2.0));

    const auto m = generalized_dimension(5, 2.7);
    CHECK(m.c == doctest::Approx(std::pow(2.0 / 4.7, 2)));
    CHECK(m.exponent == doctest::Approx(2.35));
    CHECK(m.M >= 2.0);
    CHECK(m.M <= 5.0);
    CHECK_THROWS_AS(generalized_dimension(1, 0), PreconditionError);
    CHECK_THROWS_AS(generalized_dimension(3, -0.5), PreconditionError);
}

TEST_CASE("eigenvalue pullback and pushforward")
{
    const auto id = generalized_dimension(4, 0);
    CHECK(eigenvalue_pullback(-1.7, id) == doctest::Approx(-1.7));

    const auto m = generalized_dimension(3, 2);
    CHECK(eigenvalue_pullback(-1.0, m) == doctest::Approx(-4.0));
    CHECK(eigenvalue_pushforward(eigenvalue_pullback(-0.3, m), m) == doctest::Approx(-0.3));

    // just under one threshold maps just under the other
    const double nu = m.emden_threshold() - 1e-9;
    CHECK(eigenvalue_pullback(nu, m) < m.physical_threshold());
    CHECK_THROWS_AS(eigenvalue_pullback(m.emden_threshold() + 1.0, m), PreconditionError);
}

TEST_CASE("angular threshold")
{
    const auto m3 = generalized_dimension(3, 0);
    CHECK(angular_threshold(0.0, m3) == doctest::Approx(0.0));
    CHECK(angular_threshold(-2.5, m3) == doctest::Approx(std::sqrt(2.75) - 0.5));

    for (double a : {0.0, 1.0, 2.0, 4.0}) {
        const auto m = generalized_dimension(5, a);
        CHECK(angular_threshold(-(m.M - 1.0), m) == doctest::Approx((2.0 + a) / 2.0));
    }
}

TEST_CASE("degeneracy targets")
{
    CHECK(degeneracy_targets(generalized_dimension(3, 0), 1).at(0) == doctest::Approx(-2.0));
    CHECK(degeneracy_targets(generalized_dimension(2, 0), 1).at(0) == doctest::Approx(-1.0));
    CHECK(degeneracy_targets(generalized_dimension(3, 2), 1).at(0) == doctest::Approx(-0.5));
    const auto t = degeneracy_targets(generalized_dimension(4, 1), 5);
    REQUIRE(t.size() == 5);
    for (std::size_t j = 1; j < t.size(); ++j) CHECK(t[j] < t[j - 1]);
}

TEST_CASE("radius map")
{
    const auto m = generalized_dimension(3, 2);
    CHECK(map_radius(1.0, m, RadiusDirection::PhysicalToEmden) == 1.0);
    // t = r^2 for alpha = 2
    CHECK(map_radius(0.25, m, RadiusDirection::PhysicalToEmden) == doctest::Approx(0.0625));
    CHECK(map_radius(0.0625, m, RadiusDirection::EmdenToPhysical) == doctest::Approx(0.25));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double r = u(rng);
        const double back = map_radius(map_radius(r, m, RadiusDirection::PhysicalToEmden), m,
                                       RadiusDirection::EmdenToPhysical);
        worst = std::max(worst, std::abs(back - r));
    }
    CHECK(worst < 1e-14);
    CHECK_THROWS_AS(map_radius(1.5, m, RadiusDirection::PhysicalToEmden), PreconditionError);
}
