#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "henon/error.hpp"
#include "henon/henon_map.hpp"
#include "henon/radial_ode.hpp"
#include "henon/spectral.hpp"

#include <cmath>
#include <random>

using namespace henon;
using namespace henon::spectral;

namespace {

double bessel_j0(double x)
{
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        term *= -(x * x / 4.0) / (static_cast<double>(k) * k);
        sum += term;
    }
    return sum;
}

double first_bessel_zero()
{
    double a = 2.0, b = 3.0;
    for (int i = 0; i < 100; ++i) {
        const double c = 0.5 * (a + b);
        (bessel_j0(c) > 0 ? a : b) = c;
    }
    return 0.5 * (a + b);
}

WeightedSLProblem power_problem(double M, double p, int m, Kind kind)
{
    return {M, linearized_potential(radial::solve_nodal_power(M, p, m)), kind};
}

} // namespace

TEST_CASE("free standard spectra")
{
    const double j0 = first_bessel_zero();
    CHECK(j0 == doctest::Approx(2.404825557695773).epsilon(1e-12));
    const auto s2 = solve_standard_spectrum({2.0, Potential::zero(), Kind::Standard}, 3);
    CHECK(s2.pairs.at(0).value == doctest::Approx(j0 * j0).epsilon(1e-6));

    const auto s3 = solve_standard_spectrum({3.0, Potential::zero(), Kind::Standard}, 3);
    for (int i = 0; i < 3; ++i)
        CHECK(s3.pairs.at(i).value == doctest::Approx(std::pow((i + 1) * M_PI, 2)).epsilon(1e-6));

    for (double M : {2.0, 2.5, 3.7, 5.0})
        for (const auto& p : solve_standard_spectrum({M, Potential::zero(), Kind::Standard}, 4).pairs)
            CHECK(p.value > 0.0);
}

TEST_CASE("free singular problem has nothing below the threshold")
{
    for (double M : {2.0, 3.0, 4.0, 6.5}) {
        const auto s = solve_singular_spectrum({M, Potential::zero(), Kind::Singular}, 3);
        CHECK(s.pairs.empty());
        CHECK(s.threshold == doctest::Approx(std::pow((M - 2.0) / 2.0, 2)));
    }
}

TEST_CASE("Liouville transform")
{
    const auto a = Potential::callable([](double r) { return 3.0 + r; });
    const auto g = liouville_transform({2.0, a, Kind::Singular}, 20.0, 200);
    CHECK(g.threshold == 0.0);
    for (std::size_t k = 0; k < g.x.size(); k += 17)
        CHECK(g.potential[k] == doctest::Approx(-std::exp(-2.0 * g.x[k]) * (3.0 + std::exp(-g.x[k]))));

    const auto free = liouville_transform({4.0, Potential::zero(), Kind::Singular}, 20.0, 200);
    for (double v : free.potential) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("linearized power spectrum")
{
    const auto s = solve_singular_spectrum(power_problem(3.0, 3.0, 2, Kind::Singular), 4);
    REQUIRE(s.count_below(0.0) == 2);
    CHECK(s.pairs[0].value < -2.0);
    CHECK(s.pairs[1].value > -2.0);
    CHECK(s.pairs[1].value < 0.0);
    for (std::size_t i = 1; i < s.pairs.size(); ++i) CHECK(s.pairs[i].value > s.pairs[i - 1].value);
    // regression
    CHECK(s.pairs[0].value == doctest::Approx(-8.554314).epsilon(1e-6));
    CHECK(s.pairs[1].value == doctest::Approx(-1.985454).epsilon(1e-6));

    for (std::size_t i = 0; i < s.pairs.size(); ++i) CHECK(count_interior_nodes(s.pairs[i]) == static_cast<int>(i));
    CHECK(weighted_inner(s.pairs[0], s.pairs[0]) == doctest::Approx(1.0));
    CHECK(std::abs(weighted_inner(s.pairs[0], s.pairs[1])) < 1e-8);
    CHECK(picone_residual(s.pairs[0], s.pairs[0], 3.0) < 1e-12);
    CHECK(picone_residual(s.pairs[0], s.pairs[1], 3.0) < 1e-6);
}

TEST_CASE("dense oracle")
{
    const auto prob = power_problem(3.0, 2.2, 2, Kind::Singular);
    const auto s = solve_singular_spectrum(prob, 4);
    const double eps = std::exp(-s.x_max);
    const auto o = dense_oracle_spectrum(prob, 4000, eps);
    REQUIRE(o.pairs.size() == s.pairs.size());
    for (std::size_t i = 0; i < s.pairs.size(); ++i)
        CHECK(std::abs(o.pairs[i].value - s.pairs[i].value) < 1e-4 * std::abs(o.pairs[i].value));

    const auto o2 = dense_oracle_spectrum(prob, 4000, eps / 2.0);
    for (std::size_t i = 0; i < o.pairs.size(); ++i)
        CHECK(std::abs(o2.pairs[i].value - o.pairs[i].value) <= std::max(o.pairs[i].error_bar, 1e-12));

    const double j0 = first_bessel_zero();
    const auto b = dense_oracle_spectrum({2.0, Potential::zero(), Kind::Standard}, 2000, 1e-8);
    CHECK(b.pairs.at(0).value == doctest::Approx(j0 * j0).epsilon(1e-3));

    CHECK_THROWS_AS(dense_oracle_spectrum(prob, 4002, eps), PreconditionError);
}

TEST_CASE("decay exponent")
{
    CHECK(decay_theta(2.0, -2.25) == doctest::Approx(1.5));
    CHECK(decay_theta(3.0, -1e-12) < 1e-10);
    CHECK(decay_theta(3.0, -1e-12) > 0.0);

    // first eigenpair of a one-zone Henon linearization
    const auto map = dimension::generalized_dimension(3, 2.0);
    const auto s = solve_singular_spectrum(power_problem(map.M, 3.0, 1, Kind::Singular), 2);
    REQUIRE(!s.pairs.empty());
    const auto& p = s.pairs[0];
    CHECK(std::abs(p.decay_exponent - p.theta_analytic) < 0.02 * p.theta_analytic);
}

TEST_CASE("node counting on synthetic input")
{
    EigenPair p;
    p.r = {0.0, 0.25, 0.5, 0.75, 1.0};
    p.psi = {1.0, 2.0, 1.5, 0.5, 0.0};
    CHECK(count_interior_nodes(p) == 0);
    p.psi = {1.0, -2.0, 1.5, 0.5, 0.0};
    CHECK(count_interior_nodes(p) == 2);
}

TEST_CASE("Rayleigh quotient")
{
    std::vector<double> r, w;
    for (int i = 0; i <= 400; ++i) {
        r.push_back(i / 400.0);
        w.push_back(1.0 - i / 400.0);
    }
    // int r^2 dr / int r^2 (1-r)^2 dr = (1/3) / (1/30)
    CHECK(rayleigh_quotient(r, w, {3.0, Potential::zero(), Kind::Standard}, QuadratureRule::Exact) ==
          doctest::Approx(10.0).epsilon(1e-12));

    const auto prob = power_problem(3.0, 3.0, 2, Kind::Singular);
    const auto s = solve_singular_spectrum(prob, 3);
    for (const auto& p : s.pairs)
        CHECK(rayleigh_quotient(p.r, p.psi, prob, QuadratureRule::Solver) ==
              doctest::Approx(p.grid_value).epsilon(1e-6));

    // variational lower bound
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> rr, ww;
        const double c1 = g(rng), c2 = g(rng), c3 = g(rng);
        for (int i = 0; i <= 300; ++i) {
            const double x = std::pow(i / 300.0, 3);
            rr.push_back(x);
            ww.push_back((1.0 - x) * (1.0 + c1 * x + c2 * x * x + c3 * std::sin(3 * x)));
        }
        CHECK(rayleigh_quotient(rr, ww, prob, QuadratureRule::Exact) >= s.pairs[0].value);
    }
}

TEST_CASE("Hardy, Poincare and radial inequalities")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double M : {2.0, 2.5, 3.0, 5.0}) {
        for (int t = 0; t < 10; ++t) {
            PiecewiseLinear w;
            w.extend_to_origin = false;
            w.r.push_back(0.0);
            w.w.push_back(0.0);
            for (int i = 1; i <= 200; ++i) {
                w.r.push_back(std::pow(i / 200.0, 2));
                w.w.push_back(i == 200 ? 0.0 : u(rng));
            }
            if (M > 2.0) CHECK(hardy_check(w, M).holds);
            CHECK(poincare_check(w, M).holds);
            CHECK(radial_lemma_check(w, M).holds);
        }
    }
}

TEST_CASE("preconditions")
{
    CHECK_THROWS_AS(solve_singular_spectrum({3.0, Potential::zero(), Kind::Standard}, 2), PreconditionError);
    CHECK_THROWS_AS(solve_standard_spectrum({3.0, Potential::zero(), Kind::Standard}, 0), PreconditionError);
    SpectralConfig cfg;
    cfg.grid = 15;
    CHECK_THROWS_AS(solve_singular_spectrum({3.0, Potential::zero(), Kind::Singular}, 2, cfg), PreconditionError);
}
