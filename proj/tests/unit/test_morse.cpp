#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "henon/error.hpp"
#include "henon/morse.hpp"

#include <cmath>

using namespace henon;
using namespace henon::morse;

namespace {

spectral::Spectrum synthetic(double M, std::vector<double> values, spectral::Kind kind = spectral::Kind::Singular)
{
    spectral::Spectrum s;
    s.kind = kind;
    s.M = M;
    s.threshold = kind == spectral::Kind::Singular ? std::pow((M - 2.0) / 2.0, 2) : INFINITY;
    for (double v : values) {
        spectral::EigenPair p;
        p.value = v;
        s.pairs.push_back(p);
    }
    s.exhausted_below = s.threshold - 1e-6;
    return s;
}

long long binomial(int n, int k)
{
    long double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::llround(r);
}

} // namespace

TEST_CASE("Laplace-Beltrami table")
{
    for (int N = 2; N <= 6; ++N) CHECK(beltrami_eigen(N, 0) == 0.0);
    CHECK(beltrami_eigen(3, 1) == 2.0);
    CHECK(beltrami_eigen(2, 5) == 25.0);
    for (int N = 2; N <= 6; ++N) CHECK(beltrami_multiplicity(N, 0) == 1);
    for (int j = 1; j <= 30; ++j) CHECK(beltrami_multiplicity(2, j) == 2);
    for (int j = 1; j <= 20; ++j) CHECK(beltrami_multiplicity(3, j) == 2 * j + 1);
    // harmonic polynomials: C(N+j-1, j) - C(N+j-3, j-2)
    for (int N = 3; N <= 9; ++N)
        for (int j = 2; j <= 12; ++j)
            CHECK(beltrami_multiplicity(N, j) == binomial(N + j - 1, j) - binomial(N + j - 3, j - 2));
    const auto t = beltrami_table(4, 3);
    REQUIRE(t.rows.size() == 4);
    CHECK(t.rows[2].multiplicity == 9);
}

TEST_CASE("Morse index from a synthetic spectrum")
{
    const auto map = dimension::generalized_dimension(3, 0.0);
    const auto rep = morse_index(synthetic(3.0, {-2.5, -0.5}), map);
    REQUIRE(rep.per_eigenvalue.size() == 2);
    CHECK(rep.per_eigenvalue[0].J == doctest::Approx(1.1583).epsilon(1e-4));
    CHECK(rep.per_eigenvalue[1].J == doctest::Approx(0.3660).epsilon(1e-4));
    CHECK(rep.per_eigenvalue[0].contribution == 4);
    CHECK(rep.per_eigenvalue[1].contribution == 1);
    CHECK(rep.total == 5);
    CHECK(rep.radial_morse == 2);

    CHECK(morse_index(synthetic(3.0, {}), map).total == 0);

    // just below -(M-1) with alpha = 2: J slightly above 2
    const auto m2 = dimension::generalized_dimension(3, 2.0);
    const auto r2 = morse_index(synthetic(m2.M, {-(m2.M - 1.0) - 1e-6}), m2);
    CHECK(r2.per_eigenvalue[0].contributing_j == std::vector<int>{0, 1, 2});

    // positive eigenvalues and numerical zeros do not count
    const auto r3 = morse_index(synthetic(3.0, {-1.0, 1e-9, 0.2}), map);
    CHECK(r3.radial_morse == 1);
    CHECK(!r3.warnings.empty());
}

TEST_CASE("integer J is flagged and the boundary harmonic left out")
{
    const auto map = dimension::generalized_dimension(3, 0.0);
    const auto rep = morse_index(synthetic(3.0, {-2.0}), map);  // J = 1 exactly
    CHECK(rep.integer_J_collision);
    CHECK(rep.per_eigenvalue[0].contributing_j == std::vector<int>{0});
}

TEST_CASE("dimension mismatch and threshold proximity")
{
    const auto map = dimension::generalized_dimension(3, 0.0);
    CHECK_THROWS_AS(morse_index(synthetic(4.0, {-1.0}), map), PreconditionError);
    auto s = synthetic(2.0, {-1.0});
    s.near_threshold = true;
    CHECK_THROWS_AS(morse_index(s, dimension::generalized_dimension(2, 0.0)), SolverError);
}

TEST_CASE("degeneracy scan")
{
    const auto map = dimension::generalized_dimension(3, 2.0);
    const double target = -std::pow(2.0 / 4.0, 2) * 1 * 2;
    const auto std_spec = synthetic(map.M, {1.0, 5.0}, spectral::Kind::Standard);
    auto rep = degeneracy_scan(synthetic(map.M, {-3.3, target}), std_spec, map);
    REQUIRE(rep.nonradial_hits.size() == 1);
    CHECK(rep.nonradial_hits[0].k == 2);
    CHECK(rep.nonradial_hits[0].j == 1);
    CHECK_FALSE(rep.radially_degenerate);

    CHECK(degeneracy_scan(synthetic(map.M, {-3.1234567, -0.4876}), std_spec, map, 0.0).nonradial_hits.empty());

    // planar: the radial question goes to the standard spectrum
    const auto m2 = dimension::generalized_dimension(2, 1.0);
    const auto r2 = degeneracy_scan(synthetic(2.0, {-3.0}), synthetic(2.0, {-2.0, 1e-9}, spectral::Kind::Standard), m2);
    CHECK(r2.radially_degenerate);
    CHECK(r2.offending_index == 2);
}

TEST_CASE("symmetric Morse index")
{
    const auto map = dimension::generalized_dimension(2, 3.0);
    const auto rep = morse_index(synthetic(2.0, {-3.0, -0.3}), map);
    const int jx = 10;
    CHECK(symmetric_morse_index(rep, SymmetryMultiplicity::full_rotation(jx)) == rep.radial_morse);
    CHECK(symmetric_morse_index(rep, SymmetryMultiplicity::trivial(2, jx)) == rep.total);
    // J_1 = 2.5 sqrt(3) > 4 would reach j = 4; keep below
    const auto r2 = morse_index(synthetic(2.0, {-1.5, -0.3}), map);
    for (const auto& c : r2.per_eigenvalue) CHECK(c.J < 4.0);
    CHECK(symmetric_morse_index(r2, SymmetryMultiplicity::cyclic(4, jx)) == r2.radial_morse);
    CHECK_THROWS_AS(SymmetryMultiplicity::from_label("cyclic:x", 2, 3), PreconditionError);
    CHECK_THROWS_AS(SymmetryMultiplicity::from_label("dihedral", 2, 3), PreconditionError);
    CHECK(SymmetryMultiplicity::from_label("cyclic:3", 2, 6).table[3] == 2);
    const auto user = SymmetryMultiplicity::from_label("table:1,0,2", 3, 5);
    CHECK(user.table == std::vector<long long>{1, 0, 2, 0, 0, 0});
    CHECK_THROWS_AS(SymmetryMultiplicity::from_label("table:1,-2", 3, 5), PreconditionError);
}

TEST_CASE("lower bounds")
{
    CHECK(*lower_bound(3, 0.0, 2, true).with_f3 == 5);
    CHECK(lower_bound(3, 0.0, 2, true).general == 4);
    CHECK(*lower_bound(2, 3.0, 2, true).with_f3 == 6);
    const auto b1 = lower_bound(5, 1.0, 1, true);
    CHECK(b1.general == 0);
    CHECK(*b1.with_f3 == 1);
    CHECK_FALSE(lower_bound(3, 0.0, 2, false).with_f3.has_value());

    // non-decreasing in alpha
    long long prev = 0;
    for (double a = 0.0; a <= 12.0; a += 0.25) {
        const long long v = *lower_bound(3, a, 3, true).with_f3;
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("asymptotic prediction")
{
    CHECK(asymptotic_prediction(3, 0.0, 2).value == 5);
    CHECK(asymptotic_prediction(2, 0.0, 2).value == 12);
    CHECK(asymptotic_prediction(3, 1.0, 2).value == 8);
    CHECK(asymptotic_prediction(2, 1.0, 2).value == 4 + 2 * static_cast<long long>(std::floor(1.5 * std::sqrt(26.9))));
    CHECK(asymptotic_prediction(3, 2.0 + 1e-8, 2).near_even);

    // (1 + alpha/2) sqrt(26.9) = 6 exactly
    const double exceptional = 2.0 * (6.0 / std::sqrt(26.9) - 1.0);
    CHECK_THROWS_AS(asymptotic_prediction(2, exceptional, 2), PreconditionError);
    CHECK_THROWS_AS(asymptotic_prediction(2, 0.0, 3), PreconditionError);
}
