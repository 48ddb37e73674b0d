#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "henon/emden_ivp.hpp"
#include "henon/error.hpp"
#include "henon/radial_ode.hpp"

#include <cmath>
#include <vector>

using namespace henon;
using namespace henon::radial;

namespace {

// Fixed-step RK4 for v'' + (M-1)/t v' + |v|^{p-1} v = 0, v(0) = 1, started
// from the two-term series; returns the first `count` zeros (Hermite-refined).
std::vector<double> rk4_zeros(double M, double p, int count, double h = 2e-4)
{
    auto f = [p](double v) { return std::pow(std::abs(v), p - 1.0) * v; };
    auto rhs = [&](double t, double v, double w, double& dv, double& dw) {
        dv = w;
        dw = -(M - 1.0) / t * w - f(v);
    };
    double t = h;
    double v = 1.0 - h * h / (2.0 * M);
    double w = -h / M;
    std::vector<double> zeros;
    while (static_cast<int>(zeros.size()) < count && t < 1e4) {
        double k1v, k1w, k2v, k2w, k3v, k3w, k4v, k4w;
        rhs(t, v, w, k1v, k1w);
        rhs(t + h / 2, v + h / 2 * k1v, w + h / 2 * k1w, k2v, k2w);
        rhs(t + h / 2, v + h / 2 * k2v, w + h / 2 * k2w, k3v, k3w);
        rhs(t + h, v + h * k3v, w + h * k3w, k4v, k4w);
        const double vn = v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
        const double wn = w + h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
        if ((v > 0) != (vn > 0)) {
            // cubic Hermite on [t, t+h], bisected
            double a = 0.0, b = 1.0;
            auto H = [&](double s) {
                const double s2 = s * s, s3 = s2 * s;
                return (2 * s3 - 3 * s2 + 1) * v + (s3 - 2 * s2 + s) * h * w + (-2 * s3 + 3 * s2) * vn +
                       (s3 - s2) * h * wn;
            };
            for (int i = 0; i < 60; ++i) {
                const double mid = 0.5 * (a + b);
                if ((H(mid) > 0) == (v > 0)) a = mid;
                else b = mid;
            }
            zeros.push_back(t + 0.5 * (a + b) * h);
        }
        t += h;
        v = vn;
        w = wn;
    }
    return zeros;
}

} // namespace

TEST_CASE("initial value problem against a fixed-step oracle")
{
    const auto z = rk4_zeros(3.0, 3.0, 1);
    REQUIRE(z.size() == 1);
    IvpOptions o;
    o.stop_after_zeros = 1;
    const auto tr = integrate_emden_ivp(3.0, Nonlinearity::power(3.0), 1.0, 1.0, 1e3, 1e-12, o);
    REQUIRE(tr.zeros().size() == 1);
    CHECK(tr.zeros()[0] == doctest::Approx(z[0]).epsilon(1e-8));
    CHECK(tr.slope(tr.zeros()[0]) < 0.0);
    CHECK(tr.curvature_at_origin() == doctest::Approx(-1.0 / 3.0));
    CHECK(energy_identity_defect(tr) < 1e-7);
}

TEST_CASE("linear case is sin(t)/t")
{
    const auto lin = Nonlinearity::custom("u", [](double u) { return u; }, [](double) { return 1.0; }, true);
    const auto tr = integrate_emden_ivp(3.0, lin, 1.0, 1.0, 10.0, 1e-12);
    for (double t : {0.01, 0.5, 2.0, 3.0, 7.5, 9.9}) CHECK(tr.value(t) == doctest::Approx(std::sin(t) / t).epsilon(1e-9));
    REQUIRE(!tr.zeros().empty());
    CHECK(tr.zeros()[0] == doctest::Approx(M_PI).epsilon(1e-10));
}

TEST_CASE("initial value problem preconditions")
{
    CHECK_THROWS_AS(integrate_emden_ivp(2.0, Nonlinearity::power(3.0), 1.0, 0.0, 10.0, 1e-12), PreconditionError);
    CHECK_THROWS_AS(integrate_emden_ivp(1.5, Nonlinearity::power(3.0), 1.0, 1.0, 10.0, 1e-12), PreconditionError);
}

TEST_CASE("nodal power profile")
{
    const auto z = rk4_zeros(3.0, 3.0, 2);
    REQUIRE(z.size() == 2);
    const auto prof = solve_nodal_power(3.0, 3.0, 2);
    REQUIRE(prof.zeros.size() == 2);
    CHECK(prof.zeros[1] == 1.0);
    CHECK(prof.zeros[0] == doctest::Approx(z[0] / z[1]).epsilon(1e-8));
    CHECK(prof.values.front() == doctest::Approx(z[1]).epsilon(1e-8));  // T_2^{2/(p-1)} with p = 3
    // regression
    CHECK(prof.values.front() == doctest::Approx(35.96194003).epsilon(1e-8));
    CHECK(std::abs(prof.evaluate(1.0).first) < 1e-8 * prof.values.front());
    CHECK(validate_profile(prof).passed());
    CHECK(profile_residual(prof, 4096) < 1e-4 * prof.values.front());

    CHECK(solve_nodal_power(5.0, 2.2, 1).values.front() == doctest::Approx(std::pow(15.60637142, 2.0 / 1.2)).epsilon(1e-7));
    CHECK(solve_nodal_power(2.0, 3.0, 3).values.front() == doctest::Approx(24.01756433).epsilon(1e-7));
}

TEST_CASE("single nodal zone")
{
    const auto prof = solve_nodal_power(4.0, 2.5, 1);
    CHECK(prof.zeros.size() == 1);
    for (std::size_t i = 0; i + 1 < prof.values.size(); ++i) {
        CHECK(prof.values[i] > 0.0);
        CHECK(prof.values[i + 1] <= prof.values[i]);
    }
    const auto rep = validate_profile(prof);
    CHECK(rep.passed());
    CHECK(rep.critical_points_ok);
}

TEST_CASE("validator catches an injected sign fault")
{
    auto prof = solve_nodal_power(3.0, 3.0, 2);
    prof.values[prof.values.size() / 10] *= -1.0;
    const auto rep = validate_profile(prof);
    CHECK_FALSE(rep.sign_alternation_ok);
    CHECK_FALSE(rep.passed());
}

TEST_CASE("shooting")
{
    const auto pw = Nonlinearity::power(3.0);
    const auto sh = solve_nodal_shooting(3.0, pw, 1.0, 2, find_shooting_bracket(3.0, pw, 1.0, 2));
    const auto ref = solve_nodal_power(3.0, 3.0, 2);
    double sup = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        sup = std::max(sup, std::abs(sh.evaluate(x).first - ref.evaluate(x).first));
    }
    CHECK(sup < 1e-6);

    const auto cubic = Nonlinearity::custom(
        "u+u^3", [](double u) { return u + u * u * u; }, [](double u) { return 1.0 + 3.0 * u * u; }, true);
    const auto prof = solve_nodal_shooting(3.0, cubic, 1.0, 2, find_shooting_bracket(3.0, cubic, 1.0, 2));
    CHECK(prof.zeros.size() == 2);
    CHECK(validate_profile(prof).passed());
    CHECK(prof.values.front() == doctest::Approx(34.845896158563).epsilon(1e-7));  // regression

    CHECK_THROWS_AS(solve_nodal_shooting(3.0, cubic, 1.0, 2, {1.0, 1.0}), PreconditionError);
}

TEST_CASE("Henon pull-back")
{
    const auto u = henon_profile(4, 0.0, 2.5, 2);
    const auto v = solve_nodal_power(4.0, 2.5, 2);
    CHECK(u.values.front() == doctest::Approx(v.values.front()));
    for (double x : {0.1, 0.37, 0.8}) CHECK(u.evaluate(x).first == doctest::Approx(v.evaluate(x).first));

    // beta^{2/(p-1)} with beta = 2, p = 3
    const auto h = henon_profile(3, 2.0, 3.0, 1);
    const auto e = solve_nodal_power(2.5, 3.0, 1);
    CHECK(h.values.front() / e.values.front() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(h.M == doctest::Approx(2.5));

    const auto h2 = henon_profile(3, 2.0, 3.0, 2);
    const auto e2 = solve_nodal_power(2.5, 3.0, 2);
    CHECK(h2.zeros[0] == doctest::Approx(std::sqrt(e2.zeros[0])));
    CHECK(validate_profile(h2).passed());
    CHECK(profile_residual(h2, 4096) < 1e-4 * h2.values.front());

    const auto planar = henon_profile(2, 4.0, 5.0, 3);
    CHECK(planar.zeros.size() == 3);
}

TEST_CASE("auxiliary z")
{
    for (int m = 1; m <= 3; ++m) {
        const auto prof = solve_nodal_power(3.0, 3.0, m);
        CHECK(auxiliary_z(prof).zero_count == m);
        double prev = 0.0;
        for (double t : prof.zeros) {
            const auto [val, der] = prof.evaluate(t);
            const double z = t * der + val;  // 2/(p-1) = 1
            CHECK(z * der * t > 0.0);
            if (prev != 0.0) CHECK(z * prev < 0.0);
            prev = z;
        }
    }
}
