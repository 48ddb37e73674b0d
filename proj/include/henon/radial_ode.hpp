#pragma once

#include "henon/emden_ivp.hpp"
#include "henon/henon_map.hpp"
#include "henon/nonlinearity.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace henon::radial {

enum class Variable { EmdenVariable_t, PhysicalVariable_r };

/// Nodal radial solution on [0, 1].
///
/// Samples live on `grid`; the continuous solution behind them stays
/// available through evaluate(), which maps x to a point of the underlying
/// initial value problem:  value(x) = amplitude * V(time_scale * x^radius_power).
struct RadialProfile {
    Variable variable = Variable::EmdenVariable_t;
    double M = 2.0;
    /// Physical dimension and Henon weight; (M, 0) for Emden-variable profiles
    /// that did not come from a Henon problem.
    int N = 0;
    double alpha = 0.0;

    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> derivative;

    std::vector<double> zeros;            ///< t_1 < ... < t_m = 1
    std::vector<double> critical_points;  ///< one per interior nodal zone
    std::vector<double> extremal_values;  ///< M_0, ..., M_{m-1}
    int nodal_zones = 0;

    Nonlinearity nonlinearity = Nonlinearity::power(2.0);
    /// Factor in front of f in the Emden-variable equation: (2/(2+alpha))^2 or 1.
    double coupling = 1.0;

    /// p >= (M+2)/(M-2) with M > 2.
    bool supercritical = false;
    double rtol = 0.0;
    double atol = 0.0;
    double zero_tol = 0.0;

    std::shared_ptr<const Trajectory> source;
    double amplitude = 1.0;
    double time_scale = 1.0;
    double radius_power = 1.0;

    /// (value, derivative) of the continuous solution at x in [0, 1].
    std::pair<double, double> evaluate(double x) const;
};

struct ProfileOptions {
    IvpOptions ivp{};
    /// Number of samples, uniform in -ln t, plus the origin.
    int grid_points = 2048;
    /// Integration budget for the pure-power initial value problem.
    double t_max = 1e12;
};

/// Exponent (M+2)/(M-2) bounding the subcritical range; +inf for M = 2.
double critical_exponent(double M);

/// Pure-power profile with m nodal zones, built from the v(0) = 1 solution by
/// the scaling v -> T^{2/(p-1)} v(T t), T its m-th zero.
RadialProfile solve_nodal_power(double M, double p, int m, const ProfileOptions& opts = {});

struct ShootingOptions {
    ProfileOptions profile{};
    /// Accepted |v(1)| of the final shot.
    double boundary_tol = 1e-9;
    int max_bisections = 200;
};

/// Bracket [d_lo, d_hi] for solve_nodal_shooting, found by doubling (or
/// halving) v(0) from 1 within [2^-60, 2^60].
std::pair<double, double> find_shooting_bracket(double M, const Nonlinearity& nl, double c,
                                                int m, const ShootingOptions& opts = {});

/// Generic-f nodal profile on [0, 1] by bisection on v(0): the m-th zero of
/// the initial value problem is driven onto t = 1.
RadialProfile solve_nodal_shooting(double M, const Nonlinearity& nl, double c, int m,
                                   std::pair<double, double> bracket,
                                   const ShootingOptions& opts = {});

/// Radial solution u(r) of -Delta u = |x|^alpha |u|^{p-1} u in the unit ball
/// of R^N with m nodal zones, pulled back from the M-dimensional profile.
RadialProfile henon_profile(int N, double alpha, double p, int m, const ProfileOptions& opts = {});

struct QualitativeReport {
    int declared_zones = 0;
    int zeros_found = 0;
    bool zero_count_ok = false;
    bool boundary_zero_ok = false;
    bool positive_at_origin = false;
    bool sign_alternation_ok = false;
    std::vector<int> critical_points_per_zone;
    bool critical_points_ok = false;
    bool first_zone_decreasing = false;
    bool extremal_chain_ok = false;
    /// The strict chain M_0 > M_1 > ... is only demanded for odd f.
    bool extremal_chain_full = false;
    double origin_slope = 0.0;
    bool origin_slope_ok = false;
    /// f(u)/u > 0 held on every sample; when it fails the shape checks
    /// downgrade to warnings.
    bool sign_condition = true;
    std::vector<std::string> warnings;

    bool passed() const noexcept;
};

QualitativeReport validate_profile(const RadialProfile& prof);

struct AuxiliaryZ {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> zeros;
    int zero_count = 0;
};

/// z = t v' + 2/(p-1) v on the profile grid together with its zeros in (0, 1).
/// Only defined for power nonlinearities.
AuxiliaryZ auxiliary_z(const RadialProfile& prof);

/// Weighted L2 norm of the equation residual, -(t^{M-1} v')' - c t^{M-1} f(v)
/// for Emden-variable profiles and -(r^{N-1} u')' - r^{N-1+alpha} f(u) for
/// physical ones, with the outer derivative taken by central differences on
/// n uniform points.
double profile_residual(const RadialProfile& prof, int n);

} // namespace henon::radial
