#include "henon/radial_ode.hpp"

#include "henon/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace henon::radial {

namespace {

// Geometric sample grid on [t_min, 1] with the origin prepended.
std::vector<double> liouville_grid(double t_min, int points)
{
    require(points >= 3, "profile grid needs at least 3 points");
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(points));
    g.push_back(0.0);
    const int n = points - 1;
    const double x_top = -std::log(t_min);
    for (int i = 0; i < n; ++i) {
        const double x = x_top * (1.0 - static_cast<double>(i) / (n - 1));
        g.push_back(i == n - 1 ? 1.0 : std::exp(-x));
    }
    return g;
}

void sample(RadialProfile& prof, int points)
{
    const Trajectory& src = *prof.source;
    // smallest point actually resolved by the integrator, in the profile variable
    const double s_min = src.t_start() / prof.time_scale;
    const double x_min = std::pow(s_min, 1.0 / prof.radius_power);
    prof.grid = liouville_grid(std::min(x_min, 0.5), points);
    prof.values.resize(prof.grid.size());
    prof.derivative.resize(prof.grid.size());
    for (std::size_t i = 0; i < prof.grid.size(); ++i) {
        auto [v, dv] = prof.evaluate(prof.grid[i]);
        prof.values[i] = v;
        prof.derivative[i] = dv;
    }
}

int zeros_up_to(const Trajectory& traj, double t)
{
    const auto& z = traj.zeros();
    return static_cast<int>(std::upper_bound(z.begin(), z.end(), t) - z.begin());
}

} // namespace

std::pair<double, double> RadialProfile::evaluate(double x) const
{
    require(source != nullptr, "profile has no underlying solution");
    require(x >= 0.0 && x <= 1.0 + 1e-12, "profile evaluated outside [0, 1]");
    x = std::min(x, 1.0);
    const double xp = radius_power == 1.0 ? x : std::pow(x, radius_power);
    const double s = std::min(time_scale * xp, source->t_end());
    const auto [V, dV] = source->state(s);
    const double chain =
        radius_power == 1.0 ? 1.0 : radius_power * std::pow(x, radius_power - 1.0);
    return {amplitude * V, amplitude * time_scale * chain * dV};
}

double critical_exponent(double M)
{
    if (M <= 2.0) return std::numeric_limits<double>::infinity();
    return (M + 2.0) / (M - 2.0);
}

RadialProfile solve_nodal_power(double M, double p, int m, const ProfileOptions& opts)
{
    require(m >= 1, "solve_nodal_power: m must be >= 1");
    require(p > 1.0 && std::isfinite(p), "solve_nodal_power: p must be > 1");
    require(M >= 2.0, "solve_nodal_power: M must be >= 2");

    IvpOptions ivp = opts.ivp;
    ivp.stop_after_zeros = m;
    const Nonlinearity nl = Nonlinearity::power(p);
    auto traj = std::make_shared<const Trajectory>(
        integrate_emden_ivp(M, nl, 1.0, 1.0, opts.t_max, ivp.zero_tol, ivp));

    const auto& z = traj->zeros();
    if (static_cast<int>(z.size()) < m) {
        throw SolverError("solve_nodal_power: only " + std::to_string(z.size()) +
                          " zeros found before t = " + std::to_string(traj->t_end()) +
                          " (M = " + std::to_string(M) + ", p = " + std::to_string(p) +
                          "); p may be at or beyond the critical range");
    }
    const double T = z[static_cast<std::size_t>(m - 1)];

    RadialProfile prof;
    prof.variable = Variable::EmdenVariable_t;
    prof.M = M;
    prof.N = 0;
    prof.alpha = 0.0;
    prof.nonlinearity = nl;
    prof.coupling = 1.0;
    prof.nodal_zones = m;
    prof.supercritical = M > 2.0 && p >= critical_exponent(M);
    prof.rtol = ivp.rtol;
    prof.atol = ivp.atol;
    prof.zero_tol = ivp.zero_tol;
    prof.source = traj;
    prof.amplitude = std::pow(T, 2.0 / (p - 1.0));
    prof.time_scale = T;
    prof.radius_power = 1.0;

    for (int i = 0; i < m - 1; ++i) prof.zeros.push_back(z[static_cast<std::size_t>(i)] / T);
    prof.zeros.push_back(1.0);

    prof.extremal_values.push_back(prof.amplitude);
    for (double s : traj->critical_points()) {
        if (s >= T) break;
        prof.critical_points.push_back(s / T);
        prof.extremal_values.push_back(prof.amplitude * std::abs(traj->value(s)));
    }
    sample(prof, opts.grid_points);
    return prof;
}

std::pair<double, double> find_shooting_bracket(double M, const Nonlinearity& nl, double c,
                                                int m, const ShootingOptions& opts)
{
    require(m >= 1, "find_shooting_bracket: m must be >= 1");
    auto reaches = [&](double d) {
        IvpOptions ivp = opts.profile.ivp;
        ivp.stop_after_zeros = m;
        const Trajectory tr = integrate_emden_ivp(M, nl, c, d, 1.0, ivp.zero_tol, ivp);
        return zeros_up_to(tr, 1.0) >= m;
    };
    const double limit = std::ldexp(1.0, 60);
    double d = 1.0;
    if (!reaches(d)) {
        while (d < limit) {
            const double next = 2.0 * d;
            if (reaches(next)) return {d, next};
            d = next;
        }
    } else {
        while (d > 1.0 / limit) {
            const double next = 0.5 * d;
            if (!reaches(next)) return {next, d};
            d = next;
        }
    }
    throw SolverError("find_shooting_bracket: no v(0) in [2^-60, 2^60] straddles " +
                      std::to_string(m - 1) + " interior zeros");
}

RadialProfile solve_nodal_shooting(double M, const Nonlinearity& nl, double c, int m,
                                   std::pair<double, double> bracket,
                                   const ShootingOptions& opts)
{
    require(m >= 1, "solve_nodal_shooting: m must be >= 1");
    auto [lo, hi] = bracket;
    require(lo > 0.0 && hi > 0.0, "solve_nodal_shooting: bracket must be positive");
    require(lo != hi, "solve_nodal_shooting: degenerate bracket");
    if (lo > hi) std::swap(lo, hi);

    IvpOptions ivp = opts.profile.ivp;
    auto shoot = [&](double d) {
        return integrate_emden_ivp(M, nl, c, d, 1.0, ivp.zero_tol, ivp);
    };
    auto count = [&](double d) { return zeros_up_to(shoot(d), 1.0); };

    int n_lo = count(lo);
    int n_hi = count(hi);
    const bool p_lo = n_lo >= m;
    const bool p_hi = n_hi >= m;
    if (p_lo == p_hi) {
        throw PreconditionError("solve_nodal_shooting: bracket [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "] does not straddle " +
                                std::to_string(m - 1) + " interior zeros (counts " +
                                std::to_string(n_lo) + ", " + std::to_string(n_hi) + ")");
    }
    const bool increasing = p_hi;
    for (int it = 0; it < opts.max_bisections; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const int n_mid = count(mid);
        const bool monotone = increasing ? (n_lo <= n_mid && n_mid <= n_hi)
                                         : (n_hi <= n_mid && n_mid <= n_lo);
        if (!monotone) {
            throw SolverError("solve_nodal_shooting: zero count is not monotone in v(0) (" +
                              std::to_string(n_lo) + ", " + std::to_string(n_mid) + ", " +
                              std::to_string(n_hi) + " at v(0) = " + std::to_string(lo) + ", " +
                              std::to_string(mid) + ", " + std::to_string(hi) + ")");
        }
        if ((n_mid >= m) == p_lo) {
            lo = mid;
            n_lo = n_mid;
        } else {
            hi = mid;
            n_hi = n_mid;
        }
    }

    // The side with m - 1 interior zeros has its m-th zero just past t = 1.
    const double d = p_lo ? hi : lo;
    auto traj = std::make_shared<const Trajectory>(shoot(d));
    const int interior = zeros_up_to(*traj, 1.0);
    const double v1 = traj->value(1.0);
    if (interior != m - 1 || std::abs(v1) > opts.boundary_tol * std::abs(d)) {
        throw SolverError("solve_nodal_shooting: final shot has " + std::to_string(interior) +
                          " interior zeros and |v(1)| = " + std::to_string(std::abs(v1)));
    }

    RadialProfile prof;
    prof.variable = Variable::EmdenVariable_t;
    prof.M = M;
    prof.nonlinearity = nl;
    prof.coupling = c;
    prof.nodal_zones = m;
    prof.supercritical = nl.is_power() && M > 2.0 && nl.exponent() >= critical_exponent(M);
    prof.rtol = ivp.rtol;
    prof.atol = ivp.atol;
    prof.zero_tol = ivp.zero_tol;
    prof.source = traj;
    prof.amplitude = 1.0;
    prof.time_scale = 1.0;
    prof.radius_power = 1.0;
    prof.zeros = traj->zeros();
    prof.zeros.push_back(1.0);
    prof.extremal_values.push_back(d);
    for (double s : traj->critical_points()) {
        if (s >= 1.0) break;
        prof.critical_points.push_back(s);
        prof.extremal_values.push_back(std::abs(traj->value(s)));
    }
    sample(prof, opts.profile.grid_points);
    return prof;
}

RadialProfile henon_profile(int N, double alpha, double p, int m, const ProfileOptions& opts)
{
    const auto map = dimension::generalized_dimension(N, alpha);
    RadialProfile prof = solve_nodal_power(map.M, p, m, opts);

    // u(r) = ((2+alpha)/2)^{2/(p-1)} v(r^{(2+alpha)/2})
    const double k = std::pow(map.exponent, 2.0 / (p - 1.0));
    auto to_r = [&](double t) {
        return dimension::map_radius(t, map, dimension::RadiusDirection::EmdenToPhysical);
    };

    prof.variable = Variable::PhysicalVariable_r;
    prof.N = N;
    prof.alpha = alpha;
    prof.coupling = map.c;
    prof.amplitude *= k;
    prof.radius_power = map.exponent;
    for (double& z : prof.zeros) z = to_r(z);
    prof.zeros.back() = 1.0;
    for (double& s : prof.critical_points) s = to_r(s);
    for (double& e : prof.extremal_values) e *= k;
    for (std::size_t i = 0; i < prof.grid.size(); ++i) {
        prof.grid[i] = to_r(prof.grid[i]);
        auto [u, du] = prof.evaluate(prof.grid[i]);
        prof.values[i] = u;
        prof.derivative[i] = du;
    }
    return prof;
}

bool QualitativeReport::passed() const noexcept
{
    const bool base = zero_count_ok && boundary_zero_ok && positive_at_origin &&
                      sign_alternation_ok && origin_slope_ok;
    if (!sign_condition) return base;
    return base && critical_points_ok && first_zone_decreasing && extremal_chain_ok;
}

QualitativeReport validate_profile(const RadialProfile& prof)
{
    QualitativeReport rep;
    rep.declared_zones = prof.nodal_zones;
    rep.zeros_found = static_cast<int>(prof.zeros.size());
    rep.zero_count_ok = rep.zeros_found == prof.nodal_zones && !prof.zeros.empty() &&
                        prof.zeros.back() == 1.0 &&
                        std::is_sorted(prof.zeros.begin(), prof.zeros.end());

    const double top = prof.values.empty() ? 0.0 : std::abs(prof.values.front());
    const double scale = std::max(1.0, top);

    rep.positive_at_origin = !prof.values.empty() && prof.grid.front() == 0.0 &&
                             prof.values.front() > 0.0;
    rep.boundary_zero_ok = true;
    if (prof.source) {
        for (double z : prof.zeros)
            if (std::abs(prof.evaluate(z).first) > 1e-8 * scale) rep.boundary_zero_ok = false;
    } else if (!prof.values.empty()) {
        rep.boundary_zero_ok = std::abs(prof.values.back()) <= 1e-8 * scale;
    }

    auto zone_of = [&](double x) {
        return static_cast<int>(std::lower_bound(prof.zeros.begin(), prof.zeros.end(), x) -
                                prof.zeros.begin());
    };
    auto near_zero = [&](double x) {
        for (double z : prof.zeros)
            if (std::abs(x - z) <= 1e-9 * std::max(z, 1e-300)) return true;
        return false;
    };

    rep.sign_alternation_ok = true;
    rep.sign_condition = true;
    for (std::size_t i = 0; i < prof.grid.size(); ++i) {
        const double x = prof.grid[i];
        const double v = prof.values[i];
        if (v != 0.0) {
            const double fv = prof.nonlinearity(v);
            if (!(fv / v > 0.0)) rep.sign_condition = false;
        }
        if (near_zero(x) || std::abs(v) <= 1e-12 * scale) continue;
        const int zone = zone_of(x);
        const bool positive = zone % 2 == 0;
        if ((v > 0.0) != positive) rep.sign_alternation_ok = false;
    }

    const int zones = std::max(prof.nodal_zones, 0);
    rep.critical_points_per_zone.assign(static_cast<std::size_t>(zones), 0);
    for (double s : prof.critical_points) {
        const int zone = zone_of(s);
        if (zone < zones) ++rep.critical_points_per_zone[static_cast<std::size_t>(zone)];
    }
    rep.critical_points_ok = true;
    for (int k = 0; k < zones; ++k) {
        const int want = k == 0 ? 0 : 1;
        if (rep.critical_points_per_zone[static_cast<std::size_t>(k)] != want)
            rep.critical_points_ok = false;
    }

    rep.first_zone_decreasing = true;
    const double t1 = prof.zeros.empty() ? 1.0 : prof.zeros.front();
    for (std::size_t i = 1; i < prof.grid.size() && prof.grid[i] < t1; ++i) {
        if (!(prof.derivative[i] < 0.0) || !(prof.values[i] < prof.values[i - 1]))
            rep.first_zone_decreasing = false;
    }

    const auto& ex = prof.extremal_values;
    rep.extremal_chain_full = prof.nonlinearity.odd();
    rep.extremal_chain_ok = static_cast<int>(ex.size()) == zones;
    const std::size_t stride = rep.extremal_chain_full ? 1 : 2;
    for (std::size_t i = 0; i + stride < ex.size(); ++i)
        if (!(ex[i] > ex[i + stride])) rep.extremal_chain_ok = false;

    rep.origin_slope = prof.derivative.empty() ? 0.0 : prof.derivative.front();
    rep.origin_slope_ok = std::abs(rep.origin_slope) <= 1e-8 * scale;

    if (!rep.sign_condition) {
        rep.warnings.emplace_back("f(u)/u > 0 fails on the profile; shape checks are advisory");
        if (!rep.critical_points_ok)
            rep.warnings.emplace_back("a nodal zone does not have exactly one critical point");
        if (!rep.first_zone_decreasing)
            rep.warnings.emplace_back("first nodal zone is not strictly decreasing");
        if (!rep.extremal_chain_ok) rep.warnings.emplace_back("extremal values are not ordered");
    }
    if (prof.supercritical)
        rep.warnings.emplace_back("p is at or above the critical exponent (M+2)/(M-2)");
    return rep;
}

AuxiliaryZ auxiliary_z(const RadialProfile& prof)
{
    require(prof.nonlinearity.is_power(), "auxiliary_z: needs a power nonlinearity");
    require(prof.source != nullptr, "auxiliary_z: profile has no underlying solution");
    const double p = prof.nonlinearity.exponent();
    const double q = 2.0 / (p - 1.0);

    // z lives in the Emden variable t; a physical profile is only a positive
    // multiple of v(r^beta), which leaves the zero set unchanged.
    const Trajectory& src = *prof.source;
    const double T = prof.time_scale;
    auto z_at = [&](double t) {
        const auto [V, dV] = src.state(std::min(T * t, src.t_end()));
        return T * t * dV + q * V;
    };
    const double emden_amp =
        prof.variable == Variable::PhysicalVariable_r
            ? prof.amplitude / std::pow(prof.radius_power, 2.0 / (p - 1.0))
            : prof.amplitude;

    AuxiliaryZ out;
    out.grid.reserve(prof.grid.size());
    for (double x : prof.grid)
        out.grid.push_back(prof.radius_power == 1.0 ? x : std::pow(x, prof.radius_power));
    for (double t : out.grid) out.values.push_back(emden_amp * z_at(t));

    for (std::size_t i = 0; i + 1 < out.grid.size(); ++i) {
        const double a = out.grid[i], b = out.grid[i + 1];
        const double za = out.values[i], zb = out.values[i + 1];
        if (b >= 1.0 && zb != 0.0 && (za < 0) == (zb < 0)) continue;
        if (za == 0.0 && a > 0.0) {
            out.zeros.push_back(a);
        } else if (za != 0.0 && zb != 0.0 && (za < 0) != (zb < 0)) {
            const double root =
                refine_root(z_at, a, b, za / emden_amp, zb / emden_amp, 1e-14 * std::abs(q));
            if (root < 1.0) out.zeros.push_back(root);
        }
    }
    out.zero_count = static_cast<int>(out.zeros.size());
    return out;
}

double profile_residual(const RadialProfile& prof, int n)
{
    require(n >= 4, "profile_residual: need at least 4 points");
    const bool physical = prof.variable == Variable::PhysicalVariable_r;
    const double D = physical ? static_cast<double>(prof.N) : prof.M;
    const double h = 1.0 / n;
    auto flux = [&](double x) { return std::pow(x, D - 1.0) * prof.evaluate(x).second; };
    double acc = 0.0;
    for (int k = 1; k < n; ++k) {
        const double x = k * h;
        const double w = std::pow(x, D - 1.0);
        const double weight = physical ? std::pow(x, prof.alpha) : prof.coupling;
        const double v = prof.evaluate(x).first;
        const double r = -(flux(x + 0.5 * h) - flux(x - 0.5 * h)) / h -
                         w * weight * prof.nonlinearity(v);
        acc += h * w * r * r;
    }
    return std::sqrt(acc);
}

} // namespace henon::radial
