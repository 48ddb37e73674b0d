#include "henon/emden_ivp.hpp"

#include "henon/error.hpp"

#include <algorithm>
#include <string>

namespace henon::radial {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer-Norsett-Wanner, dopri5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct State {
    double v;
    double dv;
};

double eval_dense(const std::array<double, 5>& rc, double theta)
{
    const double theta1 = 1.0 - theta;
    return rc[0] + theta * (rc[1] + theta1 * (rc[2] + theta * (rc[3] + theta1 * rc[4])));
}

// Gauss-Legendre nodes/weights on [-1, 1], five points.
constexpr std::array<double, 5> gl_x{-0.9061798459386640, -0.5384693101056831, 0.0,
                                     0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> gl_w{0.2369268850561891, 0.4786286704993665,
                                     0.5688888888888889, 0.4786286704993665,
                                     0.2369268850561891};

template <class F>
double gauss(F&& f, double a, double b)
{
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < gl_x.size(); ++i) s += gl_w[i] * f(mid + half * gl_x[i]);
    return s * half;
}

} // namespace

std::pair<double, double> Trajectory::state(double t) const
{
    if (t <= t_start_) {
        const double t2 = t * t;
        return {v0_ + a2_ * t2 + a4_ * t2 * t2, 2.0 * a2_ * t + 4.0 * a4_ * t2 * t};
    }
    if (t > t_end()) {
        throw PreconditionError("trajectory evaluated at t = " + std::to_string(t) +
                                " beyond its end " + std::to_string(t_end()));
    }
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double x, const Segment& s) { return x < s.t0; });
    const Segment& seg = *std::prev(it);
    const double theta = std::clamp((t - seg.t0) / seg.h, 0.0, 1.0);
    return {eval_dense(seg.v, theta), eval_dense(seg.dv, theta)};
}

Trajectory integrate_emden_ivp(double M, const Nonlinearity& nl, double c, double v0,
                               double t_max, double tol, IvpOptions opts)
{
    require(M >= 2.0 && std::isfinite(M), "integrate_emden_ivp: M must be >= 2");
    require(v0 != 0.0 && std::isfinite(v0), "integrate_emden_ivp: v0 must be nonzero");
    require(tol > 0.0, "integrate_emden_ivp: tol must be positive");
    require(t_max > 0.0, "integrate_emden_ivp: t_max must be positive");
    require(c > 0.0 && std::isfinite(c), "integrate_emden_ivp: coupling must be positive");
    opts.zero_tol = tol;

    Trajectory traj(M, nl, c, v0, opts);

    const double f0 = nl(v0);
    const double fp0 = nl.derivative(v0);
    if (!std::isfinite(f0) || !std::isfinite(fp0))
        throw SolverError("nonlinearity is not finite at v0");
    traj.a2_ = -c * f0 / (2.0 * M);
    traj.a4_ = c * c * f0 * fp0 / (8.0 * M * (M + 2.0));

    // The t^6 term of the series must stay below the integration tolerance.
    const double scale = std::abs(c * fp0) + std::abs(c * f0 / v0) + 1e-300;
    traj.t_start_ = std::min({1e-3 / std::sqrt(scale),
                              0.1 * std::pow(opts.rtol, 1.0 / 6.0) / std::sqrt(scale),
                              0.5 * t_max});

    auto rhs = [&](double t, const State& y) -> State {
        const double fv = nl(y.v);
        if (!std::isfinite(fv))
            throw SolverError("nonlinearity evaluated to a non-finite value at v = " +
                              std::to_string(y.v));
        return {y.dv, -(M - 1.0) / t * y.dv - c * fv};
    };

    double t = traj.t_start_;
    State y{traj.state(t).first, traj.state(t).second};
    traj.nodes_t_.push_back(t);
    traj.nodes_v_.push_back(y.v);
    traj.nodes_dv_.push_back(y.dv);

    double h = std::min(traj.t_start_, t_max - t);
    State k1 = rhs(t, y);
    bool done = t >= t_max;
    long steps = 0;

    while (!done) {
        if (++steps > opts.max_steps)
            throw SolverError("integrate_emden_ivp: step budget exhausted at t = " +
                              std::to_string(t));
        if (t + h > t_max) h = t_max - t;
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * t)
            throw SolverError("integrate_emden_ivp: step size underflow at t = " +
                              std::to_string(t));

        auto add = [&](std::initializer_list<std::pair<double, const State*>> terms) {
            State s = y;
            for (auto [a, k] : terms) {
                s.v += h * a * k->v;
                s.dv += h * a * k->dv;
            }
            return s;
        };
        const State k2 = rhs(t + c2 * h, add({{a21, &k1}}));
        const State k3 = rhs(t + c3 * h, add({{a31, &k1}, {a32, &k2}}));
        const State k4 = rhs(t + c4 * h, add({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State k5 =
            rhs(t + c5 * h, add({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const State k6 = rhs(t + h, add({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4},
                                         {a65, &k5}}));
        const State y1 = add({{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
        const State k7 = rhs(t + h, y1);

        const double ev = h * (e1 * k1.v + e3 * k3.v + e4 * k4.v + e5 * k5.v + e6 * k6.v +
                               e7 * k7.v);
        const double edv = h * (e1 * k1.dv + e3 * k3.dv + e4 * k4.dv + e5 * k5.dv +
                                e6 * k6.dv + e7 * k7.dv);
        const double sv = opts.atol + opts.rtol * std::max(std::abs(y.v), std::abs(y1.v));
        const double sdv = opts.atol + opts.rtol * std::max(std::abs(y.dv), std::abs(y1.dv));
        const double err = std::sqrt(0.5 * ((ev / sv) * (ev / sv) + (edv / sdv) * (edv / sdv)));
        if (!std::isfinite(err)) throw SolverError("integrate_emden_ivp: non-finite error estimate");

        const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        if (err > 1.0) {
            ++traj.rejected_;
            h *= std::min(1.0, fac);
            continue;
        }

        Trajectory::Segment seg;
        seg.t0 = t;
        seg.h = h;
        auto fill = [&](std::array<double, 5>& rc, double y0c, double y1c, double f1, double f7,
                        double f3, double f4, double f5, double f6) {
            rc[0] = y0c;
            rc[1] = y1c - y0c;
            rc[2] = h * f1 - rc[1];
            rc[3] = rc[1] - h * f7 - rc[2];
            rc[4] = h * (d1 * f1 + d3 * f3 + d4 * f4 + d5 * f5 + d6 * f6 + d7 * f7);
        };
        fill(seg.v, y.v, y1.v, k1.v, k7.v, k3.v, k4.v, k5.v, k6.v);
        fill(seg.dv, y.dv, y1.dv, k1.dv, k7.dv, k3.dv, k4.dv, k5.dv, k6.dv);
        traj.segments_.push_back(seg);

        const double t1 = t + h;
        auto dense_v = [&](double s) { return eval_dense(seg.v, (s - seg.t0) / seg.h); };
        auto dense_dv = [&](double s) { return eval_dense(seg.dv, (s - seg.t0) / seg.h); };

        if (y1.v == 0.0) {
            traj.zeros_.push_back(t1);
        } else if ((y.v < 0) != (y1.v < 0) && y.v != 0.0) {
            traj.zeros_.push_back(refine_root(dense_v, t, t1, y.v, y1.v, opts.zero_tol));
        }
        if (y.dv != 0.0 && y1.dv != 0.0 && (y.dv < 0) != (y1.dv < 0)) {
            // v' scales like v / t; refine it relative to its own size.
            const double ftol = 1e-14 * (std::abs(y.dv) + std::abs(y1.dv));
            traj.critical_.push_back(refine_root(dense_dv, t, t1, y.dv, y1.dv, ftol));
        }

        t = t1;
        y = y1;
        k1 = k7;
        traj.nodes_t_.push_back(t);
        traj.nodes_v_.push_back(y.v);
        traj.nodes_dv_.push_back(y.dv);

        if (opts.stop_after_zeros &&
            static_cast<int>(traj.zeros_.size()) >= *opts.stop_after_zeros)
            done = true;
        if (t >= t_max) done = true;
        h *= fac;
    }
    return traj;
}

double energy_identity_defect(const Trajectory& traj)
{
    const Nonlinearity& nl = traj.nonlinearity();
    const double c = traj.coupling();
    const double M = traj.M();

    auto primitive = [&](double u) {
        if (nl.is_power()) {
            const double p = nl.exponent();
            return c * std::pow(std::abs(u), p + 1.0) / (p + 1.0);
        }
        double s = 0.0;
        constexpr int panels = 16;
        for (int k = 0; k < panels; ++k)
            s += gauss([&](double x) { return nl(x); }, u * k / panels, u * (k + 1) / panels);
        return c * s;
    };

    auto integrand = [&](double s) {
        const double d = traj.slope(s);
        return d * d / s;
    };

    const double F0 = primitive(traj.initial_value());
    const auto times = traj.node_times();
    const auto values = traj.node_values();
    const auto slopes = traj.node_slopes();

    double dissipated = gauss(integrand, 0.0, times[0]);
    double worst = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (k > 0) dissipated += gauss(integrand, times[k - 1], times[k]);
        const double lhs = F0 - primitive(values[k]) - 0.5 * slopes[k] * slopes[k];
        worst = std::max(worst, std::abs(lhs - (M - 1.0) * dissipated));
    }
    return worst / std::max(std::abs(F0), 1e-300);
}

} // namespace henon::radial
