#pragma once

#include "henon/nonlinearity.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace henon::radial {

struct IvpOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    /// Residual |v| accepted at a refined zero.
    double zero_tol = 1e-12;
    long max_steps = 5'000'000;
    /// Stop as soon as this many zeros have been located.
    std::optional<int> stop_after_zeros;
};

/// Dense solution of  -(t^{M-1} v')' = c t^{M-1} f(v),  v(0) = v0, v'(0) = 0.
///
/// The first stretch [0, t_start] is covered by the regular power series at
/// the origin; past it the solution is a chain of Dormand-Prince 5(4) steps
/// with their quartic continuous extension.
class Trajectory {
public:
    double M() const noexcept { return M_; }
    double coupling() const noexcept { return c_; }
    double initial_value() const noexcept { return v0_; }
    const Nonlinearity& nonlinearity() const noexcept { return nl_; }
    const IvpOptions& options() const noexcept { return opts_; }

    double t_start() const noexcept { return t_start_; }
    double t_end() const noexcept { return nodes_t_.back(); }

    /// (v, v') at t in [0, t_end].
    std::pair<double, double> state(double t) const;
    double value(double t) const { return state(t).first; }
    double slope(double t) const { return state(t).second; }

    /// Second derivative at the origin, -c f(v0) / M.
    double curvature_at_origin() const noexcept { return 2.0 * a2_; }

    /// Refined sign changes of v and of v' in (0, t_end], increasing.
    const std::vector<double>& zeros() const noexcept { return zeros_; }
    const std::vector<double>& critical_points() const noexcept { return critical_; }

    /// Step endpoints (the first is t_start) with the accepted states.
    std::span<const double> node_times() const noexcept { return nodes_t_; }
    std::span<const double> node_values() const noexcept { return nodes_v_; }
    std::span<const double> node_slopes() const noexcept { return nodes_dv_; }

    long accepted_steps() const noexcept { return static_cast<long>(segments_.size()); }
    long rejected_steps() const noexcept { return rejected_; }

private:
    friend Trajectory integrate_emden_ivp(double, const Nonlinearity&, double, double,
                                          double, double, IvpOptions);

    struct Segment {
        double t0 = 0.0;
        double h = 0.0;
        std::array<double, 5> v{};
        std::array<double, 5> dv{};
    };

    Trajectory(double M, Nonlinearity nl, double c, double v0, IvpOptions opts)
        : M_(M), c_(c), v0_(v0), nl_(std::move(nl)), opts_(opts) {}

    double M_;
    double c_;
    double v0_;
    Nonlinearity nl_;
    IvpOptions opts_;

    double t_start_ = 0.0;
    double a2_ = 0.0;
    double a4_ = 0.0;
    std::vector<Segment> segments_;
    std::vector<double> nodes_t_;
    std::vector<double> nodes_v_;
    std::vector<double> nodes_dv_;
    std::vector<double> zeros_;
    std::vector<double> critical_;
    long rejected_ = 0;
};

/// Integrate the radial initial value problem from the origin up to t_max
/// (or until opts.stop_after_zeros zeros have been found). Every sign change
/// of v is refined to |v| < tol.
///
/// Throws PreconditionError for v0 == 0, tol <= 0 or M < 2, and SolverError
/// when the step size underflows or f stops being finite.
Trajectory integrate_emden_ivp(double M, const Nonlinearity& nl, double c, double v0,
                               double t_max, double tol, IvpOptions opts = {});

/// Largest violation, over the step nodes, of the energy identity
///   F(v(0)) - F(v(t)) - v'(t)^2 / 2 = (M-1) \int_0^t v'(s)^2 / s ds,
/// with F the primitive of c f, relative to F(v(0)).
double energy_identity_defect(const Trajectory& traj);

/// Refine a root of g in [a, b] with g(a) g(b) < 0 (Illinois false position
/// safeguarded by bisection). Stops when |g| <= ftol or the bracket collapses.
template <class G>
double refine_root(G&& g, double a, double b, double ga, double gb, double ftol)
{
    for (int it = 0; it < 200; ++it) {
        double x = (a * gb - b * ga) / (gb - ga);
        if (!(x > a && x < b)) x = 0.5 * (a + b);
        // fall back to bisection if the false-position point hugs an endpoint
        const double w = b - a;
        if (x - a < 1e-3 * w || b - x < 1e-3 * w) x = 0.5 * (a + b);
        const double gx = g(x);
        if (std::abs(gx) <= ftol || w <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x))
            return x;
        if ((gx < 0) == (ga < 0)) {
            a = x;
            ga = gx;
            gb *= 0.5;
        } else {
            b = x;
            gb = gx;
            ga *= 0.5;
        }
    }
    return 0.5 * (a + b);
}

} // namespace henon::radial
