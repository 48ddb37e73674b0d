#pragma once

#include "henon/radial_ode.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace henon::spectral {

enum class Kind { Standard, Singular };

/// Bounded potential a(r) on (0, 1].
class Potential {
public:
    static Potential zero();
    static Potential constant(double value);
    static Potential callable(std::function<double(double)> a, std::string label = "callable");
    /// Piecewise linear through (r_i, a_i); constant beyond the first and last sample.
    static Potential sampled(std::vector<double> r, std::vector<double> a);

    double operator()(double r) const;
    bool is_zero() const noexcept { return zero_; }
    const std::string& label() const noexcept { return label_; }

private:
    std::function<double(double)> fn_;
    std::string label_;
    bool zero_ = false;
};

/// -(r^{M-1} phi')' - r^{M-1} a phi = nu w(r) phi on (0, 1), phi(1) = 0, with
/// w = r^{M-1} (Standard) or r^{M-3} (Singular).
struct WeightedSLProblem {
    double M = 2.0;
    Potential a = Potential::zero();
    Kind kind = Kind::Singular;
};

struct SpectralConfig {
    /// Intervals of the fine grid; Richardson partner uses grid / 2.
    int grid = 4096;
    /// Right end of the half line in x = -ln r; chosen automatically if empty.
    std::optional<double> x_max;
    double x_max_cap = 60.0;
    /// Target value of sqrt(threshold - nu) * (X_max - x_potential).
    double decay_target = 30.0;
    /// Eigenvalues closer than this to the threshold are not reported.
    double margin = 1e-6;
    /// Accepted relative fine/coarse disagreement.
    double tol = 1e-3;
    double node_tol = 1e-8;
    /// Smallest grading q of the standard grid r_i = (i/n)^q; raised so the
    /// inner edge of the potential falls near node n/8.
    double standard_grading = 2.0;
    bool auto_grading = true;
    /// Grid doublings the standard solve may take when the fine/coarse check fails.
    int refinements = 3;
    bool eigenfunctions = true;
};

/// Discrete bilinear structure behind a family of eigenvectors: off-diagonal
/// couplings s_k between nodes k and k+1 and lumped masses.
struct DiscreteForm {
    std::vector<double> coupling;
    std::vector<double> mass;
};

struct EigenPair {
    /// Richardson-extrapolated eigenvalue and its error estimate.
    double value = 0.0;
    double error_bar = 0.0;
    /// Raw eigenvalue of the fine-grid matrix.
    double grid_value = 0.0;

    /// Eigenfunction on increasing r, endpoints included, unit weighted norm.
    std::vector<double> r;
    std::vector<double> psi;

    int interior_nodes = 0;
    /// Fitted and predicted exponent of psi ~ r^theta at the origin (Singular only).
    double decay_exponent = 0.0;
    double theta_analytic = 0.0;
    double boundary_slope = 0.0;

    /// Nodal vector of the fine-grid problem (u in x for Singular, psi in r
    /// for Standard), boundary nodes included, and the form it belongs to.
    std::vector<double> nodal;
    std::shared_ptr<const DiscreteForm> form;
};

struct Spectrum {
    Kind kind = Kind::Singular;
    double M = 2.0;
    std::vector<EigenPair> pairs;
    /// ((M-2)/2)^2 for Singular, +inf for Standard.
    double threshold = 0.0;
    /// No eigenvalue other than those in `pairs` lies below this level.
    double exhausted_below = 0.0;
    /// An eigenvalue was seen within the margin of the threshold.
    bool near_threshold = false;
    double x_max = 0.0;
    /// Largest x = -ln r where |r^2 a(r)| exceeds 1e-3 of its maximum.
    /// Sampled on the singular grid, on [0, x_max_cap] for the standard solve.
    double potential_extent = 0.0;
    int grid = 0;
    std::vector<std::string> warnings;

    std::vector<double> values() const;
    int count_below(double level) const;
};

/// Symmetric tridiagonal Schrodinger matrix on the uniform x-grid.
struct LiouvilleGrid {
    double x_max = 0.0;
    double h = 0.0;
    double threshold = 0.0;
    /// Interior nodes x_k = k h, k = 1..n-1.
    std::vector<double> x;
    std::vector<double> potential;  ///< V(x_k) = ((M-2)/2)^2 - e^{-2x} a(e^{-x})
    std::vector<double> diag;
    std::vector<double> off;
};

LiouvilleGrid liouville_transform(const WeightedSLProblem& prob, double x_max, int intervals);

Spectrum solve_singular_spectrum(const WeightedSLProblem& prob, int k, const SpectralConfig& cfg = {});
Spectrum solve_standard_spectrum(const WeightedSLProblem& prob, int k, const SpectralConfig& cfg = {});

struct OracleOptions {
    int max_pairs = 16;
    double margin = 1e-6;
    bool eigenfunctions = false;
};

/// Reference solve on a geometric r-grid over [epsilon_cut, 1] by a full
/// tridiagonal eigendecomposition. n <= 4000.
Spectrum dense_oracle_spectrum(const WeightedSLProblem& prob, int n, double epsilon_cut,
                               const OracleOptions& opts = {});

/// Sign changes of the nodal vector (or of psi when there is none).
int count_interior_nodes(const EigenPair& pair, double node_tol = 1e-8);

struct DecayFit {
    double theta_fit = 0.0;
    double theta_analytic = 0.0;
};

/// (2 - M + sqrt((M-2)^2 - 4 nu)) / 2.
double decay_theta(double M, double nu_hat);

/// Least-squares slope of ln|psi| against ln r over r in [r_lo, r_hi].
DecayFit fit_decay_exponent(const EigenPair& pair, double M, std::pair<double, double> window);

/// Window for fit_decay_exponent of pair `index`, past the potential and
/// clear of X_max on the scale of the pair's own decay length.
std::pair<double, double> default_decay_window(const Spectrum& spec, std::size_t index);

/// max over K of |F_{K-1/2} - (nu_i - nu_j) sum_{k >= K} m_k phi_i phi_j|, the
/// discrete flux form of the cross identity between two eigenvectors.
double picone_residual(const EigenPair& pi, const EigenPair& pj, double M);

/// Weighted inner product of two eigenfunctions in the discrete form they share.
double weighted_inner(const EigenPair& pi, const EigenPair& pj);

enum class QuadratureRule {
    /// Same forms as the solvers (lumped mass, potential at nodes).
    Solver,
    /// Exact integrals of the piecewise-linear interpolant in r.
    Exact,
};

/// Q_{a,M}(w) / int weight w^2 for w sampled at increasing r with w(1) = 0.
double rayleigh_quotient(const std::vector<double>& r, const std::vector<double>& w,
                         const WeightedSLProblem& prob, QuadratureRule rule = QuadratureRule::Solver);

/// Exact integrals of a piecewise-linear function, extended by w(r_0) on [0, r_0]
/// when `extend_to_origin` and by zero otherwise.
struct PiecewiseLinear {
    std::vector<double> r;
    std::vector<double> w;
    bool extend_to_origin = false;

    /// int r^s w^2 dr and int r^s w'^2 dr over the support.
    double moment(double s) const;
    double gradient_moment(double s) const;
};

struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    /// rhs - lhs, or the smallest pointwise slack for the radial lemma.
    double slack = 0.0;
    bool holds = false;
};

/// ((M-2)/2)^2 int r^{M-3} w^2 <= int r^{M-1} w'^2, M > 2.
InequalityCheck hardy_check(const PiecewiseLinear& w, double M, double tol = 1e-9);
/// int r^{M-1} w^2 <= 1/(M-1) int r^{M-1} w'^2.
InequalityCheck poincare_check(const PiecewiseLinear& w, double M, double tol = 1e-9);
/// |w(t)| <= ||w'|| t^{-(M-2)/2} / sqrt(M-2) (|log t|^{1/2} for M = 2) at every node.
InequalityCheck radial_lemma_check(const PiecewiseLinear& w, double M, double tol = 1e-9);

PiecewiseLinear as_piecewise_linear(const EigenPair& pair);

/// Linearized potential of a profile: c f'(v(t)) in the Emden variable,
/// r^alpha f'(u(r)) in the physical one.
Potential linearized_potential(const radial::RadialProfile& prof);

} // namespace henon::spectral
