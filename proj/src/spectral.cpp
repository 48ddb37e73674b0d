#include "henon/spectral.hpp"

#include "henon/error.hpp"
#include "tridiagonal.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace henon::spectral {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double half_gap(double M) { return 0.5 * (M - 2.0); }

// b^{k+1} - a^{k+1} over (k+1), i.e. int_a^b r^k dr, without cancellation.
double power_integral(double a, double b, double k)
{
    if (b <= a) return 0.0;
    const double e = k + 1.0;
    if (a == 0.0) return e > 0.0 ? std::pow(b, e) / e : kInf;
    const double lr = std::log1p((b - a) / a);
    if (e == 0.0) return lr;
    return std::pow(a, e) * std::expm1(e * lr) / e;
}

// Quadratic through three points, derivative at the first.
double end_slope(double x0, double x1, double x2, double y0, double y1, double y2)
{
    return y0 * (2.0 * x0 - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
           y1 * (x0 - x2) / ((x1 - x0) * (x1 - x2)) + y2 * (x0 - x1) / ((x2 - x0) * (x2 - x1));
}

int sign_changes(const std::vector<double>& v, double node_tol)
{
    double top = 0.0;
    for (double x : v) top = std::max(top, std::abs(x));
    const double cut = node_tol * top;
    int changes = 0;
    int last = 0;
    for (double x : v) {
        if (std::abs(x) <= cut) continue;
        const int s = x > 0.0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

struct SymmetricForm {
    std::vector<double> d, e;
    std::vector<double> mass;  // unknowns only
};

void richardson(double fine, double coarse, double tol, EigenPair& pair, const char* who)
{
    pair.grid_value = fine;
    pair.value = (4.0 * fine - coarse) / 3.0;
    pair.error_bar = std::abs(fine - coarse) / 3.0;
    if (std::abs(fine - coarse) > tol * std::max(1.0, std::abs(fine))) {
        throw SolverError(std::string(who) + ": grid too coarse, eigenvalue " +
                          std::to_string(fine) + " moves to " + std::to_string(coarse) +
                          " on the half grid");
    }
}

void check_simple(const std::vector<EigenPair>& pairs)
{
    for (std::size_t i = 1; i < pairs.size(); ++i) {
        const double a = pairs[i - 1].grid_value, b = pairs[i].grid_value;
        if (!(b - a > 64.0 * std::numeric_limits<double>::epsilon() *
                          std::max({1.0, std::abs(a), std::abs(b)})))
            throw SolverError("eigenvalues " + std::to_string(i) + " and " + std::to_string(i + 1) +
                              " are not resolved as distinct");
    }
}

double eigen_at(const std::vector<double>& d, const std::vector<double>& e, int index, double hi)
{
    const auto g = detail::gershgorin(d, e);
    return detail::bisect_eigenvalue(d, e, index, g.first - 1.0, std::min(hi, g.second + 1.0));
}

double x_reference(const LiouvilleGrid& g)
{
    double top = 0.0;
    for (double v : g.potential) top = std::max(top, std::abs(g.threshold - v));
    double x_ref = 0.0;
    if (top == 0.0) return x_ref;
    for (std::size_t k = 0; k < g.x.size(); ++k)
        if (std::abs(g.threshold - g.potential[k]) >= 1e-3 * top) x_ref = g.x[k];
    return x_ref;
}

double auto_x_max(const WeightedSLProblem& prob, int k, const SpectralConfig& cfg)
{
    const double cap = cfg.x_max_cap;
    const LiouvilleGrid g = liouville_transform(prob, cap, std::max(cfg.grid / 2, 64));
    const double level = g.threshold - cfg.margin;
    const int K = detail::sturm_count(g.diag, g.off, level);
    if (K == 0) return cap;
    const double top = eigen_at(g.diag, g.off, std::min(K, k) - 1, level);
    const double kappa = std::sqrt(g.threshold - top);
    return std::min(cap, x_reference(g) + cfg.decay_target / kappa);
}

// Largest x = -ln r with |r^2 a(r)| >= 1e-3 of its maximum, by sampling.
double inner_extent(const Potential& a, double x_cap)
{
    constexpr int samples = 4000;
    std::vector<double> v(samples + 1);
    double top = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double x = x_cap * i / samples;
        v[static_cast<std::size_t>(i)] = std::abs(std::exp(-2.0 * x) * a(std::exp(-x)));
        top = std::max(top, v[static_cast<std::size_t>(i)]);
    }
    double x_in = 0.0;
    for (int i = 0; i <= samples; ++i)
        if (top > 0.0 && v[static_cast<std::size_t>(i)] >= 1e-3 * top) x_in = x_cap * i / samples;
    return x_in;
}

} // namespace

// ---------------------------------------------------------------- Potential

Potential Potential::zero()
{
    Potential p = constant(0.0);
    p.zero_ = true;
    p.label_ = "zero";
    return p;
}

Potential Potential::constant(double value)
{
    require(std::isfinite(value), "constant potential must be finite");
    Potential p;
    p.fn_ = [value](double) { return value; };
    p.label_ = "constant";
    p.zero_ = value == 0.0;
    return p;
}

Potential Potential::callable(std::function<double(double)> a, std::string label)
{
    require(static_cast<bool>(a), "callable potential is empty");
    Potential p;
    p.fn_ = std::move(a);
    p.label_ = std::move(label);
    return p;
}

Potential Potential::sampled(std::vector<double> r, std::vector<double> a)
{
    require(!r.empty() && r.size() == a.size(), "sampled potential: size mismatch");
    require(std::is_sorted(r.begin(), r.end()) &&
                std::adjacent_find(r.begin(), r.end()) == r.end(),
            "sampled potential: abscissae must be strictly increasing");
    Potential p;
    p.label_ = "sampled";
    p.fn_ = [r = std::move(r), a = std::move(a)](double x) {
        if (x <= r.front()) return a.front();
        if (x >= r.back()) return a.back();
        const auto it = std::upper_bound(r.begin(), r.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - r.begin());
        const double s = (x - r[i - 1]) / (r[i] - r[i - 1]);
        return a[i - 1] + s * (a[i] - a[i - 1]);
    };
    return p;
}

double Potential::operator()(double r) const
{
    if (zero_) return 0.0;
    return fn_(r);
}

std::vector<double> Spectrum::values() const
{
    std::vector<double> v;
    v.reserve(pairs.size());
    for (const auto& p : pairs) v.push_back(p.value);
    return v;
}

int Spectrum::count_below(double level) const
{
    int n = 0;
    for (const auto& p : pairs)
        if (p.value < level) ++n;
    return n;
}

// ---------------------------------------------------------------- singular

LiouvilleGrid liouville_transform(const WeightedSLProblem& prob, double x_max, int intervals)
{
    require(prob.kind == Kind::Singular, "liouville_transform: problem must be of singular kind");
    require(prob.M >= 2.0, "liouville_transform: M must be >= 2");
    require(x_max > 0.0 && std::isfinite(x_max), "liouville_transform: X_max must be positive");
    require(intervals >= 4, "liouville_transform: need at least 4 intervals");

    LiouvilleGrid g;
    const double gam = half_gap(prob.M);
    g.threshold = gam * gam;
    g.x_max = x_max;
    g.h = x_max / intervals;
    const double inv_h2 = 1.0 / (g.h * g.h);
    const std::size_t n = static_cast<std::size_t>(intervals - 1);
    g.x.resize(n);
    g.potential.resize(n);
    g.diag.resize(n);
    g.off.assign(n - 1, -inv_h2);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = g.h * static_cast<double>(k + 1);
        const double r = std::exp(-x);
        const double a = prob.a(r);
        if (!std::isfinite(a))
            throw PreconditionError("potential is not finite at r = " + std::to_string(r));
        g.x[k] = x;
        g.potential[k] = g.threshold - r * r * a;
        g.diag[k] = 2.0 * inv_h2 + g.potential[k];
    }
    return g;
}

Spectrum solve_singular_spectrum(const WeightedSLProblem& prob, int k, const SpectralConfig& cfg)
{
    require(prob.kind == Kind::Singular, "solve_singular_spectrum: problem must be of singular kind");
    require(k >= 1, "solve_singular_spectrum: k must be >= 1");
    require(cfg.grid >= 16 && cfg.grid % 2 == 0, "solve_singular_spectrum: grid must be even and >= 16");

    const double X = cfg.x_max ? *cfg.x_max : auto_x_max(prob, k, cfg);
    const LiouvilleGrid fine = liouville_transform(prob, X, cfg.grid);
    const LiouvilleGrid coarse = liouville_transform(prob, X, cfg.grid / 2);

    Spectrum spec;
    spec.kind = Kind::Singular;
    spec.M = prob.M;
    spec.threshold = fine.threshold;
    spec.x_max = X;
    spec.grid = cfg.grid;

    const double level = spec.threshold - cfg.margin;
    const int kf = detail::sturm_count(fine.diag, fine.off, level);
    const int kc = detail::sturm_count(coarse.diag, coarse.off, level);
    if (detail::sturm_count(fine.diag, fine.off, spec.threshold) > kf) {
        spec.near_threshold = true;
        spec.warnings.emplace_back("near-threshold eigenvalue within margin " +
                                   std::to_string(cfg.margin) + ", attainment uncertain");
    }
    if (kf != kc)
        spec.warnings.emplace_back("fine and half grids disagree on the count below the threshold (" +
                                   std::to_string(kf) + " vs " + std::to_string(kc) + ")");
    const int K = std::min({kf, kc, k});

    auto form = std::make_shared<DiscreteForm>();
    const std::size_t n = static_cast<std::size_t>(cfg.grid);
    form->coupling.assign(n, 1.0 / fine.h);
    form->mass.assign(n + 1, fine.h);
    form->mass.front() = form->mass.back() = 0.5 * fine.h;

    const double gam = half_gap(prob.M);
    const double x_ref = x_reference(fine);
    for (int i = 0; i < K; ++i) {
        EigenPair pair;
        const double lf = eigen_at(fine.diag, fine.off, i, level);
        const double lc = eigen_at(coarse.diag, coarse.off, i, level);
        richardson(lf, lc, cfg.tol, pair, "solve_singular_spectrum");
        pair.theta_analytic = decay_theta(prob.M, pair.value);

        if (cfg.eigenfunctions) {
            std::vector<double> y = detail::inverse_iteration(fine.diag, fine.off, lf);
            const double scale = (y[0] < 0.0 ? -1.0 : 1.0) / std::sqrt(fine.h);
            pair.nodal.assign(n + 1, 0.0);
            for (std::size_t j = 0; j < y.size(); ++j) pair.nodal[j + 1] = scale * y[j];
            pair.form = form;

            pair.r.resize(n + 1);
            pair.psi.resize(n + 1);
            for (std::size_t j = 0; j <= n; ++j) {
                const double x = fine.h * static_cast<double>(n - j);
                pair.r[j] = j == n ? 1.0 : std::exp(-x);
                pair.psi[j] = std::exp(gam * x) * pair.nodal[n - j];
            }
            pair.psi.front() = 0.0;
            pair.interior_nodes = count_interior_nodes(pair, cfg.node_tol);
            const double du0 = end_slope(0.0, fine.h, 2.0 * fine.h, pair.nodal[0], pair.nodal[1],
                                         pair.nodal[2]);
            pair.boundary_slope = -du0;
        }
        spec.pairs.push_back(std::move(pair));
    }
    check_simple(spec.pairs);
    spec.exhausted_below = K < k ? level : spec.pairs.back().value;

    spec.potential_extent = x_ref;
    if (cfg.eigenfunctions) {
        for (std::size_t i = 0; i < spec.pairs.size(); ++i) {
            auto& pair = spec.pairs[i];
            try {
                pair.decay_exponent = fit_decay_exponent(pair, prob.M, default_decay_window(spec, i)).theta_fit;
            } catch (const PreconditionError&) {
                pair.decay_exponent = std::numeric_limits<double>::quiet_NaN();
            }
        }
    }
    return spec;
}

std::pair<double, double> default_decay_window(const Spectrum& spec, std::size_t index)
{
    require(spec.kind == Kind::Singular, "default_decay_window: singular spectrum expected");
    require(index < spec.pairs.size(), "default_decay_window: no such eigenpair");
    const double kappa = std::sqrt(std::max(spec.threshold - spec.pairs[index].value, 1e-300));
    const double x_lo = spec.potential_extent + 3.0 / kappa;
    double x_hi = std::min(spec.potential_extent + 15.0 / kappa, spec.x_max - 8.0 / kappa);
    if (x_hi <= x_lo) x_hi = 0.5 * (x_lo + spec.x_max);
    return {std::exp(-x_hi), std::exp(-x_lo)};
}

// ---------------------------------------------------------------- standard

namespace {

struct StandardGrid {
    std::vector<double> r;        // 0..n
    std::vector<double> coupling; // 0..n-1
    std::vector<double> mass;     // 0..n
    SymmetricForm sym;
};

StandardGrid standard_grid(const WeightedSLProblem& prob, int n, double q)
{
    const double M = prob.M;
    StandardGrid g;
    g.r.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) g.r[static_cast<std::size_t>(i)] = std::pow(static_cast<double>(i) / n, q);
    g.r.back() = 1.0;

    const std::size_t N = g.r.size();
    g.coupling.resize(N - 1);
    for (std::size_t i = 0; i + 1 < N; ++i) {
        const double h = g.r[i + 1] - g.r[i];
        g.coupling[i] = power_integral(g.r[i], g.r[i + 1], M - 1.0) / (h * h);
    }
    g.mass.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double lo = i == 0 ? 0.0 : 0.5 * (g.r[i - 1] + g.r[i]);
        const double hi = i + 1 == N ? 1.0 : 0.5 * (g.r[i] + g.r[i + 1]);
        g.mass[i] = power_integral(lo, hi, M - 1.0);
    }

    const std::size_t u = N - 1;  // unknowns 0..n-1
    g.sym.d.resize(u);
    g.sym.e.resize(u - 1);
    g.sym.mass.assign(g.mass.begin(), g.mass.begin() + static_cast<std::ptrdiff_t>(u));
    for (std::size_t i = 0; i < u; ++i) {
        const double at = i == 0 ? M / (M + 1.0) * 0.5 * g.r[1] : g.r[i];
        const double a = prob.a(at);
        if (!std::isfinite(a)) throw PreconditionError("potential is not finite at r = " + std::to_string(at));
        const double k = (i > 0 ? g.coupling[i - 1] : 0.0) + g.coupling[i];
        g.sym.d[i] = (k - a * g.mass[i]) / g.mass[i];
        if (i + 1 < u) g.sym.e[i] = -g.coupling[i] / std::sqrt(g.mass[i] * g.mass[i + 1]);
    }
    return g;
}

} // namespace

namespace {

Spectrum standard_attempt(const WeightedSLProblem& prob, int k, const SpectralConfig& cfg, int n, double q,
                          double x_in)
{
    const StandardGrid fine = standard_grid(prob, n, q);
    const StandardGrid coarse = standard_grid(prob, n / 2, q);

    Spectrum spec;
    spec.kind = Kind::Standard;
    spec.M = prob.M;
    spec.threshold = kInf;
    spec.grid = n;
    spec.potential_extent = x_in;

    auto form = std::make_shared<DiscreteForm>();
    form->coupling = fine.coupling;
    form->mass = fine.mass;

    const int K = std::min<int>(k, static_cast<int>(coarse.sym.d.size()));
    const std::size_t nn = fine.r.size() - 1;
    for (int i = 0; i < K; ++i) {
        EigenPair pair;
        const double lf = eigen_at(fine.sym.d, fine.sym.e, i, kInf);
        const double lc = eigen_at(coarse.sym.d, coarse.sym.e, i, kInf);
        richardson(lf, lc, cfg.tol, pair, "solve_standard_spectrum");
        pair.decay_exponent = std::numeric_limits<double>::quiet_NaN();
        pair.theta_analytic = std::numeric_limits<double>::quiet_NaN();
        if (cfg.eigenfunctions) {
            std::vector<double> y = detail::inverse_iteration(fine.sym.d, fine.sym.e, lf);
            const double sgn = y[0] < 0.0 ? -1.0 : 1.0;
            pair.nodal.assign(nn + 1, 0.0);
            for (std::size_t j = 0; j < nn; ++j) pair.nodal[j] = sgn * y[j] / std::sqrt(fine.mass[j]);
            pair.form = form;
            pair.r = fine.r;
            pair.psi = pair.nodal;
            pair.interior_nodes = count_interior_nodes(pair, cfg.node_tol);
            pair.boundary_slope = end_slope(1.0, fine.r[nn - 1], fine.r[nn - 2], 0.0,
                                            pair.psi[nn - 1], pair.psi[nn - 2]);
        }
        spec.pairs.push_back(std::move(pair));
    }
    check_simple(spec.pairs);
    spec.exhausted_below = spec.pairs.empty() ? -kInf : spec.pairs.back().value;
    return spec;
}

} // namespace

Spectrum solve_standard_spectrum(const WeightedSLProblem& prob, int k, const SpectralConfig& cfg)
{
    require(prob.kind == Kind::Standard, "solve_standard_spectrum: problem must be of standard kind");
    require(k >= 1, "solve_standard_spectrum: k must be >= 1");
    require(cfg.grid >= 16 && cfg.grid % 2 == 0, "solve_standard_spectrum: grid must be even and >= 16");
    require(cfg.standard_grading >= 1.0, "solve_standard_spectrum: grading must be >= 1");
    require(cfg.refinements >= 0, "solve_standard_spectrum: refinements must be >= 0");
    require(prob.M >= 2.0, "solve_standard_spectrum: M must be >= 2");

    // grade harder when the potential lives at small r: its inner edge should sit
    // near node n/8
    const double x_in = prob.a.is_zero() || !cfg.auto_grading ? 0.0 : inner_extent(prob.a, cfg.x_max_cap);
    const double q = std::max(cfg.standard_grading, x_in / std::log(8.0));

    int n = cfg.grid;
    for (int attempt = 0;; ++attempt, n *= 2) {
        try {
            Spectrum spec = standard_attempt(prob, k, cfg, n, q, x_in);
            if (attempt > 0)
                spec.warnings.emplace_back("standard grid refined to " + std::to_string(n) + " intervals");
            return spec;
        } catch (const SolverError&) {
            if (attempt >= cfg.refinements) throw;
        }
    }
}

// ---------------------------------------------------------------- dense oracle

namespace {

struct OracleGrid {
    std::vector<double> r;
    std::vector<double> mass;  // weight of the eigenvalue, all nodes
    SymmetricForm sym;
    std::size_t first = 0;     // index of the first unknown node
};

OracleGrid oracle_grid(const WeightedSLProblem& prob, int n, double eps)
{
    const double M = prob.M;
    const bool singular = prob.kind == Kind::Singular;
    const double w = singular ? M - 3.0 : M - 1.0;
    const double le = std::log(eps);

    OracleGrid g;
    const std::size_t N = static_cast<std::size_t>(n) + 1;
    g.r.resize(N);
    for (std::size_t i = 0; i < N; ++i) g.r[i] = std::exp(le * (1.0 - static_cast<double>(i) / n));
    g.r.back() = 1.0;

    std::vector<double> s(N - 1), mpot(N);
    g.mass.resize(N);
    for (std::size_t i = 0; i + 1 < N; ++i) {
        const double h = g.r[i + 1] - g.r[i];
        s[i] = power_integral(g.r[i], g.r[i + 1], M - 1.0) / (h * h);
    }
    for (std::size_t i = 0; i < N; ++i) {
        const double lo = i == 0 ? g.r[0] : 0.5 * (g.r[i - 1] + g.r[i]);
        const double hi = i + 1 == N ? 1.0 : 0.5 * (g.r[i] + g.r[i + 1]);
        g.mass[i] = power_integral(lo, hi, w);
        mpot[i] = power_integral(lo, hi, M - 1.0);
    }

    // Dirichlet at eps for the singular weight, natural boundary for the standard one.
    g.first = singular ? 1 : 0;
    const std::size_t last = N - 2;
    const std::size_t u = last - g.first + 1;
    g.sym.d.resize(u);
    g.sym.e.resize(u - 1);
    g.sym.mass.resize(u);
    for (std::size_t j = 0; j < u; ++j) {
        const std::size_t i = j + g.first;
        const double a = prob.a(g.r[i]);
        if (!std::isfinite(a)) throw PreconditionError("potential is not finite at r = " + std::to_string(g.r[i]));
        const double k = (i > 0 ? s[i - 1] : 0.0) + s[i];
        g.sym.mass[j] = g.mass[i];
        g.sym.d[j] = (k - a * mpot[i]) / g.mass[i];
        if (j + 1 < u) g.sym.e[j] = -s[i] / std::sqrt(g.mass[i] * g.mass[i + 1]);
    }
    return g;
}

Eigen::VectorXd tridiagonal_eigenvalues(const SymmetricForm& f)
{
    const Eigen::Index n = static_cast<Eigen::Index>(f.d.size());
    Eigen::VectorXd diag(n), sub(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) diag[i] = f.d[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i + 1 < n; ++i) sub[i] = f.e[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw SolverError("dense oracle: tridiagonal QL did not converge");
    return es.eigenvalues();
}

} // namespace

Spectrum dense_oracle_spectrum(const WeightedSLProblem& prob, int n, double epsilon_cut,
                               const OracleOptions& opts)
{
    require(n >= 16 && n % 2 == 0, "dense_oracle_spectrum: n must be even and >= 16");
    require(n <= 4000, "dense_oracle_spectrum: n = " + std::to_string(n) + " exceeds the 4000 guard");
    require(epsilon_cut > 0.0 && epsilon_cut < 1.0, "dense_oracle_spectrum: epsilon_cut must lie in (0, 1)");
    require(prob.M >= 2.0, "dense_oracle_spectrum: M must be >= 2");

    const OracleGrid fine = oracle_grid(prob, n, epsilon_cut);
    const OracleGrid coarse = oracle_grid(prob, n / 2, epsilon_cut);
    const Eigen::VectorXd ef = tridiagonal_eigenvalues(fine.sym);
    const Eigen::VectorXd ec = tridiagonal_eigenvalues(coarse.sym);

    Spectrum spec;
    spec.kind = prob.kind;
    spec.M = prob.M;
    spec.grid = n;
    spec.x_max = -std::log(epsilon_cut);
    const double gam = half_gap(prob.M);
    spec.threshold = prob.kind == Kind::Singular ? gam * gam : kInf;
    const double level = spec.threshold - opts.margin;

    int K = 0;
    while (K < opts.max_pairs && K < ec.size() && ef[K] < level && ec[K] < level) ++K;
    if (prob.kind == Kind::Singular && K < ef.size() && ef[K] < spec.threshold && ef[K] >= level)
        spec.near_threshold = true;

    auto form = std::make_shared<DiscreteForm>();
    for (std::size_t i = 0; i + 1 < fine.r.size(); ++i) {
        const double h = fine.r[i + 1] - fine.r[i];
        form->coupling.push_back(power_integral(fine.r[i], fine.r[i + 1], prob.M - 1.0) / (h * h));
    }
    form->mass = fine.mass;

    for (int i = 0; i < K; ++i) {
        EigenPair pair;
        pair.grid_value = ef[i];
        pair.value = (4.0 * ef[i] - ec[i]) / 3.0;
        pair.error_bar = std::abs(ef[i] - ec[i]) / 3.0;
        pair.theta_analytic = prob.kind == Kind::Singular ? decay_theta(prob.M, pair.value)
                                                          : std::numeric_limits<double>::quiet_NaN();
        pair.decay_exponent = std::numeric_limits<double>::quiet_NaN();
        if (opts.eigenfunctions) {
            const std::vector<double> y = detail::inverse_iteration(fine.sym.d, fine.sym.e, ef[i]);
            pair.r = fine.r;
            pair.psi.assign(fine.r.size(), 0.0);
            for (std::size_t j = 0; j < y.size(); ++j)
                pair.psi[j + fine.first] = y[j] / std::sqrt(fine.sym.mass[j]);
            const double last = pair.psi[pair.psi.size() - 2];
            if (last < 0.0)
                for (double& v : pair.psi) v = -v;
            pair.nodal = pair.psi;
            pair.form = form;
            pair.interior_nodes = count_interior_nodes(pair);
        }
        spec.pairs.push_back(std::move(pair));
    }
    spec.exhausted_below = K < opts.max_pairs ? level : spec.pairs.back().value;
    return spec;
}

// ---------------------------------------------------------------- diagnostics

int count_interior_nodes(const EigenPair& pair, double node_tol)
{
    // psi = r^{-(M-2)/2} u can grow by many orders towards r = 0, which would
    // hide the outer nodes below the tolerance; the nodal vector has the same signs.
    return sign_changes(pair.nodal.empty() ? pair.psi : pair.nodal, node_tol);
}

double decay_theta(double M, double nu_hat)
{
    const double g = M - 2.0;
    return 0.5 * (-g + std::sqrt(g * g - 4.0 * nu_hat));
}

DecayFit fit_decay_exponent(const EigenPair& pair, double M, std::pair<double, double> window)
{
    const auto [lo, hi] = window;
    require(lo > 0.0 && lo < hi, "fit_decay_exponent: window must satisfy 0 < r_lo < r_hi");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    int sign = 0;
    for (std::size_t i = 0; i < pair.r.size(); ++i) {
        const double r = pair.r[i];
        if (r < lo || r > hi) continue;
        const double v = pair.psi[i];
        const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
        if (s == 0 || (sign != 0 && s != sign))
            throw PreconditionError("fit_decay_exponent: window contains a node");
        sign = s;
        const double x = std::log(r), y = std::log(std::abs(v));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    require(n >= 3, "fit_decay_exponent: fewer than 3 samples in the window");
    DecayFit fit;
    fit.theta_fit = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.theta_analytic = decay_theta(M, pair.value);
    return fit;
}

double picone_residual(const EigenPair& pi, const EigenPair& pj, double /*M*/)
{
    require(pi.form && pi.form == pj.form, "picone_residual: pairs must share one discretization");
    require(pi.nodal.size() == pj.nodal.size(), "picone_residual: size mismatch");
    const auto& s = pi.form->coupling;
    const auto& m = pi.form->mass;
    const auto& a = pi.nodal;
    const auto& b = pj.nodal;
    const std::size_t n = a.size();
    const double dl = pi.grid_value - pj.grid_value;

    // tail[K] = sum_{k >= K} m_k a_k b_k
    std::vector<double> tail(n + 1, 0.0);
    for (std::size_t k = n; k-- > 0;) tail[k] = tail[k + 1] + m[k] * a[k] * b[k];

    double worst = 0.0;
    for (std::size_t K = 0; K < n; ++K) {
        const double flux = K == 0 ? 0.0 : s[K - 1] * (a[K] * b[K - 1] - a[K - 1] * b[K]);
        worst = std::max(worst, std::abs(flux - dl * tail[K]));
    }
    return worst;
}

double weighted_inner(const EigenPair& pi, const EigenPair& pj)
{
    require(pi.form && pi.form == pj.form, "weighted_inner: pairs must share one discretization");
    double s = 0.0;
    for (std::size_t k = 0; k < pi.nodal.size(); ++k) s += pi.form->mass[k] * pi.nodal[k] * pj.nodal[k];
    return s;
}

// ---------------------------------------------------------------- quotients

namespace {

// Eight-point Gauss-Legendre on [-1, 1].
constexpr double g8x[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                           0.9602898564975363};
constexpr double g8w[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                           0.1012285362903763};

template <class F>
double gauss8(F&& f, double a, double b)
{
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += g8w[i] * (f(c - h * g8x[i]) + f(c + h * g8x[i]));
    return s * h;
}

// int_a^b r^s f(r) dr for smooth f: geometric pieces of ratio < 2, Gauss on each.
template <class F>
double weighted_segment(F&& f, double a, double b, double s)
{
    double total = 0.0;
    double lo = a;
    while (lo < b) {
        const double hi = std::min(b, 1.9 * lo);
        total += gauss8([&](double r) { return std::pow(r, s) * f(r); }, lo, hi);
        lo = hi;
    }
    return total;
}

void check_samples(const std::vector<double>& r, const std::vector<double>& w)
{
    require(r.size() == w.size() && r.size() >= 2, "sampled function needs >= 2 matching samples");
    for (std::size_t i = 1; i < r.size(); ++i)
        require(r[i] > r[i - 1], "sample abscissae must be strictly increasing");
    require(r.front() >= 0.0 && r.back() == 1.0, "samples must lie in [0, 1] and end at r = 1");
}

} // namespace

double PiecewiseLinear::moment(double s) const
{
    check_samples(r, w);
    double total = 0.0;
    if (extend_to_origin && r.front() > 0.0) total += w.front() * w.front() * power_integral(0.0, r.front(), s);
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double a = r[i], b = r[i + 1];
        const double slope = (w[i + 1] - w[i]) / (b - a);
        if (a == 0.0) {
            const double c0 = w[i];
            total += c0 * c0 * power_integral(0.0, b, s) + 2.0 * c0 * slope * power_integral(0.0, b, s + 1.0) +
                     slope * slope * power_integral(0.0, b, s + 2.0);
        } else {
            total += weighted_segment(
                [&](double x) {
                    const double v = w[i] + slope * (x - a);
                    return v * v;
                },
                a, b, s);
        }
    }
    return total;
}

double PiecewiseLinear::gradient_moment(double s) const
{
    check_samples(r, w);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double slope = (w[i + 1] - w[i]) / (r[i + 1] - r[i]);
        total += slope * slope * power_integral(r[i], r[i + 1], s);
    }
    return total;
}

double rayleigh_quotient(const std::vector<double>& r, const std::vector<double>& w,
                         const WeightedSLProblem& prob, QuadratureRule rule)
{
    check_samples(r, w);
    double top = 0.0;
    for (double v : w) top = std::max(top, std::abs(v));
    require(std::abs(w.back()) <= 1e-12 * std::max(top, 1e-300), "rayleigh_quotient: w(1) must vanish");
    const double M = prob.M;
    const std::size_t n = r.size();
    double num = 0.0, den = 0.0;

    if (rule == QuadratureRule::Exact) {
        const PiecewiseLinear pw{r, w, false};
        num = pw.gradient_moment(M - 1.0);
        if (!prob.a.is_zero()) {
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const double a = r[i], b = r[i + 1];
                const double slope = (w[i + 1] - w[i]) / (b - a);
                auto f = [&](double x) {
                    const double v = w[i] + slope * (x - a);
                    return prob.a(x) * v * v;
                };
                num -= a == 0.0 ? gauss8([&](double x) { return std::pow(x, M - 1.0) * f(x); }, a, b)
                                : weighted_segment(f, a, b, M - 1.0);
            }
        }
        den = pw.moment(prob.kind == Kind::Singular ? M - 3.0 : M - 1.0);
    } else if (prob.kind == Kind::Singular) {
        require(r.front() > 0.0, "rayleigh_quotient: singular kind needs r > 0 samples");
        // u = r^gamma w in x = -ln r, nodes ordered by increasing x
        const double gam = half_gap(M);
        std::vector<double> x(n), u(n);
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t i = n - 1 - j;
            x[j] = j == 0 ? 0.0 : -std::log(r[i]);
            u[j] = std::pow(r[i], gam) * w[i];
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double left = j == 0 ? 0.0 : 0.5 * (x[j] - x[j - 1]);
            const double right = j + 1 == n ? 0.0 : 0.5 * (x[j + 1] - x[j]);
            const double mu = left + right;
            const double rr = std::exp(-x[j]);
            const double V = gam * gam - rr * rr * prob.a(rr);
            num += mu * V * u[j] * u[j];
            den += mu * u[j] * u[j];
            if (j + 1 < n) num += (u[j + 1] - u[j]) * (u[j + 1] - u[j]) / (x[j + 1] - x[j]);
        }
        num += gam * u.back() * u.back();
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double lo = i == 0 ? r[0] : 0.5 * (r[i - 1] + r[i]);
            const double hi = i + 1 == n ? 1.0 : 0.5 * (r[i] + r[i + 1]);
            const double m = power_integral(lo, hi, M - 1.0);
            const double at = (i == 0 && r[0] == 0.0) ? M / (M + 1.0) * hi : r[i];
            num -= prob.a(at) * m * w[i] * w[i];
            den += m * w[i] * w[i];
            if (i + 1 < n) {
                const double h = r[i + 1] - r[i];
                num += power_integral(r[i], r[i + 1], M - 1.0) / (h * h) * (w[i + 1] - w[i]) * (w[i + 1] - w[i]);
            }
        }
    }
    if (!(den > 0.0)) throw PreconditionError("rayleigh_quotient: zero denominator");
    return num / den;
}

// ---------------------------------------------------------------- inequalities

InequalityCheck hardy_check(const PiecewiseLinear& w, double M, double tol)
{
    require(M > 2.0, "hardy_check: needs M > 2");
    const double g = half_gap(M);
    InequalityCheck c;
    c.lhs = g * g * w.moment(M - 3.0);
    c.rhs = w.gradient_moment(M - 1.0);
    c.slack = c.rhs - c.lhs;
    c.holds = c.slack >= -tol * std::max(1.0, c.rhs);
    return c;
}

InequalityCheck poincare_check(const PiecewiseLinear& w, double M, double tol)
{
    require(M >= 2.0, "poincare_check: needs M >= 2");
    InequalityCheck c;
    c.lhs = w.moment(M - 1.0);
    c.rhs = w.gradient_moment(M - 1.0) / (M - 1.0);
    c.slack = c.rhs - c.lhs;
    c.holds = c.slack >= -tol * std::max(1.0, c.rhs);
    return c;
}

InequalityCheck radial_lemma_check(const PiecewiseLinear& w, double M, double tol)
{
    require(M >= 2.0, "radial_lemma_check: needs M >= 2");
    const double G = std::sqrt(w.gradient_moment(M - 1.0));
    InequalityCheck c;
    c.slack = kInf;
    for (std::size_t i = 0; i < w.r.size(); ++i) {
        const double t = w.r[i];
        if (t <= 0.0 || t >= 1.0) continue;
        const double bound = M > 2.0 ? G * std::pow(t, -half_gap(M)) / std::sqrt(M - 2.0)
                                     : G * std::sqrt(std::abs(std::log(t)));
        const double slack = bound - std::abs(w.w[i]);
        if (slack < c.slack) {
            c.slack = slack;
            c.lhs = std::abs(w.w[i]);
            c.rhs = bound;
        }
    }
    c.holds = c.slack >= -tol * std::max(1.0, c.rhs);
    return c;
}

PiecewiseLinear as_piecewise_linear(const EigenPair& pair)
{
    require(!pair.r.empty(), "as_piecewise_linear: pair carries no eigenfunction samples");
    return PiecewiseLinear{pair.r, pair.psi, false};
}

Potential linearized_potential(const radial::RadialProfile& prof)
{
    require(prof.source != nullptr, "linearized_potential: profile has no underlying solution");
    auto held = std::make_shared<const radial::RadialProfile>(prof);
    if (prof.variable == radial::Variable::EmdenVariable_t) {
        return Potential::callable(
            [held](double t) {
                return held->coupling * held->nonlinearity.derivative(held->evaluate(t).first);
            },
            "linearized:" + prof.nonlinearity.label());
    }
    return Potential::callable(
        [held](double r) {
            const double w = held->alpha == 0.0 ? 1.0 : std::pow(r, held->alpha);
            return w * held->nonlinearity.derivative(held->evaluate(r).first);
        },
        "linearized:" + prof.nonlinearity.label());
}

} // namespace henon::spectral
