#include "henon/morse.hpp"

#include "henon/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace henon::morse {

namespace {

bool even_integer(double alpha) { return std::abs(alpha / 2.0 - std::round(alpha / 2.0)) <= 1e-12; }

int half_floor(double alpha) { return static_cast<int>(std::floor(alpha / 2.0 + 1e-12)); }

long long sum_multiplicity(int N, int from, int to)
{
    long long s = 0;
    for (int j = from; j <= to; ++j) s += beltrami_multiplicity(N, j);
    return s;
}

} // namespace

double beltrami_eigen(int N, int j)
{
    require(N >= 2 && j >= 0, "beltrami_eigen: needs N >= 2 and j >= 0");
    return static_cast<double>(j) * (N + j - 2);
}

long long beltrami_multiplicity(int N, int j)
{
    require(N >= 2 && j >= 0, "beltrami_multiplicity: needs N >= 2 and j >= 0");
    if (j == 0) return 1;
    if (N == 2) return 2;
    // (N+2j-2)(N+j-3)! / ((N-2)! j!) = (N+2j-2)/j * C(N+j-3, j-1)
    // C(n, k) by the running product, exact at every step.
    const long long n = N + j - 3;
    const long long k = j - 1;
    long long c = 1;
    for (long long i = 1; i <= k; ++i) {
        if (c > std::numeric_limits<long long>::max() / (n - k + i))
            throw PreconditionError("beltrami_multiplicity: overflow for N = " + std::to_string(N) +
                                    ", j = " + std::to_string(j));
        c = c * (n - k + i) / i;
    }
    const long long num = static_cast<long long>(N + 2 * j - 2) * c;
    return num / j;
}

BeltramiTable beltrami_table(int N, int j_max)
{
    require(j_max >= 0, "beltrami_table: j_max must be >= 0");
    BeltramiTable t;
    t.N = N;
    for (int j = 0; j <= j_max; ++j) t.rows.push_back({j, beltrami_eigen(N, j), beltrami_multiplicity(N, j)});
    return t;
}

SymmetryMultiplicity SymmetryMultiplicity::full_rotation(int j_max)
{
    SymmetryMultiplicity s;
    s.label = "full";
    s.table.assign(static_cast<std::size_t>(j_max) + 1, 0);
    s.table[0] = 1;
    return s;
}

SymmetryMultiplicity SymmetryMultiplicity::cyclic(int q, int j_max)
{
    require(q >= 1, "cyclic symmetry: order must be >= 1");
    SymmetryMultiplicity s;
    s.label = "cyclic:" + std::to_string(q);
    s.table.assign(static_cast<std::size_t>(j_max) + 1, 0);
    s.table[0] = 1;
    for (int j = 1; j <= j_max; ++j)
        if (j % q == 0) s.table[static_cast<std::size_t>(j)] = 2;
    return s;
}

SymmetryMultiplicity SymmetryMultiplicity::trivial(int N, int j_max)
{
    SymmetryMultiplicity s;
    s.label = "trivial";
    for (int j = 0; j <= j_max; ++j) s.table.push_back(beltrami_multiplicity(N, j));
    return s;
}

SymmetryMultiplicity SymmetryMultiplicity::from_label(const std::string& label, int N, int j_max)
{
    if (label == "full") return full_rotation(j_max);
    if (label == "trivial") return trivial(N, j_max);
    if (label.rfind("cyclic:", 0) == 0) {
        require(N == 2, "cyclic symmetry tables are only built in for N = 2");
        int q = 0;
        try {
            std::size_t used = 0;
            q = std::stoi(label.substr(7), &used);
            require(used == label.size() - 7, "trailing characters");
        } catch (const std::exception&) {
            throw PreconditionError("symmetry: cannot parse order in '" + label + "'");
        }
        return cyclic(q, j_max);
    }
    if (label.rfind("table:", 0) == 0) {
        // user-supplied N_j^G for j = 0, 1, ...; harmonics past the list count zero
        SymmetryMultiplicity s;
        s.label = label;
        std::stringstream in(label.substr(6));
        std::string item;
        while (std::getline(in, item, ',')) {
            try {
                std::size_t used = 0;
                const long long v = std::stoll(item, &used);
                require(used == item.size() && v >= 0, "bad entry");
                s.table.push_back(v);
            } catch (const std::exception&) {
                throw PreconditionError("symmetry: bad entry '" + item + "' in '" + label + "'");
            }
        }
        require(!s.table.empty(), "symmetry: empty table in '" + label + "'");
        if (s.table.size() <= static_cast<std::size_t>(j_max)) s.table.resize(static_cast<std::size_t>(j_max) + 1, 0);
        return s;
    }
    throw PreconditionError("symmetry: unknown table '" + label + "' (use full, trivial, cyclic:q or table:n0,n1,...)");
}

int table_extent(const spectral::Spectrum& spec, const dimension::DimensionMap& map)
{
    double lowest = 0.0;
    for (const auto& p : spec.pairs) lowest = std::min(lowest, p.value);
    int j = 0;
    while (beltrami_eigen(map.N, j) * map.c <= std::abs(lowest) + 1.0) ++j;
    return j;
}

MorseReport morse_index(const spectral::Spectrum& spec, const dimension::DimensionMap& map,
                        const MorseOptions& opts)
{
    require(spec.kind == spectral::Kind::Singular, "morse_index: needs a singular spectrum");
    require(std::abs(spec.M - map.M) <= 1e-12 * std::max(1.0, map.M),
            "morse_index: spectrum dimension " + std::to_string(spec.M) +
                " does not match the generalized dimension " + std::to_string(map.M));
    if (spec.near_threshold && spec.threshold <= opts.zero_tol)
        throw SolverError("morse_index: an eigenvalue sits within the margin of the threshold 0; "
                          "the negative count is uncertain");

    MorseReport rep;
    rep.map = map;
    for (std::size_t i = 0; i < spec.pairs.size(); ++i) {
        const double nu = spec.pairs[i].value;
        if (std::abs(nu) < opts.zero_tol) {
            rep.warnings.emplace_back("eigenvalue " + std::to_string(i + 1) + " is numerically zero");
            continue;
        }
        if (nu > 0.0) continue;
        EigenContribution c;
        c.nu_hat = nu;
        c.Lambda_hat_rad = dimension::eigenvalue_pullback(nu, map);
        c.J = dimension::angular_threshold(nu, map);
        const double nearest = std::round(c.J);
        c.integer_J = std::abs(c.J - nearest) <= opts.j_tol * std::max(1.0, c.J);
        const int upper = c.integer_J ? static_cast<int>(nearest) : static_cast<int>(std::ceil(c.J));
        for (int j = 0; j < upper; ++j) {
            c.contributing_j.push_back(j);
            c.contribution += beltrami_multiplicity(map.N, j);
        }
        if (c.integer_J) {
            rep.integer_J_collision = true;
            rep.warnings.emplace_back("J_" + std::to_string(i + 1) + " = " + std::to_string(c.J) +
                                      " is an integer to tolerance; harmonic j = " +
                                      std::to_string(static_cast<int>(nearest)) + " is degenerate, not counted");
        }
        rep.total += c.contribution;
        rep.per_eigenvalue.push_back(std::move(c));
    }
    rep.radial_morse = static_cast<int>(rep.per_eigenvalue.size());
    if (spec.pairs.size() == static_cast<std::size_t>(rep.radial_morse) && spec.exhausted_below < 0.0)
        rep.warnings.emplace_back("spectrum was truncated below zero; request more eigenvalues");
    return rep;
}

DegeneracyReport degeneracy_scan(const spectral::Spectrum& singular, const spectral::Spectrum& standard,
                                 const dimension::DimensionMap& map, double tol, double zero_tol)
{
    require(singular.kind == spectral::Kind::Singular && standard.kind == spectral::Kind::Standard,
            "degeneracy_scan: needs one singular and one standard spectrum");
    DegeneracyReport rep;
    rep.tolerance = tol;
    rep.zero_tolerance = zero_tol;

    // In the plane the singular problem cannot see a radial kernel element.
    const spectral::Spectrum& radial = map.N == 2 ? standard : singular;
    if (map.N == 2) rep.notes.emplace_back("N = 2: radial degeneracy decided on the standard spectrum");
    for (std::size_t i = 0; i < radial.pairs.size(); ++i) {
        if (std::abs(radial.pairs[i].value) < zero_tol) {
            rep.radially_degenerate = true;
            rep.offending_index = static_cast<int>(i) + 1;
            break;
        }
    }

    int j_max = 1;
    for (const auto& p : singular.pairs)
        while (map.c * beltrami_eigen(map.N, j_max) <= std::abs(std::min(p.value, 0.0)) + 1.0) ++j_max;
    const auto targets = dimension::degeneracy_targets(map, j_max);
    for (std::size_t k = 0; k < singular.pairs.size(); ++k) {
        for (std::size_t j = 0; j < targets.size(); ++j) {
            const double res = std::abs(singular.pairs[k].value - targets[j]);
            if (res < tol) rep.nonradial_hits.push_back({static_cast<int>(k) + 1, static_cast<int>(j) + 1, res});
        }
    }
    return rep;
}

long long symmetric_morse_index(const MorseReport& report, const SymmetryMultiplicity& sym)
{
    long long total = 0;
    for (const auto& c : report.per_eigenvalue) {
        for (int j : c.contributing_j) {
            if (static_cast<std::size_t>(j) >= sym.table.size())
                throw PreconditionError("symmetric_morse_index: table '" + sym.label + "' stops at j = " +
                                        std::to_string(sym.table.size() - 1) + ", needs j = " + std::to_string(j));
            total += sym.table[static_cast<std::size_t>(j)];
        }
    }
    return total;
}

Bounds lower_bound(int N, double alpha, int m, bool has_f3)
{
    require(m >= 1, "lower_bound: m must be >= 1");
    require(N >= 2 && alpha >= 0.0, "lower_bound: needs N >= 2, alpha >= 0");
    const int top = 1 + half_floor(alpha);
    Bounds b;
    b.general = (m - 1) * sum_multiplicity(N, 0, top);
    if (has_f3) b.with_f3 = m + (m - 1) * sum_multiplicity(N, 1, top);
    return b;
}

double planar_beta() { return std::sqrt(26.9); }

Prediction asymptotic_prediction(int N, double alpha, int m)
{
    require(N >= 2 && alpha >= 0.0 && std::isfinite(alpha), "asymptotic_prediction: needs N >= 2, alpha >= 0");
    require(m >= 1, "asymptotic_prediction: m must be >= 1");
    Prediction out;
    const bool even = even_integer(alpha);
    out.near_even = !even && std::abs(alpha / 2.0 - std::round(alpha / 2.0)) < 1e-6;
    const int h = half_floor(alpha);

    if (N >= 3) {
        out.value = even ? m * sum_multiplicity(N, 0, h) + (m - 1) * beltrami_multiplicity(N, 1 + h)
                         : m * sum_multiplicity(N, 0, 1 + h);
        return out;
    }
    require(m == 2, "asymptotic_prediction: for N = 2 only m = 2 is covered");
    const double beta = planar_beta();
    const double arg = (1.0 + alpha / 2.0) * beta;
    // ulp-level uncertainty of beta carried through the product
    const double guard = 10.0 * std::numeric_limits<double>::epsilon() * arg;
    if (std::abs(arg - std::round(arg)) <= guard)
        throw PreconditionError("asymptotic_prediction: alpha = " + std::to_string(alpha) +
                                " is an exceptional value (1 + alpha/2) beta in Z");
    const long long fl = static_cast<long long>(std::floor(arg));
    out.value = (even ? 2 : 4) + 2 * fl + 2 * h;
    return out;
}

} // namespace henon::morse
