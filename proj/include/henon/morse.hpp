#pragma once

#include "henon/henon_map.hpp"
#include "henon/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace henon::morse {

/// Eigenvalues j(N+j-2) of the Laplace-Beltrami operator on S^{N-1}.
double beltrami_eigen(int N, int j);
/// Dimension of the j-th eigenspace.
long long beltrami_multiplicity(int N, int j);

struct BeltramiRow {
    int j = 0;
    double lambda = 0.0;
    long long multiplicity = 0;
};

struct BeltramiTable {
    int N = 2;
    std::vector<BeltramiRow> rows;  ///< j = 0..j_max
};

BeltramiTable beltrami_table(int N, int j_max);

/// Multiplicities N_j^G of G-invariant harmonics.
struct SymmetryMultiplicity {
    std::string label;
    std::vector<long long> table;  ///< index j

    /// Only the constants survive.
    static SymmetryMultiplicity full_rotation(int j_max);
    /// Rotations by 2 pi / q in the plane (N = 2).
    static SymmetryMultiplicity cyclic(int q, int j_max);
    /// No symmetry: N_j^G = N_j.
    static SymmetryMultiplicity trivial(int N, int j_max);
    /// "full", "trivial", "cyclic:q" or "table:n0,n1,..." (missing j count 0).
    static SymmetryMultiplicity from_label(const std::string& label, int N, int j_max);
};

struct EigenContribution {
    double nu_hat = 0.0;
    double Lambda_hat_rad = 0.0;
    double J = 0.0;
    std::vector<int> contributing_j;
    long long contribution = 0;
    /// J within tolerance of an integer; the strict inequality j < J is ambiguous.
    bool integer_J = false;
};

struct DegeneracyHit {
    int k = 0;  ///< 1-based eigenvalue index
    int j = 0;
    double residual = 0.0;
};

struct DegeneracyReport {
    bool radially_degenerate = false;
    int offending_index = 0;  ///< 1-based, 0 when non-degenerate
    std::vector<DegeneracyHit> nonradial_hits;
    double tolerance = 0.0;
    double zero_tolerance = 0.0;
    std::vector<std::string> notes;
};

struct Bounds {
    long long general = 0;
    std::optional<long long> with_f3;
};

struct MorseReport {
    dimension::DimensionMap map;
    int radial_morse = 0;
    std::vector<EigenContribution> per_eigenvalue;
    long long total = 0;
    bool integer_J_collision = false;
    DegeneracyReport degeneracy;
    Bounds bounds;
    std::optional<long long> prediction;
    std::vector<std::string> warnings;
};

struct MorseOptions {
    /// |J - round(J)| below this flags an integer collision.
    double j_tol = 1e-9;
    /// Eigenvalues with |nu| below this count as numerically zero, not negative.
    double zero_tol = 1e-7;
};

/// Morse index from the negative singular eigenvalues in the Emden variable.
MorseReport morse_index(const spectral::Spectrum& spec, const dimension::DimensionMap& map,
                        const MorseOptions& opts = {});

/// Smallest j with lambda_j (2/(2+alpha))^2 > |min nu| + 1.
int table_extent(const spectral::Spectrum& spec, const dimension::DimensionMap& map);

DegeneracyReport degeneracy_scan(const spectral::Spectrum& singular, const spectral::Spectrum& standard,
                                 const dimension::DimensionMap& map, double tol = 1e-6,
                                 double zero_tol = 1e-7);

long long symmetric_morse_index(const MorseReport& report, const SymmetryMultiplicity& sym);

/// (m-1) sum_{j=0}^{1+[alpha/2]} N_j and, with has_f3, m + (m-1) sum_{j=1}^{1+[alpha/2]} N_j.
Bounds lower_bound(int N, double alpha, int m, bool has_f3);

/// The constant sqrt(26.9) used for the planar prediction; only an approximation.
double planar_beta();

struct Prediction {
    long long value = 0;
    /// alpha is within 1e-6 of an even integer without being one to 1e-12;
    /// the two branches differ there.
    bool near_even = false;
};

/// Closed-form Morse index prediction. N >= 3 with any m, or N = 2 with m = 2.
/// Refuses alpha near the exceptional values (1 + alpha/2) sqrt(26.9) in Z for N = 2.
Prediction asymptotic_prediction(int N, double alpha, int m);

} // namespace henon::morse
