#pragma once

#include <vector>

/// The Henon change of variables t = r^{(2+alpha)/2} and the relations it
/// induces between the N-dimensional problem with weight |x|^alpha and the
/// autonomous radial problem in the generalized dimension M.
namespace henon::dimension {

struct DimensionMap {
    int N = 2;
    double alpha = 0.0;
    /// 2 (N + alpha) / (2 + alpha), in [2, N].
    double M = 2.0;
    /// (2 / (2 + alpha))^2, the coupling in front of f in the Emden variable.
    double c = 1.0;
    /// (2 + alpha) / 2, the radius-map power t = r^exponent.
    double exponent = 1.0;

    /// ((M-2)/2)^2, the singular-eigenvalue threshold in the Emden variable.
    double emden_threshold() const noexcept;
    /// ((N-2)/2)^2, the same threshold in the physical variable.
    double physical_threshold() const noexcept;
};

DimensionMap generalized_dimension(int N, double alpha);

/// Physical radial singular eigenvalue ((2+alpha)/2)^2 nu_hat from an
/// Emden-variable one. Throws PreconditionError at or above the threshold.
double eigenvalue_pullback(double nu_hat, const DimensionMap& map);

/// Inverse of eigenvalue_pullback.
double eigenvalue_pushforward(double lambda_hat, const DimensionMap& map);

/// J(nu) = (2+alpha)/2 (sqrt(((M-2)/2)^2 - nu) - (M-2)/2): harmonics with
/// 0 <= j < J feel a negative direction from the radial eigenvalue nu <= 0.
double angular_threshold(double nu_hat, const DimensionMap& map);

/// Radial eigenvalue levels -(2/(2+alpha))^2 j (N-2+j), j = 1..j_max, at
/// which the j-th harmonic produces a kernel element.
std::vector<double> degeneracy_targets(const DimensionMap& map, int j_max);

enum class RadiusDirection { PhysicalToEmden, EmdenToPhysical };

/// t = r^{(2+alpha)/2} or r = t^{2/(2+alpha)}; argument in [0, 1].
double map_radius(double value, const DimensionMap& map, RadiusDirection direction);

} // namespace henon::dimension
