#include "henon/henon_map.hpp"

#include "henon/error.hpp"

#include <cmath>
#include <string>

namespace henon::dimension {

double DimensionMap::emden_threshold() const noexcept
{
    const double g = 0.5 * (M - 2.0);
    return g * g;
}

double DimensionMap::physical_threshold() const noexcept
{
    const double g = 0.5 * (N - 2.0);
    return g * g;
}

DimensionMap generalized_dimension(int N, double alpha)
{
    require(N >= 2, "dimension N must be >= 2");
    require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be finite and >= 0");
    DimensionMap map;
    map.N = N;
    map.alpha = alpha;
    map.M = 2.0 * (N + alpha) / (2.0 + alpha);
    if (N == 2) map.M = 2.0; // exact, independent of rounding in alpha
    if (alpha == 0.0) map.M = N;
    map.exponent = (2.0 + alpha) / 2.0;
    map.c = 1.0 / (map.exponent * map.exponent);
    return map;
}

double eigenvalue_pullback(double nu_hat, const DimensionMap& map)
{
    require(nu_hat < map.emden_threshold(),
            "eigenvalue_pullback: nu_hat = " + std::to_string(nu_hat) +
                " is not below the threshold ((M-2)/2)^2");
    return map.exponent * map.exponent * nu_hat;
}

double eigenvalue_pushforward(double lambda_hat, const DimensionMap& map)
{
    require(lambda_hat < map.physical_threshold(),
            "eigenvalue_pushforward: value is not below the threshold ((N-2)/2)^2");
    return map.c * lambda_hat;
}

double angular_threshold(double nu_hat, const DimensionMap& map)
{
    require(nu_hat <= 0.0, "angular_threshold: only nonpositive eigenvalues contribute");
    const double g = 0.5 * (map.M - 2.0);
    const double s = -nu_hat;
    // sqrt(g^2 + s) - g written without cancellation
    const double root = std::sqrt(g * g + s);
    const double diff = s == 0.0 ? 0.0 : s / (root + g);
    return map.exponent * diff;
}

std::vector<double> degeneracy_targets(const DimensionMap& map, int j_max)
{
    require(j_max >= 1, "degeneracy_targets: j_max must be >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(j_max));
    for (int j = 1; j <= j_max; ++j)
        out.push_back(-map.c * static_cast<double>(j) * (map.N - 2.0 + j));
    return out;
}

double map_radius(double value, const DimensionMap& map, RadiusDirection direction)
{
    require(value >= 0.0 && value <= 1.0, "map_radius: argument must lie in [0, 1]");
    if (value == 0.0 || value == 1.0 || map.alpha == 0.0) return value;
    return direction == RadiusDirection::PhysicalToEmden ? std::pow(value, map.exponent)
                                                         : std::pow(value, 1.0 / map.exponent);
}

} // namespace henon::dimension
