#include "tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace henon::spectral::detail {

int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double sigma)
{
    const std::size_t n = d.size();
    constexpr double tiny = std::numeric_limits<double>::min() * 16.0;
    int count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        q = d[i] - sigma - (i == 0 ? 0.0 : e[i - 1] * e[i - 1] / q);
        if (q == 0.0) q = -tiny;
        if (q < 0.0) ++count;
    }
    return count;
}

std::pair<double, double> gershgorin(const std::vector<double>& d, const std::vector<double>& e)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double rad = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i < e.size() ? std::abs(e[i]) : 0.0);
        lo = std::min(lo, d[i] - rad);
        hi = std::max(hi, d[i] + rad);
    }
    return {lo, hi};
}

double bisect_eigenvalue(const std::vector<double>& d, const std::vector<double>& e, int index,
                         double lo, double hi)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int it = 0; it < 200; ++it) {
        // halving in asinh keeps the step count logarithmic when the
        // Gershgorin interval spans many decades
        const double mid = std::sinh(0.5 * (std::asinh(lo) + std::asinh(hi)));
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi))) break;
        if (sturm_count(d, e, mid) > index)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> inverse_iteration(const std::vector<double>& d, const std::vector<double>& e,
                                      double lambda, int iterations)
{
    const std::size_t n = d.size();
    if (n == 0) return {};
    if (n == 1) return {1.0};

    // LU of (T - lambda) with row interchanges; U has two superdiagonals.
    std::vector<double> dl(e), dd(n), du(e), du2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) dd[i] = d[i] - lambda;
    std::vector<char> swapped(n, 0);
    const double guard = std::numeric_limits<double>::epsilon() *
                         std::max(1.0, std::abs(lambda) + *std::max_element(d.begin(), d.end()));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(dd[i]) >= std::abs(dl[i])) {
            if (dd[i] == 0.0) dd[i] = guard;
            const double f = dl[i] / dd[i];
            dl[i] = f;
            dd[i + 1] -= f * du[i];
        } else {
            const double f = dd[i] / dl[i];
            dd[i] = dl[i];
            dl[i] = f;
            const double tmp = du[i];
            du[i] = dd[i + 1];
            dd[i + 1] = tmp - f * dd[i + 1];
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du[i + 1];
            }
            swapped[i] = 1;
        }
    }
    if (dd[n - 1] == 0.0) dd[n - 1] = guard;

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3);

    auto solve = [&](std::vector<double>& b) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (swapped[i]) {
                std::swap(b[i], b[i + 1]);
                b[i + 1] -= dl[i] * b[i];
            } else {
                b[i + 1] -= dl[i] * b[i];
            }
        }
        b[n - 1] /= dd[n - 1];
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / dd[n - 2];
        for (std::size_t k = n - 2; k-- > 0;)
            b[k] = (b[k] - du[k] * b[k + 1] - du2[k] * b[k + 2]) / dd[k];
    };
    auto normalize = [&](std::vector<double>& b) {
        double s = 0.0;
        for (double v : b) s += v * v;
        s = std::sqrt(s);
        for (double& v : b) v /= s;
    };

    normalize(y);
    for (int it = 0; it < iterations; ++it) {
        solve(y);
        normalize(y);
    }
    return y;
}

} // namespace henon::spectral::detail
