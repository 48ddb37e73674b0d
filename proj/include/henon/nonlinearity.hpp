#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

namespace henon::radial {

/// Autonomous nonlinearity f(u) of the radial equation, with its derivative.
///
/// Power(p) is f(u) = |u|^{p-1} u. A custom nonlinearity is any pair of
/// callables that stay finite on bounded intervals; the caller declares
/// whether f is odd, which decides how strictly extremal values are checked.
class Nonlinearity {
public:
    using Fn = std::function<double(double)>;

    static Nonlinearity power(double p);
    static Nonlinearity custom(std::string label, Fn f, Fn f_prime, bool odd);

    double operator()(double u) const;
    double derivative(double u) const;

    bool is_power() const noexcept { return exponent_.has_value(); }
    /// Exponent of a power nonlinearity; throws for custom ones.
    double exponent() const;
    bool odd() const noexcept { return odd_; }
    const std::string& label() const noexcept { return label_; }

private:
    Nonlinearity() = default;

    std::optional<double> exponent_;
    Fn f_;
    Fn f_prime_;
    bool odd_ = true;
    std::string label_;
};

} // namespace henon::radial
