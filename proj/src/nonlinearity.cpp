#include "henon/nonlinearity.hpp"

#include "henon/error.hpp"

#include <cstdio>
#include <utility>

namespace henon::radial {

Nonlinearity Nonlinearity::power(double p)
{
    require(std::isfinite(p) && p > 1.0, "power nonlinearity needs p > 1");
    Nonlinearity nl;
    nl.exponent_ = p;
    nl.odd_ = true;
    char buf[64];
    std::snprintf(buf, sizeof buf, "power:p=%.17g", p);
    nl.label_ = buf;
    return nl;
}

Nonlinearity Nonlinearity::custom(std::string label, Fn f, Fn f_prime, bool odd)
{
    require(static_cast<bool>(f) && static_cast<bool>(f_prime),
            "custom nonlinearity needs both f and f'");
    Nonlinearity nl;
    nl.f_ = std::move(f);
    nl.f_prime_ = std::move(f_prime);
    nl.odd_ = odd;
    nl.label_ = "custom:" + std::move(label);
    return nl;
}

double Nonlinearity::operator()(double u) const
{
    if (exponent_) return std::pow(std::abs(u), *exponent_ - 1.0) * u;
    return f_(u);
}

double Nonlinearity::derivative(double u) const
{
    if (exponent_) return *exponent_ * std::pow(std::abs(u), *exponent_ - 1.0);
    return f_prime_(u);
}

double Nonlinearity::exponent() const
{
    if (!exponent_) throw PreconditionError("nonlinearity " + label_ + " is not a power");
    return *exponent_;
}

} // namespace henon::radial
