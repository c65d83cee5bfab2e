#ifndef SRCID_INVERSION_HPP
#define SRCID_INVERSION_HPP

#include "srcid/errors.hpp"
#include "srcid/multipliers.hpp"
#include "srcid/spectral_grid.hpp"
#include "srcid/transport_kernel.hpp"

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

namespace srcid {

/// A-priori parameter choice rule mu(delta, p).
///   theorem2: mu = delta^{1/(p+2)}
///   section5: mu = delta^{2/(p+2)}
///   manual:   fixed mu in (0,1)
struct MuRule {
    enum class Kind { theorem2, section5, manual };

    Kind kind = Kind::theorem2;
    double manual_mu = 0;

    static MuRule theorem2() { return {}; }
    static MuRule section5() { return {Kind::section5, 0}; }
    static MuRule manual(double mu)
    {
        detail::require_mu(mu);
        return {Kind::manual, mu};
    }

    /// Parses "theorem2", "section5" or "manual:<mu>".
    static MuRule parse(std::string_view text)
    {
        if (text == "theorem2")
            return theorem2();
        if (text == "section5")
            return section5();
        constexpr std::string_view prefix = "manual:";
        if (text.substr(0, prefix.size()) == prefix) {
            const std::string_view number = text.substr(prefix.size());
            double mu = 0;
            const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), mu);
            detail::require(ec == std::errc{} && ptr == number.data() + number.size() && !number.empty(),
                            "malformed manual mu '" + std::string(number) + "'");
            return manual(mu);
        }
        throw DomainError("unknown mu rule '" + std::string(text) + "' (expected theorem2, section5 or manual:R)");
    }

    std::string to_string() const
    {
        switch (kind) {
        case Kind::theorem2:
            return "theorem2";
        case Kind::section5:
            return "section5";
        case Kind::manual: {
            char buf[64];
            const auto res = std::to_chars(buf, buf + sizeof buf, manual_mu);
            return "manual:" + std::string(buf, res.ptr);
        }
        }
        return {};
    }

    friend bool operator==(const MuRule&, const MuRule&) = default;
};

template <typename Scalar>
Scalar choose_mu(Scalar delta, Scalar p, const MuRule& rule)
{
    detail::require(delta > 0 && delta < 1, "noise level delta must lie in (0,1), got " + std::to_string(delta));
    detail::require(p > 0, "smoothness order p must be positive");
    switch (rule.kind) {
    case MuRule::Kind::theorem2:
        return std::pow(delta, Scalar(1) / (p + 2));
    case MuRule::Kind::section5:
        return std::pow(delta, Scalar(2) / (p + 2));
    case MuRule::Kind::manual:
        detail::require_mu(rule.manual_mu);
        return static_cast<Scalar>(rule.manual_mu);
    }
    return Scalar(0);
}

/// Unregularized inverse f_delta = T y. Bounded on a finite grid but
/// amplifies frequency xi by roughly |xi|.
template <typename Scalar>
Signal<Scalar> apply_T(const Signal<Scalar>& y, const TransportParams<Scalar>& params)
{
    return apply_multiplier(y, lambda_samples(y.grid, params));
}

/// Regularized inverse R_mu y with symbol Lambda(xi) / (1 + mu^2 xi^2).
template <typename Scalar>
Signal<Scalar> apply_R_mu(const Signal<Scalar>& y, Scalar mu, const TransportParams<Scalar>& params)
{
    return apply_multiplier(y, stabilized_samples(y.grid, mu, params));
}

} // namespace srcid

#endif // SRCID_INVERSION_HPP
