#ifndef SRCID_TRANSPORT_KERNEL_HPP
#define SRCID_TRANSPORT_KERNEL_HPP

// Frequency symbol of the time-dependent source identification problem for
//
//   u_t = a2 u_xx - beta u_x - nu u + f(t),   u(0,t) = 0,   u bounded as x -> inf,
//
// observed at x = x0. In the frequency domain f^(xi) = Lambda(xi) y^(xi) with
//
//   z(xi)      = nu + i xi
//   Lambda(xi) = z / (1 - exp((beta - sqrt(beta^2 + 4 a2 z)) x0 / (2 a2)))
//
// All functions here are pure and may be called concurrently.

#include "srcid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace srcid {

namespace detail {

// exp(w) - 1 for complex w without cancellation near 0.
template <typename Scalar>
std::complex<Scalar> complex_expm1(const std::complex<Scalar>& w)
{
    const Scalar a = w.real();
    const Scalar b = w.imag();
    // e^a cos b - 1 = expm1(a) cos b - 2 sin^2(b/2)
    const Scalar s = std::sin(b / 2);
    const Scalar re = std::expm1(a) * std::cos(b) - 2 * s * s;
    const Scalar im = std::exp(a) * std::sin(b);
    return {re, im};
}

} // namespace detail

template <typename Scalar>
class TransportParams {
public:
    TransportParams(Scalar alpha2, Scalar beta, Scalar nu, Scalar x0)
        : alpha2_(alpha2), beta_(beta), nu_(nu), x0_(x0)
    {
        detail::require(std::isfinite(alpha2) && alpha2 > 0, "alpha2 > 0 violated");
        detail::require(std::isfinite(beta) && beta >= 0, "beta >= 0 violated");
        detail::require(std::isfinite(nu) && nu > 0, "nu > 0 violated");
        detail::require(std::isfinite(x0) && x0 > 0, "x0 > 0 violated");
    }

    Scalar alpha2() const { return alpha2_; }
    Scalar beta() const { return beta_; }
    Scalar nu() const { return nu_; }
    Scalar x0() const { return x0_; }

    /// Spatial decay rate of the bounded solution branch,
    /// m = (-beta + sqrt(beta^2 + 4 a2 nu)) / (2 a2) > 0.
    Scalar decay_exponent() const
    {
        // Rationalized form avoids cancellation when beta^2 >> 4 a2 nu.
        const Scalar disc = std::sqrt(beta_ * beta_ + 4 * alpha2_ * nu_);
        return 2 * nu_ / (beta_ + disc);
    }

    TransportParams with_x0(Scalar x0) const { return {alpha2_, beta_, nu_, x0}; }

private:
    Scalar alpha2_;
    Scalar beta_;
    Scalar nu_;
    Scalar x0_;
};

template <typename Scalar>
std::complex<Scalar> z_symbol(Scalar xi, const TransportParams<Scalar>& params)
{
    return {params.nu(), xi};
}

/// Lambda(xi). std::sqrt on std::complex is the principal branch (Re >= 0),
/// which selects the solution decaying in x.
template <typename Scalar>
std::complex<Scalar> lambda_symbol(Scalar xi, const TransportParams<Scalar>& params)
{
    using Complex = std::complex<Scalar>;
    const Complex z = z_symbol(xi, params);
    const Scalar a2 = params.alpha2();
    const Scalar beta = params.beta();
    const Complex root = std::sqrt(Complex(beta * beta) + Scalar(4) * a2 * z);
    const Complex exponent = (Complex(beta) - root) * params.x0() / (2 * a2);
    // 1 - e^w computed as -expm1(w) keeps precision for small |w| (nu -> 0 limits).
    const Complex denom = -detail::complex_expm1(exponent);
    return z / denom;
}

namespace detail {

inline void require_mu(double mu)
{
    require(mu > 0 && mu < 1, "regularization parameter mu must lie in (0,1), got " + std::to_string(mu));
}

} // namespace detail

/// Lambda(xi) / (1 + mu^2 xi^2), the symbol of R_mu.
template <typename Scalar>
std::complex<Scalar> stabilized_multiplier(Scalar xi, Scalar mu, const TransportParams<Scalar>& params)
{
    detail::require_mu(static_cast<double>(mu));
    return lambda_symbol(xi, params) / (Scalar(1) + mu * mu * xi * xi);
}

/// Closed-form sup bound for |stabilized_multiplier| in the form stated by the
/// source analysis: (1/mu^2) * 2 a2 (2 nu + 1) / ((-beta + sqrt(beta^2 + 4 a2 nu)) x0).
/// Only valid when m x0 <= 1; see proof_multiplier_bound for the general case.
template <typename Scalar>
Scalar lemma4_bound(Scalar mu, const TransportParams<Scalar>& params)
{
    detail::require_mu(static_cast<double>(mu));
    return (2 * params.nu() + 1) / (mu * mu * params.decay_exponent() * params.x0());
}

/// Sup bound actually delivered by the two-case argument (m x0 >= 1 and
/// m x0 < 1): (2 nu + 1) / (mu^2 min(1, m x0)). Coincides with lemma4_bound
/// when m x0 <= 1.
template <typename Scalar>
Scalar proof_multiplier_bound(Scalar mu, const TransportParams<Scalar>& params)
{
    detail::require_mu(static_cast<double>(mu));
    const Scalar mx0 = params.decay_exponent() * params.x0();
    return (2 * params.nu() + 1) / (mu * mu * std::min(Scalar(1), mx0));
}

/// max{mu^p, mu^2}, bounding sup_xi (1+xi^2)^{-p/2} (1 - 1/(1+xi^2 mu^2)).
template <typename Scalar>
Scalar filter_sup_bound(Scalar mu, Scalar p)
{
    detail::require_mu(static_cast<double>(mu));
    detail::require(p > 0, "smoothness order p must be positive");
    return std::max(std::pow(mu, p), mu * mu);
}

} // namespace srcid

#endif // SRCID_TRANSPORT_KERNEL_HPP
