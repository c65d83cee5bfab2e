#ifndef SRCID_MULTIPLIERS_HPP
#define SRCID_MULTIPLIERS_HPP

#include "srcid/spectral_grid.hpp"
#include "srcid/transport_kernel.hpp"

namespace srcid {

/// Lambda on the centered frequency grid (Nyquist bin symmetrized).
template <typename Scalar>
ComplexVector<Scalar> lambda_samples(const TimeGrid<Scalar>& grid, const TransportParams<Scalar>& params)
{
    return sample_symbol(grid, [&](Scalar xi) { return lambda_symbol(xi, params); });
}

template <typename Scalar>
ComplexVector<Scalar> stabilized_samples(const TimeGrid<Scalar>& grid, Scalar mu, const TransportParams<Scalar>& params)
{
    detail::require_mu(static_cast<double>(mu));
    return sample_symbol(grid, [&](Scalar xi) { return stabilized_multiplier(xi, mu, params); });
}

} // namespace srcid

#endif // SRCID_MULTIPLIERS_HPP
