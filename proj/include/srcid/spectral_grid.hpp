#ifndef SRCID_SPECTRAL_GRID_HPP
#define SRCID_SPECTRAL_GRID_HPP

// Uniform time grid and the discrete counterpart of the unitary transform
//
//   f^(xi) = (1/sqrt(2 pi)) int f(t) e^{-i xi t} dt,
//   f(t)   = (1/sqrt(2 pi)) int f^(xi) e^{+i xi t} dxi.
//
// Spectra are stored in centered order: bin i holds xi = (i - n_pad/2) dxi.
// Weights dt and dxi = 2 pi / (n_pad dt) make Parseval exact on the grid:
// dt sum |s_j|^2 == dxi sum |c_k|^2.

#include "srcid/errors.hpp"

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

namespace srcid {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
class TimeGrid {
public:
    TimeGrid(Eigen::Index n, Scalar t_total, Eigen::Index pad_factor = 1)
        : n_(n), pad_factor_(pad_factor), t_total_(t_total)
    {
        detail::require(n >= 8 && (n & (n - 1)) == 0,
                        "grid size n must be a power of two >= 8, got " + std::to_string(n));
        detail::require(std::isfinite(t_total) && t_total > 0, "t_total must be positive");
        detail::require(pad_factor >= 1, "pad_factor must be >= 1");
    }

    Eigen::Index n() const { return n_; }
    Eigen::Index pad_factor() const { return pad_factor_; }
    Eigen::Index n_pad() const { return n_ * pad_factor_; }
    Scalar t_total() const { return t_total_; }
    Scalar dt() const { return t_total_ / static_cast<Scalar>(n_); }
    Scalar dxi() const { return 2 * std::numbers::pi_v<Scalar> / (static_cast<Scalar>(n_pad()) * dt()); }

    Scalar time(Eigen::Index j) const { return static_cast<Scalar>(j) * dt(); }

    /// Angular frequency of centered bin i in [0, n_pad).
    Scalar frequency(Eigen::Index i) const { return static_cast<Scalar>(i - n_pad() / 2) * dxi(); }

    /// Index of the unpaired bin -n_pad/2, which has no conjugate partner.
    static constexpr Eigen::Index nyquist_bin() { return 0; }

    Vector<Scalar> times() const { return Vector<Scalar>::LinSpaced(n_, Scalar(0), time(n_ - 1)); }

    Vector<Scalar> frequencies() const
    {
        Vector<Scalar> xi(n_pad());
        for (Eigen::Index i = 0; i < n_pad(); ++i)
            xi[i] = frequency(i);
        return xi;
    }

    friend bool operator==(const TimeGrid& a, const TimeGrid& b)
    {
        return a.n_ == b.n_ && a.pad_factor_ == b.pad_factor_ && a.t_total_ == b.t_total_;
    }

private:
    Eigen::Index n_;
    Eigen::Index pad_factor_;
    Scalar t_total_;
};

template <typename Scalar>
struct Signal {
    TimeGrid<Scalar> grid;
    Vector<Scalar> samples;

    Signal(TimeGrid<Scalar> g, Vector<Scalar> s) : grid(std::move(g)), samples(std::move(s))
    {
        detail::require(samples.size() == grid.n(), "signal length must equal grid size");
        detail::require(samples.allFinite(), "signal samples must be finite");
    }

    static Signal zero(const TimeGrid<Scalar>& g) { return {g, Vector<Scalar>::Zero(g.n())}; }
};

template <typename Scalar>
struct Spectrum {
    TimeGrid<Scalar> grid;
    ComplexVector<Scalar> coefficients;

    Spectrum(TimeGrid<Scalar> g, ComplexVector<Scalar> c) : grid(std::move(g)), coefficients(std::move(c))
    {
        detail::require(coefficients.size() == grid.n_pad(), "spectrum length must equal padded grid size");
    }
};

template <typename Scalar>
Signal<Scalar> operator-(const Signal<Scalar>& a, const Signal<Scalar>& b)
{
    detail::require(a.grid == b.grid, "signals live on different grids");
    return {a.grid, a.samples - b.samples};
}

template <typename Scalar>
Signal<Scalar> operator+(const Signal<Scalar>& a, const Signal<Scalar>& b)
{
    detail::require(a.grid == b.grid, "signals live on different grids");
    return {a.grid, a.samples + b.samples};
}

namespace detail {

// Swap halves: wrap order (0..N/2-1, -N/2..-1) <-> centered order. Self-inverse for even N.
template <typename Derived>
auto swap_halves(const Eigen::MatrixBase<Derived>& v)
{
    using Plain = typename Derived::PlainObject;
    const Eigen::Index half = v.size() / 2;
    Plain out(v.size());
    out.head(half) = v.tail(half);
    out.tail(half) = v.head(half);
    return out;
}

template <typename Scalar>
Scalar imaginary_tolerance()
{
    return std::max(Scalar(1e-8), Scalar(100) * std::numeric_limits<Scalar>::epsilon());
}

} // namespace detail

/// Zero-pads to n_pad and approximates the continuous unitary transform:
/// c_k = (dt / sqrt(2 pi)) sum_j s_j e^{-i xi_k t_j}.
template <typename Scalar>
Spectrum<Scalar> to_spectrum(const Signal<Scalar>& s)
{
    const auto& grid = s.grid;
    ComplexVector<Scalar> padded = ComplexVector<Scalar>::Zero(grid.n_pad());
    padded.head(grid.n()) = s.samples.template cast<std::complex<Scalar>>();

    Eigen::FFT<Scalar> fft;
    ComplexVector<Scalar> raw(grid.n_pad());
    fft.fwd(raw, padded);
    raw *= grid.dt() / std::sqrt(2 * std::numbers::pi_v<Scalar>);
    return {grid, detail::swap_halves(raw)};
}

/// Inverse of to_spectrum, truncated to the n retained samples.
/// Throws NonRealReconstruction if the imaginary residue exceeds 1e-8 relative.
template <typename Scalar>
Signal<Scalar> from_spectrum(const Spectrum<Scalar>& sp)
{
    const auto& grid = sp.grid;
    ComplexVector<Scalar> raw = detail::swap_halves(sp.coefficients);

    Eigen::FFT<Scalar> fft;
    ComplexVector<Scalar> values(grid.n_pad());
    fft.inv(values, raw); // includes 1/n_pad
    values *= std::sqrt(2 * std::numbers::pi_v<Scalar>) / grid.dt();

    const Scalar re = values.real().cwiseAbs().maxCoeff();
    const Scalar im = values.imag().cwiseAbs().maxCoeff();
    if (im > detail::imaginary_tolerance<Scalar>() * re && im > std::numeric_limits<Scalar>::min())
        throw NonRealReconstruction("non-real reconstruction: imaginary residue " + std::to_string(im) +
                                    " against real magnitude " + std::to_string(re));
    return {grid, values.real().head(grid.n())};
}

/// Samples a symbol on the centered frequency grid. The unpaired bin -n_pad/2
/// receives the real part, i.e. the average of symbol(xi) and symbol(-xi) for a
/// Hermitian symbol, so real signals stay real under multiplication.
template <typename Scalar, typename Symbol>
ComplexVector<Scalar> sample_symbol(const TimeGrid<Scalar>& grid, Symbol&& symbol)
{
    ComplexVector<Scalar> m(grid.n_pad());
    for (Eigen::Index i = 0; i < grid.n_pad(); ++i)
        m[i] = symbol(grid.frequency(i));
    const auto ny = TimeGrid<Scalar>::nyquist_bin();
    m[ny] = std::complex<Scalar>(m[ny].real(), Scalar(0));
    return m;
}

/// from_spectrum(multiplier .* to_spectrum(s)).
template <typename Scalar>
Signal<Scalar> apply_multiplier(const Signal<Scalar>& s, const ComplexVector<Scalar>& multiplier)
{
    Spectrum<Scalar> sp = to_spectrum(s);
    detail::require(multiplier.size() == sp.coefficients.size(), "multiplier size mismatch");
    sp.coefficients.array() *= multiplier.array();
    return from_spectrum(sp);
}

template <typename Scalar>
Scalar l2_norm(const Signal<Scalar>& s)
{
    return std::sqrt(s.grid.dt() * s.samples.squaredNorm());
}

/// sqrt(dxi sum |c_k|^2), the frequency-side L2 norm.
template <typename Scalar>
Scalar l2_norm(const Spectrum<Scalar>& sp)
{
    return std::sqrt(sp.grid.dxi() * sp.coefficients.squaredNorm());
}

/// sqrt(dxi sum |c_k|^2 (1 + xi_k^2)^p).
template <typename Scalar>
Scalar hp_norm(const Spectrum<Scalar>& sp, Scalar p)
{
    detail::require(p >= 0, "smoothness order p must be nonnegative");
    const Vector<Scalar> xi = sp.grid.frequencies();
    const Vector<Scalar> weight = (Scalar(1) + xi.array().square()).pow(p).matrix();
    return std::sqrt(sp.grid.dxi() * (sp.coefficients.cwiseAbs2().cwiseProduct(weight)).sum());
}

template <typename Scalar>
Scalar hp_norm(const Signal<Scalar>& s, Scalar p)
{
    return hp_norm(to_spectrum(s), p);
}

} // namespace srcid

#endif // SRCID_SPECTRAL_GRID_HPP
