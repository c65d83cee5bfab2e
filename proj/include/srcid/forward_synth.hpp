#ifndef SRCID_FORWARD_SYNTH_HPP
#define SRCID_FORWARD_SYNTH_HPP

#include "srcid/errors.hpp"
#include "srcid/multipliers.hpp"
#include "srcid/spectral_grid.hpp"
#include "srcid/transport_kernel.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace srcid {

// ---------------------------------------------------------------------------
// Source descriptions

/// f(t) = amplitude * e^{-t} on [0, cutoff), 0 afterwards.
template <typename Scalar>
struct ExponentialDecay {
    Scalar amplitude;
    Scalar cutoff;
};

/// Value on the half-open interval [begin, end). end may be +infinity.
template <typename Scalar>
struct Piece {
    Scalar begin;
    Scalar end;
    Scalar value;
};

template <typename Scalar>
struct PiecewiseConstant {
    std::vector<Piece<Scalar>> pieces;
};

/// Raw samples on the target grid.
template <typename Scalar>
struct Tabulated {
    std::vector<Scalar> samples;
};

template <typename Scalar>
using SourceSpec = std::variant<ExponentialDecay<Scalar>, PiecewiseConstant<Scalar>, Tabulated<Scalar>>;

template <typename Scalar>
SourceSpec<Scalar> example1_source()
{
    return ExponentialDecay<Scalar>{Scalar(6.51), Scalar(20)};
}

/// Decaying square wave: 0, 2, -2, 1, -1, 1/2, -1/2, 1/4, -1/4 on consecutive
/// intervals of length 2, then 0 for t >= 18.
template <typename Scalar>
SourceSpec<Scalar> example2_source()
{
    const Scalar levels[] = {0, 2, -2, 1, -1, 0.5, -0.5, 0.25, -0.25};
    PiecewiseConstant<Scalar> pc;
    for (int i = 0; i < 9; ++i)
        pc.pieces.push_back({Scalar(2 * i), Scalar(2 * i + 2), levels[i]});
    pc.pieces.push_back({Scalar(18), std::numeric_limits<Scalar>::infinity(), Scalar(0)});
    return pc;
}

namespace detail {

template <typename Scalar>
void validate_source(const ExponentialDecay<Scalar>& s, const TimeGrid<Scalar>& grid)
{
    require(std::isfinite(s.amplitude), "source amplitude must be finite");
    require(std::isfinite(s.cutoff) && s.cutoff > 0, "source cutoff must be positive and finite");
    require(s.amplitude == 0 || s.cutoff <= grid.t_total(),
            "source support [0, " + std::to_string(s.cutoff) + ") exceeds t_total " +
                std::to_string(grid.t_total()));
}

template <typename Scalar>
void validate_source(const PiecewiseConstant<Scalar>& s, const TimeGrid<Scalar>& grid)
{
    require(!s.pieces.empty(), "piecewise source needs at least one piece");
    require(s.pieces.front().begin == 0, "piecewise source must start at t = 0");
    for (std::size_t i = 0; i < s.pieces.size(); ++i) {
        const auto& p = s.pieces[i];
        require(std::isfinite(p.value), "piece value must be finite");
        require(p.begin < p.end, "piece intervals must be nonempty and ordered");
        if (i + 1 < s.pieces.size())
            require(p.end == s.pieces[i + 1].begin, "piece intervals must be contiguous");
        if (p.value != 0)
            require(p.end <= grid.t_total(), "nonzero piece [" + std::to_string(p.begin) + ", " +
                                                 std::to_string(p.end) + ") exceeds t_total");
    }
    require(s.pieces.back().end >= grid.t_total(), "piecewise source must cover [0, t_total]");
}

template <typename Scalar>
void validate_source(const Tabulated<Scalar>& s, const TimeGrid<Scalar>& grid)
{
    require(static_cast<Eigen::Index>(s.samples.size()) == grid.n(),
            "tabulated source has " + std::to_string(s.samples.size()) + " samples, grid has " +
                std::to_string(grid.n()));
}

} // namespace detail

/// Point evaluation at t_j. Jumps take the right-limit value.
template <typename Scalar>
Signal<Scalar> render_source(const SourceSpec<Scalar>& spec, const TimeGrid<Scalar>& grid)
{
    std::visit([&](const auto& s) { detail::validate_source(s, grid); }, spec);

    Vector<Scalar> values(grid.n());
    for (Eigen::Index j = 0; j < grid.n(); ++j) {
        const Scalar t = grid.time(j);
        values[j] = std::visit(
            [&](const auto& s) -> Scalar {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, ExponentialDecay<Scalar>>) {
                    return t < s.cutoff ? s.amplitude * std::exp(-t) : Scalar(0);
                } else if constexpr (std::is_same_v<S, PiecewiseConstant<Scalar>>) {
                    for (const auto& p : s.pieces)
                        if (t >= p.begin && t < p.end)
                            return p.value;
                    return Scalar(0);
                } else {
                    return s.samples[static_cast<std::size_t>(j)];
                }
            },
            spec);
    }
    return {grid, values};
}

// ---------------------------------------------------------------------------
// Forward map

/// Spectral forward route: y = F^{-1}[ F[f] / Lambda ]. Lambda never vanishes
/// for nu > 0, and dividing by the same symmetrized samples that apply_T
/// multiplies with makes the pair an exact discrete inverse.
template <typename Scalar>
Signal<Scalar> synthesize_data(const Signal<Scalar>& f, const TransportParams<Scalar>& params)
{
    return apply_multiplier(f, lambda_samples(f.grid, params).cwiseInverse().eval());
}

template <typename Scalar>
struct PdeOracleOptions {
    Scalar domain_length;     // L > x0
    Eigen::Index space_steps; // intervals on [0, L]
    Eigen::Index time_substeps = 1;
    Scalar tolerance = Scalar(0.05); // allowed relative L2 change under spatial refinement
};

namespace detail {

// Crank-Nicolson with centered differences; u(0) = 0, ghost-node Neumann at L.
template <typename Scalar>
Vector<Scalar> crank_nicolson_trace(const Signal<Scalar>& f, const TransportParams<Scalar>& params,
                                    Scalar length, Eigen::Index steps, Eigen::Index substeps)
{
    using Sparse = Eigen::SparseMatrix<Scalar>;
    const Eigen::Index unknowns = steps; // nodes 1..steps
    const Scalar dx = length / static_cast<Scalar>(steps);
    const Scalar h = f.grid.dt() / static_cast<Scalar>(substeps);

    const Scalar lower = params.alpha2() / (dx * dx) + params.beta() / (2 * dx);
    const Scalar diag = -2 * params.alpha2() / (dx * dx) - params.nu();
    const Scalar upper = params.alpha2() / (dx * dx) - params.beta() / (2 * dx);

    std::vector<Eigen::Triplet<Scalar>> triplets;
    triplets.reserve(static_cast<std::size_t>(3 * unknowns));
    for (Eigen::Index i = 0; i < unknowns; ++i) {
        triplets.emplace_back(i, i, diag);
        if (i > 0)
            triplets.emplace_back(i, i - 1, lower);
        if (i + 1 < unknowns)
            triplets.emplace_back(i, i + 1, upper);
    }
    // Ghost node u_{J+1} = u_{J-1} folds the upper coefficient into the last row.
    triplets.emplace_back(unknowns - 1, unknowns - 2, upper);
    Sparse op(unknowns, unknowns);
    op.setFromTriplets(triplets.begin(), triplets.end());

    Sparse identity(unknowns, unknowns);
    identity.setIdentity();
    const Sparse implicit = identity - (h / 2) * op;
    const Sparse explicit_part = identity + (h / 2) * op;

    Eigen::SparseLU<Sparse> solver;
    solver.compute(implicit);
    if (solver.info() != Eigen::Success)
        throw NonConvergence("Crank-Nicolson factorization failed");

    const Scalar pos = params.x0() / dx;
    const auto node = static_cast<Eigen::Index>(std::floor(pos));
    const Scalar w = pos - static_cast<Scalar>(node);
    auto trace = [&](const Vector<Scalar>& u) {
        auto at = [&](Eigen::Index k) { return k == 0 ? Scalar(0) : u[std::min(k, unknowns) - 1]; };
        return (1 - w) * at(node) + w * at(node + 1);
    };

    Vector<Scalar> u = Vector<Scalar>::Zero(unknowns);
    Vector<Scalar> out(f.grid.n());
    out[0] = 0;
    for (Eigen::Index j = 0; j + 1 < f.grid.n(); ++j) {
        const Scalar fa = f.samples[j];
        const Scalar fb = f.samples[j + 1];
        for (Eigen::Index s = 0; s < substeps; ++s) {
            const Scalar t0 = static_cast<Scalar>(s) / static_cast<Scalar>(substeps);
            const Scalar t1 = static_cast<Scalar>(s + 1) / static_cast<Scalar>(substeps);
            const Scalar source = h * ((fa + (fb - fa) * t0) + (fa + (fb - fa) * t1)) / 2;
            Vector<Scalar> rhs = explicit_part * u;
            rhs.array() += source;
            u = solver.solve(rhs);
        }
        out[j + 1] = trace(u);
    }
    return out;
}

} // namespace detail

/// Independent finite-difference forward route on [0, L] with zero initial
/// data. Solves at space_steps and 2*space_steps; throws NonConvergence if
/// the two traces differ by more than options.tolerance in relative L2, and
/// otherwise returns the finer trace.
template <typename Scalar>
Signal<Scalar> pde_oracle(const Signal<Scalar>& f, const TransportParams<Scalar>& params,
                          const PdeOracleOptions<Scalar>& options)
{
    detail::require(options.domain_length > params.x0(), "pde_oracle domain length must exceed x0");
    detail::require(options.space_steps >= 4, "pde_oracle needs at least 4 space steps");
    detail::require(options.time_substeps >= 1, "pde_oracle time_substeps must be >= 1");

    const Vector<Scalar> coarse = detail::crank_nicolson_trace(f, params, options.domain_length,
                                                               options.space_steps, options.time_substeps);
    Vector<Scalar> fine = detail::crank_nicolson_trace(f, params, options.domain_length,
                                                       2 * options.space_steps, options.time_substeps);
    const Scalar scale = fine.norm();
    const Scalar change = (fine - coarse).norm();
    if (change > options.tolerance * scale)
        throw NonConvergence("pde_oracle refinement changed the trace by " +
                             std::to_string(scale > 0 ? change / scale : change) + " relative L2");
    return {f.grid, std::move(fine)};
}

template <typename Scalar>
Signal<Scalar> pde_oracle(const Signal<Scalar>& f, const TransportParams<Scalar>& params, Scalar domain_length,
                          Eigen::Index space_steps)
{
    return pde_oracle(f, params, PdeOracleOptions<Scalar>{domain_length, space_steps});
}

/// Domain length with several decay lengths of room beyond x0: x0 + 8 alpha / sqrt(nu).
template <typename Scalar>
Scalar default_oracle_length(const TransportParams<Scalar>& params)
{
    return params.x0() + 8 * std::sqrt(params.alpha2()) / std::sqrt(params.nu());
}

// ---------------------------------------------------------------------------
// Noise

enum class NoiseKind { gaussian, uniform };

template <typename Scalar>
struct NoisySample {
    Signal<Scalar> clean;
    Signal<Scalar> noisy;
    Scalar delta; // achieved l2_norm(noisy - clean)
    std::uint64_t seed;
};

/// Adds a random perturbation scaled to discrete L2 norm exactly delta.
template <typename Scalar>
NoisySample<Scalar> add_noise(const Signal<Scalar>& y, Scalar delta, std::uint64_t seed,
                              NoiseKind kind = NoiseKind::gaussian)
{
    detail::require(std::isfinite(delta) && delta > 0, "noise level delta must be positive");
    std::mt19937_64 rng(seed);
    Vector<Scalar> e(y.grid.n());
    if (kind == NoiseKind::gaussian) {
        std::normal_distribution<Scalar> dist(0, 1);
        for (auto& v : e)
            v = dist(rng);
    } else {
        std::uniform_real_distribution<Scalar> dist(-1, 1);
        for (auto& v : e)
            v = dist(rng);
    }
    e *= delta / std::sqrt(y.grid.dt() * e.squaredNorm());
    Signal<Scalar> noisy{y.grid, y.samples + e};
    const Scalar achieved = l2_norm(noisy - y);
    return {y, std::move(noisy), achieved, seed};
}

} // namespace srcid

#endif // SRCID_FORWARD_SYNTH_HPP
