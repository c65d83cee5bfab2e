#ifndef SRCID_ERROR_ANALYSIS_HPP
#define SRCID_ERROR_ANALYSIS_HPP

#include "srcid/errors.hpp"
#include "srcid/forward_synth.hpp"
#include "srcid/inversion.hpp"
#include "srcid/spectral_grid.hpp"
#include "srcid/transport_kernel.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace srcid {

template <typename Scalar>
struct ErrorReport {
    Scalar delta;
    Scalar err_unregularized; // ||f - T y_delta||
    Scalar err_regularized;   // ||f - R_mu y_delta||
    Scalar mu_used;
    Scalar bound;
    std::uint64_t seed;
    MuRule rule;
};

/// Multiplier constant of the Hoelder bound, (2 nu + 1) / (m x0), written in
/// the original variables as 2 a2 (2 nu + 1) / ((-beta + sqrt(beta^2 + 4 a2 nu)) x0).
template <typename Scalar>
Scalar noise_constant(const TransportParams<Scalar>& params)
{
    return (2 * params.nu() + 1) / (params.decay_exponent() * params.x0());
}

/// K max{delta^{p/(p+2)}, delta^{2/(p+2)}} with K = C + noise_constant(params).
template <typename Scalar>
Scalar theoretical_bound(Scalar delta, Scalar p, Scalar source_bound, const TransportParams<Scalar>& params)
{
    detail::require(delta > 0 && delta < 1, "noise level delta must lie in (0,1), got " + std::to_string(delta));
    detail::require(p > 0, "smoothness order p must be positive");
    detail::require(source_bound > 0, "source H^p bound C must be positive");
    const Scalar k = source_bound + noise_constant(params);
    return k * std::max(std::pow(delta, p / (p + 2)), std::pow(delta, 2 / (p + 2)));
}

/// Exponent of the bound in delta: min{p, 2} / (p + 2).
template <typename Scalar>
Scalar theoretical_rate(Scalar p)
{
    return std::min(p, Scalar(2)) / (p + 2);
}

/// Everything in a run that does not depend on (delta, seed, rule).
template <typename Scalar>
struct Problem {
    TransportParams<Scalar> params;
    Signal<Scalar> source;
    Signal<Scalar> data;
    Scalar p;
    Scalar source_bound; // C; hp_norm(source, p) unless overridden
    NoiseKind noise = NoiseKind::gaussian;
};

template <typename Scalar>
Problem<Scalar> prepare_problem(const SourceSpec<Scalar>& spec, const TransportParams<Scalar>& params,
                                const TimeGrid<Scalar>& grid, Scalar p,
                                std::optional<Scalar> source_bound = std::nullopt,
                                NoiseKind noise = NoiseKind::gaussian)
{
    detail::require(p > 0, "smoothness order p must be positive");
    Signal<Scalar> f = render_source(spec, grid);
    Signal<Scalar> y = synthesize_data(f, params);
    const Scalar c = source_bound ? *source_bound : hp_norm(f, p);
    return {params, std::move(f), std::move(y), p, c, noise};
}

template <typename Scalar>
struct Reconstruction {
    ErrorReport<Scalar> report;
    Signal<Scalar> unregularized;
    Signal<Scalar> regularized;
};

template <typename Scalar>
Reconstruction<Scalar> reconstruct(const Problem<Scalar>& problem, Scalar delta, const MuRule& rule,
                                   std::uint64_t seed)
{
    const Scalar mu = choose_mu(delta, problem.p, rule);
    const Scalar bound = theoretical_bound(delta, problem.p, problem.source_bound, problem.params);
    const NoisySample<Scalar> sample = add_noise(problem.data, delta, seed, problem.noise);

    Signal<Scalar> unreg = apply_T(sample.noisy, problem.params);
    Signal<Scalar> reg = apply_R_mu(sample.noisy, mu, problem.params);
    ErrorReport<Scalar> report{delta, l2_norm(problem.source - unreg), l2_norm(problem.source - reg),
                               mu, bound, seed, rule};
    return {report, std::move(unreg), std::move(reg)};
}

template <typename Scalar>
ErrorReport<Scalar> run_single(const Problem<Scalar>& problem, Scalar delta, const MuRule& rule, std::uint64_t seed)
{
    return reconstruct(problem, delta, rule, seed).report;
}

template <typename Scalar>
ErrorReport<Scalar> run_single(const SourceSpec<Scalar>& spec, const TransportParams<Scalar>& params,
                               const TimeGrid<Scalar>& grid, Scalar delta, Scalar p, const MuRule& rule,
                               std::uint64_t seed)
{
    return run_single(prepare_problem(spec, params, grid, p), delta, rule, seed);
}

/// ||f - R_mu y|| on clean data: the bias half of the error split.
template <typename Scalar>
Scalar clean_regularization_error(const Problem<Scalar>& problem, Scalar mu)
{
    return l2_norm(problem.source - apply_R_mu(problem.data, mu, problem.params));
}

/// All (delta, seed) pairs, delta-major. Work is split across hardware
/// threads; output order does not depend on the split.
template <typename Scalar>
std::vector<ErrorReport<Scalar>> sweep(const Problem<Scalar>& problem, const std::vector<Scalar>& deltas,
                                       const MuRule& rule, const std::vector<std::uint64_t>& seeds)
{
    detail::require(!deltas.empty(), "sweep needs at least one delta");
    detail::require(!seeds.empty(), "sweep needs at least one seed");
    for (Scalar d : deltas)
        choose_mu(d, problem.p, rule); // validate up front, before spawning work

    const std::size_t total = deltas.size() * seeds.size();
    std::vector<std::optional<ErrorReport<Scalar>>> slots(total);
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < total; i += stride) {
            try {
                slots[i] = run_single(problem, deltas[i / seeds.size()], rule, seeds[i % seeds.size()]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, total);
    if (workers == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(work, w, workers);
    }
    if (failure)
        std::rethrow_exception(failure);

    std::vector<ErrorReport<Scalar>> out;
    out.reserve(total);
    for (auto& s : slots)
        out.push_back(*s);
    return out;
}

template <typename Scalar>
std::vector<ErrorReport<Scalar>> sweep(const SourceSpec<Scalar>& spec, const TransportParams<Scalar>& params,
                                       const TimeGrid<Scalar>& grid, const std::vector<Scalar>& deltas, Scalar p,
                                       const MuRule& rule, const std::vector<std::uint64_t>& seeds)
{
    return sweep(prepare_problem(spec, params, grid, p), deltas, rule, seeds);
}

/// Per-delta statistics over seeds, one row of a results table.
template <typename Scalar>
struct DeltaSummary {
    Scalar delta;
    Scalar mu;
    Scalar err_unreg_mean, err_unreg_min, err_unreg_max;
    Scalar err_reg_mean, err_reg_min, err_reg_max;
    Scalar bound;
    MuRule rule;
    std::size_t seeds;
};

/// Groups reports by delta, in order of first appearance.
template <typename Scalar>
std::vector<DeltaSummary<Scalar>> aggregate(const std::vector<ErrorReport<Scalar>>& reports)
{
    std::vector<DeltaSummary<Scalar>> rows;
    for (const auto& r : reports) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& row) { return row.delta == r.delta; });
        if (it == rows.end()) {
            rows.push_back({r.delta, r.mu_used, 0, r.err_unregularized, r.err_unregularized, 0, r.err_regularized,
                            r.err_regularized, r.bound, r.rule, 0});
            it = std::prev(rows.end());
        }
        it->err_unreg_mean += r.err_unregularized;
        it->err_reg_mean += r.err_regularized;
        it->err_unreg_min = std::min(it->err_unreg_min, r.err_unregularized);
        it->err_unreg_max = std::max(it->err_unreg_max, r.err_unregularized);
        it->err_reg_min = std::min(it->err_reg_min, r.err_regularized);
        it->err_reg_max = std::max(it->err_reg_max, r.err_regularized);
        ++it->seeds;
    }
    for (auto& row : rows) {
        row.err_unreg_mean /= static_cast<Scalar>(row.seeds);
        row.err_reg_mean /= static_cast<Scalar>(row.seeds);
    }
    return rows;
}

/// Least-squares slope of log(mean err_regularized) against log(delta).
/// Needs at least 4 distinct deltas spanning at least two decades.
template <typename Scalar>
Scalar estimate_rate(const std::vector<ErrorReport<Scalar>>& reports)
{
    const auto rows = aggregate(reports);
    detail::require(rows.size() >= 4, "rate estimate needs at least 4 distinct delta values, got " +
                                          std::to_string(rows.size()));
    Scalar lo = rows.front().delta;
    Scalar hi = lo;
    for (const auto& r : rows) {
        lo = std::min(lo, r.delta);
        hi = std::max(hi, r.delta);
    }
    detail::require(hi / lo >= Scalar(100) * (1 - Scalar(1e-12)), "rate estimate needs deltas spanning two decades");

    Eigen::Matrix<Scalar, Eigen::Dynamic, 2> design(static_cast<Eigen::Index>(rows.size()), 2);
    Vector<Scalar> rhs(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        detail::require(rows[i].err_reg_mean > 0, "rate estimate needs positive errors");
        const auto row = static_cast<Eigen::Index>(i);
        design(row, 0) = std::log(rows[i].delta);
        design(row, 1) = 1;
        rhs[row] = std::log(rows[i].err_reg_mean);
    }
    return design.colPivHouseholderQr().solve(rhs)[0];
}

} // namespace srcid

#endif // SRCID_ERROR_ANALYSIS_HPP
