#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "srcid/forward_synth.hpp"
#include "srcid/inversion.hpp"

#include <cmath>
#include <random>

using srcid::MuRule;
using srcid::Signal;
using srcid::TimeGrid;
using srcid::TransportParams;
using srcid::Vector;

namespace {

const TransportParams<double> example1(0.01, 0.5, 1.51, 2.0);
const TransportParams<double> example2(0.1, 0.9, 1.0, 3.0);
const TimeGrid<double> grid(4096, 40.0);

Signal<double> random_signal(std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0, 1);
    Vector<double> s(grid.n());
    for (auto& v : s)
        v = g(rng);
    return {grid, s};
}

} // namespace

TEST_CASE("mu rules")
{
    CHECK(srcid::choose_mu(0.01, 2.0, MuRule::theorem2()) == doctest::Approx(std::pow(0.01, 0.25)));
    CHECK(srcid::choose_mu(0.01, 2.0, MuRule::section5()) == doctest::Approx(0.1));
    CHECK(srcid::choose_mu(0.1, 3.0, MuRule::section5()) == doctest::Approx(std::pow(0.1, 0.4)));
    CHECK(srcid::choose_mu(0.5, 2.0, MuRule::manual(0.2)) == 0.2);
    CHECK(srcid::choose_mu(0.01, 2.0, MuRule::theorem2()) < srcid::choose_mu(0.01, 3.0, MuRule::theorem2()));
    CHECK(srcid::choose_mu(0.01, 2.0, MuRule::section5()) < srcid::choose_mu(0.02, 2.0, MuRule::section5()));

    CHECK_THROWS_AS(srcid::choose_mu(0.0, 2.0, MuRule::theorem2()), srcid::DomainError);
    CHECK_THROWS_AS(srcid::choose_mu(1.0, 2.0, MuRule::theorem2()), srcid::DomainError);
    CHECK_THROWS_AS(srcid::choose_mu(1.5, 2.0, MuRule::theorem2()), srcid::DomainError);
    CHECK_THROWS_AS(srcid::choose_mu(0.1, 0.0, MuRule::theorem2()), srcid::DomainError);
    CHECK_THROWS_AS(MuRule::manual(1.0), srcid::DomainError);
}

TEST_CASE("mu rule parsing")
{
    CHECK(MuRule::parse("theorem2") == MuRule::theorem2());
    CHECK(MuRule::parse("section5") == MuRule::section5());
    CHECK(MuRule::parse("manual:0.25") == MuRule::manual(0.25));
    CHECK(MuRule::parse(MuRule::manual(0.125).to_string()) == MuRule::manual(0.125));
    CHECK(MuRule::section5().to_string() == "section5");
    CHECK_THROWS_AS(MuRule::parse("manual:"), srcid::DomainError);
    CHECK_THROWS_AS(MuRule::parse("manual:abc"), srcid::DomainError);
    CHECK_THROWS_AS(MuRule::parse("manual:1.5"), srcid::DomainError);
    CHECK_THROWS_AS(MuRule::parse("discrepancy"), srcid::DomainError);
}

TEST_CASE("operators on zero and exact data")
{
    CHECK(srcid::l2_norm(srcid::apply_T(Signal<double>::zero(grid), example1)) == 0.0);
    CHECK(srcid::l2_norm(srcid::apply_R_mu(Signal<double>::zero(grid), 0.3, example1)) == 0.0);
    CHECK_THROWS_AS(srcid::apply_R_mu(Signal<double>::zero(grid), 1.0, example1), srcid::DomainError);
    CHECK_THROWS_AS(srcid::apply_R_mu(Signal<double>::zero(grid), 0.0, example1), srcid::DomainError);
}

TEST_CASE("R_mu is linear")
{
    std::mt19937_64 rng(9);
    const auto a = random_signal(rng);
    const auto b = random_signal(rng);
    const Signal<double> combo{grid, 3 * a.samples - 0.5 * b.samples};
    const auto lhs = srcid::apply_R_mu(combo, 0.2, example2);
    const Signal<double> rhs{grid, 3 * srcid::apply_R_mu(a, 0.2, example2).samples -
                                       0.5 * srcid::apply_R_mu(b, 0.2, example2).samples};
    CHECK(srcid::l2_norm(lhs - rhs) < 1e-11 * srcid::l2_norm(rhs));
}

TEST_CASE("operator norm of R_mu stays under the multiplier bound")
{
    std::mt19937_64 rng(10);
    for (const auto& p : {example1, example2}) {
        for (double mu : {0.1, 0.3, 0.5}) {
            const double bound = srcid::lemma4_bound(mu, p);
            // The discrete operator norm is the largest sampled multiplier.
            CHECK(srcid::stabilized_samples(grid, mu, p).cwiseAbs().maxCoeff() <= bound);
            for (int i = 0; i < 100; ++i) {
                const auto y = random_signal(rng);
                CHECK(srcid::l2_norm(srcid::apply_R_mu(y, mu, p)) <= bound * srcid::l2_norm(y));
            }
        }
        // At mu = 0.9 only the proof constant is guaranteed.
        CHECK(srcid::stabilized_samples(grid, 0.9, p).cwiseAbs().maxCoeff() <= srcid::proof_multiplier_bound(0.9, p));
    }
}

TEST_CASE("regularization property on clean data")
{
    for (const auto& [spec, p] : {std::pair{srcid::example1_source<double>(), example1},
                                  std::pair{srcid::example2_source<double>(), example2}}) {
        const auto f = srcid::render_source(spec, grid);
        const auto y = srcid::synthesize_data(f, p);
        double previous = INFINITY;
        double mu = 0.5;
        for (int k = 0; k < 24; ++k, mu /= 2) {
            const double err = srcid::l2_norm(f - srcid::apply_R_mu(y, mu, p));
            CHECK(err < previous);
            previous = err;
        }
        CHECK(previous < 1e-8);
    }
}

TEST_CASE("error splits into bias and propagated noise")
{
    const TimeGrid<double> g(4096, 40.0);
    for (const auto& [spec, p, order] : {std::tuple{srcid::example1_source<double>(), example1, 2.0},
                                         std::tuple{srcid::example2_source<double>(), example2, 3.0}}) {
        const auto f = srcid::render_source(spec, g);
        const auto y = srcid::synthesize_data(f, p);
        const double c = srcid::hp_norm(f, order);
        for (double delta : {0.01, 0.05, 0.1}) {
            const double mu = srcid::choose_mu(delta, order, MuRule::section5());
            const auto noisy = srcid::add_noise(y, delta, 3).noisy;
            const double err = srcid::l2_norm(f - srcid::apply_R_mu(noisy, mu, p));
            CHECK(err <= srcid::filter_sup_bound(mu, order) * c + srcid::lemma4_bound(mu, p) * delta);
        }
    }
}
