#include "srcid/checks.hpp"

#include "srcid/transport_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace srcid {

namespace {

using Complex = std::complex<double>;
using Params = TransportParams<double>;

// Tracks the smallest normalized margin seen so far and where it happened.
class MarginTracker {
public:
    explicit MarginTracker(std::string name) : name_(std::move(name)) {}

    void observe(double margin, const std::string& where)
    {
        ++cases_;
        if (margin < worst_) {
            worst_ = margin;
            where_ = where;
        }
    }

    // Passes when the worst margin is above -tolerance (rounding slack).
    PropertyResult result(double tolerance = 1e-12) const
    {
        return {name_, worst_ >= -tolerance, worst_, cases_, where_};
    }

private:
    std::string name_;
    double worst_ = std::numeric_limits<double>::infinity();
    std::size_t cases_ = 0;
    std::string where_;
};

std::string describe(const Params& p)
{
    std::ostringstream os;
    os << std::setprecision(4) << "(a2=" << p.alpha2() << ", beta=" << p.beta() << ", nu=" << p.nu()
       << ", x0=" << p.x0() << ")";
    return os.str();
}

std::vector<Params> parameter_sets(const CheckOptions& options)
{
    std::vector<Params> sets = {Params(0.01, 0.5, 1.51, 2.0), Params(0.1, 0.9, 1.0, 3.0)};
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0, 1);
    auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, unit(rng)); };
    for (int i = 0; i < options.random_parameter_sets; ++i) {
        const double a2 = log_uniform(1e-3, 10);
        const double beta = 3 * unit(rng);
        const double nu = log_uniform(1e-2, 10);
        const double x0 = log_uniform(0.1, 10);
        sets.emplace_back(a2, beta, nu, x0);
    }
    return sets;
}

// Frequencies for sup estimates: 0, +-10^k, a dense linear band around the
// peak region |xi| ~ 1/mu, and a log sweep over [1e-3, 1e6].
std::vector<double> sup_frequencies(double mu)
{
    std::vector<double> xi = {0};
    for (int k = 0; k <= 6; ++k) {
        xi.push_back(std::pow(10.0, k));
        xi.push_back(-std::pow(10.0, k));
    }
    const double band = 20 / mu;
    for (int i = -2000; i <= 2000; ++i)
        xi.push_back(band * i / 2000.0);
    for (int i = 0; i <= 900; ++i) {
        const double v = std::pow(10.0, -3 + 9.0 * i / 900.0);
        xi.push_back(v);
        xi.push_back(-v);
    }
    return xi;
}

PropertyResult check_lemma1_modulus(std::mt19937_64& rng)
{
    MarginTracker t("lemma1_modulus: |1/(1-e^-w)| <= 1/(1-e^-Re w)");
    std::uniform_real_distribution<double> re(0, 50);
    std::uniform_real_distribution<double> im(-50, 50);
    for (int i = 0; i < 1000; ++i) {
        double a = re(rng);
        if (a == 0)
            a = std::numeric_limits<double>::min();
        const Complex w(a, im(rng));
        const double lhs = 1 / std::abs(1.0 - std::exp(-w));
        const double rhs = 1 / -std::expm1(-a);
        std::ostringstream where;
        where << "w=" << w;
        t.observe((rhs - lhs) / rhs, where.str());
    }
    return t.result();
}

PropertyResult check_lemma1_sqrt(std::mt19937_64& rng, const CheckOptions& options)
{
    MarginTracker t("lemma1_sqrt: Re sqrt(w) = sqrt((Re w+|w|)/2) >= sqrt(Re w)");
    std::uniform_real_distribution<double> re(0, 50);
    std::uniform_real_distribution<double> im(-50, 50);
    for (int i = 0; i < 1000; ++i) {
        const Complex w(re(rng), im(rng));
        const double got = options.sqrt_branch(w).real();
        const double identity = std::sqrt((w.real() + std::abs(w)) / 2);
        std::ostringstream where;
        where << "w=" << w << " Re sqrt=" << got;
        // Identity to 1e-12 relative, then the lower bound.
        t.observe((1e-12 * identity - std::abs(got - identity)) / identity, where.str());
        t.observe((got - std::sqrt(w.real())) / identity, where.str());
    }
    return t.result(0);
}

PropertyResult check_lemma2()
{
    MarginTracker t("lemma2: |x|/(1+x^2 mu^2) <= 1/(2 mu)");
    for (int m = 1; m <= 99; ++m) {
        const double mu = m / 100.0;
        const double bound = 1 / (2 * mu);
        auto probe = [&](double x) {
            const double value = std::abs(x) / (1 + x * x * mu * mu);
            t.observe((bound - value) / bound, "mu=" + std::to_string(mu) + " x=" + std::to_string(x));
        };
        for (int i = -20000; i <= 20000; ++i)
            probe(1e6 * i / 20000.0);
        // Dense around the maximizer x = 1/mu.
        for (int i = -500; i <= 500; ++i)
            probe((1 + i / 1000.0) / mu);
    }
    return t.result();
}

PropertyResult check_lemma3()
{
    MarginTracker t("lemma3: g(x) <= 2 on (0, 100]");
    for (int i = 1; i <= 1000000; ++i) {
        const double x = 100.0 * i / 1000000.0;
        const double g = x < 1 ? x / -std::expm1(-x) : 1 / -std::expm1(-x);
        t.observe((2 - g) / 2, "x=" + std::to_string(x));
    }
    return t.result();
}

template <typename Bound>
PropertyResult check_multiplier_bound(const std::string& name, const std::vector<Params>& sets, Bound bound)
{
    MarginTracker t(name);
    for (const auto& params : sets) {
        for (double mu : {0.01, 0.1, 0.5, 0.9}) {
            const double b = bound(mu, params);
            double sup = 0;
            double arg = 0;
            for (double xi : sup_frequencies(mu)) {
                const double v = std::abs(stabilized_multiplier(xi, mu, params));
                if (v > sup) {
                    sup = v;
                    arg = xi;
                }
            }
            std::ostringstream where;
            where << describe(params) << " mu=" << mu << " sup=" << sup << " at xi=" << arg << " bound=" << b;
            t.observe((b - sup) / b, where.str());
        }
    }
    return t.result();
}

PropertyResult check_filter_sup()
{
    MarginTracker t("filter_sup: sup (1+xi^2)^(-p/2)(1-1/(1+xi^2 mu^2)) <= max{mu^p, mu^2}");
    for (double mu : {0.05, 0.2, 0.5}) {
        for (double p : {0.5, 2.0, 3.0}) {
            const double bound = filter_sup_bound(mu, p);
            double sup = 0;
            constexpr int samples = 1000000;
            for (int i = 0; i <= samples; ++i) {
                const double xi = (10 / mu) * i / samples;
                const double m2x2 = mu * mu * xi * xi;
                const double v = std::pow(1 + xi * xi, -p / 2) * m2x2 / (1 + m2x2);
                sup = std::max(sup, v);
            }
            std::ostringstream where;
            where << "mu=" << mu << " p=" << p << " sup=" << sup << " bound=" << bound;
            t.observe((bound - sup) / bound, where.str());
        }
    }
    return t.result();
}

PropertyResult check_hermitian(const std::vector<Params>& sets)
{
    MarginTracker t("hermitian: Lambda(-xi) = conj(Lambda(xi))");
    for (const auto& params : sets) {
        for (int i = 0; i <= 600; ++i) {
            const double xi = std::pow(10.0, -3 + 9.0 * i / 600.0);
            const Complex a = lambda_symbol(-xi, params);
            const Complex b = std::conj(lambda_symbol(xi, params));
            const double rel = std::abs(a - b) / std::abs(b);
            t.observe(1e-12 - rel, describe(params) + " xi=" + std::to_string(xi));
        }
    }
    return t.result(0);
}

PropertyResult check_pointwise_convergence(const std::vector<Params>& sets)
{
    MarginTracker t("pointwise_convergence: |R_mu symbol - Lambda| decreases as mu -> 0");
    for (const auto& params : sets) {
        for (double xi : {-1000.0, -10.0, -0.5, 0.3, 1.0, 25.0, 1e4}) {
            const Complex exact = lambda_symbol(xi, params);
            double previous = std::numeric_limits<double>::infinity();
            for (double mu = 0.9; mu > 1e-6; mu /= 2) {
                const double gap = std::abs(stabilized_multiplier(xi, mu, params) - exact) / std::abs(exact);
                // Strict decrease, relative to the previous gap.
                if (std::isfinite(previous))
                    t.observe((previous - gap) / previous,
                              describe(params) + " xi=" + std::to_string(xi) + " mu=" + std::to_string(mu));
                previous = gap;
            }
        }
    }
    return t.result(0);
}

} // namespace

bool CheckReport::passed() const
{
    return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.passed; });
}

std::string CheckReport::to_text() const
{
    std::ostringstream os;
    for (const auto& p : properties) {
        os << (p.passed ? "PASS " : "FAIL ") << p.name << "\n     worst margin " << std::setprecision(6)
           << p.worst_margin << " over " << p.cases << " cases; worst at " << p.detail << "\n";
    }
    os << (passed() ? "all properties hold\n" : "some properties FAILED\n");
    return os.str();
}

CheckReport run_checks(const CheckOptions& options)
{
    std::mt19937_64 rng(options.seed);
    const auto sets = parameter_sets(options);

    CheckReport report;
    report.properties.push_back(check_lemma1_modulus(rng));
    report.properties.push_back(check_lemma1_sqrt(rng, options));
    report.properties.push_back(check_lemma2());
    report.properties.push_back(check_lemma3());
    report.properties.push_back(check_multiplier_bound(
        "lemma4: |Lambda/(1+mu^2 xi^2)| <= (2nu+1)/(mu^2 m x0) (stated constant)", sets,
        [](double mu, const Params& p) { return lemma4_bound(mu, p); }));
    report.properties.push_back(check_multiplier_bound(
        "lemma4_proof_constant: |Lambda/(1+mu^2 xi^2)| <= (2nu+1)/(mu^2 min(1, m x0))", sets,
        [](double mu, const Params& p) { return proof_multiplier_bound(mu, p); }));
    report.properties.push_back(check_filter_sup());
    report.properties.push_back(check_hermitian(sets));
    report.properties.push_back(check_pointwise_convergence(sets));
    return report;
}

} // namespace srcid
