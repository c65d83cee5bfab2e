#ifndef SRCID_CHECKS_HPP
#define SRCID_CHECKS_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace srcid {

struct CheckOptions {
    /// Square root used by the lemma1_sqrt branch check. Replaceable so a faulty
    /// branch can be injected as a negative control.
    std::function<std::complex<double>(std::complex<double>)> sqrt_branch = [](std::complex<double> w) {
        return std::sqrt(w);
    };
    int random_parameter_sets = 20;
    std::uint64_t seed = 20240917;
};

struct PropertyResult {
    std::string name;
    bool passed;
    double worst_margin; // min over cases of (bound - value) / scale; negative means violated
    std::size_t cases;
    std::string detail;  // where the worst case occurred
};

struct CheckReport {
    std::vector<PropertyResult> properties;

    bool passed() const;
    std::string to_text() const;
};

/// Property suite: the elementary bounds behind the multiplier estimate, the filter sup bound,
/// Hermitian symmetry and pointwise convergence of the stabilized multiplier,
/// over both example parameter sets and random valid ones.
CheckReport run_checks(const CheckOptions& options = {});

} // namespace srcid

#endif // SRCID_CHECKS_HPP
