#ifndef SRCID_ERRORS_HPP
#define SRCID_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace srcid {

// Precondition or invariant violated by a caller-supplied value.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Inverse transform produced a significant imaginary part: some multiplier
// broke Hermitian symmetry.
class NonRealReconstruction : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Finite-difference forward solve did not settle under refinement.
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what)
{
    if (!ok)
        throw DomainError(what);
}

} // namespace detail
} // namespace srcid

#endif // SRCID_ERRORS_HPP
