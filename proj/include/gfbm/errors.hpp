#ifndef GFBM_ERRORS_HPP
#define GFBM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gfbm {

// A series or continued fraction failed to reach tolerance within its
// iteration budget.
class NonConvergenceError : public std::runtime_error {
public:
    explicit NonConvergenceError(const std::string& what)
        : std::runtime_error(what) {}
};

// Cholesky factorization hit a non-positive pivot even after jitter.
// leading_minor is the 1-based index of the offending pivot.
class FactorizationError : public std::runtime_error {
public:
    FactorizationError(const std::string& what, int minor)
        : std::runtime_error(what), leading_minor(minor) {}
    int leading_minor;
};

// A finite-difference evolution produced non-physical output (mass drift,
// blow-up).
class InstabilityError : public std::runtime_error {
public:
    explicit InstabilityError(const std::string& what)
        : std::runtime_error(what) {}
};

} // namespace gfbm

#endif
