#ifndef CIRCARMA_ERRORS_HPP
#define CIRCARMA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace circarma {

/// Base class for recoverable numeric failures. Contract violations
/// (bad sizes, out-of-range indices) throw std::invalid_argument instead.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A symbol value is singular (or not PD where required) at a named grid point.
struct SingularSymbolError : Error {
    using Error::Error;
};

/// A pseudo-polynomial has a zero on the continuous unit circle, so no
/// banded outer factor exists.
struct FactorizationOnCircleError : Error {
    using Error::Error;
};

/// Positive on the discrete grid but negative somewhere on the continuous
/// circle; the root-based factorization does not apply.
struct DiscreteOnlyError : Error {
    using Error::Error;
};

/// Dense materialization was requested above the configured cap.
struct DenseCapError : Error {
    using Error::Error;
};

/// Resolved cap on the side length of dense materializations (2mN).
/// Priority: explicit set_dense_cap > CIRCARMA_DENSE_CAP env var > 4096.
long dense_cap();
void set_dense_cap(long cap);  // cap <= 0 restores env/default resolution

}  // namespace circarma

#endif
