#ifndef CIRCARMA_TYPES_HPP
#define CIRCARMA_TYPES_HPP

#include <complex>
#include <vector>

namespace circarma {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

/// e^{i*angle} without going through std::polar's magnitude branch.
inline cplx unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace circarma

#endif
