#ifndef CIRCARMA_REALIZATION_HPP
#define CIRCARMA_REALIZATION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "circarma/circulant.hpp"
#include "circarma/cones.hpp"
#include "circarma/grid.hpp"

namespace circarma {

enum class ArmaKind { Bilateral, UnilateralForward, UnilateralBackward };

const char* to_string(ArmaKind k);

/// Bilateral: denominator/numerator hold the Hermitian halves q_0..q_n and
/// p_0..p_n of the pseudo-polynomials. Unilateral: one-sided coefficients
/// a_0..a_n (a_0 = 1 after normalization) and b_0..b_n; the backward model
/// carries the conjugate-reversed coefficients attached to zeta^{+k}.
struct ArmaModel {
    ArmaKind kind = ArmaKind::Bilateral;
    int order = 0;
    std::vector<cplx> denominator;
    std::vector<cplx> numerator;
};

/// Sigma = W W^* on the grid. The outer path stores the banded factor pair
/// (a, b) with W = b/a pointwise; the fallback is the pointwise square root.
struct WhiteningFactor {
    bool outer = false;  // false: pointwise square-root path
    std::vector<cplx> values;   // W(zeta_j)
    std::vector<cplx> window;   // coefficients W_k, k = -N+1..N
    Polynomial a;  // outer path only
    Polynomial b;
};

/// c_k = moment_k(P/Q) for k = 0..N; the first n+1 lags reproduce the data.
FullPeriodicSequence extend_covariances(const PseudoPolynomial& p, const PseudoPolynomial& q,
                                        const DiscreteCircle& circle);

ArmaModel bilateral_arma(const PseudoPolynomial& p, const PseudoPolynomial& q);

/// Roots of a complex polynomial sum c_k z^k (companion matrix plus one
/// Newton polish per root).
std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs);

/// Outer (Fejer-Riesz) factor of a pseudo-polynomial positive on the whole
/// circle: a(zeta) = sum_{k=0}^n a_k zeta^{-k} with a(zeta)a(zeta)^* = M(zeta),
/// a_0 > 0 real, all roots inside the closed unit disc.
Polynomial factor_banded(const PseudoPolynomial& m_poly);
/// Same, but failures on inputs that are positive on the given grid while
/// not on the continuous circle are reported as DiscreteOnlyError.
Polynomial factor_banded(const PseudoPolynomial& m_poly, const DiscreteCircle& circle);

struct UnilateralPair {
    ArmaModel forward;
    ArmaModel backward;
};

/// Forward/backward unilateral ARMA from the banded factorizations of P and
/// Q, normalized to a_0 = 1 with the scale moved into b.
UnilateralPair unilateral_arma(const PseudoPolynomial& p, const PseudoPolynomial& q);

/// Outer-rational whitening W = b/a from the factor pair of (P, Q).
WhiteningFactor whitening(const PseudoPolynomial& p, const PseudoPolynomial& q,
                          const DiscreteCircle& circle);
/// Pointwise square-root whitening of a positive grid spectrum.
WhiteningFactor whitening(const DiscreteSpectrum& phi);

struct SimulationOptions {
    int count = 1;
    std::uint64_t seed = 0;
    bool real_output = true;
};

/// Periodic realizations by conjugate-symmetric spectral sampling: draw
/// y^(zeta_k) with E|y^|^2 = 2N Phi(zeta_k) and inverse-transform. Exact
/// stationarity and periodicity by construction; deterministic per seed.
std::vector<std::vector<cplx>> simulate(const DiscreteSpectrum& phi, const SimulationOptions& opts);

/// Block version: Phi(zeta_j) Hermitian PD blocks; each realization is a
/// (2N x m) trajectory flattened time-major.
std::vector<std::vector<cplx>> simulate_block(const std::vector<Eigen::MatrixXcd>& phi,
                                              const DiscreteCircle& circle,
                                              const SimulationOptions& opts);

/// E{y~_J y~_K^*} for disjoint index sets J, K of time indices in [-N+1, N]:
/// (G_JJ)^{-1} G_JK (G_KK)^{-1} with G = Sigma^{-1} dense. Zero exactly when
/// the G-submatrix indexed J x K vanishes.
Eigen::MatrixXcd conditional_orthogonality(const CirculantMatrix& sigma, const std::vector<int>& j_set,
                                           const std::vector<int>& k_set);

}  // namespace circarma

#endif
