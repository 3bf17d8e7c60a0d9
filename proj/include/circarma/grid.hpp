#ifndef CIRCARMA_GRID_HPP
#define CIRCARMA_GRID_HPP

#include <span>
#include <vector>

#include "circarma/types.hpp"

namespace circarma {

/// The 2N-point discrete unit circle: zeta_k = e^{ik*pi/N}, k = -N+1..N.
/// Grid order is fixed to k = -N+1..N; every serialization uses it.
class DiscreteCircle {
  public:
    explicit DiscreteCircle(int half_period);

    int half_period() const { return n_half_; }
    int size() const { return 2 * n_half_; }  // number of grid points

    /// Signed index of the j-th point, j = 0..2N-1.
    int k_of(int j) const { return j - n_half_ + 1; }
    /// Storage position of signed index k in [-N+1, N].
    int index_of(int k) const { return k + n_half_ - 1; }

    double theta(int j) const { return kPi * static_cast<double>(k_of(j)) / n_half_; }
    cplx point(int j) const { return points_[static_cast<size_t>(j)]; }
    const std::vector<cplx>& points() const { return points_; }

    /// zeta_j^p for arbitrary integer power p.
    cplx power(int j, int p) const { return unit(theta(j) * p); }

    bool operator==(const DiscreteCircle& o) const { return n_half_ == o.n_half_; }

  private:
    int n_half_;
    std::vector<cplx> points_;
};

/// Hermitian Laurent polynomial P(zeta) = sum_{k=-n}^{n} p_k zeta^{-k} with
/// p_{-k} = conj(p_k), stored as p_0..p_n (p_0 real). Real-valued on |zeta|=1.
class PseudoPolynomial {
  public:
    PseudoPolynomial() : coeffs_{cplx(1.0, 0.0)} {}
    explicit PseudoPolynomial(std::vector<cplx> coeffs, bool real_only = false);

    static PseudoPolynomial constant(double p0) { return PseudoPolynomial({cplx(p0, 0.0)}); }
    static PseudoPolynomial one() { return constant(1.0); }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<cplx>& coeffs() const { return coeffs_; }
    bool real_only() const { return real_only_; }

    /// Coefficient at signed index k (Hermitian fill-in, zero beyond degree).
    cplx coeff(int k) const;

    /// Value at e^{i*theta}; real by the Hermitian structure.
    double eval(double theta) const;

    /// Values on the grid. Degrees >= 2N are rejected; identities involving
    /// moments additionally need degree < N (the banded regime).
    std::vector<double> eval_on(const DiscreteCircle& circle) const;

    /// Minimum over a fine sampling of the continuous circle (positivity probe).
    double min_on_circle(int samples = 4096) const;

    PseudoPolynomial scaled(double s) const;

  private:
    std::vector<cplx> coeffs_;
    bool real_only_ = false;
};

/// One-sided polynomial a(zeta) = sum_{k=0}^{n} a_k zeta^{-k}; complex-valued
/// on the circle. Used for spectral factors and unilateral models.
struct Polynomial {
    std::vector<cplx> c;  // a_0..a_n

    int degree() const { return static_cast<int>(c.size()) - 1; }
    cplx eval(double theta) const;
    std::vector<cplx> eval_on(const DiscreteCircle& circle) const;
};

/// Strictly positive values on the 2N grid points; the discrete spectrum.
struct DiscreteSpectrum {
    DiscreteCircle circle;
    std::vector<double> values;  // ordered k = -N+1..N

    DiscreteSpectrum() : circle(1), values(2, 0.0) {}
    DiscreteSpectrum(DiscreteCircle c, std::vector<double> v)
        : circle(std::move(c)), values(std::move(v)) {}

    double min_value() const;
    bool is_positive() const { return min_value() > 0.0; }
};

DiscreteSpectrum make_spectrum(const DiscreteCircle& circle, std::vector<double> values);

/// (1/2N) sum_j f(zeta_j) zeta_j^k, i.e. the integral of e^{ik theta} f dnu.
cplx discrete_moment(std::span<const double> values, const DiscreteCircle& circle, int k);
cplx discrete_moment(std::span<const cplx> values, const DiscreteCircle& circle, int k);

/// c_0..c_n of a spectrum (inverse DFT of the grid values); requires n < N.
std::vector<cplx> moments_of(const DiscreteSpectrum& phi, int n);

/// Full-window inverse DFT: coefficients g_k, k = -N+1..N, stored at k+N-1.
std::vector<cplx> inverse_dft(std::span<const cplx> values, const DiscreteCircle& circle);
std::vector<cplx> inverse_dft(std::span<const double> values, const DiscreteCircle& circle);

/// Forward evaluation of a full coefficient window at every grid point.
std::vector<cplx> window_eval(std::span<const cplx> window, const DiscreteCircle& circle);

/// Project real grid values onto a degree-n pseudo-polynomial (n < N): the
/// coefficients are the moments, Hermitian by construction. With real_only
/// set, imaginary parts below 1e-12 are truncated and larger residues signal
/// an internal error.
PseudoPolynomial pseudo_from_values(std::span<const double> values, const DiscreteCircle& circle,
                                    int n, bool real_only = false);

/// <c,p> = sum_{k=-n}^n c_k conj(p_k), with Hermitian fill-in on both sides.
/// Real for Hermitian coefficient sequences.
double hermitian_inner(std::span<const cplx> c, std::span<const cplx> p);

}  // namespace circarma

#endif
