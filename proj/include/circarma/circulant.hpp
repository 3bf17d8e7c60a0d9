#ifndef CIRCARMA_CIRCULANT_HPP
#define CIRCARMA_CIRCULANT_HPP

#include <Eigen/Dense>
#include <vector>

#include "circarma/grid.hpp"

namespace circarma {

struct BandedCheck {
    bool banded;
    double residual;  // max out-of-band coefficient magnitude (entrywise)
};

/// (Block-)circulant matrix held by its symbol values M(zeta_j): 2N Hermitian
/// (or, for shift/factor matrices, general) m x m blocks. All arithmetic is
/// pointwise in the grid domain; the coefficient window and the dense form
/// are derived on demand for verification.
class CirculantMatrix {
  public:
    CirculantMatrix(DiscreteCircle circle, std::vector<Eigen::MatrixXcd> values);

    static CirculantMatrix identity(const DiscreteCircle& circle, int m = 1);
    /// Cyclic (block-)shift: symbol zeta * I_m. Not Hermitian.
    static CirculantMatrix shift(const DiscreteCircle& circle, int m = 1);
    static CirculantMatrix from_scalar_values(const DiscreteCircle& circle,
                                              const std::vector<double>& values);
    static CirculantMatrix from_scalar_values(const DiscreteCircle& circle,
                                              const std::vector<cplx>& values);
    /// From the full coefficient window M_{-N+1}..M_N (2N blocks).
    static CirculantMatrix from_window(const DiscreteCircle& circle,
                                       std::vector<Eigen::MatrixXcd> window);
    /// Hermitian banded of order n from lags M_0..M_n (M_{-k} = M_k^*).
    static CirculantMatrix from_banded(const DiscreteCircle& circle,
                                       const std::vector<Eigen::MatrixXcd>& lags);
    static CirculantMatrix from_pseudo(const DiscreteCircle& circle, const PseudoPolynomial& p);

    const DiscreteCircle& circle() const { return circle_; }
    int block_size() const { return m_; }
    int points() const { return circle_.size(); }
    const Eigen::MatrixXcd& value(int j) const { return values_[static_cast<size_t>(j)]; }
    const std::vector<Eigen::MatrixXcd>& values() const { return values_; }

    bool is_hermitian(double tol = 1e-10) const;
    /// Re-Hermitize as (X+X*)/2 when the asymmetry is below tol; larger
    /// asymmetry signals an internal error.
    CirculantMatrix hermitized(double tol = 1e-10) const;

    CirculantMatrix multiply(const CirculantMatrix& rhs) const;
    CirculantMatrix add(const CirculantMatrix& rhs) const;
    CirculantMatrix scale(const cplx& s) const;
    /// Pointwise inverse; a singular value at any grid point is reported by
    /// its zeta_j.
    CirculantMatrix inverse() const;
    /// Matrix logarithm through the Hermitian eigendecomposition of each
    /// block; requires every value PD.
    CirculantMatrix log() const;

    /// Coefficient window M_{-N+1}..M_N via the inverse block DFT.
    std::vector<Eigen::MatrixXcd> window() const;

    BandedCheck is_banded(int n, double tol) const;
    /// Tolerance 1e-8 scaled by the entrywise norm of M_0.
    BandedCheck is_banded(int n) const;

    /// Dense 2mN x 2mN materialization (test oracle; subject to dense_cap).
    Eigen::MatrixXcd dense() const;

  private:
    DiscreteCircle circle_;
    int m_;
    std::vector<Eigen::MatrixXcd> values_;
};

CirculantMatrix operator*(const CirculantMatrix& a, const CirculantMatrix& b);
CirculantMatrix operator+(const CirculantMatrix& a, const CirculantMatrix& b);

/// trace(dense(A) dense(B)) computed as sum_j trace(A(zeta_j) B(zeta_j)).
double trace_form(const CirculantMatrix& a, const CirculantMatrix& b);

/// The unitary DFT matrix F with dense(M) = F^* diag(M(zeta_j)) F.
Eigen::MatrixXcd fourier_matrix(const DiscreteCircle& circle, int m = 1);

/// Verification form of the diagonalization: the unitary factor together
/// with the symbol values it conjugates into the dense matrix.
struct Diagonalization {
    Eigen::MatrixXcd fourier;
    std::vector<Eigen::MatrixXcd> values;
};

Diagonalization diagonalize(const CirculantMatrix& m);

}  // namespace circarma

#endif
