#ifndef CIRCARMA_CONES_HPP
#define CIRCARMA_CONES_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "circarma/grid.hpp"

namespace circarma {

/// Partial covariance data: lags C_0..C_n (m x m Hermitian, C_0 PD) together
/// with the half period N, n < N. m = 1 holds scalars as 1x1 blocks.
struct CovarianceData {
    int m = 1;
    int half_period = 0;  // N
    std::vector<Eigen::MatrixXcd> lags;

    static CovarianceData scalar(int half_period, std::vector<cplx> lags);

    int order() const { return static_cast<int>(lags.size()) - 1; }
    cplx scalar_lag(int k) const { return lags[static_cast<size_t>(k)](0, 0); }
    std::vector<cplx> scalar_lags() const;
    double scale() const;  // |C_0| entry norm, the natural residual scale

    void validate() const;
};

/// Lags c_0..c_N (optionally further explicit entries up to 2N-1, which must
/// satisfy the wraparound c_{2N-k} = conj(c_k)); assembles the circulant
/// covariance of one full period.
struct FullPeriodicSequence {
    int m = 1;
    int half_period = 0;
    std::vector<Eigen::MatrixXcd> lags;  // C_0..C_N [, explicit C_{N+1}..]

    static FullPeriodicSequence scalar(int half_period, std::vector<cplx> lags);
    std::vector<cplx> scalar_lags() const;
};

struct SequenceValidation {
    bool valid;
    bool wraparound_ok;
    bool positive;
    std::string detail;
};

/// T_n > 0 through the Hermitian eigenvalue test with a relative pivot floor.
bool toeplitz_positive(const CovarianceData& c, double* min_eigenvalue = nullptr);

/// The (block-)Toeplitz matrix of the lags (test oracle and CLI `check`).
Eigen::MatrixXcd toeplitz_matrix(const CovarianceData& c);

enum class Membership { Feasible, Infeasible, Indeterminate };

struct MembershipCertificate {
    Membership status;
    std::string diagnostic;
    /// The maximum-entropy denominator, present when Feasible (m = 1).
    std::optional<PseudoPolynomial> q_me;
    /// Matrix ME denominator lags, present when Feasible and m > 1.
    std::vector<Eigen::MatrixXcd> q_me_block;
    /// Normalized coefficient direction along which the dual diverges,
    /// present when Infeasible.
    std::vector<cplx> boundary_direction;
};

/// Constructive membership test: run the maximum-entropy dual solve (P = 1).
/// Interior convergence certifies c in the feasibility cone and returns Q_ME;
/// detected divergence returns Infeasible with the boundary direction.
MembershipCertificate certify_membership(const CovarianceData& c);

/// Wraparound symmetry plus positivity of the assembled circulant symbol.
SequenceValidation validate_full_sequence(const FullPeriodicSequence& seq);

/// Symbol values of the assembled full-period circulant (2N Hermitian blocks).
std::vector<Eigen::MatrixXcd> full_sequence_symbol(const FullPeriodicSequence& seq);

}  // namespace circarma

#endif
