#ifndef CIRCARMA_CEPSTRAL_HPP
#define CIRCARMA_CEPSTRAL_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "circarma/solver.hpp"

namespace circarma {

/// Logarithmic moments gamma_1..gamma_n (gamma_0 = 0 by convention,
/// gamma_{-k} = conj(gamma_k) implied).
struct CepstralData {
    std::vector<cplx> gamma;

    int order() const { return static_cast<int>(gamma.size()); }
};

struct JointSolverConfig {
    int max_iterations = 300;
    double gradient_tolerance = 1e-10;
    double backtrack = 0.5;
    double armijo = 1e-4;
    /// Permit lambda = 0; the unregularized dual may then terminate on the
    /// boundary, which is detected and reported rather than solved through.
    bool allow_boundary = false;
    /// Joint-Newton conditioning limit before falling back to alternating
    /// P-step / Q-step sweeps.
    double condition_limit = 1e12;
};

/// Joint covariance + cepstral fit: P with p_0 = 1 and Q, both positive on
/// the grid, minimizing the regularized dual J_lambda.
struct JointSolution {
    SolveStatus status = SolveStatus::Indeterminate;
    PseudoPolynomial p;
    PseudoPolynomial q;
    double lambda = 0.0;
    std::vector<cplx> epsilon;  // eps_1..eps_n
    DiscreteSpectrum phi;
    double covariance_residual = 0.0;
    double adjusted_cepstral_residual = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    std::string diagnostic;

    bool converged() const { return status == SolveStatus::Converged; }
};

/// gamma_k = (1/2N) sum_j log Phi(zeta_j) zeta_j^k for k = 1..n.
std::vector<cplx> cepstral_moments(const DiscreteSpectrum& phi, int n);

/// eps_k = lambda * moment_k(1/P).
std::vector<cplx> epsilon_adjustment(const PseudoPolynomial& p_hat, double lambda, int n,
                                     const DiscreteCircle& circle);

/// <c,q> - <gamma,p> + int P log(P/Q) dnu - lambda int log P dnu.
double joint_dual_objective(const PseudoPolynomial& p, const PseudoPolynomial& q,
                            const std::vector<cplx>& c_lags, const std::vector<cplx>& gamma,
                            double lambda, const DiscreteCircle& circle);

/// Gradient in the real parametrization (q_0, Re q_k, Im q_k ; Re p_k, Im p_k)
/// with p_0 eliminated by the p_0 = 1 constraint.
Eigen::VectorXd joint_dual_gradient(const PseudoPolynomial& p, const PseudoPolynomial& q,
                                    const std::vector<cplx>& c_lags, const std::vector<cplx>& gamma,
                                    double lambda, const DiscreteCircle& circle);

Eigen::MatrixXd joint_dual_hessian(const PseudoPolynomial& p, const PseudoPolynomial& q,
                                   double lambda, const DiscreteCircle& circle);

JointSolution solve_joint(const CovarianceData& c, const CepstralData& data, double lambda,
                          const JointSolverConfig& cfg = {});

}  // namespace circarma

#endif
