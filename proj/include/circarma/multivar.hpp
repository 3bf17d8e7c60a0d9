#ifndef CIRCARMA_MULTIVAR_HPP
#define CIRCARMA_MULTIVAR_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "circarma/cepstral.hpp"
#include "circarma/circulant.hpp"
#include "circarma/cones.hpp"
#include "circarma/solver.hpp"

namespace circarma {

/// m x m Hermitian pseudo-polynomial Q(zeta) = sum_{k=-n}^n Q_k zeta^{-k},
/// Q_{-k} = Q_k^*, stored as Q_0..Q_n with Q_0 Hermitian.
struct MatrixPseudoPolynomial {
    int m = 1;
    std::vector<Eigen::MatrixXcd> coeffs;  // Q_0..Q_n

    static MatrixPseudoPolynomial identity(int m);
    static MatrixPseudoPolynomial from_scalar(const PseudoPolynomial& p, int m);

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    Eigen::MatrixXcd eval(double theta) const;
    std::vector<Eigen::MatrixXcd> eval_on(const DiscreteCircle& circle) const;
    PseudoPolynomial scalar() const;  // m = 1 only
    void validate() const;
};

struct BlockDualSolution {
    SolveStatus status = SolveStatus::Indeterminate;
    MatrixPseudoPolynomial q;
    std::vector<Eigen::MatrixXcd> phi;  // P(zeta_j) Q(zeta_j)^{-1}, Hermitian
    double gradient_norm = 0.0;
    int iterations = 0;
    double dual_value = 0.0;
    double moment_residual = 0.0;
    std::string diagnostic;

    bool converged() const { return status == SolveStatus::Converged; }
};

/// C_k = (1/2N) sum_j zeta_j^k Phi(zeta_j), k = 0..n.
std::vector<Eigen::MatrixXcd> block_moments(const std::vector<Eigen::MatrixXcd>& phi,
                                            const DiscreteCircle& circle, int n);

/// Matrix dual: minimize <C,Q> - (1/2N) sum_j P_j log det Q(zeta_j).
double block_dual_objective(const MatrixPseudoPolynomial& q, const CovarianceData& c,
                            const std::vector<double>& p_values, const DiscreteCircle& circle);
Eigen::VectorXd block_dual_gradient(const MatrixPseudoPolynomial& q, const CovarianceData& c,
                                    const std::vector<double>& p_values, const DiscreteCircle& circle);
Eigen::MatrixXd block_dual_hessian(const MatrixPseudoPolynomial& q,
                                   const std::vector<double>& p_values, const DiscreteCircle& circle);

BlockDualSolution solve_dual_block(const CovarianceData& c, const PseudoPolynomial& p,
                                   const SolverConfig& cfg = {});

/// Real parametrization of a matrix pseudo-polynomial: Q_0 Hermitian (m^2
/// reals), Q_1..Q_n full complex (2m^2 reals each).
Eigen::VectorXd pack_matrix_pseudo(const MatrixPseudoPolynomial& q);
MatrixPseudoPolynomial unpack_matrix_pseudo(const Eigen::VectorXd& x, int m, int n);

struct BlockExtension {
    FullPeriodicSequence lags;  // C_0..C_N
    CirculantMatrix sigma;      // symbol P(zeta_j) Q(zeta_j)^{-1}
};

BlockExtension block_extension_and_sigma(const PseudoPolynomial& p, const MatrixPseudoPolynomial& q,
                                         const DiscreteCircle& circle);

/// Cepstral data of a matrix spectrum: moments of (1/m) log det Phi. Matches
/// the stationarity of the regularized matrix dual and reduces to the scalar
/// cepstrum at m = 1.
std::vector<cplx> block_cepstral_moments(const std::vector<Eigen::MatrixXcd>& phi,
                                         const DiscreteCircle& circle, int n);

struct BlockJointSolution {
    SolveStatus status = SolveStatus::Indeterminate;
    PseudoPolynomial p;  // scalar, p_0 = 1
    MatrixPseudoPolynomial q;
    std::vector<Eigen::MatrixXcd> phi;
    double lambda = 0.0;
    std::vector<cplx> epsilon;
    double covariance_residual = 0.0;
    double adjusted_cepstral_residual = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    std::string diagnostic;

    bool converged() const { return status == SolveStatus::Converged; }
};

double block_joint_objective(const PseudoPolynomial& p, const MatrixPseudoPolynomial& q,
                             const CovarianceData& c, const std::vector<cplx>& gamma, double lambda,
                             const DiscreteCircle& circle);
Eigen::VectorXd block_joint_gradient(const PseudoPolynomial& p, const MatrixPseudoPolynomial& q,
                                     const CovarianceData& c, const std::vector<cplx>& gamma,
                                     double lambda, const DiscreteCircle& circle);

BlockJointSolution solve_joint_block(const CovarianceData& c, const CepstralData& data,
                                     double lambda, const JointSolverConfig& cfg = {});

/// Bilateral matrix ARMA: sum Q_k y(t-k) = sum p_k e(t-k), Q_k matrices,
/// p_k scalar with p_0 = 1.
struct MatrixArmaModel {
    int m = 1;
    int order = 0;
    std::vector<Eigen::MatrixXcd> q;
    std::vector<cplx> p;
};

MatrixArmaModel bilateral_matrix_arma(const PseudoPolynomial& p, const MatrixPseudoPolynomial& q);

}  // namespace circarma

#endif
