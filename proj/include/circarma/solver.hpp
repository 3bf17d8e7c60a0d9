#ifndef CIRCARMA_SOLVER_HPP
#define CIRCARMA_SOLVER_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "circarma/cones.hpp"
#include "circarma/grid.hpp"

namespace circarma {

struct SolverConfig {
    int max_iterations = 200;
    double gradient_tolerance = 1e-10;  // relative to |c_0|
    double backtrack = 0.5;
    double armijo = 1e-4;
    std::optional<std::vector<cplx>> initial_q;  // q_0..q_n; default: constant matching c_0
};

enum class SolveStatus { Converged, Infeasible, Indeterminate, BoundaryTermination };

const char* to_string(SolveStatus s);

/// Outcome of the dual problem: minimize J_P(Q) = <c,q> - int P log Q dnu
/// over pseudo-polynomials positive on the grid.
struct DualSolution {
    SolveStatus status = SolveStatus::Indeterminate;
    PseudoPolynomial q;
    DiscreteSpectrum phi;  // P/Q on the grid
    double gradient_norm = 0.0;
    int iterations = 0;
    double primal_value = 0.0;  // I_P(phi)
    double dual_value = 0.0;    // J_P(q)
    double moment_residual = 0.0;
    std::string diagnostic;
    std::vector<cplx> boundary_direction;

    bool converged() const { return status == SolveStatus::Converged; }
};

/// <c,q> - (1/2N) sum_j P_j log Q_j; +inf when Q is not positive on the grid
/// (line-search sentinel).
double dual_objective(const PseudoPolynomial& q, const std::vector<cplx>& c_lags,
                      const std::vector<double>& p_values, const DiscreteCircle& circle);

/// Gradient in the real parametrization (q_0; Re q_k, Im q_k): the covariance
/// data minus the matching moments of P/Q, doubled for k >= 1.
Eigen::VectorXd dual_gradient(const PseudoPolynomial& q, const std::vector<cplx>& c_lags,
                              const std::vector<double>& p_values, const DiscreteCircle& circle);

Eigen::MatrixXd dual_hessian(const PseudoPolynomial& q, const std::vector<double>& p_values,
                             const DiscreteCircle& circle, int order);

/// (1/2N) sum_j P_j log Phi_j.
double primal_value(const DiscreteSpectrum& phi, const std::vector<double>& p_values);

/// Newton descent with Armijo backtracking; the -int P log Q term is the
/// barrier keeping iterates interior.
DualSolution solve_dual(const CovarianceData& c, const PseudoPolynomial& p,
                        const SolverConfig& cfg = {});

/// Real parametrization helpers shared with the joint/cepstral solver.
Eigen::VectorXd pack_pseudo(const std::vector<cplx>& coeffs);
std::vector<cplx> unpack_pseudo(const Eigen::VectorXd& x);

}  // namespace circarma

#endif
