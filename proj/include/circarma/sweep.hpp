#ifndef CIRCARMA_SWEEP_HPP
#define CIRCARMA_SWEEP_HPP

#include <string>
#include <vector>

#include "circarma/grid.hpp"
#include "circarma/solver.hpp"

namespace circarma {

/// Ground-truth unilateral ARMA model a(z) y = b(z) w with minimum-phase a
/// and b (all roots strictly inside the unit disc); spectrum |b|^2 / |a|^2.
struct TruthModel {
    std::vector<cplx> a;  // a_0..a_p, a_0 != 0
    std::vector<cplx> b;  // b_0..b_q, defaults to (1)

    double spectrum(double theta) const;
    void validate() const;  // roots strictly inside the disc
};

/// Stationary covariances c_0..c_n of the truth model through its impulse
/// response, truncated at a relative tail of 1e-17.
std::vector<cplx> truth_covariances(const TruthModel& model, int n);

/// Continuous cepstral coefficients gamma_1..gamma_n from the root sums of
/// the minimum-phase factors.
std::vector<cplx> truth_cepstrum(const TruthModel& model, int n);

enum class FitMode { MaximumEntropy, Cepstral };

struct SweepRequest {
    TruthModel truth;
    std::vector<int> n_values;  // N sweep list
    int fit_order = 0;
    FitMode mode = FitMode::MaximumEntropy;
    double lambda = 1e-2;
    int worker_count = 0;  // 0: hardware concurrency
};

struct SweepRow {
    int half_period;
    double error;  // sup_j |Phi_hat(zeta_j) - Phi_true(zeta_j)| on the run's grid
    int iterations;
    SolveStatus status;
};

/// One solve per N in a worker pool; rows returned in the request order.
std::vector<SweepRow> run_sweep(const SweepRequest& req);

/// Sup-distance of a fitted (P, Q) pair to the truth spectrum over the grid
/// of the given half period (used to compare fits on the coarser grid).
double fit_error_on_grid(const PseudoPolynomial& p, const PseudoPolynomial& q,
                         const TruthModel& truth, int half_period);

}  // namespace circarma

#endif
