#include "circarma/cones.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "circarma/circulant.hpp"
#include "circarma/errors.hpp"
#include "circarma/multivar.hpp"
#include "circarma/solver.hpp"

namespace circarma {

CovarianceData CovarianceData::scalar(int half_period, std::vector<cplx> lags) {
    CovarianceData c;
    c.m = 1;
    c.half_period = half_period;
    c.lags.reserve(lags.size());
    for (const cplx& v : lags) c.lags.push_back(Eigen::MatrixXcd::Constant(1, 1, v));
    return c;
}

std::vector<cplx> CovarianceData::scalar_lags() const {
    std::vector<cplx> out;
    out.reserve(lags.size());
    for (const auto& l : lags) out.push_back(l(0, 0));
    return out;
}

double CovarianceData::scale() const { return lags[0].cwiseAbs().maxCoeff(); }

void CovarianceData::validate() const {
    if (lags.empty()) throw std::invalid_argument("CovarianceData: no lags");
    if (half_period < 1) throw std::invalid_argument("CovarianceData: N must be >= 1");
    if (order() >= half_period) throw std::invalid_argument("CovarianceData: order must satisfy n < N");
    for (const auto& l : lags)
        if (l.rows() != m || l.cols() != m)
            throw std::invalid_argument("CovarianceData: lag block size mismatch");
    double c0_asym = (lags[0] - lags[0].adjoint()).cwiseAbs().maxCoeff();
    if (c0_asym > 1e-10 * (1.0 + scale()))
        throw std::invalid_argument("CovarianceData: C_0 must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (lags[0] + lags[0].adjoint().eval()),
                                                       Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("CovarianceData: C_0 must be positive definite");
}

FullPeriodicSequence FullPeriodicSequence::scalar(int half_period, std::vector<cplx> lags) {
    FullPeriodicSequence s;
    s.m = 1;
    s.half_period = half_period;
    s.lags.reserve(lags.size());
    for (const cplx& v : lags) s.lags.push_back(Eigen::MatrixXcd::Constant(1, 1, v));
    return s;
}

std::vector<cplx> FullPeriodicSequence::scalar_lags() const {
    std::vector<cplx> out;
    out.reserve(lags.size());
    for (const auto& l : lags) out.push_back(l(0, 0));
    return out;
}

Eigen::MatrixXcd toeplitz_matrix(const CovarianceData& c) {
    c.validate();
    const int n = c.order();
    const int m = c.m;
    Eigen::MatrixXcd t(static_cast<long>(m) * (n + 1), static_cast<long>(m) * (n + 1));
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            const auto& lag = c.lags[static_cast<size_t>(std::abs(i - j))];
            if (i >= j)
                t.block(i * m, j * m, m, m) = lag;
            else
                t.block(i * m, j * m, m, m) = lag.adjoint();
        }
    return t;
}

bool toeplitz_positive(const CovarianceData& c, double* min_eigenvalue) {
    Eigen::MatrixXcd t = toeplitz_matrix(c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (t + t.adjoint().eval()),
                                                       Eigen::EigenvaluesOnly);
    const double mn = es.eigenvalues().minCoeff();
    const double mx = es.eigenvalues().cwiseAbs().maxCoeff();
    if (min_eigenvalue) *min_eigenvalue = mn;
    return mn > 1e-12 * std::max(mx, 1e-300);
}

MembershipCertificate certify_membership(const CovarianceData& c) {
    MembershipCertificate cert;
    if (!toeplitz_positive(c)) {
        cert.status = Membership::Infeasible;
        cert.diagnostic = "Toeplitz matrix T_n is not positive definite";
        return cert;
    }
    SolverConfig cfg;
    cfg.gradient_tolerance = 1e-9;
    if (c.m == 1) {
        DualSolution sol = solve_dual(c, PseudoPolynomial::one(), cfg);
        switch (sol.status) {
            case SolveStatus::Converged:
                cert.status = Membership::Feasible;
                cert.q_me = sol.q;
                cert.diagnostic = "maximum-entropy dual converged";
                break;
            case SolveStatus::Infeasible:
                cert.status = Membership::Infeasible;
                cert.diagnostic = sol.diagnostic;
                cert.boundary_direction = sol.boundary_direction;
                break;
            default:
                cert.status = Membership::Indeterminate;
                cert.diagnostic = sol.diagnostic;
        }
        return cert;
    }
    BlockDualSolution sol = solve_dual_block(c, PseudoPolynomial::one(), cfg);
    switch (sol.status) {
        case SolveStatus::Converged:
            cert.status = Membership::Feasible;
            cert.q_me_block = sol.q.coeffs;
            cert.diagnostic = "maximum-entropy dual converged";
            break;
        case SolveStatus::Infeasible:
            cert.status = Membership::Infeasible;
            cert.diagnostic = sol.diagnostic;
            break;
        default:
            cert.status = Membership::Indeterminate;
            cert.diagnostic = sol.diagnostic;
    }
    return cert;
}

std::vector<Eigen::MatrixXcd> full_sequence_symbol(const FullPeriodicSequence& seq) {
    const int n_lags = static_cast<int>(seq.lags.size());
    const int cap = seq.half_period + 1;
    std::vector<Eigen::MatrixXcd> lags(seq.lags.begin(),
                                       seq.lags.begin() + std::min(n_lags, cap));
    DiscreteCircle circle(seq.half_period);
    return CirculantMatrix::from_banded(circle, lags).values();
}

SequenceValidation validate_full_sequence(const FullPeriodicSequence& seq) {
    SequenceValidation v{true, true, true, ""};
    if (seq.half_period < 1 || seq.lags.empty() ||
        static_cast<int>(seq.lags.size()) > 2 * seq.half_period) {
        return SequenceValidation{false, false, false, "lag count must lie in [1, 2N]"};
    }
    const int two_n = 2 * seq.half_period;
    std::ostringstream detail;
    // the self-paired lags c_0 and c_N must themselves be Hermitian
    for (int l : {0, seq.half_period}) {
        if (l >= static_cast<int>(seq.lags.size())) continue;
        const Eigen::MatrixXcd& lag = seq.lags[static_cast<size_t>(l)];
        if ((lag - lag.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + lag.cwiseAbs().maxCoeff())) {
            v.wraparound_ok = false;
            detail << "lag " << l << " is self-paired and must be Hermitian; ";
        }
    }
    // explicit entries past lag N must respect the wraparound c_{2N-k} = c_k^*
    for (int l = seq.half_period + 1; l < static_cast<int>(seq.lags.size()); ++l) {
        const int partner = two_n - l;  // in [1, N-1]
        const Eigen::MatrixXcd expect = seq.lags[static_cast<size_t>(partner)].adjoint();
        double err = (seq.lags[static_cast<size_t>(l)] - expect).cwiseAbs().maxCoeff();
        if (err > 1e-10 * (1.0 + expect.cwiseAbs().maxCoeff())) {
            v.wraparound_ok = false;
            detail << "lag " << l << " breaks c_" << l << " = conj(c_" << partner << "); ";
        }
    }
    if (static_cast<int>(seq.lags.size()) <= seq.half_period) {
        v.valid = false;
        v.positive = false;
        detail << "lags c_0..c_N required to assemble the full period; ";
        v.detail = detail.str();
        return v;
    }
    auto symbol = full_sequence_symbol(seq);
    DiscreteCircle circle(seq.half_period);
    for (int j = 0; j < circle.size(); ++j) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
            0.5 * (symbol[static_cast<size_t>(j)] + symbol[static_cast<size_t>(j)].adjoint().eval()),
            Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <= 0.0) {
            v.positive = false;
            detail << "symbol not positive definite at zeta_" << circle.k_of(j) << "; ";
            break;
        }
    }
    v.valid = v.wraparound_ok && v.positive;
    v.detail = detail.str();
    return v;
}

}  // namespace circarma
