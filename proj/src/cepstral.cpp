#include "circarma/cepstral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

#include "circarma/errors.hpp"

namespace circarma {

std::vector<cplx> cepstral_moments(const DiscreteSpectrum& phi, int n) {
    if (!phi.is_positive()) throw Error("cepstral_moments: spectrum must be positive on the grid");
    std::vector<double> lg(phi.values.size());
    for (size_t j = 0; j < phi.values.size(); ++j) lg[j] = std::log(phi.values[j]);
    std::vector<cplx> gamma(static_cast<size_t>(n));
    for (int k = 1; k <= n; ++k)
        gamma[static_cast<size_t>(k - 1)] = discrete_moment(std::span<const double>(lg), phi.circle, k);
    return gamma;
}

std::vector<cplx> epsilon_adjustment(const PseudoPolynomial& p_hat, double lambda, int n,
                                     const DiscreteCircle& circle) {
    std::vector<double> pv = p_hat.eval_on(circle);
    std::vector<double> inv(pv.size());
    for (size_t j = 0; j < pv.size(); ++j) {
        if (pv[j] <= 0.0) throw Error("epsilon_adjustment: P must be positive on the grid");
        inv[j] = 1.0 / pv[j];
    }
    std::vector<cplx> eps(static_cast<size_t>(n));
    for (int k = 1; k <= n; ++k)
        eps[static_cast<size_t>(k - 1)] = lambda * discrete_moment(std::span<const double>(inv), circle, k);
    return eps;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct JointTables {
    int order;
    int points;
    Eigen::MatrixXd dq;  // points x (2n+1)
    Eigen::MatrixXd dp;  // points x (2n), the k >= 1 columns

    JointTables(const DiscreteCircle& circle, int n)
        : order(n), points(circle.size()), dq(circle.size(), 2 * n + 1), dp(circle.size(), 2 * n) {
        for (int j = 0; j < points; ++j) {
            const double th = circle.theta(j);
            dq(j, 0) = 1.0;
            for (int k = 1; k <= n; ++k) {
                dq(j, 2 * k - 1) = 2.0 * std::cos(k * th);
                dq(j, 2 * k) = 2.0 * std::sin(k * th);
            }
        }
        dp = dq.rightCols(2 * n);
    }

    Eigen::VectorXd q_values(const Eigen::VectorXd& z) const { return dq * z.head(2 * order + 1); }
    Eigen::VectorXd p_values(const Eigen::VectorXd& z) const {
        return Eigen::VectorXd::Ones(points) + dp * z.tail(2 * order);
    }
};

double inner_doubled(const std::vector<cplx>& coeffs, const Eigen::VectorXd& tail) {
    // <gamma, p> with gamma_0 = 0 and the tail (Re p_1, Im p_1, ...)
    double acc = 0.0;
    for (int k = 1; k <= static_cast<int>(coeffs.size()); ++k)
        acc += 2.0 * (coeffs[static_cast<size_t>(k - 1)].real() * tail[2 * (k - 1)] +
                      coeffs[static_cast<size_t>(k - 1)].imag() * tail[2 * (k - 1) + 1]);
    return acc;
}

double objective_z(const JointTables& t, const Eigen::VectorXd& z, const std::vector<cplx>& c,
                   const std::vector<cplx>& gamma, double lambda, const Eigen::VectorXd& pv,
                   const Eigen::VectorXd& qv) {
    if (pv.minCoeff() <= 0.0 || qv.minCoeff() <= 0.0) return kInf;
    double cq = c[0].real() * z[0];
    for (int k = 1; k < static_cast<int>(c.size()); ++k)
        cq += 2.0 * (c[static_cast<size_t>(k)].real() * z[2 * k - 1] +
                     c[static_cast<size_t>(k)].imag() * z[2 * k]);
    double entropy = 0.0;
    for (int j = 0; j < t.points; ++j)
        entropy += pv[j] * (std::log(pv[j]) - std::log(qv[j])) - lambda * std::log(pv[j]);
    return cq - inner_doubled(gamma, z.tail(2 * t.order)) + entropy / t.points;
}

Eigen::VectorXd gradient_z(const JointTables& t, const std::vector<cplx>& c,
                           const std::vector<cplx>& gamma, double lambda, const Eigen::VectorXd& pv,
                           const Eigen::VectorXd& qv) {
    const int n = t.order;
    Eigen::VectorXd g(4 * n + 1);
    Eigen::VectorXd ratio(t.points), wp(t.points);
    for (int j = 0; j < t.points; ++j) {
        ratio[j] = pv[j] / qv[j];
        wp[j] = std::log(pv[j]) - std::log(qv[j]) + 1.0 - lambda / pv[j];
    }
    Eigen::VectorXd mom_q = t.dq.transpose() * ratio / t.points;
    g[0] = c[0].real() - mom_q[0];
    for (int k = 1; k <= n; ++k) {
        g[2 * k - 1] = 2.0 * c[static_cast<size_t>(k)].real() - mom_q[2 * k - 1];
        g[2 * k] = 2.0 * c[static_cast<size_t>(k)].imag() - mom_q[2 * k];
    }
    Eigen::VectorXd gp = t.dp.transpose() * wp / t.points;
    for (int k = 1; k <= n; ++k) {
        g[2 * n + 2 * k - 1] = gp[2 * (k - 1)] - 2.0 * gamma[static_cast<size_t>(k - 1)].real();
        g[2 * n + 2 * k] = gp[2 * (k - 1) + 1] - 2.0 * gamma[static_cast<size_t>(k - 1)].imag();
    }
    return g;
}

Eigen::MatrixXd hessian_z(const JointTables& t, double lambda, const Eigen::VectorXd& pv,
                          const Eigen::VectorXd& qv) {
    const int n = t.order;
    Eigen::VectorXd wqq(t.points), wqp(t.points), wpp(t.points);
    for (int j = 0; j < t.points; ++j) {
        wqq[j] = pv[j] / (qv[j] * qv[j]) / t.points;
        wqp[j] = -1.0 / qv[j] / t.points;
        wpp[j] = (1.0 / pv[j] + lambda / (pv[j] * pv[j])) / t.points;
    }
    Eigen::MatrixXd h(4 * n + 1, 4 * n + 1);
    h.topLeftCorner(2 * n + 1, 2 * n + 1) = t.dq.transpose() * wqq.asDiagonal() * t.dq;
    Eigen::MatrixXd hqp = t.dq.transpose() * wqp.asDiagonal() * t.dp;
    h.topRightCorner(2 * n + 1, 2 * n) = hqp;
    h.bottomLeftCorner(2 * n, 2 * n + 1) = hqp.transpose();
    h.bottomRightCorner(2 * n, 2 * n) = t.dp.transpose() * wpp.asDiagonal() * t.dp;
    return h;
}

Eigen::VectorXd pack_joint(const PseudoPolynomial& p, const PseudoPolynomial& q, int n) {
    Eigen::VectorXd z(4 * n + 1);
    z.head(2 * n + 1) = pack_pseudo(q.coeffs()).head(2 * n + 1);
    for (int k = 1; k <= n; ++k) {
        z[2 * n + 2 * k - 1] = p.coeff(k).real();
        z[2 * n + 2 * k] = p.coeff(k).imag();
    }
    return z;
}

PseudoPolynomial p_from_z(const Eigen::VectorXd& z, int n) {
    std::vector<cplx> pc(static_cast<size_t>(n) + 1);
    pc[0] = cplx(1.0, 0.0);
    for (int k = 1; k <= n; ++k)
        pc[static_cast<size_t>(k)] = cplx(z[2 * n + 2 * k - 1], z[2 * n + 2 * k]);
    return PseudoPolynomial(std::move(pc));
}

PseudoPolynomial q_from_z(const Eigen::VectorXd& z, int n) {
    return PseudoPolynomial(unpack_pseudo(z.head(2 * n + 1)));
}

}  // namespace

double joint_dual_objective(const PseudoPolynomial& p, const PseudoPolynomial& q,
                            const std::vector<cplx>& c_lags, const std::vector<cplx>& gamma,
                            double lambda, const DiscreteCircle& circle) {
    const int n = static_cast<int>(c_lags.size()) - 1;
    JointTables t(circle, n);
    Eigen::VectorXd z = pack_joint(p, q, n);
    return objective_z(t, z, c_lags, gamma, lambda, t.p_values(z), t.q_values(z));
}

Eigen::VectorXd joint_dual_gradient(const PseudoPolynomial& p, const PseudoPolynomial& q,
                                    const std::vector<cplx>& c_lags, const std::vector<cplx>& gamma,
                                    double lambda, const DiscreteCircle& circle) {
    const int n = static_cast<int>(c_lags.size()) - 1;
    JointTables t(circle, n);
    Eigen::VectorXd z = pack_joint(p, q, n);
    Eigen::VectorXd pv = t.p_values(z), qv = t.q_values(z);
    if (pv.minCoeff() <= 0.0 || qv.minCoeff() <= 0.0)
        throw Error("joint_dual_gradient: (P, Q) must be interior");
    return gradient_z(t, c_lags, gamma, lambda, pv, qv);
}

Eigen::MatrixXd joint_dual_hessian(const PseudoPolynomial& p, const PseudoPolynomial& q,
                                   double lambda, const DiscreteCircle& circle) {
    const int n = std::max(p.degree(), q.degree());
    JointTables t(circle, n);
    Eigen::VectorXd z = pack_joint(p, q, n);
    return hessian_z(t, lambda, t.p_values(z), t.q_values(z));
}

JointSolution solve_joint(const CovarianceData& c, const CepstralData& data, double lambda,
                          const JointSolverConfig& cfg) {
    c.validate();
    if (c.m != 1) throw std::invalid_argument("solve_joint: scalar solver requires m = 1");
    if (lambda < 0.0) throw std::invalid_argument("solve_joint: lambda must be positive");
    if (lambda == 0.0 && !cfg.allow_boundary)
        throw std::invalid_argument("solve_joint: lambda = 0 requires allow_boundary");
    const int n = c.order();
    if (data.order() != n)
        throw std::invalid_argument("solve_joint: cepstral order must match the covariance order");

    const DiscreteCircle circle(c.half_period);
    const std::vector<cplx> lags = c.scalar_lags();
    const std::vector<cplx>& gamma = data.gamma;
    const JointTables t(circle, n);
    const double scale = std::max(std::abs(lags[0].real()), 1.0);

    JointSolution out;
    out.lambda = lambda;

    // start from the maximum-entropy point: P = 1, Q the ME denominator
    SolverConfig me_cfg;
    me_cfg.max_iterations = cfg.max_iterations;
    DualSolution me = solve_dual(c, PseudoPolynomial::one(), me_cfg);
    if (!me.converged()) {
        out.status = me.status;
        out.diagnostic = "maximum-entropy initialization failed: " + me.diagnostic;
        return out;
    }

    Eigen::VectorXd z = Eigen::VectorXd::Zero(4 * n + 1);
    z.head(2 * n + 1) = pack_pseudo(me.q.coeffs());

    Eigen::VectorXd pv = t.p_values(z), qv = t.q_values(z);
    double f = objective_z(t, z, lags, gamma, lambda, pv, qv);
    int stall = 0;
    double last_gnorm = 0.0;

    auto finish = [&](SolveStatus status, int iter, double gnorm, std::string diag) {
        out.status = status;
        out.iterations = iter;
        out.gradient_norm = gnorm;
        out.diagnostic = std::move(diag);
        out.p = p_from_z(z, n);
        out.q = q_from_z(z, n);
        std::vector<double> phi(static_cast<size_t>(circle.size()));
        for (int j = 0; j < circle.size(); ++j) phi[static_cast<size_t>(j)] = pv[j] / qv[j];
        out.phi = make_spectrum(circle, std::move(phi));
        out.epsilon = epsilon_adjustment(out.p, lambda, n, circle);
        double cres = 0.0;
        for (int k = 0; k <= n; ++k)
            cres = std::max(cres, std::abs(discrete_moment(out.phi.values, circle, k) - lags[static_cast<size_t>(k)]));
        out.covariance_residual = cres;
        std::vector<cplx> ach = cepstral_moments(out.phi, n);
        double gres = 0.0;
        for (int k = 1; k <= n; ++k)
            gres = std::max(gres, std::abs(ach[static_cast<size_t>(k - 1)] - gamma[static_cast<size_t>(k - 1)] -
                                           out.epsilon[static_cast<size_t>(k - 1)]));
        out.adjusted_cepstral_residual = gres;
        return out;
    };

    for (int iter = 0; iter <= cfg.max_iterations; ++iter) {
        Eigen::VectorXd g = gradient_z(t, lags, gamma, lambda, pv, qv);
        const double gnorm = last_gnorm = g.cwiseAbs().maxCoeff();
        if (gnorm <= cfg.gradient_tolerance * scale) return finish(SolveStatus::Converged, iter, gnorm, "");

        const double p_min = pv.minCoeff();
        const double q_min = qv.minCoeff();
        if (p_min < 1e-10 && stall >= 5)
            return finish(SolveStatus::BoundaryTermination, iter, gnorm,
                          "P reached the boundary of the positivity cone (unregularized dual)");
        if (q_min < 1e-10 * z[0] && stall >= 5)
            return finish(SolveStatus::Infeasible, iter, gnorm, "Q diverges toward the cone boundary");
        if (iter == cfg.max_iterations) break;

        Eigen::MatrixXd h = hessian_z(t, lambda, pv, qv);
        Eigen::VectorXd step;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
        const double ev_min = es.eigenvalues().minCoeff();
        const double ev_max = es.eigenvalues().cwiseAbs().maxCoeff();
        if (ev_min <= 0.0 || ev_max / ev_min > cfg.condition_limit) {
            // alternating fallback: Newton in Q alone, then in P alone
            Eigen::MatrixXd hqq = h.topLeftCorner(2 * n + 1, 2 * n + 1);
            Eigen::MatrixXd hpp = h.bottomRightCorner(2 * n, 2 * n);
            step = Eigen::VectorXd::Zero(4 * n + 1);
            step.head(2 * n + 1) = -hqq.ldlt().solve(g.head(2 * n + 1));
            step.tail(2 * n) = -hpp.ldlt().solve(g.tail(2 * n));
        } else {
            step = -h.ldlt().solve(g);
        }
        if (!step.allFinite() || g.dot(step) >= 0.0) step = -g;

        const double slope = g.dot(step);
        const double f_slack = 1e-15 * (1.0 + std::abs(f));
        double alpha = 1.0;
        bool moved = false;
        while (alpha > 1e-18) {
            Eigen::VectorXd z_try = z + alpha * step;
            Eigen::VectorXd pv_try = t.p_values(z_try);
            Eigen::VectorXd qv_try = t.q_values(z_try);
            double f_try = objective_z(t, z_try, lags, gamma, lambda, pv_try, qv_try);
            if (f_try <= f + cfg.armijo * alpha * slope + f_slack) {
                const double decrease = f - f_try;
                z = std::move(z_try);
                pv = std::move(pv_try);
                qv = std::move(qv_try);
                stall = decrease > 1e-16 * (1.0 + std::abs(f)) ? 0 : stall + 1;
                f = f_try;
                moved = true;
                break;
            }
            alpha *= cfg.backtrack;
        }
        if (!moved) ++stall;
    }
    return finish(SolveStatus::Indeterminate, cfg.max_iterations, last_gnorm,
                  "iteration cap reached without a certificate");
}

}  // namespace circarma
