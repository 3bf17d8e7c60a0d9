#include "circarma/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "circarma/errors.hpp"

namespace circarma {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Indeterminate: return "indeterminate";
        case SolveStatus::BoundaryTermination: return "boundary";
    }
    return "unknown";
}

Eigen::VectorXd pack_pseudo(const std::vector<cplx>& coeffs) {
    const int n = static_cast<int>(coeffs.size()) - 1;
    Eigen::VectorXd x(2 * n + 1);
    x[0] = coeffs[0].real();
    for (int k = 1; k <= n; ++k) {
        x[2 * k - 1] = coeffs[static_cast<size_t>(k)].real();
        x[2 * k] = coeffs[static_cast<size_t>(k)].imag();
    }
    return x;
}

std::vector<cplx> unpack_pseudo(const Eigen::VectorXd& x) {
    const int n = (static_cast<int>(x.size()) - 1) / 2;
    std::vector<cplx> coeffs(static_cast<size_t>(n) + 1);
    coeffs[0] = cplx(x[0], 0.0);
    for (int k = 1; k <= n; ++k) coeffs[static_cast<size_t>(k)] = cplx(x[2 * k - 1], x[2 * k]);
    return coeffs;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Trigonometric tables for the real parametrization: the derivative of the
// grid value Q_j with respect to parameter a.
struct Tables {
    int order;
    int points;
    Eigen::MatrixXd d;  // points x (2n+1): 1, 2cos(k theta), 2sin(k theta)

    Tables(const DiscreteCircle& circle, int n) : order(n), points(circle.size()), d(circle.size(), 2 * n + 1) {
        for (int j = 0; j < points; ++j) {
            const double th = circle.theta(j);
            d(j, 0) = 1.0;
            for (int k = 1; k <= n; ++k) {
                d(j, 2 * k - 1) = 2.0 * std::cos(k * th);
                d(j, 2 * k) = 2.0 * std::sin(k * th);
            }
        }
    }

    Eigen::VectorXd values(const Eigen::VectorXd& x) const { return d * x; }
};

double inner_cq(const std::vector<cplx>& c, const Eigen::VectorXd& x) {
    double acc = c[0].real() * x[0];
    for (int k = 1; k < static_cast<int>(c.size()); ++k)
        acc += 2.0 * (c[static_cast<size_t>(k)].real() * x[2 * k - 1] +
                      c[static_cast<size_t>(k)].imag() * x[2 * k]);
    return acc;
}

double objective_from_values(const std::vector<cplx>& c, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& q_values, const std::vector<double>& p_values) {
    const int points = static_cast<int>(q_values.size());
    double barrier = 0.0;
    for (int j = 0; j < points; ++j) {
        if (q_values[j] <= 0.0) return kInf;
        barrier += p_values[static_cast<size_t>(j)] * std::log(q_values[j]);
    }
    return inner_cq(c, x) - barrier / points;
}

Eigen::VectorXd gradient_from_values(const Tables& t, const std::vector<cplx>& c,
                                     const Eigen::VectorXd& q_values,
                                     const std::vector<double>& p_values) {
    // c-components minus the matching moments of P/Q in the doubled real form
    Eigen::VectorXd ratio(t.points);
    for (int j = 0; j < t.points; ++j) ratio[j] = p_values[static_cast<size_t>(j)] / q_values[j];
    Eigen::VectorXd mom = t.d.transpose() * ratio / t.points;
    Eigen::VectorXd g(2 * t.order + 1);
    g[0] = c[0].real() - mom[0];
    for (int k = 1; k <= t.order; ++k) {
        g[2 * k - 1] = 2.0 * c[static_cast<size_t>(k)].real() - mom[2 * k - 1];
        g[2 * k] = 2.0 * c[static_cast<size_t>(k)].imag() - mom[2 * k];
    }
    return g;
}

Eigen::MatrixXd hessian_from_values(const Tables& t, const Eigen::VectorXd& q_values,
                                    const std::vector<double>& p_values) {
    Eigen::VectorXd w(t.points);
    for (int j = 0; j < t.points; ++j)
        w[j] = p_values[static_cast<size_t>(j)] / (q_values[j] * q_values[j]) / t.points;
    return t.d.transpose() * w.asDiagonal() * t.d;
}

std::vector<cplx> scalar_lags_checked(const CovarianceData& c) {
    c.validate();
    if (c.m != 1) throw std::invalid_argument("solve_dual: scalar solver requires m = 1");
    return c.scalar_lags();
}

}  // namespace

double dual_objective(const PseudoPolynomial& q, const std::vector<cplx>& c_lags,
                      const std::vector<double>& p_values, const DiscreteCircle& circle) {
    Tables t(circle, q.degree());
    Eigen::VectorXd x = pack_pseudo(q.coeffs());
    return objective_from_values(c_lags, x, t.values(x), p_values);
}

Eigen::VectorXd dual_gradient(const PseudoPolynomial& q, const std::vector<cplx>& c_lags,
                              const std::vector<double>& p_values, const DiscreteCircle& circle) {
    Tables t(circle, q.degree());
    Eigen::VectorXd x = pack_pseudo(q.coeffs());
    Eigen::VectorXd qv = t.values(x);
    if (qv.minCoeff() <= 0.0) throw Error("dual_gradient: Q not positive on the grid");
    return gradient_from_values(t, c_lags, qv, p_values);
}

Eigen::MatrixXd dual_hessian(const PseudoPolynomial& q, const std::vector<double>& p_values,
                             const DiscreteCircle& circle, int order) {
    Tables t(circle, order >= 0 ? order : q.degree());
    Eigen::VectorXd x = pack_pseudo(q.coeffs());
    Eigen::VectorXd qv = t.values(x);
    if (qv.minCoeff() <= 0.0) throw Error("dual_hessian: Q not positive on the grid");
    return hessian_from_values(t, qv, p_values);
}

double primal_value(const DiscreteSpectrum& phi, const std::vector<double>& p_values) {
    double acc = 0.0;
    for (size_t j = 0; j < phi.values.size(); ++j) {
        if (phi.values[j] <= 0.0) throw Error("primal_value: spectrum not positive on the grid");
        acc += p_values[j] * std::log(phi.values[j]);
    }
    return acc / static_cast<double>(phi.values.size());
}

DualSolution solve_dual(const CovarianceData& c, const PseudoPolynomial& p, const SolverConfig& cfg) {
    const std::vector<cplx> lags = scalar_lags_checked(c);
    const int n = c.order();
    const DiscreteCircle circle(c.half_period);
    const std::vector<double> p_values = p.eval_on(circle);
    double p_min = *std::min_element(p_values.begin(), p_values.end());
    if (p_min <= 0.0) throw std::invalid_argument("solve_dual: P must be positive on the grid");

    const double c_scale = std::abs(lags[0].real());
    const Tables t(circle, n);

    Eigen::VectorXd x;
    if (cfg.initial_q) {
        if (static_cast<int>(cfg.initial_q->size()) != n + 1)
            throw std::invalid_argument("solve_dual: initial q has the wrong order");
        x = pack_pseudo(*cfg.initial_q);
    } else {
        double p_mass = 0.0;
        for (double v : p_values) p_mass += v;
        p_mass /= static_cast<double>(circle.size());
        x = Eigen::VectorXd::Zero(2 * n + 1);
        x[0] = p_mass / lags[0].real();  // constant start already matching c_0
    }
    const double q0_init = std::max(x[0], 1e-300);

    DualSolution out;
    Eigen::VectorXd qv = t.values(x);
    if (qv.minCoeff() <= 0.0) throw std::invalid_argument("solve_dual: initial Q not positive on the grid");

    double f = objective_from_values(lags, x, qv, p_values);
    int stall = 0;
    double last_gnorm = 0.0;

    auto finish = [&](SolveStatus status, int iter, double gnorm, std::string diag) {
        out.status = status;
        out.iterations = iter;
        out.gradient_norm = gnorm;
        out.q = PseudoPolynomial(unpack_pseudo(x));
        std::vector<double> phi(static_cast<size_t>(circle.size()));
        for (int j = 0; j < circle.size(); ++j) phi[static_cast<size_t>(j)] = p_values[static_cast<size_t>(j)] / qv[j];
        out.phi = make_spectrum(circle, std::move(phi));
        out.dual_value = f;
        if (status == SolveStatus::Converged) out.primal_value = primal_value(out.phi, p_values);
        double res = 0.0;
        for (int k = 0; k <= n; ++k)
            res = std::max(res, std::abs(discrete_moment(out.phi.values, circle, k) - lags[static_cast<size_t>(k)]));
        out.moment_residual = res;
        out.diagnostic = std::move(diag);
        if (status == SolveStatus::Infeasible) {
            double norm = std::max(x.cwiseAbs().maxCoeff(), 1e-300);
            for (const cplx& qk : unpack_pseudo(x)) out.boundary_direction.push_back(qk / norm);
        }
        return out;
    };

    for (int iter = 0; iter <= cfg.max_iterations; ++iter) {
        Eigen::VectorXd g = gradient_from_values(t, lags, qv, p_values);
        const double gnorm = last_gnorm = g.cwiseAbs().maxCoeff();
        if (gnorm <= cfg.gradient_tolerance * c_scale) return finish(SolveStatus::Converged, iter, gnorm, "");

        const double q_min = qv.minCoeff();
        int arg_min = 0;
        qv.minCoeff(&arg_min);
        const bool near_boundary = q_min < 1e-10 * x[0];
        const bool exploded = near_boundary && x.cwiseAbs().maxCoeff() > 1e10 * std::max(q0_init, 1.0);
        if ((near_boundary && stall >= 5) || exploded) {
            std::ostringstream diag;
            diag << "dual diverges: Q(zeta_" << circle.k_of(arg_min) << ") -> 0 relative to q_0";
            return finish(SolveStatus::Infeasible, iter, gnorm, diag.str());
        }
        if (iter == cfg.max_iterations) break;

        Eigen::MatrixXd h = hessian_from_values(t, qv, p_values);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
        Eigen::VectorXd step = -ldlt.solve(g);
        if (!step.allFinite() || g.dot(step) >= 0.0) step = -g;

        const double slope = g.dot(step);
        // objective differences below double resolution count as ties
        const double f_slack = 1e-15 * (1.0 + std::abs(f));
        double alpha = 1.0;
        bool moved = false;
        while (alpha > 1e-18) {
            Eigen::VectorXd x_try = x + alpha * step;
            Eigen::VectorXd qv_try = t.values(x_try);
            double f_try = objective_from_values(lags, x_try, qv_try, p_values);
            if (f_try <= f + cfg.armijo * alpha * slope + f_slack) {
                const double decrease = f - f_try;
                x = std::move(x_try);
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
                  "iteration cap reached without a convergence or divergence certificate");
}

}  // namespace circarma
