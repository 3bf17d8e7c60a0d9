#include "circarma/multivar.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

#include "circarma/errors.hpp"

namespace circarma {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MatrixPseudoPolynomial MatrixPseudoPolynomial::identity(int m) {
    MatrixPseudoPolynomial q;
    q.m = m;
    q.coeffs = {Eigen::MatrixXcd::Identity(m, m)};
    return q;
}

MatrixPseudoPolynomial MatrixPseudoPolynomial::from_scalar(const PseudoPolynomial& p, int m) {
    MatrixPseudoPolynomial q;
    q.m = m;
    for (const cplx& c : p.coeffs()) q.coeffs.push_back(c * Eigen::MatrixXcd::Identity(m, m));
    return q;
}

Eigen::MatrixXcd MatrixPseudoPolynomial::eval(double theta) const {
    Eigen::MatrixXcd v = coeffs[0];
    for (int k = 1; k <= degree(); ++k) {
        const cplx w = unit(-k * theta);
        v += coeffs[static_cast<size_t>(k)] * w + coeffs[static_cast<size_t>(k)].adjoint() * std::conj(w);
    }
    return v;
}

std::vector<Eigen::MatrixXcd> MatrixPseudoPolynomial::eval_on(const DiscreteCircle& circle) const {
    if (degree() >= 2 * circle.half_period())
        throw std::invalid_argument("MatrixPseudoPolynomial: degree >= 2N");
    std::vector<Eigen::MatrixXcd> out(static_cast<size_t>(circle.size()));
    for (int j = 0; j < circle.size(); ++j) out[static_cast<size_t>(j)] = eval(circle.theta(j));
    return out;
}

PseudoPolynomial MatrixPseudoPolynomial::scalar() const {
    if (m != 1) throw std::invalid_argument("MatrixPseudoPolynomial::scalar: m != 1");
    std::vector<cplx> c;
    c.reserve(coeffs.size());
    for (const auto& q : coeffs) c.push_back(q(0, 0));
    return PseudoPolynomial(std::move(c));
}

void MatrixPseudoPolynomial::validate() const {
    if (coeffs.empty()) throw std::invalid_argument("MatrixPseudoPolynomial: no coefficients");
    for (const auto& q : coeffs)
        if (q.rows() != m || q.cols() != m)
            throw std::invalid_argument("MatrixPseudoPolynomial: block size mismatch");
    double asym = (coeffs[0] - coeffs[0].adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * (1.0 + coeffs[0].cwiseAbs().maxCoeff()))
        throw std::invalid_argument("MatrixPseudoPolynomial: Q_0 must be Hermitian");
}

std::vector<Eigen::MatrixXcd> block_moments(const std::vector<Eigen::MatrixXcd>& phi,
                                            const DiscreteCircle& circle, int n) {
    if (static_cast<int>(phi.size()) != circle.size())
        throw std::invalid_argument("block_moments: need one block per grid point");
    const int m = static_cast<int>(phi.front().rows());
    std::vector<Eigen::MatrixXcd> out(static_cast<size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m, m);
        for (int j = 0; j < circle.size(); ++j) acc += circle.power(j, k) * phi[static_cast<size_t>(j)];
        out[static_cast<size_t>(k)] = acc / static_cast<double>(circle.size());
    }
    return out;
}

namespace {

// One real parameter of the matrix coefficient set: the derivative of
// Q(zeta_j) is phase1 zeta_j^{-lag} e_{r1} e_{c1}^T (+ phase2 zeta_j^{+lag}
// e_{r2} e_{c2}^T when two-sided), Hermitian by construction.
struct Param {
    int lag;
    int r1, c1, r2, c2;
    cplx phase1, phase2;
    int terms;  // 1 or 2
};

struct BlockTables {
    int m, order, points;
    std::vector<Param> params;
    const DiscreteCircle& circle;

    BlockTables(const DiscreteCircle& circ, int m_in, int n)
        : m(m_in), order(n), points(circ.size()), circle(circ) {
        // Q_0: diagonal reals, then off-diagonal (a<b) Re/Im pairs
        for (int a = 0; a < m; ++a) params.push_back({0, a, a, 0, 0, {1.0, 0.0}, {0.0, 0.0}, 1});
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) {
                params.push_back({0, a, b, b, a, {1.0, 0.0}, {1.0, 0.0}, 2});
                params.push_back({0, a, b, b, a, {0.0, 1.0}, {0.0, -1.0}, 2});
            }
        // Q_k, k = 1..n: every entry, Re/Im
        for (int k = 1; k <= n; ++k)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    params.push_back({k, a, b, b, a, {1.0, 0.0}, {1.0, 0.0}, 2});
                    params.push_back({k, a, b, b, a, {0.0, 1.0}, {0.0, -1.0}, 2});
                }
    }

    int dim() const { return static_cast<int>(params.size()); }

    std::vector<Eigen::MatrixXcd> q_values(const MatrixPseudoPolynomial& q) const {
        return q.eval_on(circle);
    }

    // linear functional <L, .> of a Hermitian lag sequence L_0..L_n evaluated
    // on each parameter direction; <C,Q> = lin(C) . pack(Q)
    Eigen::VectorXd lin(const std::vector<Eigen::MatrixXcd>& lags) const {
        Eigen::VectorXd v(dim());
        for (int a = 0; a < dim(); ++a) {
            const Param& p = params[static_cast<size_t>(a)];
            const Eigen::MatrixXcd& l = lags[static_cast<size_t>(p.lag)];
            if (p.terms == 1) {
                v[a] = l(p.r1, p.c1).real();
            } else if (p.phase1.imag() == 0.0) {
                v[a] = 2.0 * l(p.r1, p.c1).real();
            } else {
                v[a] = 2.0 * l(p.r1, p.c1).imag();
            }
        }
        return v;
    }
};

Eigen::VectorXd pack_with(const BlockTables& t, const MatrixPseudoPolynomial& q) {
    Eigen::VectorXd x(t.dim());
    for (int a = 0; a < t.dim(); ++a) {
        const Param& p = t.params[static_cast<size_t>(a)];
        const cplx entry = q.coeffs[static_cast<size_t>(p.lag)](p.r1, p.c1);
        if (p.terms == 1)
            x[a] = entry.real();
        else
            x[a] = p.phase1.imag() == 0.0 ? entry.real() : entry.imag();
    }
    return x;
}

MatrixPseudoPolynomial unpack_with(const BlockTables& t, const Eigen::VectorXd& x) {
    MatrixPseudoPolynomial q;
    q.m = t.m;
    q.coeffs.assign(static_cast<size_t>(t.order) + 1, Eigen::MatrixXcd::Zero(t.m, t.m));
    for (int a = 0; a < t.dim(); ++a) {
        const Param& p = t.params[static_cast<size_t>(a)];
        Eigen::MatrixXcd& blk = q.coeffs[static_cast<size_t>(p.lag)];
        if (p.terms == 1) {
            blk(p.r1, p.c1) += x[a];
        } else if (p.phase1.imag() == 0.0) {
            blk(p.r1, p.c1) += x[a];
            if (p.lag == 0) blk(p.r2, p.c2) += x[a];
        } else {
            blk(p.r1, p.c1) += cplx(0.0, x[a]);
            if (p.lag == 0) blk(p.r2, p.c2) += cplx(0.0, -x[a]);
        }
    }
    return q;
}

struct GridFactor {
    bool positive = false;
    double log_det = 0.0;
    Eigen::MatrixXcd inverse;
    double min_eig = 0.0;
};

GridFactor factor_point(const Eigen::MatrixXcd& q) {
    GridFactor f;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (q + q.adjoint().eval()));
    if (es.info() != Eigen::Success) return f;
    f.min_eig = es.eigenvalues().minCoeff();
    const double floor = 1e-14 * std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
    if (f.min_eig <= floor) return f;
    f.positive = true;
    f.log_det = es.eigenvalues().array().log().sum();
    Eigen::VectorXd inv = es.eigenvalues().array().inverse();
    f.inverse = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
    return f;
}

// matrix moments M_k = (1/2N) sum_j zeta_j^k P_j Q_j^{-1}
std::vector<Eigen::MatrixXcd> moment_blocks(const BlockTables& t, const std::vector<double>& pv,
                                            const std::vector<GridFactor>& f) {
    std::vector<Eigen::MatrixXcd> mom(static_cast<size_t>(t.order) + 1);
    for (int k = 0; k <= t.order; ++k) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(t.m, t.m);
        for (int j = 0; j < t.points; ++j)
            acc += t.circle.power(j, k) * pv[static_cast<size_t>(j)] * f[static_cast<size_t>(j)].inverse;
        mom[static_cast<size_t>(k)] = acc / static_cast<double>(t.points);
    }
    return mom;
}

// tr(K D^a K D^b) via the rank-<=2 structure of the derivative directions
double curvature_entry(const BlockTables& t, const Eigen::MatrixXcd& k_inv, int j, int a, int b) {
    const Param& pa = t.params[static_cast<size_t>(a)];
    const Param& pb = t.params[static_cast<size_t>(b)];
    const cplx za1 = pa.phase1 * t.circle.power(j, -pa.lag);
    const cplx za2 = pa.phase2 * t.circle.power(j, pa.lag);
    const cplx zb1 = pb.phase1 * t.circle.power(j, -pb.lag);
    const cplx zb2 = pb.phase2 * t.circle.power(j, pb.lag);
    cplx acc = za1 * zb1 * k_inv(pa.c1, pb.r1) * k_inv(pb.c1, pa.r1);
    if (pb.terms == 2) acc += za1 * zb2 * k_inv(pa.c1, pb.r2) * k_inv(pb.c2, pa.r1);
    if (pa.terms == 2) {
        acc += za2 * zb1 * k_inv(pa.c2, pb.r1) * k_inv(pb.c1, pa.r2);
        if (pb.terms == 2) acc += za2 * zb2 * k_inv(pa.c2, pb.r2) * k_inv(pb.c2, pa.r2);
    }
    return acc.real();
}

// tr(K D^a)
cplx trace_kd(const BlockTables& t, const Eigen::MatrixXcd& k_inv, int j, int a) {
    const Param& pa = t.params[static_cast<size_t>(a)];
    cplx acc = pa.phase1 * t.circle.power(j, -pa.lag) * k_inv(pa.c1, pa.r1);
    if (pa.terms == 2) acc += pa.phase2 * t.circle.power(j, pa.lag) * k_inv(pa.c2, pa.r2);
    return acc;
}

Eigen::MatrixXd curvature(const BlockTables& t, const std::vector<double>& pv,
                          const std::vector<GridFactor>& f) {
    const int d = t.dim();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < t.points; ++j) {
        const double w = pv[static_cast<size_t>(j)] / t.points;
        const Eigen::MatrixXcd& k_inv = f[static_cast<size_t>(j)].inverse;
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b) h(a, b) += w * curvature_entry(t, k_inv, j, a, b);
    }
    return h.selfadjointView<Eigen::Upper>();
}

std::vector<GridFactor> factor_grid(const std::vector<Eigen::MatrixXcd>& qv, bool* ok,
                                    double* min_eig) {
    std::vector<GridFactor> f(qv.size());
    *ok = true;
    *min_eig = kInf;
    for (size_t j = 0; j < qv.size(); ++j) {
        f[j] = factor_point(qv[j]);
        *min_eig = std::min(*min_eig, f[j].min_eig);
        if (!f[j].positive) *ok = false;
    }
    return f;
}

}  // namespace

Eigen::VectorXd pack_matrix_pseudo(const MatrixPseudoPolynomial& q) {
    q.validate();
    DiscreteCircle unit_circle(std::max(q.degree() + 1, 1));
    BlockTables t(unit_circle, q.m, q.degree());
    return pack_with(t, q);
}

MatrixPseudoPolynomial unpack_matrix_pseudo(const Eigen::VectorXd& x, int m, int n) {
    DiscreteCircle unit_circle(std::max(n + 1, 1));
    BlockTables t(unit_circle, m, n);
    if (x.size() != t.dim()) throw std::invalid_argument("unpack_matrix_pseudo: size mismatch");
    return unpack_with(t, x);
}

double block_dual_objective(const MatrixPseudoPolynomial& q, const CovarianceData& c,
                            const std::vector<double>& p_values, const DiscreteCircle& circle) {
    BlockTables t(circle, c.m, c.order());
    auto qv = q.eval_on(circle);
    double lin_part = t.lin(c.lags).dot(pack_with(t, q));
    double barrier = 0.0;
    for (int j = 0; j < t.points; ++j) {
        GridFactor f = factor_point(qv[static_cast<size_t>(j)]);
        if (!f.positive) return kInf;
        barrier += p_values[static_cast<size_t>(j)] * f.log_det;
    }
    return lin_part - barrier / t.points;
}

Eigen::VectorXd block_dual_gradient(const MatrixPseudoPolynomial& q, const CovarianceData& c,
                                    const std::vector<double>& p_values, const DiscreteCircle& circle) {
    BlockTables t(circle, c.m, c.order());
    bool ok = false;
    double mn = 0.0;
    auto f = factor_grid(q.eval_on(circle), &ok, &mn);
    if (!ok) throw Error("block_dual_gradient: Q must be positive definite on the grid");
    return t.lin(c.lags) - t.lin(moment_blocks(t, p_values, f));
}

Eigen::MatrixXd block_dual_hessian(const MatrixPseudoPolynomial& q,
                                   const std::vector<double>& p_values, const DiscreteCircle& circle) {
    BlockTables t(circle, q.m, q.degree());
    bool ok = false;
    double mn = 0.0;
    auto f = factor_grid(q.eval_on(circle), &ok, &mn);
    if (!ok) throw Error("block_dual_hessian: Q must be positive definite on the grid");
    return curvature(t, p_values, f);
}

BlockDualSolution solve_dual_block(const CovarianceData& c, const PseudoPolynomial& p,
                                   const SolverConfig& cfg) {
    c.validate();
    const DiscreteCircle circle(c.half_period);
    const int n = c.order();
    const int m = c.m;
    const std::vector<double> pv = p.eval_on(circle);
    if (*std::min_element(pv.begin(), pv.end()) <= 0.0)
        throw std::invalid_argument("solve_dual_block: P must be positive on the grid");

    BlockTables t(circle, m, n);
    const Eigen::VectorXd lin_c = t.lin(c.lags);
    const double scale = c.scale();

    double p_mass = 0.0;
    for (double v : pv) p_mass += v;
    p_mass /= static_cast<double>(circle.size());

    MatrixPseudoPolynomial q0;
    q0.m = m;
    q0.coeffs.assign(static_cast<size_t>(n) + 1, Eigen::MatrixXcd::Zero(m, m));
    q0.coeffs[0] = p_mass * c.lags[0].inverse();
    q0.coeffs[0] = 0.5 * (q0.coeffs[0] + q0.coeffs[0].adjoint().eval());
    Eigen::VectorXd x = pack_with(t, q0);
    const double x_scale0 = std::max(x.cwiseAbs().maxCoeff(), 1e-300);

    bool ok = false;
    double min_eig = 0.0;
    auto f = factor_grid(t.q_values(unpack_with(t, x)), &ok, &min_eig);
    if (!ok) throw Error("solve_dual_block: initial Q not positive definite");

    auto objective = [&](const Eigen::VectorXd& xv, std::vector<GridFactor>* fac, double* mn) {
        bool pos = false;
        auto ff = factor_grid(t.q_values(unpack_with(t, xv)), &pos, mn);
        if (!pos) return kInf;
        double barrier = 0.0;
        for (int j = 0; j < t.points; ++j) barrier += pv[static_cast<size_t>(j)] * ff[static_cast<size_t>(j)].log_det;
        if (fac) *fac = std::move(ff);
        return lin_c.dot(xv) - barrier / t.points;
    };

    double mn_tmp = 0.0;
    double fval = objective(x, nullptr, &mn_tmp);
    int stall = 0;
    double last_gnorm = 0.0;

    BlockDualSolution out;
    auto finish = [&](SolveStatus status, int iter, double gnorm, std::string diag) {
        out.status = status;
        out.iterations = iter;
        out.gradient_norm = gnorm;
        out.q = unpack_with(t, x);
        out.dual_value = fval;
        out.phi.resize(static_cast<size_t>(t.points));
        for (int j = 0; j < t.points; ++j)
            out.phi[static_cast<size_t>(j)] = pv[static_cast<size_t>(j)] * f[static_cast<size_t>(j)].inverse;
        auto mom = moment_blocks(t, pv, f);
        double res = 0.0;
        for (int k = 0; k <= n; ++k)
            res = std::max(res, (mom[static_cast<size_t>(k)] - c.lags[static_cast<size_t>(k)]).cwiseAbs().maxCoeff());
        out.moment_residual = res;
        out.diagnostic = std::move(diag);
        return out;
    };

    for (int iter = 0; iter <= cfg.max_iterations; ++iter) {
        Eigen::VectorXd g = lin_c - t.lin(moment_blocks(t, pv, f));
        const double gnorm = last_gnorm = g.cwiseAbs().maxCoeff();
        if (gnorm <= cfg.gradient_tolerance * scale) return finish(SolveStatus::Converged, iter, gnorm, "");

        double q0_norm = unpack_with(t, x).coeffs[0].cwiseAbs().maxCoeff();
        bool near_boundary = false;
        for (const auto& gf : f) near_boundary |= gf.min_eig < 1e-10 * std::max(q0_norm, 1e-300);
        const bool exploded = near_boundary && x.cwiseAbs().maxCoeff() > 1e10 * std::max(x_scale0, 1.0);
        if ((near_boundary && stall >= 5) || exploded)
            return finish(SolveStatus::Infeasible, iter, gnorm,
                          "dual diverges: Q loses definiteness relative to Q_0");
        if (iter == cfg.max_iterations) break;

        Eigen::MatrixXd h = curvature(t, pv, f);
        Eigen::VectorXd step = -h.ldlt().solve(g);
        if (!step.allFinite() || g.dot(step) >= 0.0) step = -g;

        const double slope = g.dot(step);
        const double f_slack = 1e-15 * (1.0 + std::abs(fval));
        double alpha = 1.0;
        bool moved = false;
        while (alpha > 1e-18) {
            Eigen::VectorXd x_try = x + alpha * step;
            std::vector<GridFactor> f_try;
            double mn = 0.0;
            double f_val_try = objective(x_try, &f_try, &mn);
            if (f_val_try <= fval + cfg.armijo * alpha * slope + f_slack) {
                const double decrease = fval - f_val_try;
                x = std::move(x_try);
                f = std::move(f_try);
                stall = decrease > 1e-16 * (1.0 + std::abs(fval)) ? 0 : stall + 1;
                fval = f_val_try;
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

BlockExtension block_extension_and_sigma(const PseudoPolynomial& p, const MatrixPseudoPolynomial& q,
                                         const DiscreteCircle& circle) {
    q.validate();
    const std::vector<double> pv = p.eval_on(circle);
    std::vector<Eigen::MatrixXcd> phi(static_cast<size_t>(circle.size()));
    auto qv = q.eval_on(circle);
    for (int j = 0; j < circle.size(); ++j) {
        GridFactor f = factor_point(qv[static_cast<size_t>(j)]);
        if (!f.positive || pv[static_cast<size_t>(j)] <= 0.0)
            throw std::invalid_argument("block_extension_and_sigma: (P, Q) must be an interior pair");
        phi[static_cast<size_t>(j)] = pv[static_cast<size_t>(j)] * f.inverse;
    }
    CirculantMatrix sigma = CirculantMatrix(circle, phi).hermitized();
    auto lags = block_moments(phi, circle, circle.half_period());
    FullPeriodicSequence seq;
    seq.m = q.m;
    seq.half_period = circle.half_period();
    seq.lags = std::move(lags);
    return BlockExtension{std::move(seq), std::move(sigma)};
}

std::vector<cplx> block_cepstral_moments(const std::vector<Eigen::MatrixXcd>& phi,
                                         const DiscreteCircle& circle, int n) {
    if (static_cast<int>(phi.size()) != circle.size())
        throw std::invalid_argument("block_cepstral_moments: need one block per grid point");
    const int m = static_cast<int>(phi.front().rows());
    std::vector<double> lg(phi.size());
    for (size_t j = 0; j < phi.size(); ++j) {
        GridFactor f = factor_point(phi[j]);
        if (!f.positive) throw Error("block_cepstral_moments: spectrum must be positive definite");
        lg[j] = f.log_det / m;
    }
    std::vector<cplx> gamma(static_cast<size_t>(n));
    for (int k = 1; k <= n; ++k)
        gamma[static_cast<size_t>(k - 1)] = discrete_moment(std::span<const double>(lg), circle, k);
    return gamma;
}

namespace {

struct JointBlockTables {
    BlockTables q_tab;
    Eigen::MatrixXd dp;  // points x 2n
    int order;

    JointBlockTables(const DiscreteCircle& circle, int m, int n) : q_tab(circle, m, n), dp(circle.size(), 2 * n), order(n) {
        for (int j = 0; j < circle.size(); ++j) {
            const double th = circle.theta(j);
            for (int k = 1; k <= n; ++k) {
                dp(j, 2 * (k - 1)) = 2.0 * std::cos(k * th);
                dp(j, 2 * (k - 1) + 1) = 2.0 * std::sin(k * th);
            }
        }
    }

    Eigen::VectorXd p_values(const Eigen::VectorXd& zp) const {
        return Eigen::VectorXd::Ones(q_tab.points) + dp * zp;
    }
};

PseudoPolynomial p_from_tail(const Eigen::VectorXd& zp, int n) {
    std::vector<cplx> pc(static_cast<size_t>(n) + 1);
    pc[0] = cplx(1.0, 0.0);
    for (int k = 1; k <= n; ++k) pc[static_cast<size_t>(k)] = cplx(zp[2 * (k - 1)], zp[2 * (k - 1) + 1]);
    return PseudoPolynomial(std::move(pc));
}

}  // namespace

double block_joint_objective(const PseudoPolynomial& p, const MatrixPseudoPolynomial& q,
                             const CovarianceData& c, const std::vector<cplx>& gamma, double lambda,
                             const DiscreteCircle& circle) {
    const int n = c.order();
    const int m = c.m;
    JointBlockTables t(circle, m, n);
    Eigen::VectorXd zq = pack_with(t.q_tab, q);
    std::vector<double> pvv = p.eval_on(circle);
    auto qv = q.eval_on(circle);
    double gamma_part = 0.0;
    for (int k = 1; k <= n; ++k)
        gamma_part += 2.0 * (gamma[static_cast<size_t>(k - 1)].real() * p.coeff(k).real() +
                             gamma[static_cast<size_t>(k - 1)].imag() * p.coeff(k).imag());
    double entropy = 0.0;
    for (int j = 0; j < circle.size(); ++j) {
        GridFactor f = factor_point(qv[static_cast<size_t>(j)]);
        double pj = pvv[static_cast<size_t>(j)];
        if (!f.positive || pj <= 0.0) return kInf;
        entropy += pj * (m * std::log(pj) - f.log_det) - lambda * m * std::log(pj);
    }
    return t.q_tab.lin(c.lags).dot(zq) - m * gamma_part + entropy / circle.size();
}

Eigen::VectorXd block_joint_gradient(const PseudoPolynomial& p, const MatrixPseudoPolynomial& q,
                                     const CovarianceData& c, const std::vector<cplx>& gamma,
                                     double lambda, const DiscreteCircle& circle) {
    const int n = c.order();
    const int m = c.m;
    JointBlockTables t(circle, m, n);
    const int dq = t.q_tab.dim();
    std::vector<double> pvv = p.eval_on(circle);
    bool ok = false;
    double mn = 0.0;
    auto f = factor_grid(q.eval_on(circle), &ok, &mn);
    if (!ok || *std::min_element(pvv.begin(), pvv.end()) <= 0.0)
        throw Error("block_joint_gradient: (P, Q) must be interior");

    Eigen::VectorXd g(dq + 2 * n);
    g.head(dq) = t.q_tab.lin(c.lags) - t.q_tab.lin(moment_blocks(t.q_tab, pvv, f));
    Eigen::VectorXd wp(circle.size());
    for (int j = 0; j < circle.size(); ++j) {
        double pj = pvv[static_cast<size_t>(j)];
        wp[j] = (m * (std::log(pj) + 1.0) - f[static_cast<size_t>(j)].log_det - lambda * m / pj) /
                circle.size();
    }
    Eigen::VectorXd gp = t.dp.transpose() * wp;
    for (int k = 1; k <= n; ++k) {
        g[dq + 2 * (k - 1)] = gp[2 * (k - 1)] - 2.0 * m * gamma[static_cast<size_t>(k - 1)].real();
        g[dq + 2 * (k - 1) + 1] = gp[2 * (k - 1) + 1] - 2.0 * m * gamma[static_cast<size_t>(k - 1)].imag();
    }
    return g;
}

BlockJointSolution solve_joint_block(const CovarianceData& c, const CepstralData& data,
                                     double lambda, const JointSolverConfig& cfg) {
    c.validate();
    if (lambda < 0.0) throw std::invalid_argument("solve_joint_block: lambda must be positive");
    if (lambda == 0.0 && !cfg.allow_boundary)
        throw std::invalid_argument("solve_joint_block: lambda = 0 requires allow_boundary");
    const int n = c.order();
    const int m = c.m;
    if (data.order() != n)
        throw std::invalid_argument("solve_joint_block: cepstral order must match the covariance order");
    const DiscreteCircle circle(c.half_period);
    const std::vector<cplx>& gamma = data.gamma;
    JointBlockTables t(circle, m, n);
    const int dq = t.q_tab.dim();
    const Eigen::VectorXd lin_c = t.q_tab.lin(c.lags);
    const double scale = std::max(c.scale(), 1.0);

    BlockJointSolution out;
    out.lambda = lambda;

    SolverConfig me_cfg;
    me_cfg.max_iterations = cfg.max_iterations;
    BlockDualSolution me = solve_dual_block(c, PseudoPolynomial::one(), me_cfg);
    if (!me.converged()) {
        out.status = me.status;
        out.diagnostic = "maximum-entropy initialization failed: " + me.diagnostic;
        return out;
    }

    Eigen::VectorXd z = Eigen::VectorXd::Zero(dq + 2 * n);
    z.head(dq) = pack_with(t.q_tab, me.q);

    auto evaluate = [&](const Eigen::VectorXd& zv, std::vector<GridFactor>* fac,
                        Eigen::VectorXd* pvals) {
        Eigen::VectorXd pvv = t.p_values(zv.tail(2 * n));
        if (pvv.minCoeff() <= 0.0) return kInf;
        bool pos = false;
        double mn = 0.0;
        auto ff = factor_grid(t.q_tab.q_values(unpack_with(t.q_tab, zv.head(dq))), &pos, &mn);
        if (!pos) return kInf;
        double gamma_part = 0.0;
        for (int k = 1; k <= n; ++k)
            gamma_part += 2.0 * (gamma[static_cast<size_t>(k - 1)].real() * zv[dq + 2 * (k - 1)] +
                                 gamma[static_cast<size_t>(k - 1)].imag() * zv[dq + 2 * (k - 1) + 1]);
        double entropy = 0.0;
        for (int j = 0; j < circle.size(); ++j) {
            double pj = pvv[j];
            entropy += pj * (m * std::log(pj) - ff[static_cast<size_t>(j)].log_det) - lambda * m * std::log(pj);
        }
        if (fac) *fac = std::move(ff);
        if (pvals) *pvals = std::move(pvv);
        return lin_c.dot(zv.head(dq)) - m * gamma_part + entropy / circle.size();
    };

    std::vector<GridFactor> f;
    Eigen::VectorXd pv;
    double fval = evaluate(z, &f, &pv);
    int stall = 0;
    double last_gnorm = 0.0;

    auto finish = [&](SolveStatus status, int iter, double gnorm, std::string diag) {
        out.status = status;
        out.iterations = iter;
        out.gradient_norm = gnorm;
        out.diagnostic = std::move(diag);
        out.p = p_from_tail(z.tail(2 * n), n);
        out.q = unpack_with(t.q_tab, z.head(dq));
        out.phi.resize(static_cast<size_t>(circle.size()));
        for (int j = 0; j < circle.size(); ++j)
            out.phi[static_cast<size_t>(j)] = pv[j] * f[static_cast<size_t>(j)].inverse;
        out.epsilon = epsilon_adjustment(out.p, lambda, n, circle);
        auto mom = block_moments(out.phi, circle, n);
        double cres = 0.0;
        for (int k = 0; k <= n; ++k)
            cres = std::max(cres, (mom[static_cast<size_t>(k)] - c.lags[static_cast<size_t>(k)]).cwiseAbs().maxCoeff());
        out.covariance_residual = cres;
        auto ach = block_cepstral_moments(out.phi, circle, n);
        double gres = 0.0;
        for (int k = 1; k <= n; ++k)
            gres = std::max(gres, std::abs(ach[static_cast<size_t>(k - 1)] - gamma[static_cast<size_t>(k - 1)] -
                                           out.epsilon[static_cast<size_t>(k - 1)]));
        out.adjusted_cepstral_residual = gres;
        return out;
    };

    for (int iter = 0; iter <= cfg.max_iterations; ++iter) {
        // gradient
        Eigen::VectorXd g(dq + 2 * n);
        g.head(dq) = lin_c - t.q_tab.lin(moment_blocks(t.q_tab, std::vector<double>(pv.data(), pv.data() + pv.size()), f));
        Eigen::VectorXd wp(circle.size());
        for (int j = 0; j < circle.size(); ++j)
            wp[j] = (m * (std::log(pv[j]) + 1.0) - f[static_cast<size_t>(j)].log_det - lambda * m / pv[j]) /
                    circle.size();
        Eigen::VectorXd gp = t.dp.transpose() * wp;
        for (int k = 1; k <= n; ++k) {
            g[dq + 2 * (k - 1)] = gp[2 * (k - 1)] - 2.0 * m * gamma[static_cast<size_t>(k - 1)].real();
            g[dq + 2 * (k - 1) + 1] = gp[2 * (k - 1) + 1] - 2.0 * m * gamma[static_cast<size_t>(k - 1)].imag();
        }
        const double gnorm = last_gnorm = g.cwiseAbs().maxCoeff();
        if (gnorm <= cfg.gradient_tolerance * scale) return finish(SolveStatus::Converged, iter, gnorm, "");

        const double p_min = pv.minCoeff();
        double q0_norm = unpack_with(t.q_tab, z.head(dq)).coeffs[0].cwiseAbs().maxCoeff();
        bool q_boundary = false;
        for (const auto& gf : f) q_boundary |= gf.min_eig < 1e-10 * std::max(q0_norm, 1e-300);
        if (p_min < 1e-10 && stall >= 5)
            return finish(SolveStatus::BoundaryTermination, iter, gnorm,
                          "P reached the boundary of the positivity cone (unregularized dual)");
        if (q_boundary && stall >= 5)
            return finish(SolveStatus::Infeasible, iter, gnorm, "Q diverges toward the cone boundary");
        if (iter == cfg.max_iterations) break;

        // Hessian
        std::vector<double> pvv(pv.data(), pv.data() + pv.size());
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dq + 2 * n, dq + 2 * n);
        h.topLeftCorner(dq, dq) = curvature(t.q_tab, pvv, f);
        Eigen::MatrixXd hqp = Eigen::MatrixXd::Zero(dq, 2 * n);
        for (int j = 0; j < circle.size(); ++j) {
            const Eigen::MatrixXcd& k_inv = f[static_cast<size_t>(j)].inverse;
            for (int a = 0; a < dq; ++a) {
                double tr_kd = trace_kd(t.q_tab, k_inv, j, a).real();
                for (int b = 0; b < 2 * n; ++b) hqp(a, b) -= t.dp(j, b) * tr_kd / circle.size();
            }
        }
        h.topRightCorner(dq, 2 * n) = hqp;
        h.bottomLeftCorner(2 * n, dq) = hqp.transpose();
        Eigen::VectorXd wpp(circle.size());
        for (int j = 0; j < circle.size(); ++j)
            wpp[j] = (m / pv[j] + lambda * m / (pv[j] * pv[j])) / circle.size();
        h.bottomRightCorner(2 * n, 2 * n) = t.dp.transpose() * wpp.asDiagonal() * t.dp;

        Eigen::VectorXd step;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
        const double ev_min = es.eigenvalues().minCoeff();
        const double ev_max = es.eigenvalues().cwiseAbs().maxCoeff();
        if (ev_min <= 0.0 || ev_max / ev_min > cfg.condition_limit) {
            step = Eigen::VectorXd::Zero(dq + 2 * n);
            step.head(dq) = -h.topLeftCorner(dq, dq).ldlt().solve(g.head(dq));
            step.tail(2 * n) = -h.bottomRightCorner(2 * n, 2 * n).ldlt().solve(g.tail(2 * n));
        } else {
            step = -h.ldlt().solve(g);
        }
        if (!step.allFinite() || g.dot(step) >= 0.0) step = -g;

        const double slope = g.dot(step);
        const double f_slack = 1e-15 * (1.0 + std::abs(fval));
        double alpha = 1.0;
        bool moved = false;
        while (alpha > 1e-18) {
            Eigen::VectorXd z_try = z + alpha * step;
            std::vector<GridFactor> f_try;
            Eigen::VectorXd pv_try;
            double f_val_try = evaluate(z_try, &f_try, &pv_try);
            if (f_val_try <= fval + cfg.armijo * alpha * slope + f_slack) {
                const double decrease = fval - f_val_try;
                z = std::move(z_try);
                f = std::move(f_try);
                pv = std::move(pv_try);
                stall = decrease > 1e-16 * (1.0 + std::abs(fval)) ? 0 : stall + 1;
                fval = f_val_try;
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

MatrixArmaModel bilateral_matrix_arma(const PseudoPolynomial& p, const MatrixPseudoPolynomial& q) {
    q.validate();
    MatrixArmaModel model;
    model.m = q.m;
    model.order = std::max(p.degree(), q.degree());
    model.q = q.coeffs;
    model.q.resize(static_cast<size_t>(model.order) + 1, Eigen::MatrixXcd::Zero(q.m, q.m));
    model.p = p.coeffs();
    model.p.resize(static_cast<size_t>(model.order) + 1, cplx(0.0, 0.0));
    return model;
}

}  // namespace circarma
