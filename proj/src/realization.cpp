#include "circarma/realization.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "circarma/errors.hpp"

namespace circarma {

const char* to_string(ArmaKind k) {
    switch (k) {
        case ArmaKind::Bilateral: return "bilateral";
        case ArmaKind::UnilateralForward: return "unilateral-forward";
        case ArmaKind::UnilateralBackward: return "unilateral-backward";
    }
    return "unknown";
}

FullPeriodicSequence extend_covariances(const PseudoPolynomial& p, const PseudoPolynomial& q,
                                        const DiscreteCircle& circle) {
    std::vector<double> pv = p.eval_on(circle);
    std::vector<double> qv = q.eval_on(circle);
    std::vector<double> phi(pv.size());
    for (size_t j = 0; j < pv.size(); ++j) {
        if (qv[j] <= 0.0 || pv[j] <= 0.0)
            throw std::invalid_argument("extend_covariances: (P, Q) must be an interior pair");
        phi[j] = pv[j] / qv[j];
    }
    std::vector<cplx> lags;
    lags.reserve(static_cast<size_t>(circle.half_period()) + 1);
    for (int k = 0; k <= circle.half_period(); ++k)
        lags.push_back(discrete_moment(std::span<const double>(phi), circle, k));
    return FullPeriodicSequence::scalar(circle.half_period(), std::move(lags));
}

namespace {

std::vector<cplx> padded(const std::vector<cplx>& c, int order) {
    std::vector<cplx> out = c;
    out.resize(static_cast<size_t>(order) + 1, cplx(0.0, 0.0));
    return out;
}

}  // namespace

ArmaModel bilateral_arma(const PseudoPolynomial& p, const PseudoPolynomial& q) {
    ArmaModel model;
    model.kind = ArmaKind::Bilateral;
    model.order = std::max(p.degree(), q.degree());
    model.denominator = padded(q.coeffs(), model.order);
    model.numerator = padded(p.coeffs(), model.order);
    return model;
}

std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs) {
    // trim the leading end, then companion-matrix eigenvalues
    int d = static_cast<int>(coeffs.size()) - 1;
    double scale = 0.0;
    for (const cplx& c : coeffs) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) throw std::invalid_argument("polynomial_roots: zero polynomial");
    while (d > 0 && std::abs(coeffs[static_cast<size_t>(d)]) <= 1e-14 * scale) --d;
    if (d == 0) return {};

    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
    const cplx lead = coeffs[static_cast<size_t>(d)];
    for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) companion(i, d - 1) = -coeffs[static_cast<size_t>(i)] / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, false);
    if (es.info() != Eigen::Success) throw Error("polynomial_roots: eigensolver failed");

    std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + d);
    auto eval = [&](const cplx& z, cplx& val, cplx& der) {
        val = cplx(0.0, 0.0);
        der = cplx(0.0, 0.0);
        for (int i = d; i >= 0; --i) {
            der = der * z + val;
            val = val * z + coeffs[static_cast<size_t>(i)];
        }
    };
    for (cplx& r : roots) {  // one Newton polish per root
        cplx val, der;
        eval(r, val, der);
        if (std::abs(der) > 1e-300) r -= val / der;
    }
    return roots;
}

namespace {

Polynomial factor_banded_impl(const PseudoPolynomial& m_poly, const DiscreteCircle* circle) {
    const int n = m_poly.degree();
    double scale = 0.0;
    for (const cplx& c : m_poly.coeffs()) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) throw std::invalid_argument("factor_banded: zero pseudo-polynomial");

    auto classify_not_positive = [&](const std::string& what) -> void {
        if (circle) {
            std::vector<double> grid = m_poly.eval_on(*circle);
            if (*std::min_element(grid.begin(), grid.end()) > 0.0)
                throw DiscreteOnlyError(
                    "factor_banded: positive on the grid but not on the continuous circle (" + what + ")");
        }
        throw FactorizationOnCircleError("factor_banded: " + what);
    };

    const double circle_min = m_poly.min_on_circle();
    if (circle_min < -1e-10 * scale) classify_not_positive("negative on the circle");

    // effective degree after trimming negligible top coefficients
    int n_eff = n;
    while (n_eff > 0 && std::abs(m_poly.coeff(n_eff)) <= 1e-14 * scale) --n_eff;
    if (n_eff == 0) {
        double m0 = m_poly.coeff(0).real();
        if (m0 <= 0.0) classify_not_positive("non-positive constant");
        return Polynomial{{cplx(std::sqrt(m0), 0.0)}};
    }

    // g(z) = z^n M(z) = sum_{l=0}^{2n} m_{n-l} z^l, roots in (r, 1/conj r) pairs
    std::vector<cplx> g(static_cast<size_t>(2 * n_eff) + 1);
    for (int l = 0; l <= 2 * n_eff; ++l) g[static_cast<size_t>(l)] = m_poly.coeff(n_eff - l);
    std::vector<cplx> roots = polynomial_roots(g);

    std::vector<cplx> inside;
    for (const cplx& z : roots) {
        if (std::abs(std::abs(z) - 1.0) <= 1e-8)
            classify_not_positive("zero on the circle at angle " + std::to_string(std::arg(z)));
        if (std::abs(z) < 1.0) inside.push_back(z);
    }
    if (static_cast<int>(inside.size()) != n_eff)
        throw Error("factor_banded: root pairing failed (" + std::to_string(inside.size()) + " of " +
                    std::to_string(n_eff) + " roots inside the disc)");

    // M = K * u(zeta) conj(u(zeta)) with u = prod (1 - r_i zeta^{-1})
    cplx k_const = m_poly.coeff(-n_eff);
    std::vector<cplx> u{cplx(1.0, 0.0)};
    for (const cplx& r : inside) {
        k_const *= -1.0 / std::conj(r);
        u.push_back(cplx(0.0, 0.0));
        for (size_t i = u.size() - 1; i >= 1; --i) u[i] -= r * u[i - 1];
    }
    if (std::abs(k_const.imag()) > 1e-8 * std::abs(k_const) || k_const.real() <= 0.0)
        throw Error("factor_banded: factor constant is not positive real");
    const double root_k = std::sqrt(k_const.real());
    Polynomial a;
    a.c.reserve(u.size());
    for (const cplx& c : u) a.c.push_back(root_k * c);

    // residual gate on |a|^2 against M
    const int samples = std::max(512, 16 * (n + 1));
    double residual = 0.0;
    for (int i = 0; i < samples; ++i) {
        double th = 2.0 * kPi * i / samples - kPi;
        residual = std::max(residual, std::abs(std::norm(a.eval(th)) - m_poly.eval(th)));
    }
    if (residual > 1e-8 * scale)
        throw Error("factor_banded: residual " + std::to_string(residual) + " above the acceptance gate");
    return a;
}

}  // namespace

Polynomial factor_banded(const PseudoPolynomial& m_poly) { return factor_banded_impl(m_poly, nullptr); }

Polynomial factor_banded(const PseudoPolynomial& m_poly, const DiscreteCircle& circle) {
    return factor_banded_impl(m_poly, &circle);
}

UnilateralPair unilateral_arma(const PseudoPolynomial& p, const PseudoPolynomial& q) {
    Polynomial a_raw = factor_banded(q);
    Polynomial b_raw = factor_banded(p);
    const double a0 = a_raw.c[0].real();

    UnilateralPair out;
    out.forward.kind = ArmaKind::UnilateralForward;
    out.forward.order = std::max(a_raw.degree(), b_raw.degree());
    out.forward.denominator = padded(a_raw.c, out.forward.order);
    out.forward.numerator = padded(b_raw.c, out.forward.order);
    for (auto& v : out.forward.denominator) v /= a0;
    for (auto& v : out.forward.numerator) v /= a0;

    out.backward.kind = ArmaKind::UnilateralBackward;
    out.backward.order = out.forward.order;
    out.backward.denominator.reserve(out.forward.denominator.size());
    out.backward.numerator.reserve(out.forward.numerator.size());
    for (const cplx& v : out.forward.denominator) out.backward.denominator.push_back(std::conj(v));
    for (const cplx& v : out.forward.numerator) out.backward.numerator.push_back(std::conj(v));
    return out;
}

WhiteningFactor whitening(const PseudoPolynomial& p, const PseudoPolynomial& q,
                          const DiscreteCircle& circle) {
    WhiteningFactor w;
    w.outer = true;
    w.a = factor_banded(q, circle);
    w.b = factor_banded(p, circle);
    std::vector<cplx> av = w.a.eval_on(circle);
    std::vector<cplx> bv = w.b.eval_on(circle);
    w.values.resize(av.size());
    for (size_t j = 0; j < av.size(); ++j) w.values[j] = bv[j] / av[j];
    w.window = inverse_dft(std::span<const cplx>(w.values), circle);
    return w;
}

WhiteningFactor whitening(const DiscreteSpectrum& phi) {
    if (!phi.is_positive()) throw std::invalid_argument("whitening: spectrum must be positive");
    WhiteningFactor w;
    w.outer = false;
    w.values.reserve(phi.values.size());
    for (double v : phi.values) w.values.push_back(cplx(std::sqrt(v), 0.0));
    w.window = inverse_dft(std::span<const cplx>(w.values), phi.circle);
    return w;
}

namespace {

/// Deterministic standard normal pairs via Box-Muller on mt19937_64 output.
class GaussianSource {
  public:
    explicit GaussianSource(std::uint64_t seed) : gen_(seed) {}

    double next() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 0.0);
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        have_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

    cplx next_complex_unit() {  // E|z|^2 = 1
        double re = next(), im = next();
        return cplx(re, im) / std::sqrt(2.0);
    }

  private:
    double uniform() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_ = false;
};

}  // namespace

std::vector<std::vector<cplx>> simulate(const DiscreteSpectrum& phi, const SimulationOptions& opts) {
    if (!phi.is_positive()) throw std::invalid_argument("simulate: spectrum must be positive");
    const DiscreteCircle& circle = phi.circle;
    const int n_half = circle.half_period();
    const int two_n = circle.size();
    GaussianSource rng(opts.seed);

    std::vector<std::vector<cplx>> out;
    out.reserve(static_cast<size_t>(opts.count));
    std::vector<cplx> hat(static_cast<size_t>(two_n));
    for (int r = 0; r < opts.count; ++r) {
        if (opts.real_output) {
            // conjugate-symmetric draw: hat(-k) = conj(hat(k)); the self-paired
            // points k = 0, N are real with the full variance
            for (int k = 0; k <= n_half; ++k) {
                const int j = circle.index_of(k);
                const double v = phi.values[static_cast<size_t>(j)];
                if (k == 0 || k == n_half) {
                    hat[static_cast<size_t>(j)] = cplx(std::sqrt(2.0 * n_half * v) * rng.next(), 0.0);
                } else {
                    cplx z = std::sqrt(2.0 * n_half * v) * rng.next_complex_unit();
                    hat[static_cast<size_t>(j)] = z;
                    hat[static_cast<size_t>(circle.index_of(-k))] = std::conj(z);
                }
            }
        } else {
            for (int j = 0; j < two_n; ++j)
                hat[static_cast<size_t>(j)] =
                    std::sqrt(2.0 * n_half * phi.values[static_cast<size_t>(j)]) * rng.next_complex_unit();
        }
        std::vector<cplx> y(static_cast<size_t>(two_n));
        for (int ti = 0; ti < two_n; ++ti) {
            const int t = circle.k_of(ti);
            cplx acc{0.0, 0.0};
            for (int j = 0; j < two_n; ++j) acc += circle.power(j, t) * hat[static_cast<size_t>(j)];
            y[static_cast<size_t>(ti)] = acc / static_cast<double>(two_n);
            if (opts.real_output) y[static_cast<size_t>(ti)].imag(0.0);
        }
        out.push_back(std::move(y));
    }
    return out;
}

std::vector<std::vector<cplx>> simulate_block(const std::vector<Eigen::MatrixXcd>& phi,
                                              const DiscreteCircle& circle,
                                              const SimulationOptions& opts) {
    if (static_cast<int>(phi.size()) != circle.size())
        throw std::invalid_argument("simulate_block: need one spectral block per grid point");
    const int m = static_cast<int>(phi.front().rows());
    const int n_half = circle.half_period();
    const int two_n = circle.size();

    std::vector<Eigen::MatrixXcd> chol(phi.size());
    for (size_t j = 0; j < phi.size(); ++j) {
        Eigen::LLT<Eigen::MatrixXcd> llt(0.5 * (phi[j] + phi[j].adjoint().eval()));
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("simulate_block: spectrum must be positive definite");
        chol[j] = llt.matrixL();
    }

    GaussianSource rng(opts.seed);
    std::vector<std::vector<cplx>> out;
    out.reserve(static_cast<size_t>(opts.count));
    std::vector<Eigen::VectorXcd> hat(static_cast<size_t>(two_n));
    for (int r = 0; r < opts.count; ++r) {
        if (opts.real_output) {
            for (int k = 0; k <= n_half; ++k) {
                const int j = circle.index_of(k);
                if (k == 0 || k == n_half) {
                    Eigen::VectorXd xi_r(m);
                    for (int i = 0; i < m; ++i) xi_r[i] = rng.next();
                    Eigen::VectorXd draw = std::sqrt(2.0 * n_half) * (chol[static_cast<size_t>(j)].real() * xi_r);
                    hat[static_cast<size_t>(j)] = draw.cast<cplx>();
                } else {
                    Eigen::VectorXcd xi(m);
                    for (int i = 0; i < m; ++i) xi[i] = rng.next_complex_unit();
                    hat[static_cast<size_t>(j)] = std::sqrt(2.0 * n_half) * chol[static_cast<size_t>(j)] * xi;
                    hat[static_cast<size_t>(circle.index_of(-k))] = hat[static_cast<size_t>(j)].conjugate();
                }
            }
        } else {
            for (int j = 0; j < two_n; ++j) {
                Eigen::VectorXcd xi(m);
                for (int i = 0; i < m; ++i) xi[i] = rng.next_complex_unit();
                hat[static_cast<size_t>(j)] = std::sqrt(2.0 * n_half) * chol[static_cast<size_t>(j)] * xi;
            }
        }
        std::vector<cplx> y(static_cast<size_t>(two_n) * m);
        for (int ti = 0; ti < two_n; ++ti) {
            const int t = circle.k_of(ti);
            Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(m);
            for (int j = 0; j < two_n; ++j) acc += circle.power(j, t) * hat[static_cast<size_t>(j)];
            acc /= static_cast<double>(two_n);
            for (int i = 0; i < m; ++i) {
                cplx v = acc[i];
                if (opts.real_output) v.imag(0.0);
                y[static_cast<size_t>(ti) * m + i] = v;
            }
        }
        out.push_back(std::move(y));
    }
    return out;
}

Eigen::MatrixXcd conditional_orthogonality(const CirculantMatrix& sigma, const std::vector<int>& j_set,
                                           const std::vector<int>& k_set) {
    const DiscreteCircle& circle = sigma.circle();
    const int m = sigma.block_size();
    for (int a : j_set)
        for (int b : k_set)
            if (a == b) throw std::invalid_argument("conditional_orthogonality: J and K must be disjoint");
    auto positions = [&](const std::vector<int>& set) {
        std::vector<int> pos;
        pos.reserve(set.size());
        for (int t : set) {
            if (t < -circle.half_period() + 1 || t > circle.half_period())
                throw std::invalid_argument("conditional_orthogonality: index outside [-N+1, N]");
            pos.push_back(circle.index_of(t));
        }
        return pos;
    };
    std::vector<int> jp = positions(j_set), kp = positions(k_set);

    Eigen::MatrixXcd dense = sigma.dense();
    Eigen::MatrixXcd g = dense.inverse();

    auto submatrix = [&](const std::vector<int>& rows, const std::vector<int>& cols) {
        Eigen::MatrixXcd s(static_cast<long>(rows.size()) * m, static_cast<long>(cols.size()) * m);
        for (size_t a = 0; a < rows.size(); ++a)
            for (size_t b = 0; b < cols.size(); ++b)
                s.block(static_cast<long>(a) * m, static_cast<long>(b) * m, m, m) =
                    g.block(static_cast<long>(rows[a]) * m, static_cast<long>(cols[b]) * m, m, m);
        return s;
    };
    Eigen::MatrixXcd g_jj = submatrix(jp, jp);
    Eigen::MatrixXcd g_kk = submatrix(kp, kp);
    Eigen::MatrixXcd g_jk = submatrix(jp, kp);
    return g_jj.inverse() * g_jk * g_kk.inverse();
}

}  // namespace circarma
