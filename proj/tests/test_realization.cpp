#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "circarma/errors.hpp"
#include "circarma/realization.hpp"
#include "circarma/solver.hpp"
#include "test_support.hpp"

using namespace circarma;
using circarma::testsupport::moment_oracle;
using circarma::testsupport::random_interior_pseudo;

namespace {
std::mt19937 rng(90210847);

CirculantMatrix sigma_of(const PseudoPolynomial& p, const PseudoPolynomial& q,
                         const DiscreteCircle& circle) {
    auto pv = p.eval_on(circle);
    auto qv = q.eval_on(circle);
    std::vector<double> phi(pv.size());
    for (size_t j = 0; j < pv.size(); ++j) phi[j] = pv[j] / qv[j];
    return CirculantMatrix::from_scalar_values(circle, phi);
}
}  // namespace

TEST_CASE("covariance extension") {
    DiscreteCircle circle(8);
    SUBCASE("Q = P collapses to white noise") {
        PseudoPolynomial p({cplx(1.25, 0), cplx(0.5, 0)});
        FullPeriodicSequence seq = extend_covariances(p, p, circle);
        CHECK(std::abs(seq.scalar_lags()[0] - cplx(1, 0)) < 1e-12);
        for (size_t k = 1; k < seq.lags.size(); ++k) CHECK(std::abs(seq.scalar_lags()[k]) < 1e-12);
    }
    SUBCASE("constant case") {
        FullPeriodicSequence seq =
            extend_covariances(PseudoPolynomial::one(), PseudoPolynomial::constant(0.25), circle);
        CHECK(std::abs(seq.scalar_lags()[0] - cplx(4, 0)) < 1e-12);
        for (size_t k = 1; k < seq.lags.size(); ++k) CHECK(std::abs(seq.scalar_lags()[k]) < 1e-12);
    }
    SUBCASE("round-trip lags match the direct summation oracle") {
        PseudoPolynomial q({cplx(1.25, 0), cplx(0.5, 0), cplx(0.05, 0)});
        auto qv = q.eval_on(circle);
        std::vector<double> phi(qv.size());
        for (size_t j = 0; j < qv.size(); ++j) phi[j] = 1.0 / qv[j];
        FullPeriodicSequence seq = extend_covariances(PseudoPolynomial::one(), q, circle);
        for (int k = 0; k <= 8; ++k)
            CHECK(std::abs(seq.scalar_lags()[static_cast<size_t>(k)] - moment_oracle(phi, 8, k)) < 1e-10);
    }
}

TEST_CASE("bilateral model satisfies Q Sigma = P densely") {
    DiscreteCircle circle(6);
    for (int trial = 0; trial < 5; ++trial) {
        PseudoPolynomial p = random_interior_pseudo(rng, 2, 0.3);
        PseudoPolynomial q = random_interior_pseudo(rng, 2, 0.3);
        ArmaModel model = bilateral_arma(p, q);
        CHECK(model.kind == ArmaKind::Bilateral);
        Eigen::MatrixXcd qd = CirculantMatrix::from_pseudo(circle, q).dense();
        Eigen::MatrixXcd pd = CirculantMatrix::from_pseudo(circle, p).dense();
        Eigen::MatrixXcd sd = sigma_of(p, q, circle).dense();
        CHECK((qd * sd - pd).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("banded outer factorization") {
    SUBCASE("constant") {
        Polynomial a = factor_banded(PseudoPolynomial::constant(1.0));
        REQUIRE(a.degree() == 0);
        CHECK(std::abs(a.c[0] - cplx(1, 0)) < 1e-12);
    }
    SUBCASE("2.5 + zeta + zeta^{-1} factors as (sqrt2, 1/sqrt2)") {
        Polynomial a = factor_banded(PseudoPolynomial({cplx(2.5, 0), cplx(1, 0)}));
        REQUIRE(a.degree() == 1);
        CHECK(std::abs(a.c[0] - cplx(std::sqrt(2.0), 0)) < 1e-10);
        CHECK(std::abs(a.c[1] - cplx(1.0 / std::sqrt(2.0), 0)) < 1e-10);
    }
    SUBCASE("random interior pseudo-polynomials factor with small residual") {
        DiscreteCircle circle(16);
        for (int trial = 0; trial < 10; ++trial) {
            PseudoPolynomial m_poly = random_interior_pseudo(rng, 3, 0.1);
            Polynomial a = factor_banded(m_poly);
            double residual = 0.0;
            for (int j = 0; j < circle.size(); ++j) {
                const double th = circle.theta(j);
                residual = std::max(residual, std::abs(std::norm(a.eval(th)) - m_poly.eval(th)));
            }
            CHECK(residual <= 1e-8);
            // outer normalization: a_0 real positive, roots inside the disc
            CHECK(a.c[0].imag() == doctest::Approx(0.0));
            CHECK(a.c[0].real() > 0.0);
            std::vector<cplx> rev(a.c.rbegin(), a.c.rend());
            for (const cplx& r : polynomial_roots(rev)) CHECK(std::abs(r) < 1.0);
        }
    }
    SUBCASE("zero on the circle is rejected") {
        // |1 - zeta^{-1}|^2 = 2 - zeta - zeta^{-1} vanishes at zeta = 1
        PseudoPolynomial m_poly({cplx(2, 0), cplx(-1, 0)});
        CHECK_THROWS_AS(factor_banded(m_poly), FactorizationOnCircleError);
    }
    SUBCASE("grid-positive but circle-negative raises DiscreteOnly") {
        // strictly positive at the six grid points, negative near theta = pi/6
        PseudoPolynomial m_poly({cplx(1.02, 0), cplx(-0.75, 0), cplx(0.25, 0)});
        DiscreteCircle circle(3);
        auto gv = m_poly.eval_on(circle);
        REQUIRE(*std::min_element(gv.begin(), gv.end()) > 0.0);
        REQUIRE(m_poly.min_on_circle() < -1e-4);
        CHECK_THROWS_AS(factor_banded(m_poly, circle), DiscreteOnlyError);
        CHECK_THROWS_AS(factor_banded(m_poly), FactorizationOnCircleError);
    }
}

TEST_CASE("unilateral models") {
    SUBCASE("white noise") {
        UnilateralPair pair = unilateral_arma(PseudoPolynomial::one(), PseudoPolynomial::one());
        CHECK(std::abs(pair.forward.denominator[0] - cplx(1, 0)) < 1e-12);
        CHECK(std::abs(pair.forward.numerator[0] - cplx(1, 0)) < 1e-12);
    }
    SUBCASE("AR(1) normalization moves the scale into b") {
        UnilateralPair pair =
            unilateral_arma(PseudoPolynomial::one(), PseudoPolynomial({cplx(2.5, 0), cplx(1, 0)}));
        REQUIRE(pair.forward.order == 1);
        CHECK(std::abs(pair.forward.denominator[0] - cplx(1, 0)) < 1e-12);
        CHECK(std::abs(pair.forward.denominator[1] - cplx(0.5, 0)) < 1e-10);
        CHECK(std::abs(pair.forward.numerator[0] - cplx(1.0 / std::sqrt(2.0), 0)) < 1e-10);
    }
    SUBCASE("W = B/A whitens the spectrum on the grid") {
        DiscreteCircle circle(12);
        for (int trial = 0; trial < 5; ++trial) {
            PseudoPolynomial p = random_interior_pseudo(rng, 2, 0.2);
            PseudoPolynomial q = random_interior_pseudo(rng, 2, 0.2);
            UnilateralPair pair = unilateral_arma(p, q);
            Polynomial a{pair.forward.denominator}, b{pair.forward.numerator};
            for (int j = 0; j < circle.size(); ++j) {
                const double th = circle.theta(j);
                const double w2 = std::norm(b.eval(th) / a.eval(th));
                CHECK(std::abs(w2 - p.eval(th) / q.eval(th)) < 1e-8);
            }
        }
    }
    SUBCASE("backward coefficients are the conjugates of the forward ones") {
        PseudoPolynomial p = random_interior_pseudo(rng, 2, 0.2);
        PseudoPolynomial q = random_interior_pseudo(rng, 2, 0.2);
        UnilateralPair pair = unilateral_arma(p, q);
        for (size_t k = 0; k < pair.forward.denominator.size(); ++k) {
            CHECK(std::abs(pair.backward.denominator[k] - std::conj(pair.forward.denominator[k])) < 1e-14);
            CHECK(std::abs(pair.backward.numerator[k] - std::conj(pair.forward.numerator[k])) < 1e-14);
        }
        // both directions reproduce the same spectrum: |abar(zeta)|^2 = |a(zeta)|^2
        DiscreteCircle circle(8);
        Polynomial a{pair.forward.denominator};
        Polynomial abar{pair.backward.denominator};
        for (int j = 0; j < circle.size(); ++j) {
            const double th = circle.theta(j);
            CHECK(std::norm(a.eval(th)) == doctest::Approx(std::norm(abar.eval(-th))).epsilon(1e-10));
        }
    }
}

TEST_CASE("whitening factors") {
    DiscreteCircle circle(8);
    SUBCASE("constant spectrum") {
        WhiteningFactor w = whitening(make_spectrum(circle, std::vector<double>(16, 4.0)));
        CHECK_FALSE(w.outer);
        for (const cplx& v : w.values) CHECK(std::abs(v - cplx(2, 0)) < 1e-12);
    }
    SUBCASE("moving-average spectrum has the finite outer window") {
        // Phi = |1 + 0.5 zeta^{-1}|^2 = 1.25 + 0.5(zeta + zeta^{-1})
        PseudoPolynomial p({cplx(1.25, 0), cplx(0.5, 0)});
        WhiteningFactor w = whitening(p, PseudoPolynomial::one(), circle);
        CHECK(w.outer);
        CHECK(std::abs(w.window[static_cast<size_t>(circle.index_of(0))] - cplx(1, 0)) < 1e-10);
        CHECK(std::abs(w.window[static_cast<size_t>(circle.index_of(1))] - cplx(0.5, 0)) < 1e-10);
        for (int k = 2; k <= circle.half_period(); ++k)
            CHECK(std::abs(w.window[static_cast<size_t>(circle.index_of(k))]) < 1e-10);
        for (int k = 1; k < circle.half_period(); ++k)
            CHECK(std::abs(w.window[static_cast<size_t>(circle.index_of(-k))]) < 1e-10);
    }
    SUBCASE("pointwise path squares back to the spectrum") {
        std::uniform_real_distribution<double> u(0.2, 3.0);
        std::vector<double> phi(16);
        for (double& v : phi) v = u(rng);
        WhiteningFactor w = whitening(make_spectrum(circle, phi));
        for (size_t j = 0; j < phi.size(); ++j) CHECK(std::abs(std::norm(w.values[j]) - phi[j]) < 1e-10);
    }
    SUBCASE("rational outer path satisfies Sigma = W W* on the grid") {
        PseudoPolynomial p = random_interior_pseudo(rng, 2, 0.2);
        PseudoPolynomial q = random_interior_pseudo(rng, 2, 0.2);
        WhiteningFactor w = whitening(p, q, circle);
        auto pv = p.eval_on(circle);
        auto qv = q.eval_on(circle);
        for (int j = 0; j < circle.size(); ++j)
            CHECK(std::abs(std::norm(w.values[static_cast<size_t>(j)]) -
                           pv[static_cast<size_t>(j)] / qv[static_cast<size_t>(j)]) < 1e-8);
    }
}

TEST_CASE("simulation statistics") {
    DiscreteCircle circle(8);
    SimulationOptions opts;
    opts.count = 10000;
    opts.seed = 4242;

    SUBCASE("white spectrum: c_0 near 1, c_1 near 0") {
        auto samples = simulate(make_spectrum(circle, std::vector<double>(16, 1.0)), opts);
        double c0 = 0.0, c1 = 0.0;
        for (const auto& y : samples) {
            for (int t = 0; t < circle.size(); ++t) {
                c0 += std::norm(y[static_cast<size_t>(t)]);
                c1 += (y[static_cast<size_t>((t + 1) % circle.size())] * std::conj(y[static_cast<size_t>(t)])).real();
            }
        }
        c0 /= opts.count * circle.size();
        c1 /= opts.count * circle.size();
        CHECK(std::abs(c0 - 1.0) < 0.05);
        CHECK(std::abs(c1) < 0.05);
    }
    SUBCASE("deterministic under a fixed seed") {
        SimulationOptions small{3, 99, true};
        auto a = simulate(make_spectrum(circle, std::vector<double>(16, 2.0)), small);
        auto b = simulate(make_spectrum(circle, std::vector<double>(16, 2.0)), small);
        REQUIRE(a.size() == b.size());
        for (size_t r = 0; r < a.size(); ++r)
            for (size_t t = 0; t < a[r].size(); ++t) CHECK(a[r][t] == b[r][t]);
    }
    SUBCASE("sample lags track the extension within three standard errors") {
        PseudoPolynomial q({cplx(1.25, 0), cplx(0.5, 0), cplx(0.05, 0)});
        FullPeriodicSequence ext = extend_covariances(PseudoPolynomial::one(), q, circle);
        auto qv = q.eval_on(circle);
        std::vector<double> phi(qv.size());
        for (size_t j = 0; j < qv.size(); ++j) phi[j] = 1.0 / qv[j];
        auto samples = simulate(make_spectrum(circle, phi), opts);
        for (int k = 0; k <= 2; ++k) {
            double mean = 0.0, sq = 0.0;
            for (const auto& y : samples) {
                double est = 0.0;
                for (int t = 0; t < circle.size(); ++t)
                    est += (y[static_cast<size_t>((t + k) % circle.size())] *
                            std::conj(y[static_cast<size_t>(t)])).real();
                est /= circle.size();
                mean += est;
                sq += est * est;
            }
            mean /= opts.count;
            sq = sq / opts.count - mean * mean;
            const double se = std::sqrt(std::max(sq, 1e-300) / opts.count);
            CHECK(std::abs(mean - ext.scalar_lags()[static_cast<size_t>(k)].real()) <= 3.0 * se);
        }
    }
}

TEST_CASE("conjugate process identity E{e y*} = I (Monte Carlo)") {
    DiscreteCircle circle(4);
    PseudoPolynomial q({cplx(1.5, 0), cplx(0.4, 0)});
    auto qv = q.eval_on(circle);
    std::vector<double> phi(qv.size());
    for (size_t j = 0; j < qv.size(); ++j) phi[j] = 1.0 / qv[j];
    CirculantMatrix sigma = CirculantMatrix::from_scalar_values(circle, phi);
    Eigen::MatrixXcd g = sigma.dense().inverse();

    SimulationOptions opts{20000, 77, true};
    auto samples = simulate(make_spectrum(circle, phi), opts);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(circle.size(), circle.size());
    for (const auto& ys : samples) {
        Eigen::VectorXcd y(circle.size());
        for (int t = 0; t < circle.size(); ++t) y[t] = ys[static_cast<size_t>(t)];
        Eigen::VectorXcd e = g * y;
        acc += e * y.adjoint();
    }
    acc /= static_cast<double>(opts.count);
    CHECK((acc - Eigen::MatrixXcd::Identity(circle.size(), circle.size())).cwiseAbs().maxCoeff() < 0.06);
}

TEST_CASE("conditional orthogonality") {
    DiscreteCircle circle(3);
    SUBCASE("diagonal covariance decouples everything") {
        CirculantMatrix sigma = CirculantMatrix::from_scalar_values(circle, std::vector<double>(6, 2.0));
        Eigen::MatrixXcd r = conditional_orthogonality(sigma, {1}, {3});
        CHECK(r.cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("banded-inverse Sigma is reciprocal of the band order") {
        PseudoPolynomial q({cplx(1.0, 0), cplx(0.4, 0)});
        auto qv = q.eval_on(circle);
        std::vector<double> phi(qv.size());
        for (size_t j = 0; j < qv.size(); ++j) phi[j] = 1.0 / qv[j];
        CirculantMatrix sigma = CirculantMatrix::from_scalar_values(circle, phi);
        // J = {t}, K = complement of [t-1, t+1] (cyclic): orthogonal
        Eigen::MatrixXcd r = conditional_orthogonality(sigma, {0}, {2, 3, -2});
        CHECK(r.cwiseAbs().maxCoeff() < 1e-8);
        // adjacent pair: the G entry is nonzero, so dependence remains
        Eigen::MatrixXcd r2 = conditional_orthogonality(sigma, {0}, {1});
        CHECK(r2.cwiseAbs().maxCoeff() > 1e-3);
    }
    SUBCASE("zero pattern equals the concentration-matrix pattern (dense oracle)") {
        PseudoPolynomial q({cplx(1.0, 0), cplx(0.35, 0.1)});
        auto qv = q.eval_on(circle);
        std::vector<double> phi(qv.size());
        for (size_t j = 0; j < qv.size(); ++j) phi[j] = 1.0 / qv[j];
        CirculantMatrix sigma = CirculantMatrix::from_scalar_values(circle, phi);
        Eigen::MatrixXcd g = sigma.dense().inverse();
        for (int a = -2; a <= 3; ++a)
            for (int b = -2; b <= 3; ++b) {
                if (a == b) continue;
                Eigen::MatrixXcd r = conditional_orthogonality(sigma, {a}, {b});
                const double g_ab = std::abs(g(circle.index_of(a), circle.index_of(b)));
                if (g_ab < 1e-10)
                    CHECK(r.cwiseAbs().maxCoeff() < 1e-8);
                else
                    CHECK(r.cwiseAbs().maxCoeff() > 1e-10);
            }
    }
    SUBCASE("overlapping sets are rejected") {
        CirculantMatrix sigma = CirculantMatrix::identity(circle, 1);
        CHECK_THROWS_AS(conditional_orthogonality(sigma, {0, 1}, {1, 2}), std::invalid_argument);
    }
}

TEST_CASE("banded factor as a lower circulant: dense M = V V*") {
    DiscreteCircle circle(6);
    PseudoPolynomial m_poly = random_interior_pseudo(rng, 2, 0.15);
    Polynomial a = factor_banded(m_poly);
    // V holds a_0..a_n on the one-sided window
    std::vector<Eigen::MatrixXcd> window(12, Eigen::MatrixXcd::Zero(1, 1));
    for (int k = 0; k <= a.degree(); ++k)
        window[static_cast<size_t>(circle.index_of(k))](0, 0) = a.c[static_cast<size_t>(k)];
    Eigen::MatrixXcd v = CirculantMatrix::from_window(circle, window).dense();
    Eigen::MatrixXcd md = CirculantMatrix::from_pseudo(circle, m_poly).dense();
    CHECK((v * v.adjoint() - md).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("extension reproduces the solver's input lags") {
    PseudoPolynomial p({cplx(1.2, 0), cplx(0.3, 0.1)});
    PseudoPolynomial q_seed({cplx(1.5, 0), cplx(0.5, -0.2)});
    DiscreteCircle circle(8);
    auto pv = p.eval_on(circle);
    auto qv = q_seed.eval_on(circle);
    std::vector<double> phi(pv.size());
    for (size_t j = 0; j < pv.size(); ++j) phi[j] = pv[j] / qv[j];
    CovarianceData c = CovarianceData::scalar(8, moments_of(make_spectrum(circle, phi), 1));
    DualSolution sol = solve_dual(c, p);
    REQUIRE(sol.converged());
    FullPeriodicSequence ext = extend_covariances(p, sol.q, circle);
    for (int k = 0; k <= 1; ++k)
        CHECK(std::abs(ext.scalar_lags()[static_cast<size_t>(k)] - c.scalar_lag(k)) <= 1e-8);
}

TEST_CASE("solver output satisfies the dense bilateral identity") {
    PseudoPolynomial p({cplx(1.1, 0), cplx(0.3, 0)});
    PseudoPolynomial q_true({cplx(1.4, 0), cplx(0.45, 0)});
    DiscreteCircle circle(6);
    auto pv = p.eval_on(circle);
    auto qv = q_true.eval_on(circle);
    std::vector<double> phi(pv.size());
    for (size_t j = 0; j < pv.size(); ++j) phi[j] = pv[j] / qv[j];
    CovarianceData c = CovarianceData::scalar(6, moments_of(make_spectrum(circle, phi), 1));
    DualSolution sol = solve_dual(c, p);
    REQUIRE(sol.converged());
    Eigen::MatrixXcd qd = CirculantMatrix::from_pseudo(circle, sol.q).dense();
    Eigen::MatrixXcd pd = CirculantMatrix::from_pseudo(circle, p).dense();
    Eigen::MatrixXcd sd = CirculantMatrix::from_scalar_values(circle, sol.phi.values).dense();
    CHECK((qd * sd - pd).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("complex-output simulation carries the right second moments") {
    DiscreteCircle circle(4);
    SimulationOptions opts;
    opts.count = 8000;
    opts.seed = 5150;
    opts.real_output = false;
    auto samples = simulate(make_spectrum(circle, std::vector<double>(8, 2.0)), opts);
    double c0 = 0.0;
    for (const auto& y : samples)
        for (const cplx& v : y) c0 += std::norm(v);
    c0 /= opts.count * circle.size();
    CHECK(std::abs(c0 - 2.0) < 0.1);
}

TEST_CASE("block simulation: component lags match the block spectrum") {
    DiscreteCircle circle(4);
    std::vector<Eigen::MatrixXcd> phi(8);
    Eigen::MatrixXcd base(2, 2);
    base << 2.0, 0.4, 0.4, 1.0;
    for (auto& v : phi) v = base;
    SimulationOptions opts;
    opts.count = 8000;
    opts.seed = 77;
    auto samples = simulate_block(phi, circle, opts);
    Eigen::MatrixXcd c0 = Eigen::MatrixXcd::Zero(2, 2);
    for (const auto& y : samples)
        for (int t = 0; t < circle.size(); ++t) {
            Eigen::Vector2cd v(y[static_cast<size_t>(2 * t)], y[static_cast<size_t>(2 * t + 1)]);
            c0 += v * v.adjoint();
        }
    c0 /= static_cast<double>(opts.count) * circle.size();
    CHECK((c0 - base).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("block conditional orthogonality decouples a block-diagonal field") {
    DiscreteCircle circle(3);
    std::vector<Eigen::MatrixXcd> values(6);
    Eigen::MatrixXcd blk(2, 2);
    blk << 1.5, 0.2, 0.2, 1.0;
    for (auto& v : values) v = blk;  // constant symbol => block-diagonal dense Sigma
    CirculantMatrix sigma(circle, values);
    Eigen::MatrixXcd r = conditional_orthogonality(sigma, {0}, {2});
    CHECK(r.rows() == 2);
    CHECK(r.cols() == 2);
    CHECK(r.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("polynomial roots with Newton polish") {
    // (z - 0.5)(z + 2) = z^2 + 1.5 z - 1
    std::vector<cplx> coeffs{cplx(-1, 0), cplx(1.5, 0), cplx(1, 0)};
    auto roots = polynomial_roots(coeffs);
    REQUIRE(roots.size() == 2);
    std::sort(roots.begin(), roots.end(), [](const cplx& a, const cplx& b) { return a.real() < b.real(); });
    CHECK(std::abs(roots[0] - cplx(-2, 0)) < 1e-12);
    CHECK(std::abs(roots[1] - cplx(0.5, 0)) < 1e-12);
}
