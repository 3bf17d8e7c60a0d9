#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "circarma/solver.hpp"
#include "circarma/sweep.hpp"
#include "test_support.hpp"

using namespace circarma;
using circarma::testsupport::random_interior_pseudo;

namespace {
std::mt19937 rng(55501234);

CovarianceData forward_moments(const PseudoPolynomial& p, const PseudoPolynomial& q, int n_half,
                               int order) {
    DiscreteCircle circle(n_half);
    auto pv = p.eval_on(circle);
    auto qv = q.eval_on(circle);
    std::vector<double> phi(pv.size());
    for (size_t j = 0; j < pv.size(); ++j) phi[j] = pv[j] / qv[j];
    return CovarianceData::scalar(n_half, moments_of(make_spectrum(circle, phi), order));
}

// central-difference gradient of the dual objective
Eigen::VectorXd fd_gradient(const PseudoPolynomial& q, const std::vector<cplx>& c,
                            const std::vector<double>& pv, const DiscreteCircle& circle,
                            double step) {
    Eigen::VectorXd x = pack_pseudo(q.coeffs());
    Eigen::VectorXd g(x.size());
    for (int i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += step;
        xm[i] -= step;
        double fp = dual_objective(PseudoPolynomial(unpack_pseudo(xp)), c, pv, circle);
        double fm = dual_objective(PseudoPolynomial(unpack_pseudo(xm)), c, pv, circle);
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}
}  // namespace

TEST_CASE("dual objective values") {
    DiscreteCircle circle(4);
    std::vector<double> ones(8, 1.0);
    SUBCASE("unit data, unit Q") {
        std::vector<cplx> c{cplx(1, 0), cplx(0, 0)};
        CHECK(dual_objective(PseudoPolynomial({cplx(1, 0), cplx(0, 0)}), c, ones, circle) ==
              doctest::Approx(1.0));
    }
    SUBCASE("Q = e gives e - 1") {
        std::vector<cplx> c{cplx(1, 0)};
        CHECK(dual_objective(PseudoPolynomial::constant(std::exp(1.0)), c, ones, circle) ==
              doctest::Approx(std::exp(1.0) - 1.0));
    }
    SUBCASE("random instance against a direct summation oracle") {
        PseudoPolynomial q = random_interior_pseudo(rng, 2);
        PseudoPolynomial p = random_interior_pseudo(rng, 2);
        std::vector<cplx> c{cplx(1.1, 0), cplx(0.2, 0.1), cplx(-0.05, 0.02)};
        auto pv = p.eval_on(circle);
        auto qv = q.eval_on(circle);
        double expect = c[0].real() * q.coeff(0).real();
        for (int k = 1; k <= 2; ++k)
            expect += 2.0 * (c[static_cast<size_t>(k)].real() * q.coeff(k).real() +
                             c[static_cast<size_t>(k)].imag() * q.coeff(k).imag());
        for (int j = 0; j < circle.size(); ++j)
            expect -= pv[static_cast<size_t>(j)] * std::log(qv[static_cast<size_t>(j)]) / circle.size();
        CHECK(dual_objective(q, c, pv, circle) == doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("non-positive Q hits the sentinel") {
        std::vector<cplx> c{cplx(1, 0)};
        CHECK(std::isinf(dual_objective(PseudoPolynomial::constant(-1.0), c, ones, circle)));
    }
}

TEST_CASE("gradient is zero exactly at moment matching") {
    DiscreteCircle circle(6);
    std::vector<double> ones(12, 1.0);
    // constant case solved exactly by Q = 1/c_0
    std::vector<cplx> c{cplx(4, 0), cplx(0, 0)};
    Eigen::VectorXd g = dual_gradient(PseudoPolynomial({cplx(0.25, 0), cplx(0, 0)}), c, ones, circle);
    CHECK(g.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("analytic gradient matches central differences") {
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 1 + trial % 3;
        DiscreteCircle circle(8);
        PseudoPolynomial q = random_interior_pseudo(rng, n, 0.3);
        PseudoPolynomial p = random_interior_pseudo(rng, n, 0.2);
        std::vector<cplx> c(static_cast<size_t>(n) + 1);
        std::uniform_real_distribution<double> u(-0.3, 0.3);
        c[0] = cplx(1.0 + std::abs(u(rng)), 0.0);
        for (int k = 1; k <= n; ++k) c[static_cast<size_t>(k)] = cplx(u(rng), u(rng));
        auto pv = p.eval_on(circle);
        Eigen::VectorXd ga = dual_gradient(q, c, pv, circle);
        Eigen::VectorXd gf = fd_gradient(q, c, pv, circle, 1e-6);
        CHECK((ga - gf).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, ga.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("hessian is positive definite at interior points (strict convexity)") {
    DiscreteCircle circle(8);
    for (int trial = 0; trial < 10; ++trial) {
        PseudoPolynomial q = random_interior_pseudo(rng, 2, 0.3);
        PseudoPolynomial p = random_interior_pseudo(rng, 2, 0.2);
        Eigen::MatrixXd h = dual_hessian(q, p.eval_on(circle), circle, 2);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("solve_dual trivial instances") {
    SUBCASE("constant data") {
        DualSolution sol = solve_dual(CovarianceData::scalar(4, {cplx(4, 0)}), PseudoPolynomial::one());
        REQUIRE(sol.converged());
        CHECK(std::abs(sol.q.coeff(0) - cplx(0.25, 0)) < 1e-10);
        for (double v : sol.phi.values) CHECK(v == doctest::Approx(4.0));
    }
    SUBCASE("white noise matches any positive P with Q = P") {
        PseudoPolynomial p({cplx(1.25, 0), cplx(0.5, 0), cplx(0, 0)});
        DualSolution sol = solve_dual(CovarianceData::scalar(8, {cplx(1, 0), cplx(0, 0), cplx(0, 0)}), p);
        REQUIRE(sol.converged());
        for (int k = 0; k <= 2; ++k) CHECK(std::abs(sol.q.coeff(k) - p.coeff(k)) < 1e-9);
        for (double v : sol.phi.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("solve_dual round trip at N = 8") {
    PseudoPolynomial q_true({cplx(1.25, 0), cplx(0.5, 0), cplx(0.05, 0)});
    CovarianceData c = forward_moments(PseudoPolynomial::one(), q_true, 8, 2);
    DualSolution sol = solve_dual(c, PseudoPolynomial::one());
    REQUIRE(sol.converged());
    for (int k = 0; k <= 2; ++k) CHECK(std::abs(sol.q.coeff(k) - q_true.coeff(k)) < 1e-6);
    CHECK(sol.moment_residual <= 1e-8 * std::abs(c.scalar_lag(0)));
}

TEST_CASE("uniqueness: distinct initializations meet at the same optimum") {
    PseudoPolynomial q_true = random_interior_pseudo(rng, 3, 0.2);
    PseudoPolynomial p = random_interior_pseudo(rng, 3, 0.3);
    CovarianceData c = forward_moments(p, q_true, 16, 3);

    DualSolution a = solve_dual(c, p);
    SolverConfig cfg_b;
    cfg_b.initial_q = std::vector<cplx>{cplx(3.0, 0), cplx(0.1, 0.05), cplx(0, 0), cplx(0, 0)};
    DualSolution b = solve_dual(c, p, cfg_b);
    REQUIRE(a.converged());
    REQUIRE(b.converged());
    for (int k = 0; k <= 3; ++k) CHECK(std::abs(a.q.coeff(k) - b.q.coeff(k)) < 1e-8);
}

TEST_CASE("descent is monotone across accepted iterations") {
    // mirror the solver's step rule by hand and track the objective
    PseudoPolynomial q_true = random_interior_pseudo(rng, 2, 0.2);
    CovarianceData c = forward_moments(PseudoPolynomial::one(), q_true, 8, 2);
    DiscreteCircle circle(8);
    std::vector<double> pv(static_cast<size_t>(circle.size()), 1.0);
    std::vector<cplx> lags = c.scalar_lags();

    PseudoPolynomial q({cplx(1.0 / lags[0].real(), 0), cplx(0, 0), cplx(0, 0)});
    double prev = dual_objective(q, lags, pv, circle);
    for (int iter = 0; iter < 12; ++iter) {
        Eigen::MatrixXd h = dual_hessian(q, pv, circle, 2);
        Eigen::VectorXd g = dual_gradient(q, lags, pv, circle);
        Eigen::VectorXd x = pack_pseudo(q.coeffs());
        Eigen::VectorXd step = -h.ldlt().solve(g);
        double alpha = 1.0;
        while (alpha > 1e-14) {
            PseudoPolynomial q_try(unpack_pseudo(x + alpha * step));
            double f_try = dual_objective(q_try, lags, pv, circle);
            if (f_try <= prev + 1e-4 * alpha * g.dot(step)) {
                CHECK(f_try <= prev + 1e-15);
                prev = f_try;
                q = q_try;
                break;
            }
            alpha *= 0.5;
        }
    }
    Eigen::VectorXd g_final = dual_gradient(q, lags, pv, circle);
    CHECK(g_final.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("duality gap closes up to the P-entropy constant") {
    PseudoPolynomial q_true = random_interior_pseudo(rng, 2, 0.3);
    PseudoPolynomial p = random_interior_pseudo(rng, 2, 0.4);
    CovarianceData c = forward_moments(p, q_true, 8, 2);
    DualSolution sol = solve_dual(c, p);
    REQUIRE(sol.converged());
    DiscreteCircle circle(8);
    auto pv = p.eval_on(circle);
    // J_P(Q^) - I_P(Phi^) = p_0 - (1/2N) sum P log P
    double p_entropy = 0.0;
    for (double v : pv) p_entropy += v * std::log(v);
    p_entropy /= circle.size();
    const double expect = p.coeff(0).real() - p_entropy;
    CHECK(sol.dual_value - sol.primal_value == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("infeasible data produces a divergence certificate") {
    CovarianceData c = CovarianceData::scalar(3, {cplx(1, 0), cplx(0.8, 0), cplx(0.3, 0)});
    DualSolution sol = solve_dual(c, PseudoPolynomial::one());
    CHECK(sol.status == SolveStatus::Infeasible);
    CHECK_FALSE(sol.boundary_direction.empty());
    CHECK_FALSE(sol.diagnostic.empty());
}

TEST_CASE("primal value basics") {
    DiscreteCircle circle(4);
    std::vector<double> ones(8, 1.0);
    CHECK(primal_value(make_spectrum(circle, std::vector<double>(8, 1.0)), ones) == doctest::Approx(0.0));
    CHECK(primal_value(make_spectrum(circle, std::vector<double>(8, std::exp(1.0))), ones) ==
          doctest::Approx(1.0));
    CHECK_THROWS(primal_value(make_spectrum(circle, std::vector<double>(8, -1.0)), ones));
}

TEST_CASE("periodic solutions approach the continuous one as N grows") {
    // fixed data from a continuous-spectrum model; successive Q_N differences
    // shrink (poles near the circle keep the aliasing error measurable)
    TruthModel truth;
    truth.a = {cplx(1, 0), cplx(-2.0 * 0.95 * std::cos(1.0), 0), cplx(0.95 * 0.95, 0)};
    std::vector<cplx> lags = truth_covariances(truth, 2);
    std::vector<double> diffs;
    PseudoPolynomial prev_q;
    bool have_prev = false;
    for (int n_half : {32, 64, 128, 256}) {
        DualSolution sol = solve_dual(CovarianceData::scalar(n_half, lags), PseudoPolynomial::one());
        REQUIRE(sol.converged());
        if (have_prev) {
            double d = 0.0;
            for (int k = 0; k <= 2; ++k) d = std::max(d, std::abs(sol.q.coeff(k) - prev_q.coeff(k)));
            diffs.push_back(d);
        }
        prev_q = sol.q;
        have_prev = true;
    }
    REQUIRE(diffs.size() == 3);
    CHECK(diffs[1] < diffs[0]);
    CHECK(diffs[2] < diffs[1]);
}
