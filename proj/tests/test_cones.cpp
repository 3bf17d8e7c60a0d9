#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "circarma/cones.hpp"
#include "circarma/solver.hpp"
#include "test_support.hpp"

using namespace circarma;
using circarma::testsupport::random_interior_pseudo;

namespace {
std::mt19937 rng(19283746);

CovarianceData moments_of_ratio(const PseudoPolynomial& p, const PseudoPolynomial& q, int n_half,
                                int order) {
    DiscreteCircle circle(n_half);
    auto pv = p.eval_on(circle);
    auto qv = q.eval_on(circle);
    std::vector<double> phi(pv.size());
    for (size_t j = 0; j < pv.size(); ++j) phi[j] = pv[j] / qv[j];
    auto lags = moments_of(make_spectrum(circle, phi), order);
    return CovarianceData::scalar(n_half, lags);
}
}  // namespace

TEST_CASE("Toeplitz positivity") {
    SUBCASE("white noise") {
        CHECK(toeplitz_positive(CovarianceData::scalar(8, {cplx(1, 0), cplx(0, 0), cplx(0, 0)})));
    }
    SUBCASE("rank-one sequence is singular") {
        CHECK_FALSE(toeplitz_positive(CovarianceData::scalar(8, {cplx(1, 0), cplx(1, 0), cplx(1, 0)})));
    }
    SUBCASE("block example against the 4x4 eigenvalue oracle") {
        CovarianceData c;
        c.m = 2;
        c.half_period = 8;
        c.lags = {Eigen::MatrixXcd::Identity(2, 2), 0.9 * Eigen::MatrixXcd::Identity(2, 2)};
        Eigen::MatrixXcd t(4, 4);
        t << 1, 0, 0.9, 0, 0, 1, 0, 0.9, 0.9, 0, 1, 0, 0, 0.9, 0, 1;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
        CHECK(toeplitz_positive(c));
        CHECK((toeplitz_matrix(c) - t).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("membership certificates") {
    SUBCASE("white noise is feasible with Q_ME = 1") {
        MembershipCertificate cert = certify_membership(CovarianceData::scalar(4, {cplx(1, 0), cplx(0, 0)}));
        CHECK(cert.status == Membership::Feasible);
        REQUIRE(cert.q_me.has_value());
        CHECK(std::abs(cert.q_me->coeff(0) - cplx(1, 0)) < 1e-8);
        CHECK(std::abs(cert.q_me->coeff(1)) < 1e-8);
    }
    SUBCASE("forward moments of an interior model are feasible") {
        PseudoPolynomial q({cplx(1.25, 0), cplx(0.5, 0)});
        CovarianceData c = moments_of_ratio(PseudoPolynomial::one(), q, 8, 1);
        MembershipCertificate cert = certify_membership(c);
        CHECK(cert.status == Membership::Feasible);
    }
    SUBCASE("near-boundary data classified against the atom-enumeration oracle") {
        // N = 2, n = 1, c = (1, 0.999): measures on the four atoms satisfying
        // the two moment equations form a segment; a strictly positive
        // solution exists, so the data is feasible (barely interior).
        const double c0 = 1.0, c1 = 0.999;
        bool oracle_feasible = false;
        for (int i = 1; i < 2000; ++i) {
            const double t = 0.002 * i / 2000.0;  // w4 = t
            const double w2 = 4.0 * c1 + t;
            const double w1 = (4.0 * c0 - w2 - t) / 2.0;
            if (t > 0 && w2 > 0 && w1 > 0) {
                oracle_feasible = true;
                break;
            }
        }
        CHECK(oracle_feasible);
        MembershipCertificate cert =
            certify_membership(CovarianceData::scalar(2, {cplx(c0, 0), cplx(c1, 0)}));
        CHECK(cert.status == Membership::Feasible);
    }
    SUBCASE("Toeplitz-positive but outside the periodic cone") {
        // gap certificate: P = (1, -0.75, 0.25) is nonnegative on the N = 3
        // grid yet <c, p> < 0, so no positive extension exists
        CovarianceData c = CovarianceData::scalar(3, {cplx(1, 0), cplx(0.8, 0), cplx(0.3, 0)});
        CHECK(toeplitz_positive(c));

        PseudoPolynomial gap({cplx(1, 0), cplx(-0.75, 0), cplx(0.25, 0)});
        DiscreteCircle circle(3);
        auto gv = gap.eval_on(circle);
        for (double v : gv) CHECK(v > -1e-12);
        CHECK(hermitian_inner(c.scalar_lags(), gap.coeffs()) < -1e-3);

        MembershipCertificate cert = certify_membership(c);
        CHECK(cert.status == Membership::Infeasible);
        CHECK_FALSE(cert.boundary_direction.empty());
    }
    SUBCASE("singular Toeplitz short-circuits") {
        MembershipCertificate cert =
            certify_membership(CovarianceData::scalar(4, {cplx(1, 0), cplx(1, 0)}));
        CHECK(cert.status == Membership::Infeasible);
    }
}

TEST_CASE("feasible certificates imply Toeplitz positivity (cone inclusion)") {
    for (int trial = 0; trial < 10; ++trial) {
        PseudoPolynomial p = random_interior_pseudo(rng, 2);
        PseudoPolynomial q = random_interior_pseudo(rng, 2);
        CovarianceData c = moments_of_ratio(p, q, 8, 2);
        MembershipCertificate cert = certify_membership(c);
        CHECK(cert.status == Membership::Feasible);
        CHECK(toeplitz_positive(c));
    }
}

TEST_CASE("duality consistency: feasible data pays every nonnegative symbol") {
    PseudoPolynomial q({cplx(1.25, 0), cplx(0.5, 0), cplx(0.05, 0)});
    CovarianceData c = moments_of_ratio(PseudoPolynomial::one(), q, 8, 2);
    REQUIRE(certify_membership(c).status == Membership::Feasible);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DiscreteCircle circle(8);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<cplx> pc{cplx(1.0, 0.0), cplx(u(rng), u(rng)), cplx(u(rng), u(rng))};
        std::vector<double> pvals = PseudoPolynomial(pc).eval_on(circle);
        double mn = *std::min_element(pvals.begin(), pvals.end());
        pc[0] -= mn;  // shift the grid minimum to zero: boundary of the cone
        PseudoPolynomial p_shift(pc);
        CHECK(hermitian_inner(c.scalar_lags(), p_shift.coeffs()) > 0.0);
    }
}

TEST_CASE("full periodic sequence validation") {
    SUBCASE("period-4 wraparound holds and the symbol is positive") {
        FullPeriodicSequence seq =
            FullPeriodicSequence::scalar(2, {cplx(3, 0), cplx(1, 0), cplx(0.5, 0), cplx(1, 0)});
        SequenceValidation v = validate_full_sequence(seq);
        CHECK(v.wraparound_ok);
        CHECK(v.positive);
        CHECK(v.valid);
    }
    SUBCASE("explicit c_3 != c_1 breaks the wraparound") {
        FullPeriodicSequence seq =
            FullPeriodicSequence::scalar(2, {cplx(3, 0), cplx(1, 0), cplx(0.5, 0), cplx(0.9, 0)});
        SequenceValidation v = validate_full_sequence(seq);
        CHECK_FALSE(v.wraparound_ok);
        CHECK_FALSE(v.valid);
    }
    SUBCASE("white moments are valid") {
        FullPeriodicSequence seq = FullPeriodicSequence::scalar(2, {cplx(1, 0), cplx(0, 0), cplx(0, 0)});
        CHECK(validate_full_sequence(seq).valid);
    }
    SUBCASE("an indefinite symbol is rejected") {
        FullPeriodicSequence seq =
            FullPeriodicSequence::scalar(2, {cplx(1, 0), cplx(1.2, 0), cplx(0, 0)});
        SequenceValidation v = validate_full_sequence(seq);
        CHECK(v.wraparound_ok);
        CHECK_FALSE(v.positive);
        CHECK_FALSE(v.valid);
    }
}

TEST_CASE("covariance data validation") {
    CHECK_THROWS_AS(CovarianceData::scalar(2, {cplx(1, 0), cplx(0.1, 0), cplx(0.2, 0)}).validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS(CovarianceData::scalar(0, {cplx(1, 0)}).validate(), std::invalid_argument);
}
