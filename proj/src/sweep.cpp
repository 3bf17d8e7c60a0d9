#include "circarma/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "circarma/cepstral.hpp"
#include "circarma/errors.hpp"
#include "circarma/realization.hpp"

namespace circarma {

double TruthModel::spectrum(double theta) const {
    Polynomial pa{a}, pb{b.empty() ? std::vector<cplx>{cplx(1.0, 0.0)} : b};
    return std::norm(pb.eval(theta)) / std::norm(pa.eval(theta));
}

void TruthModel::validate() const {
    if (a.empty() || std::abs(a[0]) == 0.0)
        throw std::invalid_argument("TruthModel: a_0 must be nonzero");
    auto check_roots = [](const std::vector<cplx>& poly, const char* name) {
        if (poly.size() < 2) return;
        // roots of sum_k c_k z^{-k}: zeros of the reversed polynomial sum c_k z^{p-k}
        std::vector<cplx> rev(poly.rbegin(), poly.rend());
        for (const cplx& r : polynomial_roots(rev))
            if (std::abs(r) >= 1.0 - 1e-9)
                throw std::invalid_argument(std::string("TruthModel: ") + name +
                                            " must be minimum phase (root modulus " +
                                            std::to_string(std::abs(r)) + ")");
    };
    check_roots(a, "a");
    if (!b.empty()) check_roots(b, "b");
}

namespace {

std::vector<cplx> impulse_response(const TruthModel& model, double rel_tail) {
    const std::vector<cplx>& a = model.a;
    const std::vector<cplx> b = model.b.empty() ? std::vector<cplx>{cplx(1.0, 0.0)} : model.b;
    const int p = static_cast<int>(a.size()) - 1;
    std::vector<cplx> h;
    h.reserve(1024);
    double peak = 0.0;
    int quiet = 0;
    const int hard_cap = 200000;
    for (int j = 0; j < hard_cap; ++j) {
        cplx v = j < static_cast<int>(b.size()) ? b[static_cast<size_t>(j)] : cplx(0.0, 0.0);
        for (int i = 1; i <= std::min(p, j); ++i) v -= a[static_cast<size_t>(i)] * h[static_cast<size_t>(j - i)];
        v /= a[0];
        h.push_back(v);
        peak = std::max(peak, std::abs(v));
        quiet = std::abs(v) < rel_tail * std::max(peak, 1e-300) ? quiet + 1 : 0;
        if (quiet > 4 * (p + 1) + 64 && j > 8 * (p + 1)) break;
    }
    return h;
}

}  // namespace

std::vector<cplx> truth_covariances(const TruthModel& model, int n) {
    model.validate();
    std::vector<cplx> h = impulse_response(model, 1e-17);
    std::vector<cplx> c(static_cast<size_t>(n) + 1, cplx(0.0, 0.0));
    for (int k = 0; k <= n; ++k)
        for (size_t j = 0; j + static_cast<size_t>(k) < h.size(); ++j)
            c[static_cast<size_t>(k)] += h[j + static_cast<size_t>(k)] * std::conj(h[j]);
    return c;
}

std::vector<cplx> truth_cepstrum(const TruthModel& model, int n) {
    model.validate();
    auto root_powers = [&](const std::vector<cplx>& poly, std::vector<cplx>& acc, double sign) {
        if (poly.size() < 2) return;
        std::vector<cplx> rev(poly.rbegin(), poly.rend());
        std::vector<cplx> roots = polynomial_roots(rev);
        for (int k = 1; k <= n; ++k) {
            cplx s{0.0, 0.0};
            for (const cplx& r : roots) s += std::pow(r, k);
            acc[static_cast<size_t>(k - 1)] += sign * s / static_cast<double>(k);
        }
    };
    // gamma_k(|b|^2/|a|^2) = (sum alpha_i^k - sum beta_i^k)/k, roots inside the disc
    std::vector<cplx> gamma(static_cast<size_t>(n), cplx(0.0, 0.0));
    root_powers(model.b, gamma, -1.0);
    root_powers(model.a, gamma, 1.0);
    return gamma;
}

double fit_error_on_grid(const PseudoPolynomial& p, const PseudoPolynomial& q,
                         const TruthModel& truth, int half_period) {
    DiscreteCircle circle(half_period);
    double err = 0.0;
    for (int j = 0; j < circle.size(); ++j) {
        const double th = circle.theta(j);
        err = std::max(err, std::abs(p.eval(th) / q.eval(th) - truth.spectrum(th)));
    }
    return err;
}

std::vector<SweepRow> run_sweep(const SweepRequest& req) {
    req.truth.validate();
    if (req.n_values.empty()) throw std::invalid_argument("run_sweep: empty N list");
    if (req.fit_order < 1) throw std::invalid_argument("run_sweep: fit order must be >= 1");
    for (int nv : req.n_values)
        if (nv <= req.fit_order) throw std::invalid_argument("run_sweep: every N must exceed the fit order");

    const std::vector<cplx> c_lags = truth_covariances(req.truth, req.fit_order);
    const std::vector<cplx> gamma =
        req.mode == FitMode::Cepstral ? truth_cepstrum(req.truth, req.fit_order) : std::vector<cplx>{};

    std::vector<SweepRow> rows(req.n_values.size());
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= req.n_values.size()) return;
            const int n_half = req.n_values[i];
            SweepRow row{n_half, 0.0, 0, SolveStatus::Indeterminate};
            CovarianceData cov = CovarianceData::scalar(n_half, c_lags);
            if (req.mode == FitMode::MaximumEntropy) {
                DualSolution sol = solve_dual(cov, PseudoPolynomial::one());
                row.status = sol.status;
                row.iterations = sol.iterations;
                if (sol.converged())
                    row.error = fit_error_on_grid(PseudoPolynomial::one(), sol.q, req.truth, n_half);
            } else {
                JointSolution sol = solve_joint(cov, CepstralData{gamma}, req.lambda);
                row.status = sol.status;
                row.iterations = sol.iterations;
                if (sol.converged()) row.error = fit_error_on_grid(sol.p, sol.q, req.truth, n_half);
            }
            rows[i] = row;
        }
    };

    unsigned workers = req.worker_count > 0 ? static_cast<unsigned>(req.worker_count)
                                            : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(req.n_values.size()));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return rows;  // ordered by the request's N list regardless of completion order
}

}  // namespace circarma
