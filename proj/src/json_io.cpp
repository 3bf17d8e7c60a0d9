#include "circarma/json_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>

#include "circarma/errors.hpp"
#include "circarma/realization.hpp"
#include "circarma/sweep.hpp"

namespace circarma::io {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument("request: " + msg); }

double number_at(const json& j, const char* what) {
    if (!j.is_number()) bad(std::string(what) + " must be a number");
    return j.get<double>();
}

std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool reproducible(const json& request) { return request.value("reproducible", false); }

void stamp(json& body, const json& request) {
    if (!reproducible(request)) body["generated_at"] = timestamp();
}

Eigen::MatrixXcd block_from_json(const json& j, int m) {
    if (!j.is_array() || static_cast<int>(j.size()) != m * m)
        bad("matrix block must hold m*m complex entries, row-major");
    Eigen::MatrixXcd blk(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) blk(a, b) = complex_from_json(j[static_cast<size_t>(a * m + b)]);
    return blk;
}

json block_to_json(const Eigen::MatrixXcd& blk) {
    json out = json::array();
    for (int a = 0; a < blk.rows(); ++a)
        for (int b = 0; b < blk.cols(); ++b) out.push_back(complex_to_json(blk(a, b)));
    return out;
}

std::vector<cplx> complex_list_from_json(const json& j, const char* what) {
    if (!j.is_array()) bad(std::string(what) + " must be an array");
    std::vector<cplx> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(complex_from_json(e));
    return out;
}

json complex_list_to_json(const std::vector<cplx>& v) {
    json out = json::array();
    for (const cplx& z : v) out.push_back(complex_to_json(z));
    return out;
}

SolverConfig solver_config_from(const json& request) {
    SolverConfig cfg;
    if (!request.contains("config")) return cfg;
    const json& c = request.at("config");
    cfg.max_iterations = c.value("max_iterations", cfg.max_iterations);
    cfg.gradient_tolerance = c.value("gradient_tolerance", cfg.gradient_tolerance);
    cfg.backtrack = c.value("backtrack", cfg.backtrack);
    cfg.armijo = c.value("armijo", cfg.armijo);
    if (c.contains("initial_q")) cfg.initial_q = complex_list_from_json(c.at("initial_q"), "initial_q");
    return cfg;
}

JointSolverConfig joint_config_from(const json& request) {
    JointSolverConfig cfg;
    if (!request.contains("config")) return cfg;
    const json& c = request.at("config");
    cfg.max_iterations = c.value("max_iterations", cfg.max_iterations);
    cfg.gradient_tolerance = c.value("gradient_tolerance", cfg.gradient_tolerance);
    cfg.allow_boundary = c.value("allow_boundary", cfg.allow_boundary);
    cfg.condition_limit = c.value("condition_limit", cfg.condition_limit);
    return cfg;
}

json spectrum_to_json(const DiscreteSpectrum& phi) {
    json out;
    out["N"] = phi.circle.half_period();
    out["values"] = phi.values;
    return out;
}

json block_values_to_json(const std::vector<Eigen::MatrixXcd>& values, int half_period, int m) {
    json out;
    out["N"] = half_period;
    out["m"] = m;
    json vals = json::array();
    for (const auto& v : values) vals.push_back(block_to_json(v));
    out["values"] = std::move(vals);
    return out;
}

std::string scalar_solution_csv(const DiscreteCircle& circle, const std::vector<double>& phi,
                                const PseudoPolynomial& p, const PseudoPolynomial& q) {
    std::ostringstream os;
    os << "k,theta_k,phi,p,q\n";
    for (int j = 0; j < circle.size(); ++j) {
        const double th = circle.theta(j);
        os << circle.k_of(j) << ',' << csv_num(th) << ',' << csv_num(phi[static_cast<size_t>(j)]) << ','
           << csv_num(p.eval(th)) << ',' << csv_num(q.eval(th)) << '\n';
    }
    return os.str();
}

std::string block_solution_csv(const DiscreteCircle& circle, const std::vector<Eigen::MatrixXcd>& phi,
                               const PseudoPolynomial& p, const MatrixPseudoPolynomial& q) {
    const int m = q.m;
    std::ostringstream os;
    os << "k,theta_k,p";
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) os << ",phi_" << a << b << "_re,phi_" << a << b << "_im";
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) os << ",q_" << a << b << "_re,q_" << a << b << "_im";
    os << '\n';
    for (int j = 0; j < circle.size(); ++j) {
        const double th = circle.theta(j);
        os << circle.k_of(j) << ',' << csv_num(th) << ',' << csv_num(p.eval(th));
        const Eigen::MatrixXcd qv = q.eval(th);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                os << ',' << csv_num(phi[static_cast<size_t>(j)](a, b).real()) << ','
                   << csv_num(phi[static_cast<size_t>(j)](a, b).imag());
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) os << ',' << csv_num(qv(a, b).real()) << ',' << csv_num(qv(a, b).imag());
        os << '\n';
    }
    return os.str();
}

CommandResult cmd_check(const json& request) {
    CommandResult res;
    CovarianceData cov = covariance_from_json(request.at("covariance"));
    double min_eig = 0.0;
    const bool pd = toeplitz_positive(cov, &min_eig);
    res.body["toeplitz_pd"] = pd;
    res.body["toeplitz_min_eigenvalue"] = min_eig;

    MembershipCertificate cert = certify_membership(cov);
    switch (cert.status) {
        case Membership::Feasible: res.body["membership"] = "feasible"; break;
        case Membership::Infeasible: res.body["membership"] = "infeasible"; break;
        case Membership::Indeterminate: res.body["membership"] = "indeterminate"; break;
    }
    res.body["diagnostic"] = cert.diagnostic;
    if (cert.q_me) res.body["q_me"] = pseudo_to_json(*cert.q_me);
    if (!cert.boundary_direction.empty())
        res.body["boundary_direction"] = complex_list_to_json(cert.boundary_direction);
    res.status = cert.status == Membership::Feasible ? 0 : 1;

    if (request.contains("full_lags")) {
        FullPeriodicSequence seq;
        if (cov.m == 1) {
            seq = FullPeriodicSequence::scalar(cov.half_period,
                                               complex_list_from_json(request.at("full_lags"), "full_lags"));
        } else {
            seq.m = cov.m;
            seq.half_period = cov.half_period;
            for (const auto& e : request.at("full_lags")) seq.lags.push_back(block_from_json(e, cov.m));
        }
        SequenceValidation v = validate_full_sequence(seq);
        res.body["full_sequence"] = {{"valid", v.valid},
                                     {"wraparound_ok", v.wraparound_ok},
                                     {"positive", v.positive},
                                     {"detail", v.detail}};
        if (!v.valid) res.status = 1;
        if (v.valid && request.value("dense", false)) {
            // materialize the assembled circulant for inspection (cap applies)
            DiscreteCircle circle(seq.half_period);
            int cap_lags = std::min<int>(static_cast<int>(seq.lags.size()), seq.half_period + 1);
            std::vector<Eigen::MatrixXcd> head(seq.lags.begin(), seq.lags.begin() + cap_lags);
            Eigen::MatrixXcd dense = CirculantMatrix::from_banded(circle, head).dense();
            json rows = json::array();
            for (long i = 0; i < dense.rows(); ++i) {
                json row = json::array();
                for (long j = 0; j < dense.cols(); ++j) row.push_back(complex_to_json(dense(i, j)));
                rows.push_back(std::move(row));
            }
            res.body["sigma_dense"] = std::move(rows);
        }
    }
    return res;
}

void fill_solve_body(json& body, const DualSolution& sol) {
    body["status"] = to_string(sol.status);
    body["iterations"] = sol.iterations;
    body["gradient_norm"] = sol.gradient_norm;
    body["moment_residual"] = sol.moment_residual;
    if (!sol.diagnostic.empty()) body["diagnostic"] = sol.diagnostic;
    if (!sol.boundary_direction.empty())
        body["boundary_direction"] = complex_list_to_json(sol.boundary_direction);
    if (sol.converged()) {
        body["q"] = pseudo_to_json(sol.q);
        body["phi"] = spectrum_to_json(sol.phi);
        body["primal_value"] = sol.primal_value;
        body["dual_value"] = sol.dual_value;
    }
}

CommandResult cmd_solve(const json& request) {
    CommandResult res;
    CovarianceData cov = covariance_from_json(request.at("covariance"));
    if (cov.m != 1) bad("solve expects scalar data (m = 1); use block-solve");
    PseudoPolynomial p =
        request.contains("p") ? pseudo_from_json(request.at("p")) : PseudoPolynomial::one();
    DualSolution sol = solve_dual(cov, p, solver_config_from(request));
    fill_solve_body(res.body, sol);
    res.body["p"] = pseudo_to_json(p);
    res.status = sol.converged() ? 0 : 1;
    if (sol.converged() && request.value("format", "json") == "csv")
        res.csv = scalar_solution_csv(sol.phi.circle, sol.phi.values, p, sol.q);
    return res;
}

CommandResult cmd_block_solve(const json& request) {
    CommandResult res;
    CovarianceData cov = covariance_from_json(request.at("covariance"));
    PseudoPolynomial p =
        request.contains("p") ? pseudo_from_json(request.at("p")) : PseudoPolynomial::one();
    BlockDualSolution sol = solve_dual_block(cov, p, solver_config_from(request));
    res.body["status"] = to_string(sol.status);
    res.body["iterations"] = sol.iterations;
    res.body["gradient_norm"] = sol.gradient_norm;
    res.body["moment_residual"] = sol.moment_residual;
    res.body["p"] = pseudo_to_json(p);
    if (!sol.diagnostic.empty()) res.body["diagnostic"] = sol.diagnostic;
    res.status = sol.converged() ? 0 : 1;
    if (sol.converged()) {
        res.body["q_block"] = matrix_pseudo_to_json(sol.q);
        res.body["phi_block"] = block_values_to_json(sol.phi, cov.half_period, cov.m);
        res.body["dual_value"] = sol.dual_value;
        if (request.value("format", "json") == "csv")
            res.csv = block_solution_csv(DiscreteCircle(cov.half_period), sol.phi, p, sol.q);
    }
    return res;
}

CommandResult cmd_cepstral_solve(const json& request) {
    CommandResult res;
    CovarianceData cov = covariance_from_json(request.at("covariance"));
    CepstralData data{complex_list_from_json(request.at("gamma"), "gamma")};
    const double lambda = request.value("lambda", 1e-2);
    JointSolverConfig cfg = joint_config_from(request);
    if (cov.m == 1) {
        JointSolution sol = solve_joint(cov, data, lambda, cfg);
        res.body["status"] = to_string(sol.status);
        res.body["iterations"] = sol.iterations;
        res.body["gradient_norm"] = sol.gradient_norm;
        res.body["lambda"] = sol.lambda;
        if (!sol.diagnostic.empty()) res.body["diagnostic"] = sol.diagnostic;
        res.status = sol.converged() ? 0 : 1;
        if (sol.converged()) {
            res.body["p"] = pseudo_to_json(sol.p);
            res.body["q"] = pseudo_to_json(sol.q);
            res.body["phi"] = spectrum_to_json(sol.phi);
            res.body["epsilon"] = complex_list_to_json(sol.epsilon);
            res.body["covariance_residual"] = sol.covariance_residual;
            res.body["adjusted_cepstral_residual"] = sol.adjusted_cepstral_residual;
            if (request.value("format", "json") == "csv")
                res.csv = scalar_solution_csv(sol.phi.circle, sol.phi.values, sol.p, sol.q);
        }
        return res;
    }
    BlockJointSolution sol = solve_joint_block(cov, data, lambda, cfg);
    res.body["status"] = to_string(sol.status);
    res.body["iterations"] = sol.iterations;
    res.body["gradient_norm"] = sol.gradient_norm;
    res.body["lambda"] = sol.lambda;
    if (!sol.diagnostic.empty()) res.body["diagnostic"] = sol.diagnostic;
    res.status = sol.converged() ? 0 : 1;
    if (sol.converged()) {
        res.body["p"] = pseudo_to_json(sol.p);
        res.body["q_block"] = matrix_pseudo_to_json(sol.q);
        res.body["phi_block"] = block_values_to_json(sol.phi, cov.half_period, cov.m);
        res.body["epsilon"] = complex_list_to_json(sol.epsilon);
        res.body["covariance_residual"] = sol.covariance_residual;
        res.body["adjusted_cepstral_residual"] = sol.adjusted_cepstral_residual;
        if (request.value("format", "json") == "csv")
            res.csv = block_solution_csv(DiscreteCircle(cov.half_period), sol.phi, sol.p, sol.q);
    }
    return res;
}

CommandResult cmd_extend(const json& request) {
    CommandResult res;
    const int half_period = request.value("N", 0);
    if (half_period < 1) bad("extend needs a positive N");
    DiscreteCircle circle(half_period);
    PseudoPolynomial p =
        request.contains("p") ? pseudo_from_json(request.at("p")) : PseudoPolynomial::one();
    std::ostringstream csv;
    if (request.contains("q_block")) {
        MatrixPseudoPolynomial q = matrix_pseudo_from_json(request.at("q_block"));
        BlockExtension ext = block_extension_and_sigma(p, q, circle);
        res.body["m"] = q.m;
        res.body["N"] = half_period;
        json lags = json::array();
        for (const auto& l : ext.lags.lags) lags.push_back(block_to_json(l));
        res.body["lags"] = std::move(lags);
        csv << "k,entry,re,im\n";
        for (size_t k = 0; k < ext.lags.lags.size(); ++k)
            for (int a = 0; a < q.m; ++a)
                for (int b = 0; b < q.m; ++b)
                    csv << k << ',' << a << b << ',' << csv_num(ext.lags.lags[k](a, b).real()) << ','
                        << csv_num(ext.lags.lags[k](a, b).imag()) << '\n';
    } else {
        PseudoPolynomial q = pseudo_from_json(request.at("q"));
        FullPeriodicSequence seq = extend_covariances(p, q, circle);
        res.body["m"] = 1;
        res.body["N"] = half_period;
        res.body["lags"] = complex_list_to_json(seq.scalar_lags());
        csv << "k,re,im\n";
        std::vector<cplx> lags = seq.scalar_lags();
        for (size_t k = 0; k < lags.size(); ++k)
            csv << k << ',' << csv_num(lags[k].real()) << ',' << csv_num(lags[k].imag()) << '\n';
    }
    if (request.value("format", "json") == "csv") res.csv = csv.str();
    return res;
}

json arma_model_to_json(const ArmaModel& model) {
    return json{{"kind", to_string(model.kind)},
                {"n", model.order},
                {"a", complex_list_to_json(model.denominator)},
                {"b", complex_list_to_json(model.numerator)}};
}

CommandResult cmd_factor(const json& request) {
    CommandResult res;
    if (request.contains("q")) {
        // (P, Q) pair: full unilateral forward/backward models
        PseudoPolynomial q = pseudo_from_json(request.at("q"));
        PseudoPolynomial p =
            request.contains("p") ? pseudo_from_json(request.at("p")) : PseudoPolynomial::one();
        UnilateralPair pair = unilateral_arma(p, q);
        res.body["forward"] = arma_model_to_json(pair.forward);
        res.body["backward"] = arma_model_to_json(pair.backward);
        return res;
    }
    PseudoPolynomial m_poly = pseudo_from_json(request.at("poly"));
    Polynomial a = request.contains("N")
                       ? factor_banded(m_poly, DiscreteCircle(request.at("N").get<int>()))
                       : factor_banded(m_poly);
    res.body["a"] = complex_list_to_json(a.c);
    double residual = 0.0;
    const int samples = std::max(512, 16 * (m_poly.degree() + 1));
    for (int i = 0; i < samples; ++i) {
        const double th = 2.0 * kPi * i / samples - kPi;
        residual = std::max(residual, std::abs(std::norm(a.eval(th)) - m_poly.eval(th)));
    }
    res.body["residual"] = residual;
    return res;
}

CommandResult cmd_simulate(const json& request) {
    CommandResult res;
    SimulationOptions opts;
    opts.count = request.value("count", 1);
    opts.seed = request.value("seed", 0ULL);
    opts.real_output = request.value("real_output", true);
    if (opts.count < 1) bad("count must be >= 1");

    int half_period = request.value("N", 0);
    int m = 1;
    std::vector<std::vector<cplx>> samples;
    DiscreteSpectrum phi_scalar;
    if (request.contains("phi")) {
        const json& pj = request.at("phi");
        half_period = pj.at("N").get<int>();
        DiscreteCircle circle(half_period);
        std::vector<double> values = pj.at("values").get<std::vector<double>>();
        phi_scalar = make_spectrum(circle, std::move(values));
        samples = simulate(phi_scalar, opts);
    } else if (request.contains("q_block")) {
        if (half_period < 1) bad("simulate needs N alongside q_block");
        MatrixPseudoPolynomial q = matrix_pseudo_from_json(request.at("q_block"));
        PseudoPolynomial p =
            request.contains("p") ? pseudo_from_json(request.at("p")) : PseudoPolynomial::one();
        DiscreteCircle circle(half_period);
        BlockExtension ext = block_extension_and_sigma(p, q, circle);
        m = q.m;
        samples = simulate_block(ext.sigma.values(), circle, opts);
    } else {
        if (half_period < 1) bad("simulate needs N alongside p/q");
        PseudoPolynomial p =
            request.contains("p") ? pseudo_from_json(request.at("p")) : PseudoPolynomial::one();
        PseudoPolynomial q = pseudo_from_json(request.at("q"));
        DiscreteCircle circle(half_period);
        std::vector<double> pv = p.eval_on(circle), qv = q.eval_on(circle);
        std::vector<double> values(pv.size());
        for (size_t j = 0; j < pv.size(); ++j) values[j] = pv[j] / qv[j];
        phi_scalar = make_spectrum(circle, std::move(values));
        samples = simulate(phi_scalar, opts);
    }

    DiscreteCircle circle(half_period);
    res.body["N"] = half_period;
    res.body["m"] = m;
    res.body["count"] = opts.count;
    res.body["seed"] = opts.seed;
    res.body["real_output"] = opts.real_output;

    // cyclic sample lags averaged over realizations, k = 0..min(N, 8)
    if (m == 1) {
        const int k_max = std::min(half_period, 8);
        std::vector<cplx> lags(static_cast<size_t>(k_max) + 1, cplx(0.0, 0.0));
        for (const auto& y : samples)
            for (int k = 0; k <= k_max; ++k) {
                cplx acc{0.0, 0.0};
                for (int t = 0; t < circle.size(); ++t)
                    acc += y[static_cast<size_t>((t + k) % circle.size())] * std::conj(y[static_cast<size_t>(t)]);
                lags[static_cast<size_t>(k)] += acc / static_cast<double>(circle.size());
            }
        for (auto& l : lags) l /= static_cast<double>(samples.size());
        res.body["sample_lags"] = complex_list_to_json(lags);
    }

    json jsamples = json::array();
    for (const auto& y : samples) jsamples.push_back(complex_list_to_json(y));
    res.body["samples"] = std::move(jsamples);

    if (request.value("format", "json") == "csv") {
        std::ostringstream os;
        if (m == 1) {
            os << (opts.real_output ? "t,realization,value\n" : "t,realization,re,im\n");
            for (size_t r = 0; r < samples.size(); ++r)
                for (int ti = 0; ti < circle.size(); ++ti) {
                    const cplx v = samples[r][static_cast<size_t>(ti)];
                    os << circle.k_of(ti) << ',' << r;
                    if (opts.real_output)
                        os << ',' << csv_num(v.real()) << '\n';
                    else
                        os << ',' << csv_num(v.real()) << ',' << csv_num(v.imag()) << '\n';
                }
        } else {
            os << (opts.real_output ? "t,realization,component,value\n"
                                    : "t,realization,component,re,im\n");
            for (size_t r = 0; r < samples.size(); ++r)
                for (int ti = 0; ti < circle.size(); ++ti)
                    for (int a = 0; a < m; ++a) {
                        const cplx v = samples[r][static_cast<size_t>(ti * m + a)];
                        os << circle.k_of(ti) << ',' << r << ',' << a;
                        if (opts.real_output)
                            os << ',' << csv_num(v.real()) << '\n';
                        else
                            os << ',' << csv_num(v.real()) << ',' << csv_num(v.imag()) << '\n';
                    }
        }
        res.csv = os.str();
    }
    return res;
}

CommandResult cmd_sweep(const json& request) {
    CommandResult res;
    SweepRequest req;
    const json& truth = request.at("truth");
    for (const auto& e : truth.at("a")) req.truth.a.push_back(complex_from_json(e));
    if (truth.contains("b"))
        for (const auto& e : truth.at("b")) req.truth.b.push_back(complex_from_json(e));
    req.n_values = request.at("N_values").get<std::vector<int>>();
    const json& fit = request.at("fit");
    req.fit_order = fit.at("n").get<int>();
    const std::string mode = fit.value("mode", "me");
    if (mode == "me")
        req.mode = FitMode::MaximumEntropy;
    else if (mode == "cepstral")
        req.mode = FitMode::Cepstral;
    else
        bad("fit.mode must be 'me' or 'cepstral'");
    req.lambda = fit.value("lambda", 1e-2);
    req.worker_count = request.value("workers", 0);

    std::vector<SweepRow> rows = run_sweep(req);
    json jrows = json::array();
    std::ostringstream csv;
    csv << "N,error,iterations,status\n";
    bool all_ok = true;
    for (const SweepRow& r : rows) {
        jrows.push_back({{"N", r.half_period},
                         {"error", r.error},
                         {"iterations", r.iterations},
                         {"status", to_string(r.status)}});
        csv << r.half_period << ',' << csv_num(r.error) << ',' << r.iterations << ','
            << to_string(r.status) << '\n';
        all_ok &= r.status == SolveStatus::Converged;
    }
    res.body["rows"] = std::move(jrows);
    res.csv = csv.str();
    res.status = all_ok ? 0 : 1;
    return res;
}

}  // namespace

cplx complex_from_json(const json& j) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && (j.size() == 1 || j.size() == 2)) {
        double re = number_at(j[0], "complex re");
        double im = j.size() == 2 ? number_at(j[1], "complex im") : 0.0;
        return cplx(re, im);
    }
    bad("complex entries are numbers or [re, im] pairs");
}

json complex_to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

PseudoPolynomial pseudo_from_json(const json& j) {
    if (!j.is_object() || !j.contains("coeffs")) bad("pseudo-polynomial needs a coeffs array");
    std::vector<cplx> coeffs = complex_list_from_json(j.at("coeffs"), "coeffs");
    if (j.contains("n") && j.at("n").get<int>() != static_cast<int>(coeffs.size()) - 1)
        bad("pseudo-polynomial n does not match the coefficient count");
    return PseudoPolynomial(std::move(coeffs));
}

json pseudo_to_json(const PseudoPolynomial& p) {
    json out;
    out["n"] = p.degree();
    out["coeffs"] = complex_list_to_json(p.coeffs());
    return out;
}

MatrixPseudoPolynomial matrix_pseudo_from_json(const json& j) {
    if (!j.is_object() || !j.contains("m") || !j.contains("coeffs"))
        bad("matrix pseudo-polynomial needs m and coeffs");
    MatrixPseudoPolynomial q;
    q.m = j.at("m").get<int>();
    if (q.m < 1) bad("matrix pseudo-polynomial needs m >= 1");
    for (const auto& e : j.at("coeffs")) q.coeffs.push_back(block_from_json(e, q.m));
    q.validate();
    return q;
}

json matrix_pseudo_to_json(const MatrixPseudoPolynomial& q) {
    json out;
    out["m"] = q.m;
    out["n"] = q.degree();
    json coeffs = json::array();
    for (const auto& c : q.coeffs) coeffs.push_back(block_to_json(c));
    out["coeffs"] = std::move(coeffs);
    return out;
}

CovarianceData covariance_from_json(const json& j) {
    if (!j.is_object() || !j.contains("N") || !j.contains("lags")) bad("covariance needs N and lags");
    CovarianceData c;
    c.m = j.value("m", 1);
    c.half_period = j.at("N").get<int>();
    if (c.m < 1) bad("covariance needs m >= 1");
    if (!j.at("lags").is_array() || j.at("lags").empty()) bad("covariance lags must be non-empty");
    for (const auto& e : j.at("lags")) {
        if (c.m == 1)
            c.lags.push_back(Eigen::MatrixXcd::Constant(1, 1, complex_from_json(e)));
        else
            c.lags.push_back(block_from_json(e, c.m));
    }
    c.validate();
    return c;
}

json covariance_to_json(const CovarianceData& c) {
    json out;
    out["m"] = c.m;
    out["N"] = c.half_period;
    json lags = json::array();
    for (const auto& l : c.lags) {
        if (c.m == 1)
            lags.push_back(complex_to_json(l(0, 0)));
        else
            lags.push_back(block_to_json(l));
    }
    out["lags"] = std::move(lags);
    return out;
}

CommandResult run_command(const std::string& command, const json& request) {
    CommandResult res;
    try {
        if (command == "check")
            res = cmd_check(request);
        else if (command == "solve")
            res = cmd_solve(request);
        else if (command == "cepstral-solve")
            res = cmd_cepstral_solve(request);
        else if (command == "block-solve")
            res = cmd_block_solve(request);
        else if (command == "extend")
            res = cmd_extend(request);
        else if (command == "factor")
            res = cmd_factor(request);
        else if (command == "simulate")
            res = cmd_simulate(request);
        else if (command == "sweep")
            res = cmd_sweep(request);
        else
            bad("unknown command '" + command + "'");
    } catch (const Error& e) {
        res.body = json{{"error", e.what()}};
        res.csv.reset();
        res.status = 1;
    }
    res.body["command"] = command;
    stamp(res.body, request);
    return res;
}

}  // namespace circarma::io
