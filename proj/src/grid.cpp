#include "circarma/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "circarma/errors.hpp"

namespace circarma {

namespace {
long resolved_cap = 0;  // 0 = not explicitly set
}

long dense_cap() {
    if (resolved_cap > 0) return resolved_cap;
    if (const char* env = std::getenv("CIRCARMA_DENSE_CAP")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return v;
    }
    return 4096;
}

void set_dense_cap(long cap) { resolved_cap = cap > 0 ? cap : 0; }

DiscreteCircle::DiscreteCircle(int half_period) : n_half_(half_period) {
    if (half_period < 1) throw std::invalid_argument("DiscreteCircle: N must be >= 1");
    points_.reserve(static_cast<size_t>(2 * half_period));
    for (int j = 0; j < 2 * half_period; ++j) points_.push_back(unit(theta(j)));
}

PseudoPolynomial::PseudoPolynomial(std::vector<cplx> coeffs, bool real_only)
    : coeffs_(std::move(coeffs)), real_only_(real_only) {
    if (coeffs_.empty()) throw std::invalid_argument("PseudoPolynomial: empty coefficients");
    if (std::abs(coeffs_[0].imag()) > 1e-12 * (1.0 + std::abs(coeffs_[0].real())))
        throw std::invalid_argument("PseudoPolynomial: p_0 must be real");
    coeffs_[0] = cplx(coeffs_[0].real(), 0.0);
    if (real_only_) {
        for (auto& p : coeffs_) {
            if (std::abs(p.imag()) > 1e-12 * (1.0 + std::abs(p.real())))
                throw std::invalid_argument("PseudoPolynomial: real-only flag with complex coefficient");
            p = cplx(p.real(), 0.0);
        }
    }
}

cplx PseudoPolynomial::coeff(int k) const {
    int a = std::abs(k);
    if (a > degree()) return {0.0, 0.0};
    cplx v = coeffs_[static_cast<size_t>(a)];
    return k >= 0 ? v : std::conj(v);
}

double PseudoPolynomial::eval(double theta) const {
    double v = coeffs_[0].real();
    for (int k = 1; k <= degree(); ++k) {
        // p_k zeta^{-k} + conj(p_k) zeta^{k} = 2 Re(p_k e^{-ik theta})
        const cplx& p = coeffs_[static_cast<size_t>(k)];
        v += 2.0 * (p.real() * std::cos(k * theta) + p.imag() * std::sin(k * theta));
    }
    return v;
}

std::vector<double> PseudoPolynomial::eval_on(const DiscreteCircle& circle) const {
    if (degree() >= 2 * circle.half_period())
        throw std::invalid_argument("PseudoPolynomial: degree >= 2N cannot be evaluated on the grid");
    std::vector<double> out(static_cast<size_t>(circle.size()));
    for (int j = 0; j < circle.size(); ++j) out[static_cast<size_t>(j)] = eval(circle.theta(j));
    return out;
}

double PseudoPolynomial::min_on_circle(int samples) const {
    samples = std::max(samples, 16 * (degree() + 1));
    double mn = eval(0.0);
    for (int i = 1; i < samples; ++i) mn = std::min(mn, eval(2.0 * kPi * i / samples - kPi));
    return mn;
}

PseudoPolynomial PseudoPolynomial::scaled(double s) const {
    std::vector<cplx> c = coeffs_;
    for (auto& v : c) v *= s;
    return PseudoPolynomial(std::move(c), real_only_);
}

cplx Polynomial::eval(double theta) const {
    cplx v{0.0, 0.0};
    for (int k = 0; k <= degree(); ++k) v += c[static_cast<size_t>(k)] * unit(-k * theta);
    return v;
}

std::vector<cplx> Polynomial::eval_on(const DiscreteCircle& circle) const {
    std::vector<cplx> out(static_cast<size_t>(circle.size()));
    for (int j = 0; j < circle.size(); ++j) out[static_cast<size_t>(j)] = eval(circle.theta(j));
    return out;
}

double DiscreteSpectrum::min_value() const {
    return *std::min_element(values.begin(), values.end());
}

DiscreteSpectrum make_spectrum(const DiscreteCircle& circle, std::vector<double> values) {
    if (static_cast<int>(values.size()) != circle.size())
        throw std::invalid_argument("DiscreteSpectrum: value count must be 2N");
    return DiscreteSpectrum{circle, std::move(values)};
}

namespace {
template <typename T>
cplx moment_impl(std::span<const T> values, const DiscreteCircle& circle, int k) {
    if (static_cast<int>(values.size()) != circle.size())
        throw std::invalid_argument("discrete_moment: value count must be 2N");
    cplx acc{0.0, 0.0};
    for (int j = 0; j < circle.size(); ++j)
        acc += cplx(values[static_cast<size_t>(j)]) * circle.power(j, k);
    return acc / static_cast<double>(circle.size());
}
}  // namespace

cplx discrete_moment(std::span<const double> values, const DiscreteCircle& circle, int k) {
    return moment_impl(values, circle, k);
}
cplx discrete_moment(std::span<const cplx> values, const DiscreteCircle& circle, int k) {
    return moment_impl(values, circle, k);
}

std::vector<cplx> moments_of(const DiscreteSpectrum& phi, int n) {
    if (n >= phi.circle.half_period())
        throw std::invalid_argument("moments_of: order must satisfy n < N");
    std::vector<cplx> c(static_cast<size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) c[static_cast<size_t>(k)] = discrete_moment(phi.values, phi.circle, k);
    return c;
}

namespace {
template <typename T>
std::vector<cplx> inverse_dft_impl(std::span<const T> values, const DiscreteCircle& circle) {
    std::vector<cplx> window(static_cast<size_t>(circle.size()));
    for (int k = -circle.half_period() + 1; k <= circle.half_period(); ++k)
        window[static_cast<size_t>(circle.index_of(k))] = moment_impl(values, circle, k);
    return window;
}
}  // namespace

std::vector<cplx> inverse_dft(std::span<const cplx> values, const DiscreteCircle& circle) {
    return inverse_dft_impl(values, circle);
}
std::vector<cplx> inverse_dft(std::span<const double> values, const DiscreteCircle& circle) {
    return inverse_dft_impl(values, circle);
}

std::vector<cplx> window_eval(std::span<const cplx> window, const DiscreteCircle& circle) {
    if (static_cast<int>(window.size()) != circle.size())
        throw std::invalid_argument("window_eval: window must hold 2N coefficients");
    std::vector<cplx> out(static_cast<size_t>(circle.size()));
    for (int j = 0; j < circle.size(); ++j) {
        cplx acc{0.0, 0.0};
        for (int k = -circle.half_period() + 1; k <= circle.half_period(); ++k)
            acc += window[static_cast<size_t>(circle.index_of(k))] * circle.power(j, -k);
        out[static_cast<size_t>(j)] = acc;
    }
    return out;
}

PseudoPolynomial pseudo_from_values(std::span<const double> values, const DiscreteCircle& circle,
                                    int n, bool real_only) {
    if (n >= circle.half_period())
        throw std::invalid_argument("pseudo_from_values: order must satisfy n < N");
    std::vector<cplx> c(static_cast<size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) c[static_cast<size_t>(k)] = discrete_moment(values, circle, k);
    if (std::abs(c[0].imag()) > 1e-12 * (1.0 + std::abs(c[0].real())))
        throw Error("pseudo_from_values: zeroth moment has a non-negligible imaginary part");
    if (real_only) {
        for (const cplx& v : c)
            if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())))
                throw Error("pseudo_from_values: real-only projection left an imaginary residue");
    }
    return PseudoPolynomial(std::move(c), real_only);
}

double hermitian_inner(std::span<const cplx> c, std::span<const cplx> p) {
    size_t n = std::min(c.size(), p.size());
    double acc = n > 0 ? c[0].real() * p[0].real() : 0.0;
    for (size_t k = 1; k < n; ++k)
        acc += 2.0 * (c[k].real() * p[k].real() + c[k].imag() * p[k].imag());
    return acc;
}

}  // namespace circarma
