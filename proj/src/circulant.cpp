#include "circarma/circulant.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "circarma/errors.hpp"

namespace circarma {

namespace {

std::string zeta_name(const DiscreteCircle& circle, int j) {
    std::ostringstream os;
    os << "zeta_" << circle.k_of(j) << " = e^{i*" << circle.k_of(j) << "*pi/" << circle.half_period() << "}";
    return os.str();
}

double entry_norm(const Eigen::MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

CirculantMatrix::CirculantMatrix(DiscreteCircle circle, std::vector<Eigen::MatrixXcd> values)
    : circle_(std::move(circle)), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != circle_.size())
        throw std::invalid_argument("CirculantMatrix: need one symbol value per grid point");
    m_ = static_cast<int>(values_.front().rows());
    for (const auto& v : values_)
        if (v.rows() != m_ || v.cols() != m_)
            throw std::invalid_argument("CirculantMatrix: symbol blocks must share one square size");
}

CirculantMatrix CirculantMatrix::identity(const DiscreteCircle& circle, int m) {
    return CirculantMatrix(circle, std::vector<Eigen::MatrixXcd>(
                                       static_cast<size_t>(circle.size()), Eigen::MatrixXcd::Identity(m, m)));
}

CirculantMatrix CirculantMatrix::shift(const DiscreteCircle& circle, int m) {
    std::vector<Eigen::MatrixXcd> vals;
    vals.reserve(static_cast<size_t>(circle.size()));
    for (int j = 0; j < circle.size(); ++j)
        vals.push_back(circle.point(j) * Eigen::MatrixXcd::Identity(m, m));
    return CirculantMatrix(circle, std::move(vals));
}

CirculantMatrix CirculantMatrix::from_scalar_values(const DiscreteCircle& circle,
                                                    const std::vector<double>& values) {
    std::vector<Eigen::MatrixXcd> vals;
    vals.reserve(values.size());
    for (double v : values) vals.push_back(Eigen::MatrixXcd::Constant(1, 1, cplx(v, 0.0)));
    return CirculantMatrix(circle, std::move(vals));
}

CirculantMatrix CirculantMatrix::from_scalar_values(const DiscreteCircle& circle,
                                                    const std::vector<cplx>& values) {
    std::vector<Eigen::MatrixXcd> vals;
    vals.reserve(values.size());
    for (const cplx& v : values) vals.push_back(Eigen::MatrixXcd::Constant(1, 1, v));
    return CirculantMatrix(circle, std::move(vals));
}

CirculantMatrix CirculantMatrix::from_window(const DiscreteCircle& circle,
                                             std::vector<Eigen::MatrixXcd> window) {
    if (static_cast<int>(window.size()) != circle.size())
        throw std::invalid_argument("from_window: need 2N coefficient blocks");
    const int m = static_cast<int>(window.front().rows());
    std::vector<Eigen::MatrixXcd> vals(static_cast<size_t>(circle.size()));
    for (int j = 0; j < circle.size(); ++j) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m, m);
        for (int k = -circle.half_period() + 1; k <= circle.half_period(); ++k)
            acc += window[static_cast<size_t>(circle.index_of(k))] * circle.power(j, -k);
        vals[static_cast<size_t>(j)] = acc;
    }
    return CirculantMatrix(circle, std::move(vals));
}

CirculantMatrix CirculantMatrix::from_banded(const DiscreteCircle& circle,
                                             const std::vector<Eigen::MatrixXcd>& lags) {
    if (lags.empty()) throw std::invalid_argument("from_banded: no lags");
    const int n = static_cast<int>(lags.size()) - 1;
    if (n > circle.half_period())
        throw std::invalid_argument("from_banded: order exceeds the half period");
    const int m = static_cast<int>(lags.front().rows());
    std::vector<Eigen::MatrixXcd> window(static_cast<size_t>(circle.size()),
                                         Eigen::MatrixXcd::Zero(m, m));
    for (int k = 0; k <= n; ++k) {
        window[static_cast<size_t>(circle.index_of(k))] = lags[static_cast<size_t>(k)];
        if (k > 0 && k < circle.half_period())
            window[static_cast<size_t>(circle.index_of(-k))] = lags[static_cast<size_t>(k)].adjoint();
    }
    return from_window(circle, std::move(window));
}

CirculantMatrix CirculantMatrix::from_pseudo(const DiscreteCircle& circle, const PseudoPolynomial& p) {
    return from_scalar_values(circle, p.eval_on(circle));
}

bool CirculantMatrix::is_hermitian(double tol) const {
    for (const auto& v : values_)
        if (entry_norm(v - v.adjoint()) > tol * (1.0 + entry_norm(v))) return false;
    return true;
}

CirculantMatrix CirculantMatrix::hermitized(double tol) const {
    std::vector<Eigen::MatrixXcd> vals(values_.size());
    for (size_t j = 0; j < values_.size(); ++j) {
        const auto& v = values_[j];
        double asym = entry_norm(v - v.adjoint());
        if (asym > tol * (1.0 + entry_norm(v)))
            throw Error("hermitized: asymmetry " + std::to_string(asym) + " at " +
                        zeta_name(circle_, static_cast<int>(j)));
        vals[j] = 0.5 * (v + v.adjoint().eval());
    }
    return CirculantMatrix(circle_, std::move(vals));
}

CirculantMatrix CirculantMatrix::multiply(const CirculantMatrix& rhs) const {
    if (!(circle_ == rhs.circle_) || m_ != rhs.m_)
        throw std::invalid_argument("multiply: incompatible circulants");
    std::vector<Eigen::MatrixXcd> vals(values_.size());
    for (size_t j = 0; j < values_.size(); ++j) vals[j] = values_[j] * rhs.values_[j];
    return CirculantMatrix(circle_, std::move(vals));
}

CirculantMatrix CirculantMatrix::add(const CirculantMatrix& rhs) const {
    if (!(circle_ == rhs.circle_) || m_ != rhs.m_)
        throw std::invalid_argument("add: incompatible circulants");
    std::vector<Eigen::MatrixXcd> vals(values_.size());
    for (size_t j = 0; j < values_.size(); ++j) vals[j] = values_[j] + rhs.values_[j];
    return CirculantMatrix(circle_, std::move(vals));
}

CirculantMatrix CirculantMatrix::scale(const cplx& s) const {
    std::vector<Eigen::MatrixXcd> vals(values_.size());
    for (size_t j = 0; j < values_.size(); ++j) vals[j] = s * values_[j];
    return CirculantMatrix(circle_, std::move(vals));
}

CirculantMatrix CirculantMatrix::inverse() const {
    std::vector<Eigen::MatrixXcd> vals(values_.size());
    for (size_t j = 0; j < values_.size(); ++j) {
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(values_[j]);
        lu.setThreshold(1e-13);
        if (!lu.isInvertible())
            throw SingularSymbolError("inverse: singular symbol value at " +
                                      zeta_name(circle_, static_cast<int>(j)));
        vals[j] = lu.inverse();
    }
    CirculantMatrix out(circle_, std::move(vals));
    return is_hermitian() ? out.hermitized() : out;
}

CirculantMatrix CirculantMatrix::log() const {
    std::vector<Eigen::MatrixXcd> vals(values_.size());
    for (size_t j = 0; j < values_.size(); ++j) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (values_[j] + values_[j].adjoint().eval()));
        if (es.info() != Eigen::Success)
            throw Error("log: eigendecomposition failed at " + zeta_name(circle_, static_cast<int>(j)));
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw SingularSymbolError("log: symbol value not positive definite at " +
                                      zeta_name(circle_, static_cast<int>(j)));
        Eigen::VectorXd lg = es.eigenvalues().array().log();
        vals[j] = es.eigenvectors() * lg.asDiagonal() * es.eigenvectors().adjoint();
    }
    return CirculantMatrix(circle_, std::move(vals)).hermitized();
}

std::vector<Eigen::MatrixXcd> CirculantMatrix::window() const {
    const int two_n = circle_.size();
    std::vector<Eigen::MatrixXcd> win(static_cast<size_t>(two_n));
    for (int k = -circle_.half_period() + 1; k <= circle_.half_period(); ++k) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m_, m_);
        for (int j = 0; j < two_n; ++j) acc += values_[static_cast<size_t>(j)] * circle_.power(j, k);
        win[static_cast<size_t>(circle_.index_of(k))] = acc / static_cast<double>(two_n);
    }
    return win;
}

BandedCheck CirculantMatrix::is_banded(int n, double tol) const {
    if (n >= circle_.half_period())
        throw std::invalid_argument("is_banded: order must satisfy n < N");
    auto win = window();
    double residual = 0.0;
    for (int k = -circle_.half_period() + 1; k <= circle_.half_period(); ++k)
        if (std::abs(k) > n)
            residual = std::max(residual, entry_norm(win[static_cast<size_t>(circle_.index_of(k))]));
    return BandedCheck{residual <= tol, residual};
}

BandedCheck CirculantMatrix::is_banded(int n) const {
    double scale = entry_norm(window()[static_cast<size_t>(circle_.index_of(0))]);
    return is_banded(n, 1e-8 * std::max(scale, 1e-300));
}

Eigen::MatrixXcd CirculantMatrix::dense() const {
    const long side = static_cast<long>(m_) * circle_.size();
    if (side > dense_cap())
        throw DenseCapError("dense: 2mN = " + std::to_string(side) + " exceeds cap " +
                            std::to_string(dense_cap()));
    auto win = window();
    const int two_n = circle_.size();
    Eigen::MatrixXcd out(side, side);
    for (int i = 0; i < two_n; ++i)
        for (int j = 0; j < two_n; ++j) {
            int d = (i - j) % two_n;
            if (d <= -circle_.half_period()) d += two_n;
            if (d > circle_.half_period()) d -= two_n;
            out.block(i * m_, j * m_, m_, m_) = win[static_cast<size_t>(circle_.index_of(d))];
        }
    return out;
}

CirculantMatrix operator*(const CirculantMatrix& a, const CirculantMatrix& b) { return a.multiply(b); }
CirculantMatrix operator+(const CirculantMatrix& a, const CirculantMatrix& b) { return a.add(b); }

double trace_form(const CirculantMatrix& a, const CirculantMatrix& b) {
    if (!(a.circle() == b.circle()) || a.block_size() != b.block_size())
        throw std::invalid_argument("trace_form: incompatible circulants");
    cplx acc{0.0, 0.0};
    for (int j = 0; j < a.points(); ++j) acc += (a.value(j) * b.value(j)).trace();
    return acc.real();
}

Diagonalization diagonalize(const CirculantMatrix& m) {
    return Diagonalization{fourier_matrix(m.circle(), m.block_size()), m.values()};
}

Eigen::MatrixXcd fourier_matrix(const DiscreteCircle& circle, int m) {
    const int two_n = circle.size();
    Eigen::MatrixXcd f(static_cast<long>(m) * two_n, static_cast<long>(m) * two_n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(two_n));
    for (int r = 0; r < two_n; ++r)
        for (int t = 0; t < two_n; ++t) {
            // column t carries the coefficient with signed index k = t-N+1,
            // i.e. the entry zeta_j^{-k} = zeta_j^{N-1-t}
            cplx w = scale * circle.power(r, circle.half_period() - 1 - t);
            f.block(r * m, t * m, m, m) = w * Eigen::MatrixXcd::Identity(m, m);
        }
    return f;
}

}  // namespace circarma
