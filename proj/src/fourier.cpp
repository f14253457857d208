#include "qpr/fourier.hpp"

#include <cmath>
#include <sstream>

namespace qpr {

double value_norm(const Mat& v) {
    if (v.size() == 0) return 0.0;
    if (v.cols() == 1) return v.cwiseAbs().maxCoeff();
    return v.cwiseAbs().rowwise().sum().maxCoeff();
}

double Frequency::dot(const MultiIndex& k) const {
    double s = 0.0;
    for (int j = 0; j < d(); ++j) s += k[j] * omega[j];
    return s;
}

std::optional<Frequency::Violation> Frequency::check_diophantine(int k_check) const {
    std::optional<Violation> worst;
    for_each_mode(d(), k_check, [&](const MultiIndex& k) {
        double lhs = std::abs(dot(k));
        double rhs = gamma * std::pow(static_cast<double>(order(k)), -tau);
        if (lhs < rhs) {
            double margin = lhs - rhs;
            if (!worst || margin < worst->lhs - worst->rhs) worst = Violation{k, lhs, rhs};
        }
    });
    return worst;
}

void Frequency::validate(int k_check) const {
    if (gamma <= 0.0) throw config_error("Frequency: gamma must be positive");
    if (tau <= d() - 1) throw config_error("Frequency: tau must exceed d - 1");
    if (auto v = check_diophantine(k_check)) {
        std::ostringstream os;
        os << "Frequency: Diophantine check failed at |k|=" << order(v->k) << " (lhs " << v->lhs
           << " < rhs " << v->rhs << ")";
        throw config_error(os.str());
    }
}

FourierSeries FourierSeries::constant(int d, const Mat& value, double rho, bool real) {
    FourierSeries s(d, static_cast<int>(value.rows()), static_cast<int>(value.cols()), rho, real);
    s.set_coeff(MultiIndex(d, 0), value);
    return s;
}

FourierSeries FourierSeries::identity(int d, int n, double rho) {
    return constant(d, Mat::Identity(n, n), rho, true);
}

int FourierSeries::max_order() const {
    int m = 0;
    for (const auto& [k, v] : coeffs_) m = std::max(m, order(k));
    return m;
}

Mat FourierSeries::coeff(const MultiIndex& k) const {
    auto it = coeffs_.find(k);
    if (it == coeffs_.end()) return Mat::Zero(rows_, cols_);
    return it->second;
}

void FourierSeries::set_coeff(const MultiIndex& k, const Mat& v) {
    if (static_cast<int>(k.size()) != d_ || v.rows() != rows_ || v.cols() != cols_)
        throw shape_error("FourierSeries::set_coeff: shape mismatch");
    if (v.isZero(0.0))
        coeffs_.erase(k);
    else
        coeffs_[k] = v;
}

void FourierSeries::add_coeff(const MultiIndex& k, const Mat& v) {
    auto it = coeffs_.find(k);
    if (it == coeffs_.end())
        set_coeff(k, v);
    else {
        it->second += v;
        if (it->second.isZero(0.0)) coeffs_.erase(it);
    }
}

FourierSeries FourierSeries::truncated(int k_max, double drop_tol) const {
    FourierSeries r(d_, rows_, cols_, rho_, is_real_);
    for (const auto& [k, v] : coeffs_) {
        if (order(k) > k_max) continue;
        if (value_norm(v) <= drop_tol) continue;
        r.coeffs_[k] = v;
    }
    return r;
}

void FourierSeries::check_compatible(const FourierSeries& o) const {
    if (d_ != o.d_ || rows_ != o.rows_ || cols_ != o.cols_)
        throw shape_error("FourierSeries: incompatible operands");
}

FourierSeries FourierSeries::operator+(const FourierSeries& o) const {
    check_compatible(o);
    FourierSeries r = *this;
    r.rho_ = std::min(rho_, o.rho_);
    r.is_real_ = is_real_ && o.is_real_;
    for (const auto& [k, v] : o.coeffs_) r.add_coeff(k, v);
    return r;
}

FourierSeries FourierSeries::operator-(const FourierSeries& o) const {
    return *this + o.scaled(-1.0);
}

FourierSeries FourierSeries::scaled(const Complex& s) const {
    FourierSeries r = *this;
    if (s.imag() != 0.0) r.is_real_ = false;
    for (auto& [k, v] : r.coeffs_) v *= s;
    if (s == Complex(0.0)) r.coeffs_.clear();
    return r;
}

FourierSeries FourierSeries::product(const FourierSeries& o, int k_max) const {
    if (d_ != o.d_ || cols_ != o.rows_)
        throw shape_error("FourierSeries::product: inner dimensions disagree");
    FourierSeries r(d_, rows_, o.cols_, std::min(rho_, o.rho_), is_real_ && o.is_real_);
    for (const auto& [ka, va] : coeffs_)
        for (const auto& [kb, vb] : o.coeffs_) {
            MultiIndex k = ka + kb;
            if (order(k) > k_max) continue;
            r.add_coeff(k, va * vb);
        }
    return r;
}

FourierSeries FourierSeries::mul_scalar_series(const FourierSeries& s, int k_max) const {
    if (s.rows() != 1 || s.cols() != 1 || s.d() != d_)
        throw shape_error("FourierSeries::mul_scalar_series: scalar series expected");
    FourierSeries r(d_, rows_, cols_, std::min(rho_, s.rho()), is_real_ && s.is_real());
    for (const auto& [ka, va] : coeffs_)
        for (const auto& [kb, vb] : s.coeffs()) {
            MultiIndex k = ka + kb;
            if (order(k) > k_max) continue;
            r.add_coeff(k, va * vb(0, 0));
        }
    return r;
}

FourierSeries FourierSeries::lmul(const Mat& a) const {
    if (a.cols() != rows_) throw shape_error("FourierSeries::lmul: shape mismatch");
    FourierSeries r(d_, static_cast<int>(a.rows()), cols_, rho_, is_real_);
    for (const auto& [k, v] : coeffs_) r.set_coeff(k, a * v);
    return r;
}

FourierSeries FourierSeries::rmul(const Mat& a) const {
    if (cols_ != a.rows()) throw shape_error("FourierSeries::rmul: shape mismatch");
    FourierSeries r(d_, rows_, static_cast<int>(a.cols()), rho_, is_real_);
    for (const auto& [k, v] : coeffs_) r.set_coeff(k, v * a);
    return r;
}

FourierSeries FourierSeries::transpose() const {
    FourierSeries r(d_, cols_, rows_, rho_, is_real_);
    for (const auto& [k, v] : coeffs_) r.set_coeff(k, v.transpose());
    return r;
}

FourierSeries FourierSeries::block(int i, int j, int rows, int cols) const {
    FourierSeries r(d_, rows, cols, rho_, is_real_);
    for (const auto& [k, v] : coeffs_) r.set_coeff(k, v.block(i, j, rows, cols));
    return r;
}

double FourierSeries::majorant_norm(double rho_eval) const {
    if (rho_eval > rho_ + 1e-15)
        throw width_error("FourierSeries::majorant_norm: rho_eval exceeds declared width");
    double s = 0.0;
    for (const auto& [k, v] : coeffs_) s += value_norm(v) * std::exp(rho_eval * order(k));
    return s;
}

double FourierSeries::majorant_tail(double rho_eval, int k_cut) const {
    double s = 0.0;
    for (const auto& [k, v] : coeffs_)
        if (order(k) > k_cut) s += value_norm(v) * std::exp(rho_eval * order(k));
    return s;
}

std::pair<Mat, FourierSeries> FourierSeries::average_split() const {
    MultiIndex zero(d_, 0);
    return {coeff(zero), oscillation()};
}

Mat FourierSeries::mean() const { return coeff(MultiIndex(d_, 0)); }

FourierSeries FourierSeries::oscillation() const {
    FourierSeries r = *this;
    r.coeffs_.erase(MultiIndex(d_, 0));
    return r;
}

FourierSeries FourierSeries::divide_by_divisor(
    const std::function<Complex(const MultiIndex&)>& divisor, double floor) const {
    FourierSeries r(d_, rows_, cols_, rho_, false);
    for (const auto& [k, v] : coeffs_) {
        Complex dv = divisor(k);
        if (std::abs(dv) < floor) {
            std::ostringstream os;
            os << "small divisor |" << std::abs(dv) << "| < floor " << floor << " at |k|="
               << order(k);
            throw small_divisor_error(os.str(), k, std::abs(dv));
        }
        r.set_coeff(k, v / dv);
    }
    return r;
}

FourierSeries FourierSeries::omega_derivative(const Frequency& freq) const {
    FourierSeries r(d_, rows_, cols_, rho_, is_real_);
    for (const auto& [k, v] : coeffs_) {
        if (is_zero(k)) continue;
        r.set_coeff(k, Complex(0.0, freq.dot(k)) * v);
    }
    return r;
}

Mat FourierSeries::evaluate(const Eigen::VectorXd& theta) const {
    if (theta.size() != d_) throw shape_error("FourierSeries::evaluate: theta dimension");
    Mat s = Mat::Zero(rows_, cols_);
    for (const auto& [k, v] : coeffs_) {
        double phase = 0.0;
        for (int j = 0; j < d_; ++j) phase += k[j] * theta[j];
        s += v * std::exp(Complex(0.0, phase));
    }
    return s;
}

Eigen::MatrixXd FourierSeries::evaluate_real(const Eigen::VectorXd& theta) const {
    return evaluate(theta).real();
}

double FourierSeries::reality_defect() const {
    double worst = 0.0;
    for (const auto& [k, v] : coeffs_) {
        Mat paired = coeff(negate(k));
        worst = std::max(worst, value_norm(v - paired.conjugate()));
    }
    return worst;
}

FourierSeries FourierSeries::symmetrized(double tol) const {
    double defect = reality_defect();
    if (defect > tol) {
        std::ostringstream os;
        os << "FourierSeries::symmetrized: reality defect " << defect << " exceeds " << tol;
        throw shape_error(os.str());
    }
    FourierSeries r(d_, rows_, cols_, rho_, true);
    for (const auto& [k, v] : coeffs_) {
        Mat sym = 0.5 * (v + coeff(negate(k)).conjugate());
        if (!sym.isZero(0.0)) r.coeffs_[k] = sym;
    }
    return r;
}

double FourierSeries::max_coeff_norm() const {
    double m = 0.0;
    for (const auto& [k, v] : coeffs_) m = std::max(m, value_norm(v));
    return m;
}

}  // namespace qpr
