#include "qpr/taylor_fourier.hpp"

#include <cmath>

namespace qpr {

void TaylorFourierField::set_rho(double rho) {
    rho_ = rho;
    for (auto& [a, s] : coeffs_) s.set_rho(rho);
}

int TaylorFourierField::deg_min() const {
    int m = -1;
    for (const auto& [a, s] : coeffs_)
        if (m < 0 || order(a) < m) m = order(a);
    return m < 0 ? 0 : m;
}

int TaylorFourierField::deg_max() const {
    int m = 0;
    for (const auto& [a, s] : coeffs_) m = std::max(m, order(a));
    return m;
}

FourierSeries TaylorFourierField::coeff(const MultiIndex& alpha) const {
    auto it = coeffs_.find(alpha);
    if (it == coeffs_.end()) return FourierSeries(d_, rows_, cols_, rho_, is_real_);
    return it->second;
}

void TaylorFourierField::set_coeff(const MultiIndex& alpha, const FourierSeries& s) {
    if (static_cast<int>(alpha.size()) != n_ || s.d() != d_ || s.rows() != rows_ ||
        s.cols() != cols_)
        throw shape_error("TaylorFourierField::set_coeff: shape mismatch");
    if (s.empty())
        coeffs_.erase(alpha);
    else
        coeffs_[alpha] = s;
}

void TaylorFourierField::add_coeff(const MultiIndex& alpha, const FourierSeries& s) {
    auto it = coeffs_.find(alpha);
    if (it == coeffs_.end())
        set_coeff(alpha, s);
    else {
        it->second = it->second + s;
        if (it->second.empty()) coeffs_.erase(it);
    }
}

void TaylorFourierField::check_compatible(const TaylorFourierField& o) const {
    if (n_ != o.n_ || d_ != o.d_ || rows_ != o.rows_ || cols_ != o.cols_)
        throw shape_error("TaylorFourierField: incompatible operands");
}

TaylorFourierField TaylorFourierField::operator+(const TaylorFourierField& o) const {
    check_compatible(o);
    TaylorFourierField r = *this;
    r.rho_ = std::min(rho_, o.rho_);
    r.is_real_ = is_real_ && o.is_real_;
    for (const auto& [a, s] : o.coeffs_) r.add_coeff(a, s);
    return r;
}

TaylorFourierField TaylorFourierField::operator-(const TaylorFourierField& o) const {
    return *this + o.scaled(-1.0);
}

TaylorFourierField TaylorFourierField::scaled(const Complex& s) const {
    TaylorFourierField r = *this;
    if (s.imag() != 0.0) r.is_real_ = false;
    if (s == Complex(0.0)) {
        r.coeffs_.clear();
        return r;
    }
    for (auto& [a, c] : r.coeffs_) c = c.scaled(s);
    return r;
}

TaylorFourierField TaylorFourierField::product(const TaylorFourierField& o,
                                               const Truncation& tr) const {
    if (n_ != o.n_ || d_ != o.d_ || cols_ != o.rows_)
        throw shape_error("TaylorFourierField::product: inner dimensions disagree");
    TaylorFourierField r(n_, d_, rows_, o.cols_, std::min(rho_, o.rho_), is_real_ && o.is_real_);
    for (const auto& [aa, sa] : coeffs_)
        for (const auto& [ab, sb] : o.coeffs_) {
            MultiIndex a = aa + ab;
            if (order(a) > tr.deg_max) continue;
            r.add_coeff(a, sa.product(sb, tr.k_max));
        }
    return r;
}

TaylorFourierField TaylorFourierField::slice(int deg) const {
    TaylorFourierField r(n_, d_, rows_, cols_, rho_, is_real_);
    for (const auto& [a, s] : coeffs_)
        if (order(a) == deg) r.coeffs_[a] = s;
    return r;
}

TaylorFourierField TaylorFourierField::drop_below(int deg) const {
    TaylorFourierField r(n_, d_, rows_, cols_, rho_, is_real_);
    for (const auto& [a, s] : coeffs_)
        if (order(a) >= deg) r.coeffs_[a] = s;
    return r;
}

TaylorFourierField TaylorFourierField::drop_above(int deg) const {
    TaylorFourierField r(n_, d_, rows_, cols_, rho_, is_real_);
    for (const auto& [a, s] : coeffs_)
        if (order(a) <= deg) r.coeffs_[a] = s;
    return r;
}

TaylorFourierField TaylorFourierField::average() const {
    TaylorFourierField r(n_, d_, rows_, cols_, rho_, is_real_);
    for (const auto& [a, s] : coeffs_) {
        Mat m = s.mean();
        if (!m.isZero(0.0)) r.coeffs_[a] = FourierSeries::constant(d_, m, rho_, s.is_real());
    }
    return r;
}

TaylorFourierField TaylorFourierField::oscillation() const {
    TaylorFourierField r(n_, d_, rows_, cols_, rho_, is_real_);
    for (const auto& [a, s] : coeffs_) {
        FourierSeries o = s.oscillation();
        if (!o.empty()) r.coeffs_[a] = o;
    }
    return r;
}

TaylorFourierField TaylorFourierField::jacobian() const {
    if (cols_ != 1) throw shape_error("TaylorFourierField::jacobian: vector fields only");
    TaylorFourierField r(n_, d_, rows_, n_, rho_, is_real_);
    for (const auto& [a, s] : coeffs_) {
        for (int l = 0; l < n_; ++l) {
            if (a[l] == 0) continue;
            MultiIndex b = a;
            b[l] -= 1;
            // column l of the Jacobian block picks up a_l * c_alpha.
            FourierSeries col = s.scaled(static_cast<double>(a[l]));
            FourierSeries blocked(d_, rows_, n_, col.rho(), col.is_real());
            for (const auto& [k, v] : col.coeffs()) {
                Mat m = Mat::Zero(rows_, n_);
                m.col(l) = v.col(0);
                blocked.set_coeff(k, m);
            }
            r.add_coeff(b, blocked);
        }
    }
    return r;
}

TaylorFourierField TaylorFourierField::compose(const std::vector<TaylorFourierField>& w,
                                               const Truncation& tr) const {
    if (static_cast<int>(w.size()) != n_)
        throw shape_error("TaylorFourierField::compose: needs one field per state variable");
    for (const auto& wj : w)
        if (wj.rows() != 1 || wj.cols() != 1)
            throw shape_error("TaylorFourierField::compose: inner fields must be scalar valued");
    const int n_out = w.empty() ? n_ : w[0].n();
    TaylorFourierField r(n_out, d_, rows_, cols_, rho_, is_real_);

    // Cached powers w_j^p, built lazily up to the needed degree.
    std::vector<std::vector<TaylorFourierField>> powers(n_);
    auto power = [&](int j, int p) -> const TaylorFourierField& {
        auto& cache = powers[j];
        if (cache.empty()) {
            TaylorFourierField one(n_out, d_, 1, 1, rho_, true);
            one.set_coeff(MultiIndex(n_out, 0),
                          FourierSeries::constant(d_, Mat::Ones(1, 1), rho_));
            cache.push_back(one);
        }
        while (static_cast<int>(cache.size()) <= p)
            cache.push_back(cache.back().product(w[j], tr));
        return cache[p];
    };

    for (const auto& [alpha, c_alpha] : coeffs_) {
        // P = prod_j w_j^{alpha_j}, a scalar field.
        TaylorFourierField P = power(0, n_ > 0 ? alpha[0] : 0);
        for (int j = 1; j < n_; ++j)
            if (alpha[j] > 0) P = P.product(power(j, alpha[j]), tr);
        // Accumulate c_alpha(theta) * P(theta, z).
        for (const auto& [beta, ps] : P.coeffs())
            r.add_coeff(beta, c_alpha.mul_scalar_series(ps, tr.k_max));
    }
    return r;
}

TaylorFourierField TaylorFourierField::substitute_affine(const FourierSeries& c,
                                                         const FourierSeries& L,
                                                         const Truncation& tr) const {
    std::vector<TaylorFourierField> w;
    w.reserve(n_);
    const bool has_c = !c.empty();
    const bool has_L = !L.empty();
    for (int j = 0; j < n_; ++j) {
        TaylorFourierField wj(n_, d_, 1, 1, rho_, is_real_);
        if (has_c) {
            FourierSeries cj = c.block(j, 0, 1, 1);
            if (!cj.empty()) wj.set_coeff(MultiIndex(n_, 0), cj);
        }
        if (has_L) {
            for (int l = 0; l < n_; ++l) {
                FourierSeries Ljl = L.block(j, l, 1, 1);
                if (!Ljl.empty()) wj.add_coeff(unit_index(n_, l), Ljl);
            }
        }
        w.push_back(std::move(wj));
    }
    return compose(w, tr);
}

Mat TaylorFourierField::evaluate(const Eigen::VectorXd& theta, const Eigen::VectorXcd& z) const {
    Mat s = Mat::Zero(rows_, cols_);
    for (const auto& [a, c] : coeffs_) {
        Complex mono = 1.0;
        for (int j = 0; j < n_; ++j)
            for (int q = 0; q < a[j]; ++q) mono *= z[j];
        s += c.evaluate(theta) * mono;
    }
    return s;
}

Eigen::MatrixXd TaylorFourierField::evaluate_real(const Eigen::VectorXd& theta,
                                                  const Eigen::VectorXd& z) const {
    return evaluate(theta, z.cast<Complex>()).real();
}

double TaylorFourierField::majorant_norm(double rho_eval, double r) const {
    double s = 0.0;
    for (const auto& [a, c] : coeffs_)
        s += c.majorant_norm(rho_eval) * std::pow(r, order(a));
    return s;
}

double TaylorFourierField::curvature_bound(double rho_eval, double r) const {
    double s = 0.0;
    for (const auto& [a, c] : coeffs_) {
        int p = order(a);
        if (p < 2) continue;
        s += c.majorant_norm(rho_eval) * p * (p - 1) * std::pow(r, p - 2);
    }
    return s;
}

double TaylorFourierField::reality_defect() const {
    double worst = 0.0;
    for (const auto& [a, c] : coeffs_) worst = std::max(worst, c.reality_defect());
    return worst;
}

TaylorFourierField TaylorFourierField::truncated(const Truncation& tr, double drop_tol) const {
    TaylorFourierField r(n_, d_, rows_, cols_, rho_, is_real_);
    for (const auto& [a, c] : coeffs_) {
        if (order(a) > tr.deg_max) continue;
        FourierSeries ct = c.truncated(tr.k_max, drop_tol);
        if (!ct.empty()) r.coeffs_[a] = ct;
    }
    return r;
}

TaylorFourierField TaylorFourierField::identity_map(int n, int d, double rho) {
    TaylorFourierField r(n, d, n, 1, rho, true);
    for (int j = 0; j < n; ++j) {
        Mat e = Mat::Zero(n, 1);
        e(j, 0) = 1.0;
        r.set_coeff(unit_index(n, j), FourierSeries::constant(d, e, rho));
    }
    return r;
}

TaylorFourierField TaylorFourierField::from_series(int n, const FourierSeries& s) {
    TaylorFourierField r(n, s.d(), s.rows(), s.cols(), s.rho(), s.is_real());
    if (!s.empty()) r.set_coeff(MultiIndex(n, 0), s);
    return r;
}

TaylorFourierField TaylorFourierField::component(int i) const {
    if (cols_ != 1) throw shape_error("TaylorFourierField::component: vector fields only");
    TaylorFourierField r(n_, d_, 1, 1, rho_, is_real_);
    for (const auto& [a, c] : coeffs_) {
        FourierSeries ci = c.block(i, 0, 1, 1);
        if (!ci.empty()) r.coeffs_[a] = ci;
    }
    return r;
}

}  // namespace qpr
