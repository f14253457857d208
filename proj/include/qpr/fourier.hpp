#ifndef QPR_FOURIER_HPP
#define QPR_FOURIER_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <map>
#include <optional>

#include "qpr/errors.hpp"
#include "qpr/multiindex.hpp"

namespace qpr {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;

// Sup norm of a value: max-abs for scalars/vectors, induced infinity norm
// (max absolute row sum) for matrices.
double value_norm(const Mat& v);

// Diophantine frequency vector: |<k,omega>| >= gamma |k|^{-tau} for 0 < |k|.
struct Frequency {
    Eigen::VectorXd omega;
    double gamma = 0.1;
    double tau = 1.5;

    int d() const { return static_cast<int>(omega.size()); }
    double dot(const MultiIndex& k) const;

    // Truncated check over 0 < |k| <= k_check; returns the worst offender if any.
    struct Violation {
        MultiIndex k;
        double lhs, rhs;
    };
    std::optional<Violation> check_diophantine(int k_check) const;
    void validate(int k_check) const;  // throws config_error on failure
};

// Finite Fourier series on the d-torus with matrix-shaped coefficients and a
// declared analyticity width rho. Immutable value semantics: all operations
// return new series.
class FourierSeries {
public:
    FourierSeries() = default;
    FourierSeries(int d, int rows, int cols, double rho, bool real = true)
        : d_(d), rows_(rows), cols_(cols), rho_(rho), is_real_(real) {}

    static FourierSeries zero(int d, int rows, int cols, double rho, bool real = true) {
        return FourierSeries(d, rows, cols, rho, real);
    }
    static FourierSeries constant(int d, const Mat& value, double rho, bool real = true);
    static FourierSeries identity(int d, int n, double rho);

    int d() const { return d_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double rho() const { return rho_; }
    bool is_real() const { return is_real_; }
    bool empty() const { return coeffs_.empty(); }
    int support_size() const { return static_cast<int>(coeffs_.size()); }
    int max_order() const;

    const std::map<MultiIndex, Mat>& coeffs() const { return coeffs_; }

    // Returns the zero matrix of the declared shape when k is absent.
    Mat coeff(const MultiIndex& k) const;
    void set_coeff(const MultiIndex& k, const Mat& v);
    void add_coeff(const MultiIndex& k, const Mat& v);
    void set_rho(double rho) { rho_ = rho; }
    void set_real(bool r) { is_real_ = r; }

    // Drops coefficients with |k| > k_max or value norm <= drop_tol.
    FourierSeries truncated(int k_max, double drop_tol = 0.0) const;

    FourierSeries operator+(const FourierSeries& o) const;
    FourierSeries operator-(const FourierSeries& o) const;
    FourierSeries scaled(const Complex& s) const;
    // Matrix product with Fourier convolution, truncated to |k| <= k_max.
    FourierSeries product(const FourierSeries& o, int k_max) const;
    // Convolution with a 1x1 series, shape preserved.
    FourierSeries mul_scalar_series(const FourierSeries& s, int k_max) const;
    // Left/right multiplication by a constant matrix.
    FourierSeries lmul(const Mat& a) const;
    FourierSeries rmul(const Mat& a) const;
    FourierSeries transpose() const;
    FourierSeries block(int i, int j, int rows, int cols) const;

    // Sum_k ||f_k|| e^{rho_eval |k|}; dominates the strip sup norm of width rho_eval.
    double majorant_norm(double rho_eval) const;
    // Tail part of the majorant norm carried by modes with |k| > k_cut.
    double majorant_tail(double rho_eval, int k_cut) const;

    std::pair<Mat, FourierSeries> average_split() const;
    Mat mean() const;
    FourierSeries oscillation() const;

    // coeff(k) / divisor(k); every used divisor must satisfy |divisor(k)| >= floor.
    FourierSeries divide_by_divisor(const std::function<Complex(const MultiIndex&)>& divisor,
                                    double floor) const;

    // d/dt along the torus flow: multiplies coeff(k) by i<k,omega>.
    FourierSeries omega_derivative(const Frequency& freq) const;

    Mat evaluate(const Eigen::VectorXd& theta) const;
    Eigen::MatrixXd evaluate_real(const Eigen::VectorXd& theta) const;

    // Max deviation from the reality pairing coeff(-k) = conj(coeff(k)).
    double reality_defect() const;
    // Enforces the pairing exactly; throws if the defect exceeds tol.
    FourierSeries symmetrized(double tol) const;

    double max_coeff_norm() const;

private:
    void check_compatible(const FourierSeries& o) const;

    int d_ = 0;
    int rows_ = 0, cols_ = 0;
    double rho_ = 0.0;
    bool is_real_ = true;
    std::map<MultiIndex, Mat> coeffs_;
};

}  // namespace qpr

#endif
