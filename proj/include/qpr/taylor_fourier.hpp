#ifndef QPR_TAYLOR_FOURIER_HPP
#define QPR_TAYLOR_FOURIER_HPP

#include <map>
#include <vector>

#include "qpr/fourier.hpp"

namespace qpr {

// Truncation budget shared by all spectral operations: Fourier support is kept
// within |k| <= k_max and state degree within |alpha| <= deg_max.
struct Truncation {
    int k_max = 30;
    int deg_max = 6;
};

// Polynomial in the state z in R^n whose coefficients are Fourier series on the
// d-torus: F(theta, z) = sum_alpha c_alpha(theta) z^alpha. The coefficient shape
// is uniform (scalar, n-vector or matrix valued fields all use this type).
class TaylorFourierField {
public:
    TaylorFourierField() = default;
    TaylorFourierField(int n, int d, int rows, int cols, double rho, bool real = true)
        : n_(n), d_(d), rows_(rows), cols_(cols), rho_(rho), is_real_(real) {}

    static TaylorFourierField zero(int n, int d, int rows, int cols, double rho) {
        return TaylorFourierField(n, d, rows, cols, rho);
    }

    int n() const { return n_; }
    int d() const { return d_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double rho() const { return rho_; }
    bool is_real() const { return is_real_; }
    void set_rho(double rho);

    const std::map<MultiIndex, FourierSeries>& coeffs() const { return coeffs_; }
    bool empty() const { return coeffs_.empty(); }
    int deg_min() const;
    int deg_max() const;

    FourierSeries coeff(const MultiIndex& alpha) const;
    void set_coeff(const MultiIndex& alpha, const FourierSeries& s);
    void add_coeff(const MultiIndex& alpha, const FourierSeries& s);

    TaylorFourierField operator+(const TaylorFourierField& o) const;
    TaylorFourierField operator-(const TaylorFourierField& o) const;
    TaylorFourierField scaled(const Complex& s) const;

    // Matrix product with convolution in both the state degree and the Fourier
    // mode, truncated per `tr`.
    TaylorFourierField product(const TaylorFourierField& o, const Truncation& tr) const;

    // Degree window selections.
    TaylorFourierField slice(int deg) const;
    TaylorFourierField drop_below(int deg) const;
    TaylorFourierField drop_above(int deg) const;

    // k = 0 Fourier slice of every coefficient (the averaged field).
    TaylorFourierField average() const;
    TaylorFourierField oscillation() const;

    // State Jacobian: values become rows x (n) blocks; defined for cols == 1.
    TaylorFourierField jacobian() const;

    // Composition F(theta, w_1(theta, z), ..., w_n(theta, z)) where each w_j is a
    // scalar-valued field over the same torus with n_out state variables.
    TaylorFourierField compose(const std::vector<TaylorFourierField>& w,
                               const Truncation& tr) const;

    // Affine substitution z -> c(theta) + L(theta) z; c is an n-vector series,
    // L an n x n matrix series. Either may be empty (treated as zero / identity
    // via the dedicated factories below).
    TaylorFourierField substitute_affine(const FourierSeries& c, const FourierSeries& L,
                                         const Truncation& tr) const;

    Mat evaluate(const Eigen::VectorXd& theta, const Eigen::VectorXcd& z) const;
    Eigen::MatrixXd evaluate_real(const Eigen::VectorXd& theta, const Eigen::VectorXd& z) const;

    // sup_{|z| <= r} of the coefficient-majorant bound at width rho_eval.
    double majorant_norm(double rho_eval, double r) const;
    // Dominating bound on sup_{|z|<=r} ||D_xx F||_rho (curvature bound K).
    double curvature_bound(double rho_eval, double r) const;

    double reality_defect() const;
    TaylorFourierField truncated(const Truncation& tr, double drop_tol = 0.0) const;

    // A field with a single degree-1 block z |-> z (vector valued, rows == n).
    static TaylorFourierField identity_map(int n, int d, double rho);
    // Lifts a vector/matrix Fourier series to the degree-0 coefficient.
    static TaylorFourierField from_series(int n, const FourierSeries& s);

    // Extracts the scalar component fields (rows must be >= 1, cols == 1).
    TaylorFourierField component(int i) const;

private:
    void check_compatible(const TaylorFourierField& o) const;

    int n_ = 0, d_ = 0;
    int rows_ = 0, cols_ = 0;
    double rho_ = 0.0;
    bool is_real_ = true;
    std::map<MultiIndex, FourierSeries> coeffs_;
};

}  // namespace qpr

#endif
