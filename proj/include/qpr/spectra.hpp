#ifndef QPR_SPECTRA_HPP
#define QPR_SPECTRA_HPP

#include <Eigen/Dense>
#include <complex>

namespace qpr {

// Diagonalization data of a real matrix with distinct nonzero eigenvalues:
// conditioning beta0, separation margins mu / mu_star and the perturbation
// radius alpha = 2 mu / ((3n-1) beta0^2) inside which the margins persist.
struct SpectralFrame {
    Eigen::MatrixXd A;
    Eigen::VectorXcd lambdas;
    Eigen::MatrixXcd C;
    Eigen::MatrixXcd C_inv;
    double beta0 = 0.0;
    double mu = 0.0;
    double mu_star = 0.0;
    double alpha = 0.0;

    int n() const { return static_cast<int>(A.rows()); }
    double diag_residual() const;  // ||C^{-1} A C - diag(lambdas)||
};

// Induced infinity norm helpers matching the series-side value norm.
double mat_inf_norm(const Eigen::MatrixXcd& m);
double mat_inf_norm(const Eigen::MatrixXd& m);

// Smallest of |lambda_i| and |lambda_i - lambda_j| over the spectrum.
double spectral_separation(const Eigen::VectorXcd& lambdas);
double spectral_spread(const Eigen::VectorXcd& lambdas);

// Diagonalizes A; mu = margin_fraction * (min separation)/2, mu_star a strict
// upper margin. Eigenvector columns are normalized to unit infinity norm.
// Throws spectrum_error on (near-)repeated or (near-)zero eigenvalues.
SpectralFrame diagonalize(const Eigen::MatrixXd& A, double margin_fraction,
                          double degeneracy_tol = 1e-9);

// Frame for A_new inside the perturbation ball of frame0: requires
// ||A_new - A0|| < alpha, verifies |lambda| > mu, pairwise gaps > mu and
// max(||C||, ||C^{-1}||) <= 2 beta0; eigenvalues matched to frame0's order.
SpectralFrame perturbation_check(const SpectralFrame& frame0, const Eigen::MatrixXd& A_new);

// Both margin chains mu < |lambda| < mu_star and mu < |gap| < mu_star for A_m.
struct MarginVerdict {
    bool mu_ok = false;
    bool mu_star_ok = false;
};
MarginVerdict gerschgorin_margins(const SpectralFrame& frame, const Eigen::MatrixXd& A_m);

// Nearest-distance pairing of new eigenvalues against a reference ordering.
Eigen::VectorXcd match_eigenvalues(const Eigen::VectorXcd& reference,
                                   const Eigen::VectorXcd& fresh,
                                   std::vector<int>* perm = nullptr);

}  // namespace qpr

#endif
