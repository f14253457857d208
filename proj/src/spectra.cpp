#include "qpr/spectra.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "qpr/errors.hpp"

namespace qpr {

double mat_inf_norm(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    if (m.cols() == 1) return m.cwiseAbs().maxCoeff();
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double mat_inf_norm(const Eigen::MatrixXd& m) { return mat_inf_norm(m.cast<std::complex<double>>().eval()); }

double SpectralFrame::diag_residual() const {
    Eigen::MatrixXcd D = lambdas.asDiagonal();
    return mat_inf_norm((C_inv * A * C - D).eval());
}

double spectral_separation(const Eigen::VectorXcd& lambdas) {
    double m = std::numeric_limits<double>::infinity();
    int n = static_cast<int>(lambdas.size());
    for (int i = 0; i < n; ++i) {
        m = std::min(m, std::abs(lambdas[i]));
        for (int j = i + 1; j < n; ++j) m = std::min(m, std::abs(lambdas[i] - lambdas[j]));
    }
    return m;
}

double spectral_spread(const Eigen::VectorXcd& lambdas) {
    double m = 0.0;
    int n = static_cast<int>(lambdas.size());
    for (int i = 0; i < n; ++i) {
        m = std::max(m, std::abs(lambdas[i]));
        for (int j = i + 1; j < n; ++j) m = std::max(m, std::abs(lambdas[i] - lambdas[j]));
    }
    return m;
}

namespace {

// Deterministic column normalization: unit infinity norm with the largest
// entry made real positive.
void normalize_columns(Eigen::MatrixXcd& C) {
    for (int j = 0; j < C.cols(); ++j) {
        int imax = 0;
        double amax = 0.0;
        for (int i = 0; i < C.rows(); ++i) {
            double a = std::abs(C(i, j));
            if (a > amax) {
                amax = a;
                imax = i;
            }
        }
        if (amax > 0.0) C.col(j) /= C(imax, j);
    }
}

}  // namespace

Eigen::VectorXcd match_eigenvalues(const Eigen::VectorXcd& reference,
                                   const Eigen::VectorXcd& fresh, std::vector<int>* perm) {
    int n = static_cast<int>(reference.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<int> best = idx;
    if (n <= 8) {
        double best_cost = std::numeric_limits<double>::infinity();
        std::vector<int> p = idx;
        std::sort(p.begin(), p.end());
        do {
            double c = 0.0;
            for (int i = 0; i < n; ++i) c += std::abs(reference[i] - fresh[p[i]]);
            if (c < best_cost) {
                best_cost = c;
                best = p;
            }
        } while (std::next_permutation(p.begin(), p.end()));
    } else {
        // Greedy nearest-neighbor fallback.
        std::vector<bool> used(n, false);
        for (int i = 0; i < n; ++i) {
            int jbest = -1;
            double dbest = std::numeric_limits<double>::infinity();
            for (int j = 0; j < n; ++j) {
                if (used[j]) continue;
                double d = std::abs(reference[i] - fresh[j]);
                if (d < dbest) {
                    dbest = d;
                    jbest = j;
                }
            }
            used[jbest] = true;
            best[i] = jbest;
        }
    }
    Eigen::VectorXcd out(n);
    for (int i = 0; i < n; ++i) out[i] = fresh[best[i]];
    if (perm) *perm = best;
    return out;
}

SpectralFrame diagonalize(const Eigen::MatrixXd& A, double margin_fraction,
                          double degeneracy_tol) {
    if (margin_fraction <= 0.0 || margin_fraction >= 1.0)
        throw std::invalid_argument("diagonalize: margin_fraction must lie in (0,1)");
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw spectrum_error("diagonalize: eigensolver failed");
    Eigen::VectorXcd lambdas = es.eigenvalues();
    Eigen::MatrixXcd C = es.eigenvectors();

    int n = static_cast<int>(A.rows());
    double scale = std::max(mat_inf_norm(A), 1.0);
    for (int i = 0; i < n; ++i) {
        if (std::abs(lambdas[i]) < degeneracy_tol * scale)
            throw spectrum_error("diagonalize: eigenvalue numerically zero");
        for (int j = i + 1; j < n; ++j)
            if (std::abs(lambdas[i] - lambdas[j]) < degeneracy_tol * scale)
                throw spectrum_error("diagonalize: repeated eigenvalue within tolerance");
    }

    // Deterministic ordering: by real part, then imaginary part.
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (lambdas[a].real() != lambdas[b].real()) return lambdas[a].real() < lambdas[b].real();
        return lambdas[a].imag() < lambdas[b].imag();
    });
    Eigen::VectorXcd lam(n);
    Eigen::MatrixXcd Cs(n, n);
    for (int i = 0; i < n; ++i) {
        lam[i] = lambdas[idx[i]];
        Cs.col(i) = C.col(idx[i]);
    }
    normalize_columns(Cs);

    SpectralFrame f;
    f.A = A;
    f.lambdas = lam;
    f.C = Cs;
    f.C_inv = Cs.inverse();
    f.beta0 = std::max(mat_inf_norm(f.C), mat_inf_norm(f.C_inv));
    f.mu = margin_fraction * 0.5 * spectral_separation(lam);
    f.mu_star = 1.01 * spectral_spread(lam);
    f.alpha = 2.0 * f.mu / ((3.0 * n - 1.0) * f.beta0 * f.beta0);

    double resid = f.diag_residual();
    if (resid > 1e-10 * std::max(mat_inf_norm(A), 1.0))
        throw spectrum_error("diagonalize: similarity residual too large");
    return f;
}

SpectralFrame perturbation_check(const SpectralFrame& frame0, const Eigen::MatrixXd& A_new) {
    double dist = mat_inf_norm((A_new - frame0.A).eval());
    if (dist >= frame0.alpha) {
        std::ostringstream os;
        os << "perturbation_check: ||A_new - A0|| = " << dist << " >= alpha = " << frame0.alpha;
        throw outside_ball_error(os.str());
    }
    if (dist == 0.0) return frame0;

    Eigen::EigenSolver<Eigen::MatrixXd> es(A_new);
    if (es.info() != Eigen::Success)
        throw spectrum_error("perturbation_check: eigensolver failed");
    std::vector<int> perm;
    Eigen::VectorXcd lam = match_eigenvalues(frame0.lambdas, es.eigenvalues(), &perm);
    Eigen::MatrixXcd C(frame0.n(), frame0.n());
    for (int i = 0; i < frame0.n(); ++i) C.col(i) = es.eigenvectors().col(perm[i]);
    normalize_columns(C);

    SpectralFrame f;
    f.A = A_new;
    f.lambdas = lam;
    f.C = C;
    f.C_inv = C.inverse();
    f.beta0 = frame0.beta0;
    f.mu = frame0.mu;
    f.mu_star = frame0.mu_star;
    f.alpha = frame0.alpha;

    if (spectral_separation(lam) <= f.mu)
        throw convergence_error("perturbation_check: mu-separation violated inside the ball");
    double cond = std::max(mat_inf_norm(f.C), mat_inf_norm(f.C_inv));
    if (cond > 2.0 * frame0.beta0)
        throw convergence_error("perturbation_check: diagonalizer conditioning exceeds 2 beta0");
    return f;
}

MarginVerdict gerschgorin_margins(const SpectralFrame& frame, const Eigen::MatrixXd& A_m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A_m);
    Eigen::VectorXcd lam = es.eigenvalues();
    MarginVerdict v;
    v.mu_ok = spectral_separation(lam) > frame.mu;
    v.mu_star_ok = spectral_spread(lam) < frame.mu_star;
    return v;
}

}  // namespace qpr
