#ifndef QPR_KAM_HPP
#define QPR_KAM_HPP

#include <cmath>
#include <string>
#include <vector>

#include "qpr/averaging.hpp"
#include "qpr/spectra.hpp"
#include "qpr/taylor_fourier.hpp"

namespace qpr {

// Width/exponent schedules of the iteration. rho_m loses rho0/(4 m^2) per
// step, the intermediate sigma_m sits between rho_{m+1} and rho_m, nu_m is the
// Diophantine softening width and tau_m = tau * kappa^m the growing exponent.
struct Schedule {
    double rho0 = 1.0;
    double c0 = 0.2;     // in (0, 1/4)
    double kappa = 1.5;  // in (1, 2)
    double tau = 1.2;    // base Diophantine exponent
    int K_trunc = 30;
    int deg_max = 6;
    int m_max = 12;
    double p_tol = 1e-14;

    void validate() const;
    double rho(int m) const;      // rho_m
    double sigma(int m) const;    // sigma_m
    double nu(int m) const;       // nu_m
    double tau_m(int m) const;    // tau * kappa^m
    double rho_limit() const { return rho0 * (1.0 - M_PI * M_PI / 24.0); }
    Truncation trunc() const { return Truncation{K_trunc, deg_max}; }
};

struct ScheduleValues {
    double rho_m, sigma_m, nu_m, tau_m, rho_next;
};
ScheduleValues schedule_params(const Schedule& s, int m);

// Verdict of a truncated small-divisor scan; worst offender retained.
struct DioVerdict {
    bool pass = true;
    MultiIndex worst_k;
    int i = -1, j = -1;  // j = -1 for the first (single-eigenvalue) check
    double lhs = 0.0, rhs = 0.0;
    double margin() const { return lhs - rhs; }
};

// |i<k,omega> - eps lambda_i| >= (gamma/2) |k|^{-tau_m} e^{-nu_m |k|}.
DioVerdict check_diophantine_first(const SpectralFrame& frame, const Frequency& freq,
                                   double epsilon, const Schedule& s, int m, int K_trunc);
// Same with eps (lambda_i - lambda_j) over ordered pairs i != j.
DioVerdict check_diophantine_second(const SpectralFrame& frame, const Frequency& freq,
                                    double epsilon, const Schedule& s, int m, int K_trunc);

// One normal-form iterate dz/dt = eps (A + eps^{2^m} B) z + eps^{2^m + 1} p + eps h.
struct KamState {
    int m = 0;
    double epsilon = 0.0;
    Eigen::MatrixXd A;
    FourierSeries B;       // n x n, zero mean
    FourierSeries p;       // n-vector
    TaylorFourierField h;  // deg_min = 2
    double r = 0.0;
    double K = 0.0;        // curvature bound on h
    SpectralFrame frame;   // frame for A

    double eps_m() const;  // epsilon^{2^m}
    // Field value eps(A + eps_m B)z + eps_m eps p + eps h at a point.
    Mat eval_field(const Eigen::VectorXd& theta, const Eigen::VectorXcd& z) const;
};

// Initial state from the recentered normal form; absorbs mean(B) into A so the
// zero-mean invariant holds from m = 0 on.
KamState initial_state(const NormalForm& nf, const SpectralFrame& base_frame,
                       const Schedule& s);

struct HomologicalSolution {
    FourierSeries u_true;    // the shift, O(eps^{2^m})
    FourierSeries u_scaled;  // u_true / eps^{2^m}, O(1)
    double residual = 0.0;   // max coefficient norm of du/dt - eps A u - eps p (scaled form)
};
// Lemma-2.2 shifted homological solve in the diagonal frame.
HomologicalSolution solve_shifted_homological(const KamState& state, const Frequency& freq,
                                              const Schedule& s);

struct StarredState {
    Eigen::MatrixXd A;
    FourierSeries B;
    FourierSeries p;  // new forcing, prefactor eps^{2^{m+1}} eps
    TaylorFourierField h;
    double r = 0.0;
    SpectralFrame frame;  // filled by the caller via perturbation_check
};
// Lemma-2.3 shift z -> u + z; starred system without its frame.
StarredState shift_transform(const KamState& state, const HomologicalSolution& u,
                             const Schedule& s);

struct SylvesterSolution {
    FourierSeries S_true;    // O(eps^{2^m})
    FourierSeries S_scaled;  // S_true / eps^{2^m}
    double residual = 0.0;   // scaled-equation residual, max coefficient norm
};
// Lemma-2.4 solve of dS/dt = eps A* S - eps S A* + eps^{2^m} B*.
SylvesterSolution solve_sylvester(const StarredState& star, const Frequency& freq,
                                  double epsilon, int m, const Schedule& s);

// Lemma-2.5 change y = (I + eps S) z; produces state m+1 (frame left empty,
// caller re-frames via perturbation_check).
KamState linear_transform(const KamState& state, const StarredState& star,
                          const SylvesterSolution& syl, const Schedule& s,
                          int neumann_order);

// ---------------------------------------------------------------------------
// Bounds ledger

struct LedgerRow {
    int m = 0;
    double rho_m = 0, sigma_m = 0, nu_m = 0, tau_m = 0, rho_next = 0;
    // varpi values and their Lemma A.2 majorants (bound < 0 means the lemma's
    // hypotheses 0 < nu <= 1, tau >= 1 did not apply).
    double varpi_nu = 0, varpi_nu_bound = -1;
    double varpi_s = 0, varpi_s_bound = -1;
    double L1 = 0, L2 = 0;
    double E1 = 0, E2 = 0, E3 = 0, E4 = 0;
    // measured majorant norms
    double p_norm = 0, B_norm = 0, u_norm = 0, S_norm = 0;
    double Bstar_norm = 0, pstar_norm = 0;
    double r_m = 0, K_m = 0;
    double hom_residual = 0, syl_residual = 0;
    DioVerdict dio1, dio2;
    // inequality verdicts: lhs <= rhs pairs, all recorded explicitly
    struct Check {
        const char* name = "";
        double lhs = 0, rhs = 0;
        bool ok = false;
        bool effective = false;  // uses configured effective constants
    };
    std::vector<Check> checks;
    bool all_ok() const;
};

struct BoundsLedger {
    std::vector<LedgerRow> rows;
    bool all_ok() const;
    std::vector<std::string> failures() const;
};

struct KamOptions {
    bool strict_ledger = false;
    int neumann_order = 8;
    double M_eff[4] = {1.0, 1.0, 1.0, 1.0};  // effective constants for E1..E4
    double residual_tol = 1e-12;             // solver-exactness guard
};

// Schedule/varpi columns and the Lemma 2.2/2.3/2.4 inequality checks for one
// step; measured norms must already be filled in by the engine.
void ledger_step(LedgerRow& row, const Schedule& s, const Frequency& freq, double epsilon,
                 const SpectralFrame& frame, const KamOptions& opt);

// ---------------------------------------------------------------------------
// Driver

struct IterationRow {
    int m = 0;
    double p_norm = 0, B_norm = 0, u_norm = 0, S_norm = 0, r_m = 0, K_m = 0;
    double eff_p = 0;  // eps^{2^m + 1} ||p_m||
    double eff_B = 0;  // eps^{2^m} ||B_m||
};

struct KamReport {
    bool converged = false;
    int m_final = 0;
    Eigen::MatrixXd A_inf;
    TaylorFourierField h_inf;
    FourierSeries Phi;       // accumulated linear transform
    FourierSeries Psi;       // accumulated affine offset (z_0 at z_inf = 0)
    FourierSeries response;  // x(t) = x* + Psi + eps^a u(t, x* + Psi)
    Eigen::VectorXd x_star;
    double epsilon = 0.0;
    std::vector<IterationRow> table;
    BoundsLedger ledger;
};

// Full pipeline from an averaged equilibrium: averaging transform, normal
// form, then the quadratic iteration with transform composition.
KamReport run_kam(const SystemSpec& spec, const Eigen::VectorXd& x_star,
                  const SpectralFrame& frame, const Schedule& s, double epsilon,
                  const KamOptions& opt = {});

// Convenience: equilibrium search + run_kam.
KamReport run_kam(const SystemSpec& spec, const Schedule& s, double epsilon,
                  const KamOptions& opt = {});

}  // namespace qpr

#endif
