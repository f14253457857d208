#ifndef QPR_AVERAGING_HPP
#define QPR_AVERAGING_HPP

#include <vector>

#include "qpr/spectra.hpp"
#include "qpr/taylor_fourier.hpp"

namespace qpr {

// Perturbed quasi-periodic system dx/dt = eps^a f(omega t, x) + eps^b g(omega t, x, eps).
// g is polynomial in eps: g = sum_j eps^j g_powers[j].
struct SystemSpec {
    int n = 0, d = 0;
    Frequency freq;
    TaylorFourierField f;                       // deg_min = 0, n-vector valued
    std::vector<TaylorFourierField> g_powers;   // by eps power; may be empty
    double a = 1.0, b = 2.0;
    double rho = 1.0;    // analyticity width
    double r = 1.0;      // state radius of validity
    Truncation trunc;

    void validate(int k_check) const;
    TaylorFourierField g_at(double eps) const;
};

// Recentered first-order normal form dz/dt = eps (A + eps B(t)) z + eps^2 p(t) + eps h(t,z).
struct NormalForm {
    Eigen::MatrixXd A;
    FourierSeries B;        // n x n matrix series (eps already substituted)
    FourierSeries p;        // n-vector series
    TaylorFourierField h;   // deg_min = 2
    double epsilon = 0.0;
    double rho = 0.0;
    double r = 0.0;
};

// k = 0 Fourier slice of every state coefficient of f (the averaged field).
TaylorFourierField compute_average(const TaylorFourierField& f);

struct EquilibriumResult {
    Eigen::VectorXd x_star;
    SpectralFrame frame;
    int iterations = 0;
};

// Newton iteration on the averaged field from x_init, then diagonalization of
// the Jacobian there (margin_fraction fixed at 0.8 per the engine default).
EquilibriumResult find_equilibrium(const TaylorFourierField& f_bar,
                                   const Eigen::VectorXd& x_init, double tol = 1e-12,
                                   int max_iter = 50, double margin_fraction = 0.8);

struct AveragingResult {
    TaylorFourierField u;    // solution of du/dt = f - f_bar
    TaylorFourierField g1;   // transformed remainder (four-term assembly)
    double u_norm = 0.0;          // majorant of u at width rho
    double du_norm_bound = 0.0;   // Cauchy bound on ||du/dx||
    double neumann_margin = 0.0;  // eps * ||du/dx|| (must stay <= 1/2)
    // Split kept for the exponent-rescaling path: g1 = f_part + g_part where
    // f_part collects the f-induced terms (extra factor eps^a each) and g_part
    // the transported g term.
    TaylorFourierField g1_f_part;
    TaylorFourierField g1_g_part;
};

// Lemma-2.1-style averaging transform x = y + eps u(t, y) at a concrete eps.
// neumann_order controls the truncation of (I + eps du/dx)^{-1}.
AveragingResult averaging_transform(const SystemSpec& spec, double epsilon,
                                    int neumann_order = 8);

// Taylor expansion of the transformed system at the equilibrium, recentered by
// y = z + x_star.
NormalForm to_normal_form(const SystemSpec& spec, const Eigen::VectorXd& x_star,
                          const SpectralFrame& frame, const TaylorFourierField& g1,
                          double epsilon);

}  // namespace qpr

#endif
