#ifndef QPR_REDUCTIONS_HPP
#define QPR_REDUCTIONS_HPP

#include "qpr/averaging.hpp"

namespace qpr {

// Exponent bookkeeping for the parameter rescaling eps = eps_new^delta.
struct ExponentPlan {
    double a = 0.0, b = 0.0;   // input exponents, b > a > 0
    double delta = 1.0;        // rescaling power (minimal admissible)
    double a0 = 0.0, b0 = 0.0; // output exponents
    bool branch_b_ge_2a = true;
    double delta1 = 0.0;       // sweep-window exponent; 0 when a0 <= 1
};

// Minimal-delta plan: delta >= 1 with delta*a >= 1 when b = 2a, otherwise
// min{delta a, delta |b - 2a|, delta (b - a)} >= 1.
ExponentPlan rescale_general(double a, double b);

// Concrete realization of the rescaled system at the new parameter value:
// computes the second-order averaging remainder f1 and the transported g1 at
// eps = eps_new^delta and assembles f = f_bar, g = g2 per the plan's branch.
SystemSpec rescaled_at(const SystemSpec& spec, const ExponentPlan& plan, double eps_new);

struct SecondOrderResult {
    SystemSpec doubled;               // first-order system in (x, y), concrete at eps
    Eigen::VectorXd x_star;           // doubled equilibrium (x*, 0)
    Eigen::MatrixXd J_doubled;        // [[0, I], [DFbar0(x*), 0]]
    Eigen::VectorXcd base_spectrum;   // spectrum of DFbar0(x*)
    Eigen::VectorXcd doubled_spectrum;
    double match_error = 0.0;         // max |lambda^2 - nearest base eigenvalue|
    bool spectra_match = false;
    ExponentPlan plan;                // hand-off exponents for rescale_general
};

// Theorem-1.3 reduction of x'' = eps^a F(omega t, x, x') + eps^b G(...) to the
// doubled first-order system via x' = eps^{a/2} y, realized at a concrete eps.
// F and G are fields on the doubled state (x, y) with n = 2 nx and nx rows.
SecondOrderResult second_order_reduce(const TaylorFourierField& F,
                                      const TaylorFourierField& G, double a, double b,
                                      double epsilon, const Frequency& freq, double rho,
                                      double r, const Truncation& tr);

// Corollary-1.1 scaling x = tau^{1/1} ... x = eps^{1/l} y of the degenerate
// system dx/dt = eps(phi(x) + h(omega t, x) + f(omega t, x)) with phi
// homogeneous of degree l and h vanishing to order l + 1. Returns the system
// dy/dt = tau^{l-1} phi1(omega t, y) + tau^l g(omega t, y, tau) in the new
// parameter tau = eps^{1/l}, with exact polynomial tau-powers in g.
SystemSpec degenerate_scale(const TaylorFourierField& phi, const TaylorFourierField& h,
                            const TaylorFourierField& f, int l, const Frequency& freq,
                            double rho, double r, const Truncation& tr,
                            unsigned int seed = 12345);

}  // namespace qpr

#endif
