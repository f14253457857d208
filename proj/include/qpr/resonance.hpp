#ifndef QPR_RESONANCE_HPP
#define QPR_RESONANCE_HPP

#include <complex>
#include <functional>
#include <vector>

#include "qpr/kam.hpp"

namespace qpr {

// One epsilon grid cell of a resonance scan with the worst divisor margin
// found at its sample point.
struct CellFlag {
    double eps_lo = 0.0, eps_hi = 0.0;
    bool flagged = false;
    int m = -1;  // iteration depth of the worst margin / failure
    MultiIndex worst_k;
    double lhs = 0.0, rhs = 0.0;
};

// Scans |i<k,omega> - phi(eps)| against the depth-m threshold over the cell
// midpoints of (0, delta) split into `cells` cells.
std::vector<CellFlag> resonant_set_scan(const Frequency& freq,
                                        const std::function<Complex(double)>& phi,
                                        double delta, const Schedule& s, int m, int K_trunc,
                                        int cells);

struct ResonanceScan {
    double eps1 = 0.0;
    int cells = 0;
    std::vector<CellFlag> flags;     // one entry per cell, union over m and checks
    double excluded_measure = 0.0;   // total width of flagged cells
    double excluded_fraction = 0.0;  // measure / eps1
};

// Runs the engine on each cell midpoint; a resonant-epsilon failure flags the
// cell. Engine failures other than resonance (divergence etc.) also flag, with
// m = -2. threads <= 1 means serial.
ResonanceScan excluded_parameters(const SystemSpec& spec, const Eigen::VectorXd& x_star,
                                  const SpectralFrame& frame, double eps1, int cells,
                                  const Schedule& s, const KamOptions& opt = {},
                                  int threads = 1);

// Largest a1 >= 0 with measure_i <= delta_i exp(-a1 / delta_i^{a2}) for every
// supplied (delta, measure) pair; +inf when every measure is zero.
double fit_majorant_a1(const std::vector<std::pair<double, double>>& delta_measure, double a2);

// Right side of the (2.68)-shaped estimate a3 * Meas(R(mu_star * eps1)) with
// the Lemma 2.6 majorant substituted for Meas(R(.)).
double measure_bound(double a1, double a2, double a3, double mu_star, double eps1);

struct SeparationVerdict {
    bool pass = true;
    double worst_ratio = 0.0;  // min over pairs of lhs / (threshold per unit gap)
    double eps_a = 0.0, eps_b = 0.0;
};

// Two-point check |e' lam(e') - e'' lam(e'')| >= (mu/2) |e' - e''| over all
// grid pairs of an eigenvalue curve.
SeparationVerdict lipschitz_separation_check(
    const std::vector<std::pair<double, Complex>>& curve, double mu);

// Exponent-a0 variant: threshold eps1^{a0} |e' - e''|, restricted to samples
// inside (eps1^{delta1}, eps1).
SeparationVerdict lipschitz_separation_check(
    const std::vector<std::pair<double, Complex>>& curve, double eps1, double a0,
    double delta1);

}  // namespace qpr

#endif
