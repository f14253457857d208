#ifndef QPR_VARPI_HPP
#define QPR_VARPI_HPP

namespace qpr {

// varpi(tau, nu) = sum over nonzero k in Z^d of e^{-nu |k|} |k|^tau, evaluated
// by summing shells |k| = s with an analytic tail bound. Returns the sum plus
// the tail bound (so the value dominates the true series).
double varpi(int d, double tau, double nu);

// Number of lattice points in Z^d with |k|_1 = s (s >= 1).
double lattice_shell_count(int d, int s);

// Right side of the appendix bound 20d/(3 nu^{d+tau}) ((d+tau-1)/e)^{d+tau-1}
// sqrt(d+tau-1); requires 0 < nu <= 1, tau >= 1.
double varpi_upper_bound(int d, double tau, double nu);

}  // namespace qpr

#endif
