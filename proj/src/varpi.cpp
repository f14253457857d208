#include "qpr/varpi.hpp"

#include <cmath>
#include <stdexcept>

namespace qpr {

namespace {

double binom(int a, int b) {
    if (b < 0 || b > a) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
}

}  // namespace

double lattice_shell_count(int d, int s) {
    // Points with |k|_1 = s and exactly j nonzero components, each of either sign.
    double total = 0.0;
    for (int j = 1; j <= std::min(d, s); ++j)
        total += std::ldexp(1.0, j) * binom(d, j) * binom(s - 1, j - 1);
    return total;
}

double varpi(int d, double tau, double nu) {
    if (nu <= 0.0) throw std::domain_error("varpi: width must be positive");
    double sum = 0.0;
    double prev = 0.0;
    int s = 0;
    const int s_cap = 2000000;
    while (++s <= s_cap) {
        double t = lattice_shell_count(d, s) * std::pow(static_cast<double>(s), tau) *
                   std::exp(-nu * s);
        sum += t;
        // q(s) bounds the shell-to-shell ratio from above once s > d.
        double q = std::exp(-nu) * std::pow((s + 1.0) / s, tau) * (s / double(s - d + 1));
        if (s > d && q < 0.999 && (t == 0.0 || t < 1e-17 * sum)) {
            sum += t * q / (1.0 - q);  // geometric tail bound
            break;
        }
        prev = t;
    }
    (void)prev;
    return sum;
}

double varpi_upper_bound(int d, double tau, double nu) {
    if (nu <= 0.0 || nu > 1.0 || tau < 1.0)
        throw std::domain_error("varpi_upper_bound: needs 0 < nu <= 1 and tau >= 1");
    double e = d + tau - 1.0;
    return 20.0 * d / (3.0 * std::pow(nu, d + tau)) * std::pow(e / std::exp(1.0), e) *
           std::sqrt(e);
}

}  // namespace qpr
