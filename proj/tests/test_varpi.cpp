#include <cmath>
#include <initializer_list>

#include <doctest.h>

#include "qpr/varpi.hpp"

using namespace qpr;

TEST_CASE("lattice shell counts") {
    // d = 1: exactly two modes (+s, -s) per shell.
    CHECK(lattice_shell_count(1, 1) == 2.0);
    CHECK(lattice_shell_count(1, 7) == 2.0);
    // d = 2: |k|_1 = s has 4s points.
    CHECK(lattice_shell_count(2, 1) == 4.0);
    CHECK(lattice_shell_count(2, 3) == 12.0);
    // d = 3, s = 1: the six signed unit vectors.
    CHECK(lattice_shell_count(3, 1) == 6.0);
}

TEST_CASE("varpi(1, 1) at d = 1 matches the closed form") {
    // sum over k != 0 of e^{-|k|} |k| = 2 sum_{s>=1} s e^{-s} = 2 e^{-1}/(1-e^{-1})^2.
    double x = std::exp(-1.0);
    double exact = 2.0 * x / ((1.0 - x) * (1.0 - x));
    CHECK(exact == doctest::Approx(1.841347).epsilon(1e-6));
    double v = varpi(1, 1.0, 1.0);
    // The implementation adds a tail bound, so it dominates the true value.
    CHECK(v >= exact - 1e-12);
    CHECK(v == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("varpi geometric closed forms at tau = 0") {
    // tau = 0: plain geometric sums. d = 1: 2 x/(1-x).
    double x = std::exp(-0.5);
    double exact = 2.0 * x / (1.0 - x);
    CHECK(varpi(1, 0.0, 0.5) == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("appendix upper bound majorizes varpi on the grid") {
    // 20 d/(3 nu^{d+tau}) ((d+tau-1)/e)^{d+tau-1} sqrt(d+tau-1), valid for
    // 0 < nu <= 1, tau >= 1.
    CHECK(varpi_upper_bound(1, 1.0, 1.0) == doctest::Approx(20.0 / (3.0 * std::exp(1.0))));
    CHECK(varpi_upper_bound(1, 1.0, 1.0) >= varpi(1, 1.0, 1.0));

    for (int d = 1; d <= 2; ++d)
        for (double tau : {1.0, 2.0, 3.0})
            for (double nu : {0.5, 1.0}) {
                CAPTURE(d);
                CAPTURE(tau);
                CAPTURE(nu);
                CHECK(varpi(d, tau, nu) <= varpi_upper_bound(d, tau, nu));
            }
}

TEST_CASE("varpi is monotone: decreasing in nu, increasing in tau") {
    CHECK(varpi(2, 1.5, 0.3) > varpi(2, 1.5, 0.6));
    CHECK(varpi(2, 2.5, 0.5) > varpi(2, 1.5, 0.5));
}
