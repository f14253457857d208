#ifndef QPR_TEST_HELPERS_HPP
#define QPR_TEST_HELPERS_HPP

#include <random>

#include "qpr/averaging.hpp"
#include "qpr/kam.hpp"

namespace qpr::testing {

inline Frequency golden_freq() {
    Frequency fr;
    fr.omega = Eigen::VectorXd(2);
    fr.omega << 1.0, 0.5 * (1.0 + std::sqrt(5.0));
    fr.gamma = 0.1;
    fr.tau = 1.2;
    return fr;
}

// Elliptic demo: dx/dt = eps f(omega t, x), f = A x + (cos theta_1) e_1 with
// A = [[0,1],[-1,0]]; the nonlinear variant adds h(x) = (x_2^2, x_1 x_2).
inline SystemSpec linear_demo() {
    SystemSpec spec;
    spec.n = 2;
    spec.d = 2;
    spec.freq = golden_freq();
    spec.a = 1.0;
    spec.b = 2.0;
    spec.rho = 1.0;
    spec.r = 1.0;
    spec.trunc = Truncation{30, 6};

    TaylorFourierField f(2, 2, 2, 1, 2.0);
    Mat e1 = Mat::Zero(2, 1), e2 = Mat::Zero(2, 1);
    e1(0, 0) = 1.0;
    e2(1, 0) = 1.0;
    FourierSeries c10(2, 2, 1, 2.0), c01(2, 2, 1, 2.0), v(2, 2, 1, 2.0);
    c10.set_coeff({0, 0}, -e2);  // d/dt x_1 ... column for alpha=(1,0): (0,-1)
    c01.set_coeff({0, 0}, e1);   // alpha=(0,1): (1,0)
    v.set_coeff({1, 0}, 0.5 * e1);
    v.set_coeff({-1, 0}, 0.5 * e1);
    f.set_coeff({1, 0}, c10);
    f.set_coeff({0, 1}, c01);
    f.set_coeff({0, 0}, v);
    spec.f = f;
    return spec;
}

inline SystemSpec nonlinear_demo() {
    SystemSpec spec = linear_demo();
    Mat e1 = Mat::Zero(2, 1), e2 = Mat::Zero(2, 1);
    e1(0, 0) = 1.0;
    e2(1, 0) = 1.0;
    FourierSeries c02(2, 2, 1, 2.0), c11(2, 2, 1, 2.0);
    c02.set_coeff({0, 0}, e1);  // x_2^2 in the first component
    c11.set_coeff({0, 0}, e2);  // x_1 x_2 in the second
    TaylorFourierField f = spec.f;
    f.set_coeff({0, 2}, c02);
    f.set_coeff({1, 1}, c11);
    spec.f = f;
    return spec;
}

inline Schedule demo_schedule() {
    Schedule s;
    s.rho0 = 1.0;
    s.c0 = 0.2;
    s.kappa = 1.5;
    s.tau = 1.2;
    s.K_trunc = 30;
    s.deg_max = 6;
    s.m_max = 12;
    s.p_tol = 1e-14;
    return s;
}

inline Eigen::VectorXd random_angles(int d, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(0.0, 2.0 * M_PI);
    Eigen::VectorXd th(d);
    for (int i = 0; i < d; ++i) th(i) = dist(rng);
    return th;
}

inline Eigen::VectorXd random_vector(int n, double scale, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
}

}  // namespace qpr::testing

#endif
