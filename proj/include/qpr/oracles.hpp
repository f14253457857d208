#ifndef QPR_ORACLES_HPP
#define QPR_ORACLES_HPP

#include "qpr/averaging.hpp"

namespace qpr {

// Sup over a uniform theta-grid (grid_size points per angle) of
// || <omega, grad_theta X> - eps^a f(theta, X) - eps^b g(theta, X, eps) ||.
double residual(const SystemSpec& spec, const FourierSeries& candidate, double epsilon,
                int grid_size);

// Exact response of dx/dt = eps (A x + v(omega t)): coefficientwise resolvent
// x_k = eps (i<k,omega> I - eps A)^{-1} v_k; the k = 0 mode gives -A^{-1} v_0.
FourierSeries linear_fourier_oracle(const Eigen::MatrixXd& A, const FourierSeries& v,
                                    double epsilon, const Frequency& freq);

struct IntegrationResult {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    double shadowing_distance = 0.0;  // vs candidate, transient discarded
};

// Fixed-step RK4 on dx/dt = eps^a f(omega t, x) + eps^b g(omega t, x, eps).
// transient_fraction of the samples is discarded before measuring the
// shadowing distance to candidate(omega t); pass an empty candidate to skip.
IntegrationResult integrate_oracle(const SystemSpec& spec, const Eigen::VectorXd& x0,
                                   double epsilon, double T, double dt,
                                   const FourierSeries& candidate = {},
                                   double transient_fraction = 0.2);

}  // namespace qpr

#endif
