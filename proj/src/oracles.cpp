#include "qpr/oracles.hpp"

#include <cmath>

namespace qpr {

double residual(const SystemSpec& spec, const FourierSeries& candidate, double epsilon,
                int grid_size) {
    if (grid_size < 8) throw config_error("residual: grid_size must be >= 8 per angle");
    const int d = spec.d;
    FourierSeries deriv = candidate.omega_derivative(spec.freq);
    TaylorFourierField g = spec.g_at(epsilon);
    const double ea = std::pow(epsilon, spec.a);
    const double eb = std::pow(epsilon, spec.b);

    double worst = 0.0;
    std::vector<int> idx(d, 0);
    Eigen::VectorXd theta(d);
    while (true) {
        for (int i = 0; i < d; ++i) theta[i] = 2.0 * M_PI * idx[i] / grid_size;
        Eigen::VectorXd x = candidate.evaluate_real(theta).col(0);
        Eigen::VectorXd v = deriv.evaluate_real(theta).col(0);
        v -= ea * spec.f.evaluate_real(theta, x).col(0);
        if (!g.empty()) v -= eb * g.evaluate_real(theta, x).col(0);
        worst = std::max(worst, v.lpNorm<Eigen::Infinity>());
        int i = 0;
        for (; i < d; ++i) {
            if (++idx[i] < grid_size) break;
            idx[i] = 0;
        }
        if (i == d) break;
    }
    return worst;
}

FourierSeries linear_fourier_oracle(const Eigen::MatrixXd& A, const FourierSeries& v,
                                    double epsilon, const Frequency& freq) {
    const int n = static_cast<int>(A.rows());
    Mat Ac = A.cast<Complex>();
    FourierSeries x(freq.d(), n, 1, v.rho(), v.is_real());
    for (const auto& [k, vk] : v.coeffs()) {
        Mat M = Complex(0.0, freq.dot(k)) * Mat::Identity(n, n) - epsilon * Ac;
        Eigen::FullPivLU<Mat> lu(M);
        if (!lu.isInvertible())
            throw small_divisor_error("linear_fourier_oracle: singular resolvent", k, 0.0);
        x.set_coeff(k, (epsilon * lu.solve(vk)).eval());
    }
    return x;
}

IntegrationResult integrate_oracle(const SystemSpec& spec, const Eigen::VectorXd& x0,
                                   double epsilon, double T, double dt,
                                   const FourierSeries& candidate,
                                   double transient_fraction) {
    if (dt <= 0.0 || dt > T) throw config_error("integrate_oracle: invalid step size");
    const double ea = std::pow(epsilon, spec.a);
    const double eb = std::pow(epsilon, spec.b);
    TaylorFourierField g = spec.g_at(epsilon);

    auto rhs = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd theta = spec.freq.omega * t;
        Eigen::VectorXd v = ea * spec.f.evaluate_real(theta, x).col(0);
        if (!g.empty()) v += eb * g.evaluate_real(theta, x).col(0);
        return v;
    };

    IntegrationResult res;
    const int steps = static_cast<int>(std::llround(T / dt));
    res.times.reserve(steps + 1);
    res.states.reserve(steps + 1);
    Eigen::VectorXd x = x0;
    double t = 0.0;
    res.times.push_back(t);
    res.states.push_back(x);
    for (int s = 0; s < steps; ++s) {
        Eigen::VectorXd k1 = rhs(t, x);
        Eigen::VectorXd k2 = rhs(t + 0.5 * dt, x + 0.5 * dt * k1);
        Eigen::VectorXd k3 = rhs(t + 0.5 * dt, x + 0.5 * dt * k2);
        Eigen::VectorXd k4 = rhs(t + dt, x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += dt;
        if (!x.allFinite() || x.lpNorm<Eigen::Infinity>() > 1e8)
            throw convergence_error("integrate_oracle: trajectory blow-up");
        res.times.push_back(t);
        res.states.push_back(x);
    }

    if (!candidate.empty()) {
        std::size_t start =
            static_cast<std::size_t>(transient_fraction * res.times.size());
        double worst = 0.0;
        for (std::size_t s = start; s < res.times.size(); ++s) {
            Eigen::VectorXd theta = spec.freq.omega * res.times[s];
            Eigen::VectorXd xc = candidate.evaluate_real(theta).col(0);
            worst = std::max(worst, (res.states[s] - xc).lpNorm<Eigen::Infinity>());
        }
        res.shadowing_distance = worst;
    }
    return res;
}

}  // namespace qpr
