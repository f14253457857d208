#include "qpr/reductions.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace qpr {

namespace {

// Multiplies each coefficient by factor^(degree carried by variables [lo, hi)).
TaylorFourierField scale_variable_block(const TaylorFourierField& F, double factor, int lo,
                                        int hi) {
    TaylorFourierField r(F.n(), F.d(), F.rows(), F.cols(), F.rho(), F.is_real());
    for (const auto& [a, c] : F.coeffs()) {
        int j = 0;
        for (int l = lo; l < hi; ++l) j += a[l];
        r.set_coeff(a, c.scaled(std::pow(factor, j)));
    }
    return r;
}

int block_degree(const MultiIndex& a, int lo, int hi) {
    int j = 0;
    for (int l = lo; l < hi; ++l) j += a[l];
    return j;
}

TaylorFourierField block_slice(const TaylorFourierField& F, int lo, int hi, int deg) {
    TaylorFourierField r(F.n(), F.d(), F.rows(), F.cols(), F.rho(), F.is_real());
    for (const auto& [a, c] : F.coeffs())
        if (block_degree(a, lo, hi) == deg) r.set_coeff(a, c);
    return r;
}

// Stacks two nx-row fields over the same doubled state into a 2nx-row field.
TaylorFourierField stack_fields(const TaylorFourierField& top,
                                const TaylorFourierField& bottom) {
    int nx = top.rows();
    TaylorFourierField r(top.n(), top.d(), 2 * nx, 1, std::min(top.rho(), bottom.rho()),
                         top.is_real() && bottom.is_real());
    auto put = [&](const TaylorFourierField& F, int row_off) {
        for (const auto& [a, c] : F.coeffs()) {
            FourierSeries s(F.d(), 2 * nx, 1, c.rho(), c.is_real());
            for (const auto& [k, v] : c.coeffs()) {
                Mat m = Mat::Zero(2 * nx, 1);
                m.block(row_off, 0, nx, 1) = v;
                s.set_coeff(k, m);
            }
            r.add_coeff(a, s);
        }
    };
    put(top, 0);
    put(bottom, nx);
    return r;
}

}  // namespace

ExponentPlan rescale_general(double a, double b) {
    if (!(b > a) || a <= 0.0)
        throw config_error("rescale_general: exponents must satisfy b > a > 0");
    ExponentPlan p;
    p.a = a;
    p.b = b;
    double delta = std::max(1.0, 1.0 / a);
    if (b != 2.0 * a) {
        delta = std::max(delta, 1.0 / std::abs(b - 2.0 * a));
        delta = std::max(delta, 1.0 / (b - a));
    }
    p.delta = delta;
    p.a0 = delta * a;
    p.branch_b_ge_2a = b >= 2.0 * a;
    p.b0 = p.branch_b_ge_2a ? 2.0 * delta * a : delta * b;
    p.delta1 = p.a0 > 1.0 ? 1.0 + 0.5 / (p.a0 - 1.0) : 0.0;
    return p;
}

SystemSpec rescaled_at(const SystemSpec& spec, const ExponentPlan& plan, double eps_new) {
    if (eps_new <= 0.0 || eps_new >= 1.0)
        throw config_error("rescaled_at: eps_new must lie in (0, 1)");
    double eps_old = std::pow(eps_new, plan.delta);
    AveragingResult avg = averaging_transform(spec, eps_old);

    TaylorFourierField g2(spec.n, spec.d, spec.n, 1, spec.rho);
    if (plan.branch_b_ge_2a) {
        double fac = std::pow(eps_new, plan.delta * (spec.b - 2.0 * spec.a));
        g2 = avg.g1_f_part + avg.g1_g_part.scaled(fac);
    } else {
        double fac = std::pow(eps_new, plan.delta * (2.0 * spec.a - spec.b));
        g2 = avg.g1_f_part.scaled(fac) + avg.g1_g_part;
    }

    SystemSpec out;
    out.n = spec.n;
    out.d = spec.d;
    out.freq = spec.freq;
    out.f = spec.f.average();
    out.g_powers = {g2};
    out.a = plan.a0;
    out.b = plan.b0;
    out.rho = spec.rho;
    out.r = spec.r;
    out.trunc = spec.trunc;
    return out;
}

SecondOrderResult second_order_reduce(const TaylorFourierField& F,
                                      const TaylorFourierField& G, double a, double b,
                                      double epsilon, const Frequency& freq, double rho,
                                      double r, const Truncation& tr) {
    if (!(b > a) || a <= 0.0)
        throw config_error("second_order_reduce: exponents must satisfy b > a > 0");
    const int n2 = F.n();
    if (n2 % 2 != 0 || F.rows() * 2 != n2)
        throw shape_error("second_order_reduce: F must map a doubled state (x, x') to nx rows");
    const int nx = n2 / 2;
    const double eh = std::pow(epsilon, 0.5 * a);  // eps^{a/2}

    // F(theta, x, 0) and the velocity remainder F1 = eps^{-a/2}(F(x, eh y) - F(x, 0)).
    TaylorFourierField F0 = block_slice(F, nx, n2, 0);
    TaylorFourierField F1(n2, F.d(), nx, 1, F.rho(), F.is_real());
    for (const auto& [al, c] : F.coeffs()) {
        int j = block_degree(al, nx, n2);
        if (j >= 1) F1.add_coeff(al, c.scaled(std::pow(eh, j - 1)));
    }

    // f(theta, x, y) = (y, F(theta, x, 0)).
    TaylorFourierField top(n2, F.d(), nx, 1, F.rho(), true);
    for (int j = 0; j < nx; ++j) {
        Mat e = Mat::Zero(nx, 1);
        e(j, 0) = 1.0;
        top.set_coeff(unit_index(n2, nx + j), FourierSeries::constant(F.d(), e, F.rho()));
    }
    SecondOrderResult res;
    res.doubled.n = n2;
    res.doubled.d = F.d();
    res.doubled.freq = freq;
    res.doubled.f = stack_fields(top, F0);
    res.doubled.a = 0.5 * a;
    double b_new = std::min(a, b - 0.5 * a);
    res.doubled.b = b_new;
    res.doubled.rho = rho;
    res.doubled.r = r;
    res.doubled.trunc = tr;

    TaylorFourierField zero_top(n2, F.d(), nx, 1, F.rho(), true);
    TaylorFourierField g_accum = stack_fields(zero_top, F1).scaled(std::pow(epsilon, a - b_new));
    if (!G.empty()) {
        TaylorFourierField Gs = scale_variable_block(G, eh, nx, n2);
        g_accum = g_accum +
                  stack_fields(zero_top, Gs).scaled(std::pow(epsilon, (b - 0.5 * a) - b_new));
    }
    res.doubled.g_powers = {g_accum};

    // Equilibrium of the averaged doubled field is (x*, 0) with x* a zero of
    // Fbar0; Newton runs on the doubled field directly.
    TaylorFourierField fbar = res.doubled.f.average();
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n2);
    TaylorFourierField jac = fbar.jacobian();
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(F.d());
    Eigen::VectorXd x = x0;
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd fx = fbar.evaluate_real(theta, x).col(0);
        if (fx.lpNorm<Eigen::Infinity>() <= 1e-12) break;
        Eigen::MatrixXd J = jac.evaluate_real(theta, x);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        lu.setThreshold(1e-12);
        if (lu.rank() < n2)
            throw convergence_error("second_order_reduce: degenerate doubled Jacobian");
        x -= lu.solve(fx);
    }
    res.x_star = x;

    Eigen::MatrixXd Jd = jac.evaluate_real(theta, x);
    res.J_doubled = Jd;
    Eigen::MatrixXd DF = Jd.block(nx, 0, nx, nx);  // D Fbar0(x*)
    Eigen::EigenSolver<Eigen::MatrixXd> esb(DF);
    res.base_spectrum = esb.eigenvalues();
    Eigen::EigenSolver<Eigen::MatrixXd> esd(Jd);
    res.doubled_spectrum = esd.eigenvalues();

    double scale = std::max(1.0, res.base_spectrum.cwiseAbs().maxCoeff());
    for (int i = 0; i < nx; ++i) {
        if (std::abs(res.base_spectrum[i]) < 1e-10 * scale)
            throw spectrum_error("second_order_reduce: D Fbar0 has a numerically zero eigenvalue");
        for (int j = i + 1; j < nx; ++j)
            if (std::abs(res.base_spectrum[i] - res.base_spectrum[j]) < 1e-10 * scale)
                throw spectrum_error("second_order_reduce: D Fbar0 has a repeated eigenvalue");
    }
    double worst = 0.0;
    for (int i = 0; i < n2; ++i) {
        Complex l2 = res.doubled_spectrum[i] * res.doubled_spectrum[i];
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < nx; ++j) best = std::min(best, std::abs(l2 - res.base_spectrum[j]));
        worst = std::max(worst, best);
    }
    res.match_error = worst;
    res.spectra_match = worst <= 1e-10 * scale * scale + 1e-12;

    res.plan = rescale_general(res.doubled.a, res.doubled.b);
    return res;
}

SystemSpec degenerate_scale(const TaylorFourierField& phi, const TaylorFourierField& h,
                            const TaylorFourierField& f, int l, const Frequency& freq,
                            double rho, double r, const Truncation& tr, unsigned int seed) {
    if (l < 2) throw config_error("degenerate_scale: degeneracy order l must be >= 2");
    const int n = phi.n();
    const int d = phi.d();

    // Homogeneity of phi in the state, verified on random samples.
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ux(-1.0, 1.0), ul(0.5, 2.0),
        uth(0.0, 2.0 * M_PI);
    for (int s = 0; s < 32; ++s) {
        Eigen::VectorXd x(n), theta(d);
        for (int i = 0; i < n; ++i) x[i] = ux(rng);
        for (int i = 0; i < d; ++i) theta[i] = uth(rng);
        double lam = ul(rng);
        Eigen::MatrixXd lhs = phi.evaluate_real(theta, (lam * x).eval());
        Eigen::MatrixXd rhs = std::pow(lam, l) * phi.evaluate_real(theta, x);
        double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
        if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-10 * scale) {
            std::ostringstream os;
            os << "degenerate_scale: phi is not homogeneous of degree " << l
               << " (sample defect " << (lhs - rhs).cwiseAbs().maxCoeff() << ")";
            throw config_error(os.str());
        }
    }
    if (!h.empty() && h.deg_min() < l + 1)
        throw config_error("degenerate_scale: h must vanish to order l + 1");

    // phi1(theta, y) = phi(y) + f(theta, 0).
    SystemSpec out;
    out.n = n;
    out.d = d;
    out.freq = freq;
    out.f = phi;
    FourierSeries f0 = f.coeff(MultiIndex(n, 0));
    if (!f0.empty()) {
        TaylorFourierField c0(n, d, n, 1, phi.rho(), f0.is_real());
        c0.set_coeff(MultiIndex(n, 0), f0);
        out.f = out.f + c0;
    }

    // g(theta, y, tau) = tau^{-(l+1)} h(theta, tau y) + tau^{-1}(f(theta, tau y) - f(theta, 0)):
    // exact nonnegative tau-powers by degree bookkeeping.
    int pmax = std::max(h.empty() ? -1 : h.deg_max() - (l + 1),
                        f.empty() ? -1 : f.deg_max() - 1);
    for (int p = 0; p <= pmax; ++p) {
        TaylorFourierField gp(n, d, n, 1, phi.rho());
        if (!h.empty()) gp = gp + h.slice(p + l + 1);
        if (!f.empty()) gp = gp + f.slice(p + 1);
        out.g_powers.push_back(gp);
    }
    out.a = static_cast<double>(l - 1);
    out.b = static_cast<double>(l);
    out.rho = rho;
    out.r = r;
    out.trunc = tr;
    return out;
}

}  // namespace qpr
