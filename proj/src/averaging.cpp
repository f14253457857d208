#include "qpr/averaging.hpp"

#include <cmath>
#include <sstream>

#include "qpr/varpi.hpp"

namespace qpr {

void SystemSpec::validate(int k_check) const {
    if (n <= 0 || d <= 0) throw config_error("SystemSpec: dimensions must be positive");
    if (!(b > a) || a <= 0.0) throw config_error("SystemSpec: exponents must satisfy b > a > 0");
    if (rho <= 0.0 || r <= 0.0) throw config_error("SystemSpec: rho and r must be positive");
    freq.validate(k_check);
    if (f.reality_defect() > 1e-12) throw config_error("SystemSpec: f violates reality pairing");
    for (const auto& gj : g_powers)
        if (gj.reality_defect() > 1e-12)
            throw config_error("SystemSpec: g violates reality pairing");
}

TaylorFourierField SystemSpec::g_at(double eps) const {
    TaylorFourierField g(n, d, n, 1, rho);
    double p = 1.0;
    for (const auto& gj : g_powers) {
        g = g + gj.scaled(p);
        p *= eps;
    }
    return g;
}

TaylorFourierField compute_average(const TaylorFourierField& f) { return f.average(); }

EquilibriumResult find_equilibrium(const TaylorFourierField& f_bar, const Eigen::VectorXd& x_init,
                                   double tol, int max_iter, double margin_fraction) {
    const int n = f_bar.n();
    TaylorFourierField fb = f_bar.average();
    TaylorFourierField jac = fb.jacobian();
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(f_bar.d());

    Eigen::VectorXd x = x_init;
    double step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd fx = fb.evaluate_real(theta, x).col(0);
        // Accept only when both the residual and the last Newton step are
        // small: at a degenerate root the residual dies long before the step
        // does, and accepting early would hide the zero eigenvalue.
        if (fx.lpNorm<Eigen::Infinity>() <= tol &&
            step <= std::max(tol, 1e-12 * (1.0 + x.lpNorm<Eigen::Infinity>()))) {
            Eigen::MatrixXd J = jac.evaluate_real(theta, x);
            EquilibriumResult res;
            res.x_star = x;
            res.frame = diagonalize(J, margin_fraction);
            res.iterations = it;
            return res;
        }
        Eigen::MatrixXd J = jac.evaluate_real(theta, x);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        lu.setThreshold(1e-12);
        if (lu.rank() < n)
            throw convergence_error("find_equilibrium: degenerate Jacobian during Newton");
        Eigen::VectorXd dx = lu.solve(fx);
        step = dx.lpNorm<Eigen::Infinity>();
        x -= dx;
    }
    throw convergence_error("find_equilibrium: Newton did not converge within max_iter");
}

AveragingResult averaging_transform(const SystemSpec& spec, double epsilon, int neumann_order) {
    const Truncation& tr = spec.trunc;
    const double eps_eff = std::pow(epsilon, spec.a);
    const Frequency& fr = spec.freq;

    TaylorFourierField f_bar = spec.f.average();
    TaylorFourierField f_tilde = spec.f - f_bar;

    // Termwise homological solve: u_k = f_k / (i<k,omega>).
    double floor = fr.gamma * std::pow(static_cast<double>(std::max(tr.k_max, 1)), -fr.tau) *
                   (1.0 - 1e-9);
    TaylorFourierField u(spec.n, spec.d, spec.n, 1, spec.rho);
    for (const auto& [alpha, c] : f_tilde.coeffs()) {
        FourierSeries div = c.divide_by_divisor(
            [&](const MultiIndex& k) { return Complex(0.0, fr.dot(k)); }, floor);
        u.set_coeff(alpha, div.symmetrized(1e-12));
    }

    AveragingResult res;
    res.u = u;
    res.u_norm = u.majorant_norm(spec.rho, spec.r);
    res.du_norm_bound = res.u_norm / spec.r;

    TaylorFourierField J = u.jacobian();
    double j_norm = J.majorant_norm(spec.rho, spec.r);
    res.neumann_margin = eps_eff * j_norm;
    if (res.neumann_margin > 0.5) {
        std::ostringstream os;
        os << "averaging_transform: eps ||du/dx|| = " << res.neumann_margin
           << " exceeds 1/2; epsilon too large";
        throw convergence_error(os.str());
    }

    // Truncated Neumann expansion of (I + eps du/dx)^{-1}.
    TaylorFourierField identity = TaylorFourierField::from_series(
        spec.n, FourierSeries::identity(spec.d, spec.n, spec.rho));
    TaylorFourierField N = identity;
    TaylorFourierField N_minus_I(spec.n, spec.d, spec.n, spec.n, spec.rho);
    TaylorFourierField Jp = J;
    double sign = -1.0;
    double eps_pow = eps_eff;
    for (int i = 1; i <= neumann_order; ++i) {
        TaylorFourierField term = Jp.scaled(sign * eps_pow);
        N = N + term;
        N_minus_I = N_minus_I + term;
        if (i < neumann_order) Jp = Jp.product(J, tr);
        sign = -sign;
        eps_pow *= eps_eff;
    }

    // Composition argument w = y + eps u(t, y).
    std::vector<TaylorFourierField> w;
    w.reserve(spec.n);
    for (int j = 0; j < spec.n; ++j) {
        TaylorFourierField wj(spec.n, spec.d, 1, 1, spec.rho);
        wj.set_coeff(unit_index(spec.n, j),
                     FourierSeries::constant(spec.d, Mat::Ones(1, 1), spec.rho));
        TaylorFourierField uj = u.component(j).scaled(eps_eff);
        wj = wj + uj;
        w.push_back(std::move(wj));
    }

    TaylorFourierField t1 = N_minus_I.product(f_bar, tr).scaled(1.0 / eps_eff);
    TaylorFourierField t2 =
        N.product(f_bar.compose(w, tr) - f_bar, tr).scaled(1.0 / eps_eff);
    TaylorFourierField t3 =
        N.product(f_tilde.compose(w, tr) - f_tilde, tr).scaled(1.0 / eps_eff);
    res.g1_f_part = (t1 + t2 + t3).truncated(tr);

    TaylorFourierField g_eps = spec.g_at(epsilon);
    if (g_eps.empty())
        res.g1_g_part = TaylorFourierField(spec.n, spec.d, spec.n, 1, spec.rho);
    else
        res.g1_g_part = N.product(g_eps.compose(w, tr), tr).truncated(tr);

    // Combined remainder at the (a, b) exponents: the f-part always carries
    // eps^{2a}, the g-part eps^b; fold the smaller one in.
    if (spec.b >= 2.0 * spec.a)
        res.g1 = res.g1_f_part + res.g1_g_part.scaled(std::pow(epsilon, spec.b - 2.0 * spec.a));
    else
        res.g1 = res.g1_f_part.scaled(std::pow(epsilon, 2.0 * spec.a - spec.b)) + res.g1_g_part;
    return res;
}

NormalForm to_normal_form(const SystemSpec& spec, const Eigen::VectorXd& x_star,
                          const SpectralFrame& frame, const TaylorFourierField& g1,
                          double epsilon) {
    const Truncation& tr = spec.trunc;
    Mat xs = x_star.cast<Complex>();
    FourierSeries c_shift = FourierSeries::constant(spec.d, xs, spec.rho);
    FourierSeries L_id = FourierSeries::identity(spec.d, spec.n, spec.rho);

    TaylorFourierField f_bar = spec.f.average();
    TaylorFourierField fb_shift = f_bar.substitute_affine(c_shift, L_id, tr);
    TaylorFourierField g1_shift = g1.substitute_affine(c_shift, L_id, tr);

    NormalForm nf;
    nf.A = frame.A;
    TaylorFourierField g1_jac = g1_shift.jacobian();
    nf.B = g1_jac.coeff(MultiIndex(spec.n, 0));
    nf.p = g1_shift.coeff(MultiIndex(spec.n, 0));
    nf.h = (fb_shift.drop_below(2) + g1_shift.drop_below(2).scaled(epsilon)).truncated(tr);
    nf.epsilon = epsilon;
    nf.rho = spec.rho;
    nf.r = spec.r;
    return nf;
}

}  // namespace qpr
