#include "qpr/kam.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qpr/varpi.hpp"

namespace qpr {

namespace {

// epsilon^{2^m} without integer-overflow on the exponent.
double pow2m(double eps, int m) { return std::pow(eps, std::ldexp(1.0, m)); }

// log10 of epsilon^{2^m + 1} * v, computed in log space.
double log10_eff(double eps, int m, double v) {
    if (v <= 0.0) return -std::numeric_limits<double>::infinity();
    return (std::ldexp(1.0, m) + 1.0) * std::log10(eps) + std::log10(v);
}

Eigen::MatrixXd real_part_checked(const Mat& m, const char* where) {
    double im = m.imag().cwiseAbs().maxCoeff();
    double re = std::max(1.0, m.real().cwiseAbs().maxCoeff());
    if (im > 1e-9 * re) {
        std::ostringstream os;
        os << where << ": matrix has non-negligible imaginary part " << im;
        throw convergence_error(os.str());
    }
    return m.real();
}

// Truncated Neumann inverse of (I + T) as a Fourier series.
FourierSeries neumann_inverse(const FourierSeries& T, int order, int k_max) {
    FourierSeries N = FourierSeries::identity(T.d(), T.rows(), T.rho());
    FourierSeries P = T;
    double sign = -1.0;
    for (int i = 1; i <= order; ++i) {
        N = N + P.scaled(sign);
        if (i < order) P = P.product(T, k_max);
        sign = -sign;
    }
    return N;
}

// Degree-0 slice of F(theta, c(theta)): substitute z -> c with no linear part.
FourierSeries eval_at_const(const TaylorFourierField& F, const FourierSeries& c,
                            const Truncation& tr) {
    FourierSeries none;
    return F.substitute_affine(c, none, tr).coeff(MultiIndex(F.n(), 0));
}

}  // namespace

void Schedule::validate() const {
    if (rho0 <= 0.0) throw config_error("Schedule: rho0 must be positive");
    if (c0 <= 0.0 || c0 >= 0.25) throw config_error("Schedule: c0 must lie in (0, 1/4)");
    if (kappa <= 1.0 || kappa >= 2.0) throw config_error("Schedule: kappa must lie in (1, 2)");
    if (tau <= 0.0) throw config_error("Schedule: tau must be positive");
    if (K_trunc < 1 || deg_max < 1) throw config_error("Schedule: truncations must be >= 1");
    if (m_max < 1) throw config_error("Schedule: m_max must be >= 1");
    if (p_tol <= 0.0) throw config_error("Schedule: p_tol must be positive");
}

double Schedule::rho(int m) const {
    double r = rho0;
    for (int j = 1; j <= m; ++j) r -= rho0 / (4.0 * j * j);
    return r;
}

double Schedule::sigma(int m) const { return rho(m) - rho0 / (8.0 * (m + 1.0) * (m + 1.0)); }

double Schedule::nu(int m) const { return c0 * rho0 / (4.0 * (m + 1.0) * (m + 1.0)); }

double Schedule::tau_m(int m) const { return tau * std::pow(kappa, m); }

ScheduleValues schedule_params(const Schedule& s, int m) {
    if (m < 0) throw config_error("schedule_params: m must be >= 0");
    ScheduleValues v;
    v.rho_m = s.rho(m);
    v.sigma_m = s.sigma(m);
    v.nu_m = s.nu(m);
    v.tau_m = s.tau_m(m);
    v.rho_next = s.rho(m + 1);
    if (v.rho_next <= 0.0 || v.sigma_m - v.rho_next - v.nu_m <= 0.0)
        throw config_error("schedule_params: widths exhausted at this m");
    return v;
}

namespace {

DioVerdict dio_scan(const Frequency& freq, const std::vector<Complex>& shifts,
                    const std::vector<std::pair<int, int>>& labels, const Schedule& s, int m,
                    int K_trunc) {
    ScheduleValues sv = schedule_params(s, m);
    DioVerdict v;
    double worst = std::numeric_limits<double>::infinity();
    for_each_mode(freq.d(), K_trunc, [&](const MultiIndex& k) {
        double dot = freq.dot(k);
        double rhs = 0.5 * freq.gamma * std::pow(static_cast<double>(order(k)), -sv.tau_m) *
                     std::exp(-sv.nu_m * order(k));
        for (std::size_t a = 0; a < shifts.size(); ++a) {
            double lhs = std::abs(Complex(0.0, dot) - shifts[a]);
            if (lhs - rhs < worst) {
                worst = lhs - rhs;
                v.worst_k = k;
                v.i = labels[a].first;
                v.j = labels[a].second;
                v.lhs = lhs;
                v.rhs = rhs;
            }
        }
    });
    v.pass = shifts.empty() || worst >= 0.0;
    return v;
}

}  // namespace

DioVerdict check_diophantine_first(const SpectralFrame& frame, const Frequency& freq,
                                   double epsilon, const Schedule& s, int m, int K_trunc) {
    std::vector<Complex> shifts;
    std::vector<std::pair<int, int>> labels;
    for (int i = 0; i < frame.n(); ++i) {
        shifts.push_back(epsilon * frame.lambdas[i]);
        labels.push_back({i, -1});
    }
    return dio_scan(freq, shifts, labels, s, m, K_trunc);
}

DioVerdict check_diophantine_second(const SpectralFrame& frame, const Frequency& freq,
                                    double epsilon, const Schedule& s, int m, int K_trunc) {
    std::vector<Complex> shifts;
    std::vector<std::pair<int, int>> labels;
    for (int i = 0; i < frame.n(); ++i)
        for (int j = 0; j < frame.n(); ++j) {
            if (i == j) continue;
            shifts.push_back(epsilon * (frame.lambdas[i] - frame.lambdas[j]));
            labels.push_back({i, j});
        }
    return dio_scan(freq, shifts, labels, s, m, K_trunc);
}

double KamState::eps_m() const { return pow2m(epsilon, m); }

Mat KamState::eval_field(const Eigen::VectorXd& theta, const Eigen::VectorXcd& z) const {
    const double em = eps_m();
    Mat v = epsilon * (A.cast<Complex>() * z.matrix());
    v += epsilon * em * (B.evaluate(theta) * z.matrix());
    v += em * epsilon * p.evaluate(theta);
    if (!h.empty()) v += epsilon * h.evaluate(theta, z);
    return v;
}

KamState initial_state(const NormalForm& nf, const SpectralFrame& base_frame,
                       const Schedule& s) {
    KamState st;
    st.m = 0;
    st.epsilon = nf.epsilon;
    Mat bbar = nf.B.mean();
    st.A = nf.A + nf.epsilon * real_part_checked(bbar, "initial_state");
    st.B = nf.B.oscillation();
    st.p = nf.p;
    st.h = nf.h;
    st.r = nf.r;
    st.K = nf.h.curvature_bound(s.rho(0), nf.r);
    st.frame = perturbation_check(base_frame, st.A);
    return st;
}

HomologicalSolution solve_shifted_homological(const KamState& state, const Frequency& freq,
                                              const Schedule& s) {
    const int n = state.frame.n();
    const double eps = state.epsilon;
    FourierSeries q = state.p.lmul(state.frame.C_inv);

    FourierSeries y(freq.d(), n, 1, state.p.rho(), false);
    for (const auto& [k, qk] : q.coeffs()) {
        Mat v = Mat::Zero(n, 1);
        if (is_zero(k)) {
            for (int j = 0; j < n; ++j) v(j, 0) = -qk(j, 0) / state.frame.lambdas[j];
        } else {
            Complex idot(0.0, freq.dot(k));
            for (int j = 0; j < n; ++j) {
                Complex div = idot - eps * state.frame.lambdas[j];
                if (std::abs(div) < 1e-250)
                    throw small_divisor_error("solve_shifted_homological: vanishing divisor", k,
                                              std::abs(div));
                v(j, 0) = eps * qk(j, 0) / div;
            }
        }
        y.set_coeff(k, v);
    }

    HomologicalSolution sol;
    FourierSeries u = y.lmul(state.frame.C);
    double tol = 1e-8 * (1.0 + u.max_coeff_norm());
    sol.u_scaled = u.symmetrized(tol);
    sol.u_true = sol.u_scaled.scaled(state.eps_m());

    // Residual of the scaled equation du/dt = eps A u + eps p, coefficientwise.
    FourierSeries resid = sol.u_scaled.omega_derivative(freq) -
                          sol.u_scaled.lmul(eps * state.A.cast<Complex>()) -
                          state.p.scaled(eps);
    sol.residual = resid.max_coeff_norm();
    return sol;
}

StarredState shift_transform(const KamState& state, const HomologicalSolution& u,
                             const Schedule& s) {
    const Truncation tr = s.trunc();
    const double em = state.eps_m();
    const int n = static_cast<int>(state.A.rows());

    StarredState st;
    st.A = state.A;
    st.B = state.B;
    st.p = state.B.product(u.u_scaled, tr.k_max);
    st.h = TaylorFourierField(n, state.p.d(), n, 1, state.h.rho());

    if (!state.h.empty()) {
        TaylorFourierField Dh = state.h.jacobian();
        // Degree-sliced evaluation at the shift keeps every term an exact
        // nonnegative power of eps^{2^m}: Dh_j(u_true) = em^j Dh_j(u_scaled).
        Mat a_corr = Mat::Zero(n, n);
        FourierSeries b_corr(state.B.d(), n, n, state.B.rho());
        for (int j = Dh.deg_min(); j <= Dh.deg_max(); ++j) {
            TaylorFourierField Dh_j = Dh.slice(j);
            if (Dh_j.empty()) continue;
            FourierSeries v = eval_at_const(Dh_j, u.u_scaled, tr);
            auto [mean, osc] = v.average_split();
            a_corr += std::pow(em, j) * mean;
            b_corr = b_corr + osc.scaled(std::pow(em, j - 1));
        }
        st.A = st.A + real_part_checked(a_corr, "shift_transform");
        st.B = st.B + b_corr.symmetrized(1e-8 * (1.0 + b_corr.max_coeff_norm()));
        // p* picks up eps^{-2^{m+1}} h(u_true) = sum_j em^{j-2} h_j(u_scaled).
        for (int j = std::max(2, state.h.deg_min()); j <= state.h.deg_max(); ++j) {
            TaylorFourierField h_j = state.h.slice(j);
            if (h_j.empty()) continue;
            st.p = st.p + eval_at_const(h_j, u.u_scaled, tr).scaled(std::pow(em, j - 2));
        }
        // h* = deg >= 2 part of h(u + y) in y.
        FourierSeries L_id = FourierSeries::identity(state.p.d(), n, state.h.rho());
        st.h = state.h.substitute_affine(u.u_true, L_id, tr).drop_below(2).truncated(tr);
    }
    st.p = st.p.symmetrized(1e-8 * (1.0 + st.p.max_coeff_norm()));

    double u_norm = u.u_true.majorant_norm(s.sigma(state.m));
    st.r = state.r - u_norm;
    if (st.r <= 0.0) {
        std::ostringstream os;
        os << "shift_transform: state radius exhausted at m = " << state.m
           << " (||u|| = " << u_norm << ", r = " << state.r << ")";
        throw convergence_error(os.str());
    }
    return st;
}

SylvesterSolution solve_sylvester(const StarredState& star, const Frequency& freq,
                                  double epsilon, int m, const Schedule& s) {
    const int n = star.frame.n();
    Mat b_mean = star.B.mean();
    if (b_mean.cwiseAbs().maxCoeff() > 1e-10 * (1.0 + star.B.max_coeff_norm()))
        throw config_error("solve_sylvester: B* must have zero mean");

    FourierSeries R = star.B.lmul(star.frame.C_inv).rmul(star.frame.C);
    FourierSeries G(freq.d(), n, n, star.B.rho(), false);
    for (const auto& [k, rk] : R.coeffs()) {
        if (is_zero(k)) continue;  // zero mean: nothing to solve at k = 0
        Complex idot(0.0, freq.dot(k));
        Mat v(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Complex div = idot;
                if (i != j) div -= epsilon * (star.frame.lambdas[i] - star.frame.lambdas[j]);
                if (std::abs(div) < 1e-250)
                    throw small_divisor_error("solve_sylvester: vanishing divisor", k,
                                              std::abs(div));
                v(i, j) = rk(i, j) / div;
            }
        G.set_coeff(k, v);
    }

    SylvesterSolution sol;
    FourierSeries S = G.lmul(star.frame.C).rmul(star.frame.C_inv);
    sol.S_scaled = S.symmetrized(1e-8 * (1.0 + S.max_coeff_norm()));
    sol.S_true = sol.S_scaled.scaled(pow2m(epsilon, m));

    Mat Ac = star.A.cast<Complex>();
    FourierSeries resid = sol.S_scaled.omega_derivative(freq) -
                          sol.S_scaled.lmul(epsilon * Ac) + sol.S_scaled.rmul(epsilon * Ac) -
                          star.B;
    sol.residual = resid.max_coeff_norm();
    return sol;
}

KamState linear_transform(const KamState& state, const StarredState& star,
                          const SylvesterSolution& syl, const Schedule& s,
                          int neumann_order) {
    const Truncation tr = s.trunc();
    const double eps = state.epsilon;
    const double em = state.eps_m();
    const int n = static_cast<int>(state.A.rows());
    const double rho_next = s.rho(state.m + 1);

    double eps_S = eps * syl.S_true.majorant_norm(rho_next);
    if (eps_S >= 1.0) {
        std::ostringstream os;
        os << "linear_transform: eps ||S|| = " << eps_S << " >= 1 at m = " << state.m;
        throw convergence_error(os.str());
    }

    FourierSeries T = syl.S_true.scaled(eps);
    FourierSeries N = neumann_inverse(T, neumann_order, tr.k_max);

    // Scaled linear correction: the true term is eps^2 em^2 * curly_B with
    // curly_B = (I + eps S)^{-1} B* S_scaled.
    FourierSeries curly = N.product(star.B, tr.k_max).product(syl.S_scaled, tr.k_max);
    auto [curly_mean, curly_osc] = curly.average_split();

    KamState next;
    next.m = state.m + 1;
    next.epsilon = eps;
    next.A = star.A + eps * em * em * real_part_checked(curly_mean, "linear_transform");
    next.B = curly_osc.scaled(eps).symmetrized(1e-8 * (1.0 + curly_osc.max_coeff_norm()));
    next.p = N.product(star.p, tr.k_max);
    next.p = next.p.symmetrized(1e-8 * (1.0 + next.p.max_coeff_norm()));

    if (star.h.empty()) {
        next.h = star.h;
    } else {
        FourierSeries L = FourierSeries::identity(state.p.d(), n, star.h.rho()) + T;
        FourierSeries none;
        TaylorFourierField shifted = star.h.substitute_affine(none, L, tr);
        next.h = TaylorFourierField::from_series(n, N).product(shifted, tr).truncated(tr);
    }

    next.r = star.r / (1.0 + eps_S);
    next.K = (1.0 + eps_S) * (1.0 + eps_S) / (1.0 - eps_S) * state.K;
    return next;
}

bool LedgerRow::all_ok() const {
    for (const auto& c : checks)
        if (!c.effective && !c.ok) return false;
    return dio1.pass && dio2.pass;
}

bool BoundsLedger::all_ok() const {
    for (const auto& r : rows)
        if (!r.all_ok()) return false;
    return true;
}

std::vector<std::string> BoundsLedger::failures() const {
    std::vector<std::string> out;
    for (const auto& r : rows)
        for (const auto& c : r.checks)
            if (!c.ok) {
                std::ostringstream os;
                os << "m=" << r.m << " " << c.name << ": lhs=" << c.lhs << " rhs=" << c.rhs
                   << (c.effective ? " [effective]" : "");
                out.push_back(os.str());
            }
    return out;
}

void ledger_step(LedgerRow& row, const Schedule& s, const Frequency& freq, double epsilon,
                 const SpectralFrame& frame, const KamOptions& opt) {
    ScheduleValues sv = schedule_params(s, row.m);
    row.rho_m = sv.rho_m;
    row.sigma_m = sv.sigma_m;
    row.nu_m = sv.nu_m;
    row.tau_m = sv.tau_m;
    row.rho_next = sv.rho_next;

    const int d = freq.d();
    const double w_s = sv.sigma_m - sv.rho_next - sv.nu_m;
    row.varpi_nu = varpi(d, sv.tau_m, sv.nu_m);
    row.varpi_s = varpi(d, sv.tau_m, w_s);
    auto a2 = [&](double tau, double nu) {
        return (nu > 0.0 && nu <= 1.0 && tau >= 1.0) ? varpi_upper_bound(d, tau, nu) : -1.0;
    };
    row.varpi_nu_bound = a2(sv.tau_m, sv.nu_m);
    row.varpi_s_bound = a2(sv.tau_m, w_s);

    const double b0 = frame.beta0, mu = frame.mu, g = freq.gamma;
    row.L1 = 4.0 * b0 * b0 * (1.0 / mu + (2.0 * epsilon / g) * row.varpi_nu);
    row.L2 = (32.0 * std::pow(b0, 4) / g) * row.varpi_s;
    row.E1 = opt.M_eff[0] * varpi(d, 2.0 * sv.tau_m, sv.rho_m - 2.0 * sv.nu_m - sv.sigma_m);
    row.E2 = opt.M_eff[1] * varpi(d, sv.tau_m, sv.rho_m - sv.nu_m - sv.sigma_m);
    row.E3 = opt.M_eff[2] * varpi(d, 2.0 * sv.tau_m, sv.sigma_m - sv.rho_next - 2.0 * sv.nu_m);
    row.E4 = opt.M_eff[3] * varpi(d, sv.tau_m, w_s);

    const double em = pow2m(epsilon, row.m);
    auto add = [&](const char* name, double lhs, double rhs, bool eff = false) {
        row.checks.push_back({name, lhs, rhs, lhs <= rhs, eff});
    };
    add("(2.22) ||u|| <= eps^{2^m} ||p|| L1", row.u_norm, em * row.p_norm * row.L1);
    add("(2.34) ||S|| <= eps^{2^m} ||B*|| L2", row.S_norm, em * row.Bstar_norm * row.L2);
    add("(2.30-2) ||B*|| <= ||B|| + 2 K L1 ||p||", row.Bstar_norm,
        row.B_norm + 2.0 * row.K_m * row.L1 * row.p_norm);
    add("(2.30-2 statement form, informational) ||B*|| <= ||B|| + K L1 ||p||", row.Bstar_norm,
        row.B_norm + row.K_m * row.L1 * row.p_norm, true);
    if (row.varpi_nu_bound >= 0.0)
        add("(A.2) varpi(tau_m, nu_m) <= bound", row.varpi_nu, row.varpi_nu_bound);
    if (row.varpi_s_bound >= 0.0)
        add("(A.2) varpi(tau_m, sigma-rho'-nu) <= bound", row.varpi_s, row.varpi_s_bound);
    add("(2.21) residual <= tol", row.hom_residual, opt.residual_tol);
    add("(2.32) residual <= tol", row.syl_residual, opt.residual_tol);
}

KamReport run_kam(const SystemSpec& spec, const Eigen::VectorXd& x_star,
                  const SpectralFrame& frame, const Schedule& s, double epsilon,
                  const KamOptions& opt) {
    s.validate();
    if (epsilon <= 0.0 || epsilon >= 1.0)
        throw config_error("run_kam: epsilon must lie in (0, 1)");
    if (spec.b < 2.0 * spec.a)
        throw config_error("run_kam: requires b >= 2a (apply rescale_general first)");
    if (s.rho0 > spec.rho + 1e-12)
        throw config_error("run_kam: schedule rho0 exceeds the system's width");

    const double eps_t = std::pow(epsilon, spec.a);  // the iteration parameter
    const Truncation tr = s.trunc();
    const int n = spec.n;

    AveragingResult avg = averaging_transform(spec, epsilon, opt.neumann_order);
    NormalForm nf = to_normal_form(spec, x_star, frame, avg.g1, eps_t);

    KamReport rep;
    rep.epsilon = epsilon;
    rep.x_star = x_star;

    KamState st = initial_state(nf, frame, s);
    FourierSeries Phi = FourierSeries::identity(spec.d, n, s.rho0);
    FourierSeries Psi = FourierSeries::zero(spec.d, n, 1, s.rho0);

    std::vector<double> eff_log;
    bool converged = false;

    for (int m = 0; m <= s.m_max; ++m) {
        IterationRow it;
        it.m = m;
        it.p_norm = st.p.majorant_norm(s.rho(m));
        it.B_norm = st.B.majorant_norm(s.rho(m));
        it.r_m = st.r;
        it.K_m = st.K;
        double le = log10_eff(eps_t, m, it.p_norm);
        it.eff_p = std::pow(10.0, le);
        it.eff_B = pow2m(eps_t, m) * it.B_norm;

        if (le <= std::log10(s.p_tol)) {
            rep.table.push_back(it);
            converged = true;
            rep.m_final = m;
            break;
        }
        if (m == s.m_max) {
            rep.table.push_back(it);
            throw convergence_error("run_kam: m_max reached without meeting p_tol");
        }
        eff_log.push_back(le);
        if (eff_log.size() >= 4) {
            std::size_t q = eff_log.size();
            if (eff_log[q - 1] > eff_log[q - 2] && eff_log[q - 2] > eff_log[q - 3] &&
                eff_log[q - 3] > eff_log[q - 4])
                throw convergence_error("run_kam: divergence (3 consecutive growing steps)");
        }

        LedgerRow row;
        row.m = m;
        row.p_norm = it.p_norm;
        row.B_norm = it.B_norm;
        row.r_m = st.r;
        row.K_m = st.K;

        row.dio1 = check_diophantine_first(st.frame, spec.freq, eps_t, s, m, s.K_trunc);
        if (!row.dio1.pass) {
            std::ostringstream os;
            os << "run_kam: first Diophantine check failed at m = " << m
               << " (i = " << row.dio1.i << ", lhs = " << row.dio1.lhs
               << ", rhs = " << row.dio1.rhs << ")";
            throw resonant_epsilon_error(os.str(), m, row.dio1.worst_k, row.dio1.lhs,
                                         row.dio1.rhs, row.dio1.i, -1);
        }

        HomologicalSolution u = solve_shifted_homological(st, spec.freq, s);
        row.hom_residual = u.residual;
        row.u_norm = u.u_true.majorant_norm(s.sigma(m));
        it.u_norm = row.u_norm;

        StarredState star = shift_transform(st, u, s);
        star.frame = perturbation_check(frame, star.A);
        row.Bstar_norm = star.B.majorant_norm(s.sigma(m));
        row.pstar_norm = star.p.majorant_norm(s.sigma(m));

        row.dio2 = check_diophantine_second(star.frame, spec.freq, eps_t, s, m, s.K_trunc);
        if (!row.dio2.pass) {
            std::ostringstream os;
            os << "run_kam: second Diophantine check failed at m = " << m
               << " (i = " << row.dio2.i << ", j = " << row.dio2.j
               << ", lhs = " << row.dio2.lhs << ", rhs = " << row.dio2.rhs << ")";
            throw resonant_epsilon_error(os.str(), m, row.dio2.worst_k, row.dio2.lhs,
                                         row.dio2.rhs, row.dio2.i, row.dio2.j);
        }

        SylvesterSolution syl = solve_sylvester(star, spec.freq, eps_t, m, s);
        row.syl_residual = syl.residual;
        row.S_norm = syl.S_true.majorant_norm(s.rho(m + 1));
        it.S_norm = row.S_norm;

        ledger_step(row, s, spec.freq, eps_t, st.frame, opt);
        row.checks.push_back({"(2.28-1) ||A*|| <= ||A|| + eps^{2^m} K L1 ||p||",
                              mat_inf_norm(star.A),
                              mat_inf_norm(st.A) + pow2m(eps_t, m) * st.K * row.L1 * it.p_norm,
                              mat_inf_norm(star.A) <=
                                  mat_inf_norm(st.A) + pow2m(eps_t, m) * st.K * row.L1 * it.p_norm,
                              false});

        // Transform composition: z_m = u_m + (I + eps S_m) z_{m+1}.
        Psi = Psi + Phi.product(u.u_true, s.K_trunc);
        Phi = Phi.product(FourierSeries::identity(spec.d, n, s.rho0) + syl.S_true.scaled(eps_t),
                          s.K_trunc);

        KamState next = linear_transform(st, star, syl, s, opt.neumann_order);
        next.frame = perturbation_check(frame, next.A);

        // Recursion checks needing the next state.
        double p_next = next.p.majorant_norm(s.rho(m + 1));
        double B_next = next.B.majorant_norm(s.rho(m + 1));
        row.checks.push_back({"(2.41) ||p'|| <= K L1^2 ||p||^2 + 2 L1 ||B|| ||p||", p_next,
                              st.K * row.L1 * row.L1 * it.p_norm * it.p_norm +
                                  2.0 * row.L1 * it.B_norm * it.p_norm,
                              p_next <= st.K * row.L1 * row.L1 * it.p_norm * it.p_norm +
                                            2.0 * row.L1 * it.B_norm * it.p_norm,
                              false});
        row.checks.push_back({"(2.40) ||B'|| <= 4 eps L2 ||B*||^2", B_next,
                              4.0 * eps_t * row.L2 * row.Bstar_norm * row.Bstar_norm,
                              B_next <= 4.0 * eps_t * row.L2 * row.Bstar_norm * row.Bstar_norm,
                              false});
        double K_meas = next.h.curvature_bound(s.rho(m + 1), next.r);
        row.checks.push_back(
            {"(2.39) measured K' <= formula K'", K_meas, next.K, K_meas <= next.K, false});

        rep.ledger.rows.push_back(row);
        rep.table.push_back(it);

        if (opt.strict_ledger && !row.all_ok()) {
            std::ostringstream os;
            os << "run_kam: ledger check failed at m = " << m << " (strict mode):";
            for (const auto& f : rep.ledger.failures()) os << "\n  " << f;
            throw convergence_error(os.str());
        }
        st = next;
    }

    rep.converged = converged;
    rep.A_inf = st.A;
    rep.h_inf = st.h;
    rep.Phi = Phi;
    rep.Psi = Psi;

    // Pull the z_inf = 0 solution back to the original variable:
    // x = x* + Psi + eps^a u(t, x* + Psi).
    Mat xs = x_star.cast<Complex>();
    FourierSeries y_series = FourierSeries::constant(spec.d, xs, s.rho0) + Psi;
    FourierSeries u_at = eval_at_const(avg.u, y_series, tr);
    rep.response = y_series + u_at.scaled(eps_t);
    rep.response = rep.response.symmetrized(1e-8 * (1.0 + rep.response.max_coeff_norm()));
    return rep;
}

KamReport run_kam(const SystemSpec& spec, const Schedule& s, double epsilon,
                  const KamOptions& opt) {
    TaylorFourierField f_bar = spec.f.average();
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(spec.n);
    EquilibriumResult eq = find_equilibrium(f_bar, x0);
    return run_kam(spec, eq.x_star, eq.frame, s, epsilon, opt);
}

}  // namespace qpr
