#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "qpr/oracles.hpp"
#include "qpr/reductions.hpp"

using namespace qpr;
using namespace qpr::testing;

namespace {

Frequency unit_freq() {
    Frequency fr;
    fr.omega = Eigen::VectorXd::Constant(1, 1.0);
    fr.gamma = 0.5;
    fr.tau = 1.1;
    return fr;
}

}  // namespace

TEST_CASE("rescale_general exponent arithmetic") {
    ExponentPlan p1 = rescale_general(1.0, 2.0);
    CHECK(p1.delta == doctest::Approx(1.0));
    CHECK(p1.a0 == doctest::Approx(1.0));
    CHECK(p1.b0 == doctest::Approx(2.0));
    CHECK(p1.branch_b_ge_2a);
    CHECK(p1.delta1 == 0.0);  // a0 = 1: no sweep-window exponent

    ExponentPlan p2 = rescale_general(0.5, 1.0);
    CHECK(p2.delta == doctest::Approx(2.0));
    CHECK(p2.a0 == doctest::Approx(1.0));
    CHECK(p2.b0 == doctest::Approx(2.0));
    CHECK(p2.branch_b_ge_2a);

    ExponentPlan p3 = rescale_general(1.0, 1.5);
    CHECK(p3.delta == doctest::Approx(2.0));
    CHECK(p3.a0 == doctest::Approx(2.0));
    CHECK(p3.b0 == doctest::Approx(3.0));
    CHECK_FALSE(p3.branch_b_ge_2a);
    CHECK(p3.b0 > p3.a0);
    // delta1 sits in (1, 1 + 1/(a0 - 1)) = (1, 2).
    CHECK(p3.delta1 > 1.0);
    CHECK(p3.delta1 < 2.0);

    CHECK_THROWS_AS(rescale_general(1.0, 0.5), config_error);
}

TEST_CASE("rescaled_at reproduces the pre-rescaling right side") {
    SystemSpec spec = nonlinear_demo();
    spec.a = 0.5;
    spec.b = 1.0;
    // Add a nontrivial g so both branches of g2 carry content.
    TaylorFourierField g(2, 2, 2, 1, 2.0);
    FourierSeries sv(2, 2, 1, 2.0);
    Mat e2 = Mat::Zero(2, 1);
    e2(1, 0) = 1.0;
    sv.set_coeff(MultiIndex{0, 1}, Complex(0.0, -0.5) * e2);
    sv.set_coeff(MultiIndex{0, -1}, Complex(0.0, 0.5) * e2);
    g.set_coeff(MultiIndex{0, 0}, sv);
    spec.g_powers = {g};

    ExponentPlan plan = rescale_general(spec.a, spec.b);
    const double eps_new = 0.05;
    const double eps_old = std::pow(eps_new, plan.delta);
    SystemSpec out = rescaled_at(spec, plan, eps_new);
    CHECK(out.a == doctest::Approx(plan.a0));
    CHECK(out.b == doctest::Approx(plan.b0));

    AveragingResult avg = averaging_transform(spec, eps_old);
    TaylorFourierField fbar = spec.f.average();
    TaylorFourierField g2 = out.g_at(eps_new);

    std::mt19937 rng(41);
    for (int t = 0; t < 10; ++t) {
        Eigen::VectorXd th = random_angles(2, rng);
        Eigen::VectorXcd y = random_vector(2, 0.3, rng).cast<Complex>();
        Mat lhs = std::pow(eps_new, plan.a0) * out.f.evaluate(th, y) +
                  std::pow(eps_new, plan.b0) * g2.evaluate(th, y);
        Mat rhs = std::pow(eps_old, spec.a) * fbar.evaluate(th, y) +
                  std::pow(eps_old, 2.0 * spec.a) * avg.g1_f_part.evaluate(th, y) +
                  std::pow(eps_old, spec.b) * avg.g1_g_part.evaluate(th, y);
        double scale = 1.0 + lhs.cwiseAbs().maxCoeff();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() / scale < 1e-10);
    }
}

namespace {

// Doubled-state field for x'' = -diag(d1, d2) x + (cos theta_1) e_1 with
// optional velocity coupling c * x_1'.
TaylorFourierField oscillator_F(double d1, double d2, double c = 0.0) {
    TaylorFourierField F(4, 2, 2, 1, 2.0);
    Mat e1 = Mat::Zero(2, 1), e2 = Mat::Zero(2, 1);
    e1(0, 0) = 1.0;
    e2(1, 0) = 1.0;
    FourierSeries c1(2, 2, 1, 2.0), c2(2, 2, 1, 2.0), v(2, 2, 1, 2.0);
    c1.set_coeff({0, 0}, -d1 * e1);
    c2.set_coeff({0, 0}, -d2 * e2);
    v.set_coeff({1, 0}, 0.5 * e1);
    v.set_coeff({-1, 0}, 0.5 * e1);
    F.set_coeff({1, 0, 0, 0}, c1);
    F.set_coeff({0, 1, 0, 0}, c2);
    F.set_coeff({0, 0, 0, 0}, v);
    if (c != 0.0) {
        FourierSeries cv(2, 2, 1, 2.0);
        cv.set_coeff({0, 0}, c * e1);
        F.set_coeff({0, 0, 1, 0}, cv);
    }
    return F;
}

}  // namespace

TEST_CASE("second_order_reduce: diag(-1, -4) doubles to {+-i, +-2i}") {
    TaylorFourierField F = oscillator_F(1.0, 4.0);
    TaylorFourierField G;
    SecondOrderResult res =
        second_order_reduce(F, G, 1.0, 2.0, 0.01, golden_freq(), 1.0, 1.0, Truncation{30, 6});
    CHECK(res.spectra_match);
    CHECK(res.match_error <= 1e-10);
    std::vector<double> mags;
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(res.doubled_spectrum[i].real()) < 1e-10);
        mags.push_back(std::abs(res.doubled_spectrum[i]));
    }
    std::sort(mags.begin(), mags.end());
    CHECK(mags[0] == doctest::Approx(1.0));
    CHECK(mags[1] == doctest::Approx(1.0));
    CHECK(mags[2] == doctest::Approx(2.0));
    CHECK(mags[3] == doctest::Approx(2.0));
    // Doubled system uses a/2 and hands off a valid plan.
    CHECK(res.doubled.a == doctest::Approx(0.5));
    CHECK(res.plan.a0 >= 1.0);
}

TEST_CASE("second_order_reduce: F independent of the velocity gives F1 = 0") {
    TaylorFourierField F = oscillator_F(1.0, 4.0);
    TaylorFourierField G;
    SecondOrderResult res =
        second_order_reduce(F, G, 1.0, 2.0, 0.01, golden_freq(), 1.0, 1.0, Truncation{30, 6});
    REQUIRE(res.doubled.g_powers.size() == 1);
    CHECK(res.doubled.g_powers[0].empty());
}

TEST_CASE("second_order_reduce: random DF spectra match the square-root branches") {
    std::mt19937 rng(55);
    std::uniform_real_distribution<double> u(0.5, 4.0);
    for (int t = 0; t < 10; ++t) {
        double d1 = u(rng), d2 = u(rng);
        if (std::abs(d1 - d2) < 0.2) d2 += 0.5;
        SecondOrderResult res = second_order_reduce(oscillator_F(d1, d2, 0.1), {}, 1.0, 2.0,
                                                    0.01, golden_freq(), 1.0, 1.0,
                                                    Truncation{30, 6});
        CHECK(res.spectra_match);
        CHECK(res.match_error <= 1e-10 * 16.0 + 1e-12);
    }
}

TEST_CASE("second_order_reduce round trip against direct integration") {
    const double eps = 0.01, a = 1.0, b = 2.0;
    TaylorFourierField F = oscillator_F(1.0, 4.0);
    SecondOrderResult res =
        second_order_reduce(F, {}, a, b, eps, golden_freq(), 1.0, 1.0, Truncation{30, 6});
    const double eh = std::pow(eps, 0.5 * a);

    Eigen::VectorXd x0(2), v0(2);
    x0 << 0.1, -0.05;
    v0 << 0.02, 0.0;
    Eigen::VectorXd z0(4);
    z0 << x0(0), x0(1), v0(0) / eh, v0(1) / eh;

    const double T = 20.0, dt = 0.01;
    IntegrationResult doubled = integrate_oracle(res.doubled, z0, eps, T, dt);

    // Direct RK4 on the second-order system (x, v): v' = eps^a F(theta, x, v).
    Frequency fr = golden_freq();
    auto rhs = [&](double t, const Eigen::VectorXd& s) {
        Eigen::VectorXd th = fr.omega * t;
        Eigen::VectorXcd state(4);
        state << s(0), s(1), s(2), s(3);
        Eigen::VectorXd acc = F.evaluate(th, state).col(0).real();
        Eigen::VectorXd out(4);
        out << s(2), s(3), std::pow(eps, a) * acc(0), std::pow(eps, a) * acc(1);
        return out;
    };
    Eigen::VectorXd s(4);
    s << x0(0), x0(1), v0(0), v0(1);
    double worst = 0.0;
    std::size_t idx = 0;
    int steps = static_cast<int>(T / dt);
    for (int i = 0; i <= steps; ++i) {
        double t = i * dt;
        if (idx < doubled.times.size() && std::abs(doubled.times[idx] - t) < 1e-9) {
            worst = std::max(worst,
                             (doubled.states[idx].head(2) - s.head(2)).cwiseAbs().maxCoeff());
            ++idx;
        }
        Eigen::VectorXd k1 = rhs(t, s), k2 = rhs(t + dt / 2, s + dt / 2 * k1),
                        k3 = rhs(t + dt / 2, s + dt / 2 * k2), k4 = rhs(t + dt, s + dt * k3);
        s += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    CHECK(idx > 0);
    CHECK(worst < 1e-6);
}

TEST_CASE("degenerate_scale: cubic example of the corollary") {
    const int l = 3;
    TaylorFourierField phi(1, 1, 1, 1, 1.0);
    phi.set_coeff(MultiIndex{3}, FourierSeries::constant(1, Mat::Ones(1, 1), 1.0));
    TaylorFourierField h(1, 1, 1, 1, 1.0);
    h.set_coeff(MultiIndex{4}, FourierSeries::constant(1, Mat::Constant(1, 1, 0.3), 1.0));
    TaylorFourierField f(1, 1, 1, 1, 1.0);
    FourierSeries fc(1, 1, 1, 1.0);
    fc.set_coeff(MultiIndex{0}, Mat::Ones(1, 1));
    fc.set_coeff(MultiIndex{1}, Mat::Constant(1, 1, 0.25));
    fc.set_coeff(MultiIndex{-1}, Mat::Constant(1, 1, 0.25));
    f.set_coeff(MultiIndex{0}, fc);

    SystemSpec out = degenerate_scale(phi, h, f, l, unit_freq(), 1.0, 1.0, Truncation{10, 6});
    CHECK(out.a == doctest::Approx(2.0));
    CHECK(out.b == doctest::Approx(3.0));

    // phi1 averages to y^3 + fbar(0) = y^3 + 1: equilibrium at -1 with slope 3.
    EquilibriumResult eq = find_equilibrium(out.f.average(), Eigen::VectorXd::Constant(1, -0.5));
    CHECK(eq.x_star(0) == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(eq.frame.lambdas[0].real() == doctest::Approx(3.0).epsilon(1e-8));

    // h = 0.3 x^4 cancels its tau powers exactly: g_0 carries 0.3 y^4.
    REQUIRE_FALSE(out.g_powers.empty());
    CHECK(out.g_powers[0].coeff(MultiIndex{4}).mean()(0, 0).real() == doctest::Approx(0.3));

    // Exponent bookkeeping: the scaled right side tau^{l-1} phi1 + tau^l g
    // equals the source equation phi + h + eps f at x = tau y, eps = tau^l,
    // divided by tau.
    std::mt19937 rng(9);
    const double tau = 0.2;
    TaylorFourierField g_tau = out.g_at(tau);
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd th = random_angles(1, rng);
        Eigen::VectorXcd y = random_vector(1, 0.8, rng).cast<Complex>();
        Eigen::VectorXcd x = tau * y;
        Mat lhs = std::pow(tau, l - 1) * out.f.evaluate(th, y) +
                  std::pow(tau, l) * g_tau.evaluate(th, y);
        Mat rhs = (phi.evaluate(th, x) + h.evaluate(th, x) +
                   std::pow(tau, l) * f.evaluate(th, x)) /
                  tau;
        double scale = 1.0 + rhs.cwiseAbs().maxCoeff();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() / scale < 1e-10);
    }
}

TEST_CASE("degenerate_scale input validation") {
    TaylorFourierField phi(1, 1, 1, 1, 1.0);
    phi.set_coeff(MultiIndex{3}, FourierSeries::constant(1, Mat::Ones(1, 1), 1.0));
    TaylorFourierField none(1, 1, 1, 1, 1.0);

    // Not homogeneous: an extra quadratic term breaks the scaling identity.
    TaylorFourierField bad = phi;
    bad.set_coeff(MultiIndex{2}, FourierSeries::constant(1, Mat::Ones(1, 1), 1.0));
    CHECK_THROWS_AS(degenerate_scale(bad, none, none, 3, unit_freq(), 1.0, 1.0, {}),
                    config_error);

    // h must vanish to order l + 1.
    TaylorFourierField low(1, 1, 1, 1, 1.0);
    low.set_coeff(MultiIndex{3}, FourierSeries::constant(1, Mat::Ones(1, 1), 1.0));
    CHECK_THROWS_AS(degenerate_scale(phi, low, none, 3, unit_freq(), 1.0, 1.0, {}),
                    config_error);

    // Degeneracy order below 2 is rejected.
    CHECK_THROWS_AS(degenerate_scale(phi, none, none, 1, unit_freq(), 1.0, 1.0, {}),
                    config_error);
}
