#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "qpr/fourier.hpp"

using namespace qpr;
using qpr::testing::golden_freq;

namespace {

FourierSeries cos_theta(int d = 1, double rho = 1.0) {
    FourierSeries s(d, 1, 1, rho);
    Mat half = Mat::Constant(1, 1, 0.5);
    MultiIndex k(d, 0);
    k[0] = 1;
    s.set_coeff(k, half);
    s.set_coeff(negate(k), half);
    return s;
}

FourierSeries sin_theta(int d = 1, double rho = 1.0, int axis = 0) {
    FourierSeries s(d, 1, 1, rho);
    MultiIndex k(d, 0);
    k[axis] = 1;
    s.set_coeff(k, Mat::Constant(1, 1, Complex(0.0, -0.5)));
    s.set_coeff(negate(k), Mat::Constant(1, 1, Complex(0.0, 0.5)));
    return s;
}

FourierSeries random_real_series(int d, int rows, double rho, int k_max, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    FourierSeries s(d, rows, 1, rho);
    for_each_mode(d, k_max, [&](const MultiIndex& k) {
        Mat re(rows, 1), im(rows, 1);
        for (int i = 0; i < rows; ++i) {
            re(i, 0) = dist(rng);
            im(i, 0) = dist(rng);
        }
        double w = std::exp(-rho * order(k));
        s.add_coeff(k, w * 0.5 * (re + Complex(0, 1) * im));
        s.add_coeff(negate(k), w * 0.5 * (re - Complex(0, 1) * im));
    });
    Mat c(rows, 1);
    for (int i = 0; i < rows; ++i) c(i, 0) = dist(rng);
    s.add_coeff(MultiIndex(d, 0), c);
    return s;
}

}  // namespace

TEST_CASE("frequency Diophantine check") {
    Frequency fr = golden_freq();
    CHECK_FALSE(fr.check_diophantine(30).has_value());
    CHECK_NOTHROW(fr.validate(30));

    // Rationally dependent frequencies fail immediately.
    Frequency bad;
    bad.omega = Eigen::VectorXd(2);
    bad.omega << 1.0, 1.0;
    bad.gamma = 0.1;
    bad.tau = 1.2;
    auto viol = bad.check_diophantine(5);
    REQUIRE(viol.has_value());
    CHECK(viol->lhs < viol->rhs);
    CHECK_THROWS_AS(bad.validate(5), config_error);
}

TEST_CASE("majorant norm") {
    FourierSeries zero(1, 1, 1, 1.0);
    CHECK(zero.majorant_norm(0.7) == 0.0);

    FourierSeries c = cos_theta();
    CHECK(c.majorant_norm(0.0) == doctest::Approx(1.0));
    CHECK(c.majorant_norm(1.0) == doctest::Approx(std::exp(1.0)));
    CHECK_THROWS_AS(c.majorant_norm(1.5), width_error);
}

TEST_CASE("average split") {
    FourierSeries c = FourierSeries::constant(1, Mat::Constant(1, 1, 3.0), 1.0);
    auto [m1, o1] = c.average_split();
    CHECK(m1(0, 0).real() == doctest::Approx(3.0));
    CHECK(o1.empty());

    auto [m2, o2] = cos_theta().average_split();
    CHECK(std::abs(m2(0, 0)) == 0.0);
    CHECK(o2.majorant_norm(0.0) == doctest::Approx(1.0));

    // 2 + cos theta_1 + sin theta_2.
    FourierSeries s = cos_theta(2) + sin_theta(2, 1.0, 1) +
                      FourierSeries::constant(2, Mat::Constant(1, 1, 2.0), 1.0);
    auto [m3, o3] = s.average_split();
    CHECK(m3(0, 0).real() == doctest::Approx(2.0));
    CHECK(o3.coeff(MultiIndex{0, 0}).cwiseAbs().maxCoeff() == 0.0);
    CHECK(o3.support_size() == 4);
    // mean + oscillation reconstructs s.
    FourierSeries back = o3 + FourierSeries::constant(2, m3, 1.0);
    CHECK((back - s).max_coeff_norm() == doctest::Approx(0.0));
}

TEST_CASE("divide_by_divisor") {
    FourierSeries zero(1, 1, 1, 1.0);
    CHECK(zero.divide_by_divisor([](const MultiIndex&) { return Complex(1.0); }, 0.5).empty());

    // Antiderivative: cos theta / (i k) = sin theta.
    FourierSeries s = cos_theta().divide_by_divisor(
        [](const MultiIndex& k) { return Complex(0.0, k[0]); }, 0.5);
    CHECK((s - sin_theta()).max_coeff_norm() < 1e-15);

    // Complex division oracle: coeff 1/2 at k = 1 over (i - 0.1).
    FourierSeries one(1, 1, 1, 1.0, false);
    one.set_coeff(MultiIndex{1}, Mat::Constant(1, 1, 0.5));
    FourierSeries q = one.divide_by_divisor(
        [](const MultiIndex&) { return Complex(-0.1, 1.0); }, 0.5);
    Complex got = q.coeff(MultiIndex{1})(0, 0);
    CHECK(got.real() == doctest::Approx(-0.0495049504950495).epsilon(1e-12));
    CHECK(got.imag() == doctest::Approx(-0.495049504950495).epsilon(1e-12));

    // Floor violation reports the offending mode.
    CHECK_THROWS_AS(cos_theta().divide_by_divisor(
                        [](const MultiIndex&) { return Complex(1e-6, 0.0); }, 1e-3),
                    small_divisor_error);
}

TEST_CASE("divide_by_divisor is an exact inverse") {
    std::mt19937 rng(7);
    Frequency fr = golden_freq();
    FourierSeries f = random_real_series(2, 2, 1.0, 8, rng).oscillation();
    auto divisor = [&](const MultiIndex& k) { return Complex(0.0, fr.dot(k)); };
    FourierSeries u = f.divide_by_divisor(divisor, 1e-6);
    double worst = 0.0;
    for (const auto& [k, uk] : u.coeffs()) {
        Mat back = divisor(k) * uk - f.coeff(k);
        worst = std::max(worst, back.cwiseAbs().maxCoeff() / (1.0 + f.coeff(k).cwiseAbs().maxCoeff()));
    }
    CHECK(worst < 1e-14);
}

TEST_CASE("reality closure under arithmetic") {
    std::mt19937 rng(11);
    FourierSeries a = random_real_series(2, 2, 1.0, 6, rng);
    FourierSeries b = random_real_series(2, 2, 1.0, 6, rng);
    CHECK(a.reality_defect() < 1e-15);
    CHECK((a + b).reality_defect() < 1e-14);
    CHECK((a - b).reality_defect() < 1e-14);
    CHECK(a.scaled(2.5).reality_defect() < 1e-14);
    CHECK(a.mul_scalar_series(cos_theta(2), 12).reality_defect() < 1e-14);
    // Evaluation at a real angle yields a real value.
    Eigen::VectorXd th = qpr::testing::random_angles(2, rng);
    CHECK(a.evaluate(th).imag().cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("norm submultiplicativity for products") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        FourierSeries a = random_real_series(2, 1, 1.0, 5, rng);
        FourierSeries b = random_real_series(2, 1, 1.0, 5, rng);
        FourierSeries p = a.product(b, 12);
        for (double rho : {0.0, 0.5, 1.0})
            CHECK(p.majorant_norm(rho) <= a.majorant_norm(rho) * b.majorant_norm(rho) + 1e-12);
    }
}

TEST_CASE("omega derivative inverts division by the flow divisor") {
    Frequency fr = golden_freq();
    std::mt19937 rng(5);
    FourierSeries f = random_real_series(2, 1, 1.0, 6, rng).oscillation();
    FourierSeries u = f.divide_by_divisor(
        [&](const MultiIndex& k) { return Complex(0.0, fr.dot(k)); }, 1e-8);
    CHECK((u.omega_derivative(fr) - f).max_coeff_norm() < 1e-13);
}

TEST_CASE("evaluate matches the trigonometric definition") {
    std::mt19937 rng(31);
    FourierSeries c = cos_theta(2);
    for (int i = 0; i < 5; ++i) {
        Eigen::VectorXd th = qpr::testing::random_angles(2, rng);
        CHECK(c.evaluate(th)(0, 0).real() == doctest::Approx(std::cos(th(0))).epsilon(1e-12));
    }
}

TEST_CASE("truncated drops high modes and small coefficients") {
    std::mt19937 rng(3);
    FourierSeries s = random_real_series(1, 1, 1.0, 10, rng);
    FourierSeries t = s.truncated(4);
    CHECK(t.max_order() <= 4);
    for (const auto& [k, v] : t.coeffs()) CHECK((s.coeff(k) - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("symmetrized enforces the pairing and rejects large defects") {
    FourierSeries s(1, 1, 1, 1.0);
    s.set_coeff(MultiIndex{1}, Mat::Constant(1, 1, Complex(0.5, 1e-12)));
    s.set_coeff(MultiIndex{-1}, Mat::Constant(1, 1, Complex(0.5, 0.0)));
    FourierSeries sym = s.symmetrized(1e-9);
    CHECK(sym.reality_defect() < 1e-15);
    s.set_coeff(MultiIndex{-1}, Mat::Constant(1, 1, Complex(0.9, 0.0)));
    CHECK_THROWS(s.symmetrized(1e-9));
}
