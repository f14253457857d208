#include "qpr/resonance.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace qpr {

std::vector<CellFlag> resonant_set_scan(const Frequency& freq,
                                        const std::function<Complex(double)>& phi,
                                        double delta, const Schedule& s, int m, int K_trunc,
                                        int cells) {
    if (delta <= 0.0 || cells < 1)
        throw config_error("resonant_set_scan: needs delta > 0 and cells >= 1");
    ScheduleValues sv = schedule_params(s, m);
    std::vector<CellFlag> out(cells);
    double w = delta / cells;
    for (int c = 0; c < cells; ++c) {
        CellFlag& f = out[c];
        f.eps_lo = c * w;
        f.eps_hi = (c + 1) * w;
        f.m = m;
        double eps = f.eps_lo + 0.5 * w;
        Complex ph = phi(eps);
        double worst = std::numeric_limits<double>::infinity();
        for_each_mode(freq.d(), K_trunc, [&](const MultiIndex& k) {
            double lhs = std::abs(Complex(0.0, freq.dot(k)) - ph);
            double rhs = 0.5 * freq.gamma *
                         std::pow(static_cast<double>(order(k)), -sv.tau_m) *
                         std::exp(-sv.nu_m * order(k));
            if (lhs - rhs < worst) {
                worst = lhs - rhs;
                f.worst_k = k;
                f.lhs = lhs;
                f.rhs = rhs;
            }
        });
        f.flagged = worst < 0.0;
    }
    return out;
}

ResonanceScan excluded_parameters(const SystemSpec& spec, const Eigen::VectorXd& x_star,
                                  const SpectralFrame& frame, double eps1, int cells,
                                  const Schedule& s, const KamOptions& opt, int threads) {
    if (eps1 <= 0.0 || cells < 1)
        throw config_error("excluded_parameters: needs eps1 > 0 and cells >= 1");
    ResonanceScan scan;
    scan.eps1 = eps1;
    scan.cells = cells;
    scan.flags.resize(cells);
    double w = eps1 / cells;

    auto work = [&](int c) {
        CellFlag& f = scan.flags[c];
        f.eps_lo = c * w;
        f.eps_hi = (c + 1) * w;
        double eps = f.eps_lo + 0.5 * w;
        try {
            KamReport rep = run_kam(spec, x_star, frame, s, eps, opt);
            // Keep the tightest passing margin across all recorded checks.
            double worst = std::numeric_limits<double>::infinity();
            for (const auto& row : rep.ledger.rows) {
                for (const DioVerdict* v : {&row.dio1, &row.dio2}) {
                    if (v->i < 0) continue;
                    if (v->margin() < worst) {
                        worst = v->margin();
                        f.m = row.m;
                        f.worst_k = v->worst_k;
                        f.lhs = v->lhs;
                        f.rhs = v->rhs;
                    }
                }
            }
            f.flagged = false;
        } catch (const resonant_epsilon_error& e) {
            f.flagged = true;
            f.m = e.m;
            f.worst_k = e.mode;
            f.lhs = e.lhs;
            f.rhs = e.rhs;
        } catch (const std::exception&) {
            f.flagged = true;  // non-resonant engine failure; still excluded
            f.m = -2;
        }
    };

    if (threads <= 1) {
        for (int c = 0; c < cells; ++c) work(c);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        int nt = std::min(threads, cells);
        pool.reserve(nt);
        for (int t = 0; t < nt; ++t)
            pool.emplace_back([&]() {
                for (int c = next.fetch_add(1); c < cells; c = next.fetch_add(1)) work(c);
            });
        for (auto& t : pool) t.join();
    }

    for (const auto& f : scan.flags)
        if (f.flagged) scan.excluded_measure += f.eps_hi - f.eps_lo;
    scan.excluded_fraction = scan.excluded_measure / eps1;
    return scan;
}

double fit_majorant_a1(const std::vector<std::pair<double, double>>& delta_measure,
                       double a2) {
    if (a2 <= 0.0) throw config_error("fit_majorant_a1: a2 must be positive");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [delta, meas] : delta_measure) {
        if (delta <= 0.0) throw config_error("fit_majorant_a1: delta must be positive");
        if (meas <= 0.0) continue;  // zero measure satisfies any a1
        if (meas > delta) return 0.0;  // majorant cannot exceed delta
        best = std::min(best, std::pow(delta, a2) * std::log(delta / meas));
    }
    return best;
}

double measure_bound(double a1, double a2, double a3, double mu_star, double eps1) {
    double dstar = mu_star * eps1;
    return a3 * dstar * std::exp(-a1 / std::pow(dstar, a2));
}

namespace {

SeparationVerdict pair_check(const std::vector<std::pair<double, Complex>>& curve,
                             double slope, double lo, double hi) {
    if (curve.size() < 3)
        throw config_error("lipschitz_separation_check: needs at least 3 samples");
    SeparationVerdict v;
    v.worst_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < curve.size(); ++a) {
        if (curve[a].first <= lo || curve[a].first >= hi) continue;
        for (std::size_t b = a + 1; b < curve.size(); ++b) {
            if (curve[b].first <= lo || curve[b].first >= hi) continue;
            double gap = std::abs(curve[a].first - curve[b].first);
            if (gap == 0.0) continue;
            double lhs = std::abs(curve[a].first * curve[a].second -
                                  curve[b].first * curve[b].second);
            double ratio = lhs / (slope * gap);
            if (ratio < v.worst_ratio) {
                v.worst_ratio = ratio;
                v.eps_a = curve[a].first;
                v.eps_b = curve[b].first;
            }
        }
    }
    v.pass = v.worst_ratio >= 1.0;
    return v;
}

}  // namespace

SeparationVerdict lipschitz_separation_check(
    const std::vector<std::pair<double, Complex>>& curve, double mu) {
    return pair_check(curve, 0.5 * mu, -std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity());
}

SeparationVerdict lipschitz_separation_check(
    const std::vector<std::pair<double, Complex>>& curve, double eps1, double a0,
    double delta1) {
    if (a0 <= 1.0) throw config_error("lipschitz_separation_check: a0 variant needs a0 > 1");
    if (delta1 <= 1.0 || delta1 >= 1.0 + 1.0 / (a0 - 1.0))
        throw config_error("lipschitz_separation_check: delta1 outside (1, 1 + 1/(a0-1))");
    return pair_check(curve, std::pow(eps1, a0), std::pow(eps1, delta1), eps1);
}

}  // namespace qpr
