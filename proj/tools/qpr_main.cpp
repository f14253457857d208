#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qpr/config.hpp"
#include "qpr/oracles.hpp"
#include "qpr/reductions.hpp"

namespace fs = std::filesystem;
using qpr::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitResonant = 3;
constexpr int kExitDivergence = 4;
constexpr int kExitVerification = 5;

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw qpr::config_error("cannot write output file: " + p.string());
    out << text;
}

void write_json(const fs::path& p, const Json& j) { write_text(p, j.dump(2) + "\n"); }

Json frame_to_json(const qpr::SpectralFrame& fr) {
    Json lam = Json::array();
    for (int i = 0; i < fr.n(); ++i)
        lam.push_back(Json{{"re", fr.lambdas[i].real()}, {"im", fr.lambdas[i].imag()}});
    return Json{{"lambdas", lam}, {"beta0", fr.beta0},     {"mu", fr.mu},
                {"mu_star", fr.mu_star}, {"alpha", fr.alpha}};
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

int cmd_average(const qpr::RunConfig& cfg, const fs::path& out) {
    qpr::TaylorFourierField f_bar = cfg.system.f.average();
    qpr::EquilibriumResult eq =
        qpr::find_equilibrium(f_bar, Eigen::VectorXd::Zero(cfg.system.n));
    Json xs = Json::array();
    for (int i = 0; i < eq.x_star.size(); ++i) xs.push_back(eq.x_star[i]);
    Json j{{"x_star", xs},
           {"newton_iterations", eq.iterations},
           {"f_bar", qpr::field_to_json(f_bar)},
           {"frame", frame_to_json(eq.frame)}};
    write_json(out / "average.json", j);
    std::cout << "average: x* found after " << eq.iterations << " Newton steps\n";
    return kExitOk;
}

int cmd_normal_form(const qpr::RunConfig& cfg, const fs::path& out) {
    qpr::EquilibriumResult eq =
        qpr::find_equilibrium(cfg.system.f.average(), Eigen::VectorXd::Zero(cfg.system.n));
    double eps_t = std::pow(cfg.epsilon, cfg.system.a);
    qpr::AveragingResult avg =
        qpr::averaging_transform(cfg.system, cfg.epsilon, cfg.options.neumann_order);
    qpr::NormalForm nf = qpr::to_normal_form(cfg.system, eq.x_star, eq.frame, avg.g1, eps_t);
    Json j{{"epsilon", cfg.epsilon},
           {"A", matrix_to_json(nf.A)},
           {"B", qpr::series_to_json(nf.B)},
           {"p", qpr::series_to_json(nf.p)},
           {"h", qpr::field_to_json(nf.h)},
           {"u", qpr::field_to_json(avg.u)},
           {"u_norm", avg.u_norm},
           {"neumann_margin", avg.neumann_margin},
           {"frame", frame_to_json(eq.frame)}};
    write_json(out / "normal_form.json", j);
    std::cout << "normal-form: ||u|| = " << avg.u_norm
              << ", eps ||du/dx|| = " << avg.neumann_margin << "\n";
    return kExitOk;
}

int cmd_run(const qpr::RunConfig& cfg, const fs::path& out) {
    qpr::EquilibriumResult eq =
        qpr::find_equilibrium(cfg.system.f.average(), Eigen::VectorXd::Zero(cfg.system.n));
    qpr::KamReport rep =
        qpr::run_kam(cfg.system, eq.x_star, eq.frame, cfg.schedule, cfg.epsilon, cfg.options);
    double res = qpr::residual(cfg.system, rep.response, cfg.epsilon, cfg.oracles.grid_size);
    Json j = qpr::report_to_json(rep);
    j["residual"] = res;
    j["residual_bound"] = cfg.oracles.residual_bound;
    write_json(out / "report.json", j);
    write_json(out / "response.json", qpr::response_to_json(rep));
    write_text(out / "iterations.csv", qpr::iteration_csv(rep));
    write_text(out / "ledger.csv", qpr::ledger_csv(rep));
    std::cout << "run: converged at m = " << rep.m_final << ", residual = " << res << "\n";
    if (!rep.ledger.all_ok())
        for (const auto& f : rep.ledger.failures()) std::cerr << "ledger: " << f << "\n";
    return kExitOk;
}

int cmd_sweep(const qpr::RunConfig& cfg, const fs::path& out, int threads) {
    if (!cfg.is_sweep)
        throw qpr::config_error("sweep: config must supply epsilon = {hi, cells}");
    qpr::EquilibriumResult eq =
        qpr::find_equilibrium(cfg.system.f.average(), Eigen::VectorXd::Zero(cfg.system.n));
    std::vector<std::pair<double, double>> delta_meas;
    Json scans = Json::array();
    qpr::ResonanceScan main_scan;
    double eps1 = cfg.eps_hi;
    for (int half = 0; half < 3; ++half, eps1 *= 0.5) {
        qpr::ResonanceScan sc = qpr::excluded_parameters(
            cfg.system, eq.x_star, eq.frame, eps1, cfg.eps_cells, cfg.schedule, cfg.options,
            threads);
        if (half == 0) main_scan = sc;
        delta_meas.push_back({eps1, sc.excluded_measure});
        scans.push_back(Json{{"eps1", eps1},
                             {"excluded_measure", sc.excluded_measure},
                             {"excluded_fraction", sc.excluded_fraction}});
    }
    double a1 = qpr::fit_majorant_a1(delta_meas, cfg.a2);
    Json j{{"scans", scans},
           {"a1_fit", std::isfinite(a1) ? Json(a1) : Json("inf")},
           {"a2", cfg.a2},
           {"a3", cfg.a3},
           {"bound_268_at_eps1",
            qpr::measure_bound(std::isfinite(a1) ? a1 : 0.0, cfg.a2, cfg.a3,
                               eq.frame.mu_star, cfg.eps_hi)}};
    write_json(out / "sweep.json", j);
    write_text(out / "cells.csv", qpr::cells_csv(main_scan));
    std::cout << "sweep: excluded fraction " << main_scan.excluded_fraction << " at eps1 = "
              << cfg.eps_hi << ", a1 = " << (std::isfinite(a1) ? std::to_string(a1) : "inf")
              << "\n";
    return kExitOk;
}

int cmd_verify(const qpr::RunConfig& cfg, const fs::path& out, const std::string& resp_path) {
    fs::path p = resp_path.empty() ? out / "response.json" : fs::path(resp_path);
    std::ifstream in(p);
    if (!in) throw qpr::config_error("verify: cannot open response file: " + p.string());
    Json j;
    in >> j;
    double eps = j.at("epsilon").get<double>();
    qpr::FourierSeries resp = qpr::series_from_json(j.at("response"));
    double res = qpr::residual(cfg.system, resp, eps, cfg.oracles.grid_size);
    bool ok = res <= cfg.oracles.residual_bound;
    write_json(out / "verify.json", Json{{"epsilon", eps},
                                         {"residual", res},
                                         {"bound", cfg.oracles.residual_bound},
                                         {"pass", ok}});
    std::cout << "verify: residual = " << res << " (bound " << cfg.oracles.residual_bound
              << ") -> " << (ok ? "pass" : "FAIL") << "\n";
    return ok ? kExitOk : kExitVerification;
}

int cmd_reduce(const qpr::RunConfig& cfg, const Json& raw, const fs::path& out,
               unsigned int seed) {
    std::string kind = "rescale";
    Json payload = Json::object();
    if (raw.contains("reduce")) {
        payload = raw.at("reduce");
        kind = payload.value("kind", "rescale");
    }
    Json j;
    if (kind == "rescale") {
        qpr::ExponentPlan plan = qpr::rescale_general(cfg.system.a, cfg.system.b);
        qpr::SystemSpec tr = qpr::rescaled_at(cfg.system, plan, cfg.epsilon);
        j = Json{{"kind", kind},
                 {"plan",
                  Json{{"a", plan.a}, {"b", plan.b}, {"delta", plan.delta}, {"a0", plan.a0},
                       {"b0", plan.b0}, {"branch_b_ge_2a", plan.branch_b_ge_2a},
                       {"delta1", plan.delta1}}},
                 {"transformed", qpr::system_to_json(tr)}};
    } else if (kind == "second_order") {
        qpr::TaylorFourierField F = qpr::field_from_json(payload.at("F"));
        qpr::TaylorFourierField G =
            payload.contains("G") ? qpr::field_from_json(payload.at("G"))
                                  : qpr::TaylorFourierField(F.n(), F.d(), F.rows(), 1, F.rho());
        qpr::SecondOrderResult r = qpr::second_order_reduce(
            F, G, payload.value("a", 1.0), payload.value("b", 2.0), cfg.epsilon,
            cfg.system.freq, cfg.system.rho, cfg.system.r, cfg.system.trunc);
        j = Json{{"kind", kind},
                 {"J_doubled", matrix_to_json(r.J_doubled)},
                 {"spectra_match", r.spectra_match},
                 {"match_error", r.match_error},
                 {"doubled", qpr::system_to_json(r.doubled)}};
    } else if (kind == "degenerate") {
        qpr::TaylorFourierField phi = qpr::field_from_json(payload.at("phi"));
        qpr::TaylorFourierField h =
            payload.contains("h") ? qpr::field_from_json(payload.at("h"))
                                  : qpr::TaylorFourierField(phi.n(), phi.d(), phi.rows(), 1,
                                                            phi.rho());
        qpr::TaylorFourierField f =
            payload.contains("f") ? qpr::field_from_json(payload.at("f"))
                                  : qpr::TaylorFourierField(phi.n(), phi.d(), phi.rows(), 1,
                                                            phi.rho());
        qpr::SystemSpec sys = qpr::degenerate_scale(phi, h, f, payload.value("l", 2),
                                                    cfg.system.freq, cfg.system.rho,
                                                    cfg.system.r, cfg.system.trunc, seed);
        j = Json{{"kind", kind}, {"transformed", qpr::system_to_json(sys)}};
    } else {
        throw qpr::config_error("reduce: unknown kind '" + kind + "'");
    }
    write_json(out / "reduce.json", j);
    std::cout << "reduce: " << kind << " written\n";
    return kExitOk;
}

int cmd_bounds(const qpr::RunConfig& cfg, const fs::path& out) {
    qpr::EquilibriumResult eq =
        qpr::find_equilibrium(cfg.system.f.average(), Eigen::VectorXd::Zero(cfg.system.n));
    double eps_t = std::pow(cfg.epsilon, cfg.system.a);
    Json rows = Json::array();
    for (int m = 0; m < cfg.schedule.m_max; ++m) {
        qpr::LedgerRow row;
        row.m = m;
        qpr::ledger_step(row, cfg.schedule, cfg.system.freq, eps_t, eq.frame, cfg.options);
        rows.push_back(Json{{"m", m},
                            {"rho_m", row.rho_m},
                            {"sigma_m", row.sigma_m},
                            {"nu_m", row.nu_m},
                            {"tau_m", row.tau_m},
                            {"varpi_nu", row.varpi_nu},
                            {"varpi_nu_bound", row.varpi_nu_bound},
                            {"varpi_s", row.varpi_s},
                            {"varpi_s_bound", row.varpi_s_bound},
                            {"L1", row.L1},
                            {"L2", row.L2},
                            {"E", Json::array({row.E1, row.E2, row.E3, row.E4})}});
    }
    write_json(out / "bounds.json", Json{{"epsilon", cfg.epsilon}, {"rows", rows}});
    std::cout << "bounds: " << cfg.schedule.m_max << " rows written\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-periodic response solutions: averaging + KAM engine"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", resp_path;
    bool strict = false;
    int threads = 1;
    unsigned int seed = 12345;
    app.add_option("--config", config_path, "JSON configuration file")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--strict-ledger", strict, "abort on ledger inequality failures");
    app.add_option("--threads", threads, "worker threads for sweeps");
    app.add_option("--seed", seed, "seed for randomized input checks");

    auto* c_avg = app.add_subcommand("average", "averaged field, equilibrium, spectrum");
    auto* c_nf = app.add_subcommand("normal-form", "averaging transform + normal form data");
    auto* c_run = app.add_subcommand("run", "full KAM iteration and response");
    auto* c_sweep = app.add_subcommand("sweep", "epsilon-grid resonance scan");
    auto* c_ver = app.add_subcommand("verify", "residual check of a stored response");
    c_ver->add_option("--response", resp_path, "response JSON (default: OUT/response.json)");
    auto* c_red = app.add_subcommand("reduce", "exponent / second-order / degenerate reduction");
    auto* c_bnd = app.add_subcommand("bounds", "ledger-only schedule and bound table");
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        qpr::RunConfig cfg = qpr::load_config(config_path);
        cfg.options.strict_ledger = cfg.options.strict_ledger || strict;
        fs::path out(out_dir);
        fs::create_directories(out);

        if (c_avg->parsed()) return cmd_average(cfg, out);
        if (c_nf->parsed()) return cmd_normal_form(cfg, out);
        if (c_run->parsed()) return cmd_run(cfg, out);
        if (c_sweep->parsed()) return cmd_sweep(cfg, out, threads);
        if (c_ver->parsed()) return cmd_verify(cfg, out, resp_path);
        if (c_red->parsed()) {
            std::ifstream in(config_path);
            Json raw;
            in >> raw;
            return cmd_reduce(cfg, raw, out, seed);
        }
        if (c_bnd->parsed()) return cmd_bounds(cfg, out);
        return kExitConfig;
    } catch (const qpr::resonant_epsilon_error& e) {
        std::cerr << "resonant epsilon: " << e.what() << "\n";
        return kExitResonant;
    } catch (const qpr::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const qpr::convergence_error& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
