#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qpr/config.hpp"
#include "qpr/oracles.hpp"
#include "qpr/reductions.hpp"
#include "qpr/varpi.hpp"

namespace py = pybind11;
using qpr::Json;

namespace {

// The module speaks JSON strings at the boundary; the qpr package wraps them
// into dicts. This keeps the ABI small and reuses the CLI serialization.
qpr::RunConfig parse_config(const std::string& text) {
    try {
        return qpr::config_from_json(Json::parse(text));
    } catch (const Json::exception& e) {
        throw qpr::config_error(std::string("config: ") + e.what());
    }
}

std::string average_json(const std::string& config_text) {
    qpr::RunConfig cfg = parse_config(config_text);
    qpr::TaylorFourierField f_bar = cfg.system.f.average();
    qpr::EquilibriumResult eq =
        qpr::find_equilibrium(f_bar, Eigen::VectorXd::Zero(cfg.system.n));
    Json xs = Json::array();
    for (int i = 0; i < eq.x_star.size(); ++i) xs.push_back(eq.x_star[i]);
    Json lam = Json::array();
    for (int i = 0; i < eq.frame.n(); ++i)
        lam.push_back(Json{{"re", eq.frame.lambdas[i].real()},
                           {"im", eq.frame.lambdas[i].imag()}});
    return Json{{"x_star", xs},
                {"newton_iterations", eq.iterations},
                {"lambdas", lam},
                {"beta0", eq.frame.beta0},
                {"mu", eq.frame.mu},
                {"alpha", eq.frame.alpha}}
        .dump();
}

std::string run_json(const std::string& config_text) {
    qpr::RunConfig cfg = parse_config(config_text);
    qpr::EquilibriumResult eq =
        qpr::find_equilibrium(cfg.system.f.average(), Eigen::VectorXd::Zero(cfg.system.n));
    qpr::KamReport rep =
        qpr::run_kam(cfg.system, eq.x_star, eq.frame, cfg.schedule, cfg.epsilon, cfg.options);
    Json j = qpr::report_to_json(rep);
    j["residual"] = qpr::residual(cfg.system, rep.response, cfg.epsilon,
                                  cfg.oracles.grid_size);
    j["residual_bound"] = cfg.oracles.residual_bound;
    return j.dump();
}

std::string sweep_json(const std::string& config_text, int threads) {
    qpr::RunConfig cfg = parse_config(config_text);
    if (!cfg.is_sweep)
        throw qpr::config_error("sweep: config must supply epsilon = {hi, cells}");
    qpr::EquilibriumResult eq =
        qpr::find_equilibrium(cfg.system.f.average(), Eigen::VectorXd::Zero(cfg.system.n));
    qpr::ResonanceScan sc =
        qpr::excluded_parameters(cfg.system, eq.x_star, eq.frame, cfg.eps_hi, cfg.eps_cells,
                                 cfg.schedule, cfg.options, threads);
    Json cells = Json::array();
    for (const auto& f : sc.flags)
        cells.push_back(Json{{"eps_lo", f.eps_lo}, {"eps_hi", f.eps_hi}, {"m", f.m},
                             {"k", f.worst_k},     {"lhs", f.lhs},       {"rhs", f.rhs},
                             {"flagged", f.flagged}});
    return Json{{"eps1", cfg.eps_hi},
                {"cells", cells},
                {"excluded_measure", sc.excluded_measure},
                {"excluded_fraction", sc.excluded_fraction}}
        .dump();
}

double verify_response(const std::string& config_text, const std::string& response_text) {
    qpr::RunConfig cfg = parse_config(config_text);
    Json j = Json::parse(response_text);
    qpr::FourierSeries resp = qpr::series_from_json(j.at("response"));
    return qpr::residual(cfg.system, resp, j.at("epsilon").get<double>(),
                         cfg.oracles.grid_size);
}

std::string rescale_json(double a, double b) {
    qpr::ExponentPlan p = qpr::rescale_general(a, b);
    return Json{{"a", p.a},   {"b", p.b},   {"delta", p.delta},
                {"a0", p.a0}, {"b0", p.b0}, {"branch_b_ge_2a", p.branch_b_ge_2a},
                {"delta1", p.delta1}}
        .dump();
}

}  // namespace

PYBIND11_MODULE(_qpr, m) {
    m.doc() = "quasi-periodic response engine (JSON-string core bindings)";

    py::register_exception<qpr::config_error>(m, "ConfigError");
    py::register_exception<qpr::resonant_epsilon_error>(m, "ResonantEpsilonError");
    py::register_exception<qpr::convergence_error>(m, "ConvergenceError");

    m.def("average_json", &average_json, py::arg("config"),
          "Averaged field: equilibrium, spectrum and frame constants (JSON in/out).");
    m.def("run_json", &run_json, py::arg("config"),
          "Full averaging + KAM run; returns the report document (JSON in/out).");
    m.def("sweep_json", &sweep_json, py::arg("config"), py::arg("threads") = 1,
          "Per-cell resonance scan over (0, eps1] (JSON in/out).");
    m.def("verify_response", &verify_response, py::arg("config"), py::arg("response"),
          "Grid residual of a stored response document.");
    m.def("rescale_json", &rescale_json, py::arg("a"), py::arg("b"),
          "Exponent normalization plan for general (a, b).");

    m.def("varpi", &qpr::varpi, py::arg("d"), py::arg("tau"), py::arg("nu"));
    m.def("varpi_upper_bound", &qpr::varpi_upper_bound, py::arg("d"), py::arg("tau"),
          py::arg("nu"));
    m.def("fit_majorant_a1", &qpr::fit_majorant_a1, py::arg("pairs"), py::arg("a2"));
    m.def("measure_bound", &qpr::measure_bound, py::arg("a1"), py::arg("a2"), py::arg("a3"),
          py::arg("mu_star"), py::arg("eps1"));
}
