#include "qpr/config.hpp"

#include <fstream>
#include <sstream>

namespace qpr {

namespace {

Json mat_to_json(const Mat& m) {
    Json re = Json::array(), im = Json::array();
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    return Json{{"re", re}, {"im", im}};
}

Mat mat_from_json(const Json& j, int rows, int cols) {
    const auto& re = j.at("re");
    if (static_cast<int>(re.size()) != rows * cols)
        throw config_error("coefficient: re length does not match rows*cols");
    Mat m(rows, cols);
    bool has_im = j.contains("im");
    if (has_im && j.at("im").size() != re.size())
        throw config_error("coefficient: im length does not match re");
    for (int i = 0; i < rows; ++i)
        for (int c = 0; c < cols; ++c) {
            int q = i * cols + c;
            m(i, c) = Complex(re[q].get<double>(),
                              has_im ? j.at("im")[q].get<double>() : 0.0);
        }
    return m;
}

MultiIndex index_from_json(const Json& j) {
    MultiIndex k;
    for (const auto& v : j) k.push_back(v.get<int>());
    return k;
}

}  // namespace

Json series_to_json(const FourierSeries& s) {
    Json coeffs = Json::array();
    for (const auto& [k, v] : s.coeffs()) {
        Json rec = mat_to_json(v);
        rec["k"] = k;
        coeffs.push_back(rec);
    }
    return Json{{"d", s.d()},   {"rows", s.rows()}, {"cols", s.cols()},
                {"rho", s.rho()}, {"real", s.is_real()}, {"coeffs", coeffs}};
}

FourierSeries series_from_json(const Json& j) {
    FourierSeries s(j.at("d").get<int>(), j.at("rows").get<int>(), j.at("cols").get<int>(),
                    j.at("rho").get<double>(), j.value("real", true));
    for (const auto& rec : j.at("coeffs")) {
        MultiIndex k = index_from_json(rec.at("k"));
        if (static_cast<int>(k.size()) != s.d())
            throw config_error("series coefficient: k length does not match d");
        s.set_coeff(k, mat_from_json(rec, s.rows(), s.cols()));
    }
    return s;
}

Json field_to_json(const TaylorFourierField& f) {
    Json coeffs = Json::array();
    for (const auto& [alpha, c] : f.coeffs())
        for (const auto& [k, v] : c.coeffs()) {
            Json rec = mat_to_json(v);
            rec["alpha"] = alpha;
            rec["k"] = k;
            coeffs.push_back(rec);
        }
    return Json{{"n", f.n()},     {"d", f.d()},        {"rows", f.rows()},
                {"cols", f.cols()}, {"rho", f.rho()},    {"real", f.is_real()},
                {"coeffs", coeffs}};
}

TaylorFourierField field_from_json(const Json& j) {
    TaylorFourierField f(j.at("n").get<int>(), j.at("d").get<int>(), j.at("rows").get<int>(),
                         j.at("cols").get<int>(), j.at("rho").get<double>(),
                         j.value("real", true));
    for (const auto& rec : j.at("coeffs")) {
        MultiIndex alpha = index_from_json(rec.at("alpha"));
        MultiIndex k = index_from_json(rec.at("k"));
        if (static_cast<int>(alpha.size()) != f.n())
            throw config_error("field coefficient: alpha length does not match n");
        if (static_cast<int>(k.size()) != f.d())
            throw config_error("field coefficient: k length does not match d");
        for (int al : alpha)
            if (al < 0) throw config_error("field coefficient: alpha entries must be >= 0");
        FourierSeries c = f.coeff(alpha);
        c.add_coeff(k, mat_from_json(rec, f.rows(), f.cols()));
        f.set_coeff(alpha, c);
    }
    return f;
}

Json system_to_json(const SystemSpec& s) {
    Json omega = Json::array();
    for (int i = 0; i < s.freq.d(); ++i) omega.push_back(s.freq.omega[i]);
    Json g = Json::array();
    for (const auto& gp : s.g_powers) g.push_back(field_to_json(gp));
    return Json{{"n", s.n},     {"d", s.d},     {"omega", omega}, {"gamma", s.freq.gamma},
                {"tau", s.freq.tau}, {"a", s.a},     {"b", s.b},       {"rho", s.rho},
                {"r", s.r},     {"f", field_to_json(s.f)}, {"g", g}};
}

SystemSpec system_from_json(const Json& j) {
    SystemSpec s;
    s.n = j.at("n").get<int>();
    s.d = j.at("d").get<int>();
    const auto& om = j.at("omega");
    if (static_cast<int>(om.size()) != s.d)
        throw config_error("system: omega length does not match d");
    s.freq.omega.resize(s.d);
    for (int i = 0; i < s.d; ++i) s.freq.omega[i] = om[i].get<double>();
    s.freq.gamma = j.value("gamma", 0.1);
    s.freq.tau = j.value("tau", 1.5);
    s.a = j.value("a", 1.0);
    s.b = j.value("b", 2.0);
    s.rho = j.value("rho", 1.0);
    s.r = j.value("r", 1.0);

    if (j.contains("f")) {
        Json jf = j.at("f");
        // Shorthand: a bare coefficient list gets the canonical shape, with the
        // series width set to 2 rho so the averaging bound can be evaluated.
        if (jf.is_array())
            jf = Json{{"n", s.n}, {"d", s.d}, {"rows", s.n}, {"cols", 1},
                      {"rho", 2.0 * s.rho}, {"coeffs", jf}};
        s.f = field_from_json(jf);
    } else {
        s.f = TaylorFourierField(s.n, s.d, s.n, 1, 2.0 * s.rho);
    }
    if (s.f.n() != s.n || s.f.rows() != s.n || s.f.cols() != 1)
        throw config_error("system: f must be an n-vector field over n state variables");
    for (const auto& jg : j.value("g", Json::array())) {
        Json jj = jg;
        if (jj.is_array())
            jj = Json{{"n", s.n}, {"d", s.d}, {"rows", s.n}, {"cols", 1},
                      {"rho", 2.0 * s.rho}, {"coeffs", jj}};
        s.g_powers.push_back(field_from_json(jj));
        const auto& gp = s.g_powers.back();
        if (gp.n() != s.n || gp.rows() != s.n || gp.cols() != 1)
            throw config_error("system: g entries must be n-vector fields");
    }
    return s;
}

Json schedule_to_json(const Schedule& s) {
    return Json{{"rho0", s.rho0},     {"c0", s.c0},         {"kappa", s.kappa},
                {"tau", s.tau},       {"K_trunc", s.K_trunc}, {"deg_max", s.deg_max},
                {"m_max", s.m_max},   {"p_tol", s.p_tol}};
}

Schedule schedule_from_json(const Json& j) {
    Schedule s;
    s.rho0 = j.value("rho0", s.rho0);
    s.c0 = j.value("c0", s.c0);
    s.kappa = j.value("kappa", s.kappa);
    s.tau = j.value("tau", s.tau);
    s.K_trunc = j.value("K_trunc", s.K_trunc);
    s.deg_max = j.value("deg_max", s.deg_max);
    s.m_max = j.value("m_max", s.m_max);
    s.p_tol = j.value("p_tol", s.p_tol);
    s.validate();
    return s;
}

RunConfig config_from_json(const Json& j) {
    RunConfig c;
    c.system = system_from_json(j.at("system"));
    if (j.contains("schedule")) c.schedule = schedule_from_json(j.at("schedule"));
    c.schedule.tau = j.contains("schedule") && j.at("schedule").contains("tau")
                         ? c.schedule.tau
                         : c.system.freq.tau;
    c.system.trunc = Truncation{c.schedule.K_trunc, c.schedule.deg_max};

    if (j.contains("epsilon")) {
        const Json& e = j.at("epsilon");
        if (e.is_number()) {
            c.epsilon = e.get<double>();
        } else {
            c.is_sweep = true;
            c.eps_lo = e.value("lo", 0.0);
            c.eps_hi = e.at("hi").get<double>();
            c.eps_cells = e.value("cells", 64);
            if (c.eps_lo != 0.0)
                throw config_error("epsilon sweep: lo must be 0 (window is (0, hi))");
            if (c.eps_hi <= 0.0 || c.eps_cells < 1)
                throw config_error("epsilon sweep: hi must be > 0 and cells >= 1");
        }
    }
    c.K_check = j.value("K_check", c.schedule.K_trunc);

    if (j.contains("oracles")) {
        const Json& o = j.at("oracles");
        c.oracles.grid_size = o.value("grid_size", c.oracles.grid_size);
        c.oracles.T = o.value("T", c.oracles.T);
        c.oracles.dt = o.value("dt", c.oracles.dt);
        c.oracles.transient_fraction =
            o.value("transient_fraction", c.oracles.transient_fraction);
        c.oracles.residual_bound = o.value("residual_bound", c.oracles.residual_bound);
    }
    if (j.contains("options")) {
        const Json& o = j.at("options");
        c.options.strict_ledger = o.value("strict_ledger", false);
        c.options.neumann_order = o.value("neumann_order", 8);
        c.options.residual_tol = o.value("residual_tol", c.options.residual_tol);
        if (o.contains("M_eff")) {
            const auto& m = o.at("M_eff");
            if (m.size() != 4) throw config_error("options: M_eff must have 4 entries");
            for (int i = 0; i < 4; ++i) c.options.M_eff[i] = m[i].get<double>();
        }
    }
    c.a2 = j.value("a2", c.a2);
    c.a3 = j.value("a3", c.a3);

    c.system.validate(c.K_check);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const Json::exception& e) {
        throw config_error(std::string("config field error: ") + e.what());
    }
}

namespace {

Json dio_to_json(const DioVerdict& v) {
    return Json{{"pass", v.pass}, {"k", v.worst_k}, {"i", v.i}, {"j", v.j},
                {"lhs", v.lhs},   {"rhs", v.rhs}};
}

}  // namespace

Json report_to_json(const KamReport& rep) {
    Json table = Json::array();
    for (const auto& r : rep.table)
        table.push_back(Json{{"m", r.m},         {"p_norm", r.p_norm}, {"B_norm", r.B_norm},
                             {"u_norm", r.u_norm}, {"S_norm", r.S_norm}, {"r_m", r.r_m},
                             {"K_m", r.K_m},     {"eff_p", r.eff_p},   {"eff_B", r.eff_B}});
    Json ledger = Json::array();
    for (const auto& row : rep.ledger.rows) {
        Json checks = Json::array();
        for (const auto& c : row.checks)
            checks.push_back(Json{{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs},
                                  {"ok", c.ok},     {"effective", c.effective}});
        ledger.push_back(Json{{"m", row.m},
                              {"rho_m", row.rho_m},
                              {"sigma_m", row.sigma_m},
                              {"nu_m", row.nu_m},
                              {"tau_m", row.tau_m},
                              {"varpi_nu", row.varpi_nu},
                              {"varpi_s", row.varpi_s},
                              {"L1", row.L1},
                              {"L2", row.L2},
                              {"E", Json::array({row.E1, row.E2, row.E3, row.E4})},
                              {"dio1", dio_to_json(row.dio1)},
                              {"dio2", dio_to_json(row.dio2)},
                              {"hom_residual", row.hom_residual},
                              {"syl_residual", row.syl_residual},
                              {"checks", checks}});
    }
    Json xs = Json::array();
    for (int i = 0; i < rep.x_star.size(); ++i) xs.push_back(rep.x_star[i]);
    return Json{{"converged", rep.converged},
                {"m_final", rep.m_final},
                {"epsilon", rep.epsilon},
                {"x_star", xs},
                {"response", series_to_json(rep.response)},
                {"Psi", series_to_json(rep.Psi)},
                {"table", table},
                {"ledger", ledger},
                {"ledger_all_ok", rep.ledger.all_ok()}};
}

std::string iteration_csv(const KamReport& rep) {
    std::ostringstream os;
    os << "m,p_norm,B_norm,u_norm,S_norm,r_m,K_m,eff_p,eff_B\n";
    os.precision(17);
    for (const auto& r : rep.table)
        os << r.m << ',' << r.p_norm << ',' << r.B_norm << ',' << r.u_norm << ','
           << r.S_norm << ',' << r.r_m << ',' << r.K_m << ',' << r.eff_p << ',' << r.eff_B
           << '\n';
    return os.str();
}

std::string ledger_csv(const KamReport& rep) {
    std::ostringstream os;
    os << "m,check,lhs,rhs,ok,effective\n";
    os.precision(17);
    for (const auto& row : rep.ledger.rows)
        for (const auto& c : row.checks)
            os << row.m << ",\"" << c.name << "\"," << c.lhs << ',' << c.rhs << ','
               << (c.ok ? 1 : 0) << ',' << (c.effective ? 1 : 0) << '\n';
    return os.str();
}

std::string cells_csv(const ResonanceScan& scan) {
    std::ostringstream os;
    os << "eps_lo,eps_hi,m,worst_k,lhs,rhs,flagged\n";
    os.precision(17);
    for (const auto& f : scan.flags) {
        os << f.eps_lo << ',' << f.eps_hi << ',' << f.m << ',';
        for (std::size_t i = 0; i < f.worst_k.size(); ++i)
            os << (i ? ";" : "") << f.worst_k[i];
        os << ',' << f.lhs << ',' << f.rhs << ',' << (f.flagged ? 1 : 0) << '\n';
    }
    return os.str();
}

Json response_to_json(const KamReport& rep) {
    Json xs = Json::array();
    for (int i = 0; i < rep.x_star.size(); ++i) xs.push_back(rep.x_star[i]);
    return Json{{"epsilon", rep.epsilon},
                {"x_star", xs},
                {"response", series_to_json(rep.response)}};
}

}  // namespace qpr
