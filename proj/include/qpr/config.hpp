#ifndef QPR_CONFIG_HPP
#define QPR_CONFIG_HPP

#include <string>

#include <json.hpp>

#include "qpr/kam.hpp"
#include "qpr/resonance.hpp"

namespace qpr {

using Json = nlohmann::json;

struct OracleParams {
    int grid_size = 64;
    double T = 1000.0;
    double dt = 0.01;
    double transient_fraction = 0.2;
    double residual_bound = 1e-8;
};

struct RunConfig {
    SystemSpec system;
    Schedule schedule;
    bool is_sweep = false;
    double epsilon = 1e-3;                  // single-run value
    double eps_lo = 0.0, eps_hi = 0.1;      // sweep window
    int eps_cells = 64;
    int K_check = 30;                       // Diophantine validation range for omega
    OracleParams oracles;
    KamOptions options;
    double a2 = 0.5, a3 = 2.0;              // majorant-fit constants for sweeps
};

// Series / field / spec serialization (lossless round trip).
Json series_to_json(const FourierSeries& s);
FourierSeries series_from_json(const Json& j);
Json field_to_json(const TaylorFourierField& f);
TaylorFourierField field_from_json(const Json& j);
Json system_to_json(const SystemSpec& s);
SystemSpec system_from_json(const Json& j);
Json schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const Json& j);

RunConfig config_from_json(const Json& j);
RunConfig load_config(const std::string& path);

// Report emission.
Json report_to_json(const KamReport& rep);
std::string iteration_csv(const KamReport& rep);
std::string ledger_csv(const KamReport& rep);
std::string cells_csv(const ResonanceScan& scan);

// Stored-response document for `verify`.
Json response_to_json(const KamReport& rep);

}  // namespace qpr

#endif
