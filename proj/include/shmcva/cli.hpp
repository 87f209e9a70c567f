#pragma once

#include "shmcva/correlation.hpp"
#include "shmcva/engine.hpp"
#include "shmcva/market_data.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace shmcva::cli {

/// One row of params.csv. objective and iterations are blank for inputs
/// that were not optimised.
struct ParamRow {
    std::string name;
    double value = 0.0;
    std::optional<double> objective;
    std::optional<int> iterations;
};
using ParamTable = std::vector<ParamRow>;

/// Parameter names accepted as overrides; each maps to the flag
/// --<name with '_' replaced by '-'>.
const std::vector<std::string>& override_names();

struct CalibrationOptions {
    std::map<std::string, double> overrides; // keyed by parameter name, e.g. "sigma_d"
    std::size_t window = 50;                 // sliding correlation window
    double cds_tenor = 5.0;                  // tenor whose spread sets lambda0
    double beta = 0.01;                      // fixed HW mean reversion (both currencies)
};

/// Curve fits and Steps 1-3 on a snapshot. Overridden parameters skip the
/// estimation that would produce them. Errors name the failing step.
ParamTable calibrate(const market::MarketSnapshot& snapshot, const CalibrationOptions& options);

/// Replaces or appends override values in `table`.
void apply_overrides(ParamTable& table, const std::map<std::string, double>& overrides);

void write_params(const ParamTable& table, const std::filesystem::path& path);
ParamTable read_params(const std::filesystem::path& path);

/// Model inputs from a parameter table. Throws MissingData naming the
/// absent parameter.
engine::ShmParams to_shm_params(const ParamTable& table);
/// OU block when ou_theta, ou_mu, ou_sigma and ou_g0 are all present.
std::optional<corr::OuCorrParams> ou_params(const ParamTable& table);

/// "stochastic" or "const:<rho>". Throws InvalidConfig.
corr::CorrelationSpec parse_scenario(std::string_view text);
const std::vector<std::string>& default_scenarios();

/// Trade priced by `run`: payer CCS with N^d = 1, quarterly over 10 years.
ccs::CcsContract default_contract(double psi0);

/// Entry point. Returns the process exit code; errors go to `err` as one line
/// "error: <Category>: <step>: <message>".
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace shmcva::cli
