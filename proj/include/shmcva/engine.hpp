#pragma once

#include "shmcva/ccs.hpp"
#include "shmcva/correlation.hpp"
#include "shmcva/credit.hpp"
#include "shmcva/fx.hpp"
#include "shmcva/hw1f.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace shmcva::engine {

/// Calibrated inputs of the hybrid model.
struct ShmParams {
    hw1f::Hw1fParams dom;
    hw1f::Hw1fParams fgn;
    fx::FxParams fx;
    credit::CirParams cir;
    corr::CorrMatrix corr;
};

struct SimConfig {
    std::size_t n_paths = 10000;
    double horizon = 10.0;
    double grid_step = 0.25;
    std::size_t substeps = 90;
    std::uint64_t seed = 20181223;
    unsigned threads = 1;
    bool record_drivers = false; // keep per-interval driver sums (tests and diagnostics)
};

/// Throws InvalidConfig unless n_paths >= 1, substeps >= 1 and the horizon
/// is a whole number of grid steps.
void validate(const SimConfig& cfg);

/// Simulated state on the grid t_i = i * grid_step, i = 0..n_grid. Arrays
/// are path-major: value(path, i) sits at path * (n_grid + 1) + i.
struct PathSet {
    std::size_t n_paths = 0;
    std::size_t n_grid = 0;
    double grid_step = 0.0;
    std::vector<double> times;
    std::vector<double> r_d, r_f, psi, lambda, rho, df, survival;

    /// Per path and grid interval (path * n_grid + i - 1 for interval (t_{i-1}, t_i]):
    /// sums of the Brownian increments, the realised covariation
    /// sum dW_psi dW_lambda, and the left-point integral of rho.
    struct Drivers {
        std::vector<double> dw_psi, dw_dom, dw_fgn, dw_lambda, covariation, rho_integral;
    };
    Drivers drivers; // empty unless SimConfig::record_drivers

    std::size_t index(std::size_t path, std::size_t i) const noexcept { return path * (n_grid + 1) + i; }
    std::span<const double> row(const std::vector<double>& field, std::size_t path) const
    {
        return std::span<const double>(field).subspan(path * (n_grid + 1), n_grid + 1);
    }
};

/// Simulates the four hybrid SDEs (plus the OU level for a stochastic spec)
/// on `substeps` equal substeps per grid step. Path j draws its normals from
/// generators seeded by (seed, j), so results do not depend on cfg.threads
/// and constant-correlation scenarios share their draws. Throws
/// NonFiniteState naming the first offending path.
PathSet simulate_paths(const ShmParams& params, const SimConfig& cfg, const corr::CorrelationSpec& spec);

/// (1 - RR) sum_i DF(t_i) V+(t_i) (S(t_{i-1}) - S(t_i)); `df` and `exposure`
/// hold t_1..t_n, `survival` holds t_0..t_n.
double pathwise_cva(std::span<const double> df, std::span<const double> exposure, std::span<const double> survival,
                    double rr);

/// Pathwise CVA of the payer CCS. The contract schedule must start at 0 and
/// lie on the path grid, otherwise GridMismatch. Throws InvalidRecovery.
std::vector<double> cva_pathwise(const PathSet& paths, const ShmParams& params, const ccs::CcsContract& contract,
                                 double rr);

/// Exposure V+(t_i) of one path at every grid date (zero after maturity).
std::vector<double> exposure_profile(const PathSet& paths, const ShmParams& params, const ccs::CcsContract& contract,
                                     std::size_t path);

struct Statistics {
    double mean = 0.0;
    double std_dev = 0.0; // sample (n - 1)
    double q95 = 0.0;     // linear interpolation between order statistics, h = (n - 1) p
};

/// Throws EmptyVector.
Statistics summarize(std::span<const double> values);

/// Quantile by linear interpolation at h = (n - 1) p on the sorted sample.
double quantile(std::vector<double> values, double p);

/// "stochastic" or "const:<rho>".
std::string scenario_label(const corr::CorrelationSpec& spec);
/// Label safe for file names ("const_0.5").
std::string scenario_tag(const corr::CorrelationSpec& spec);

struct ScenarioResult {
    std::string label;
    corr::CorrelationSpec spec;
    std::vector<double> cva;
    Statistics stats;
};

struct CvaReport {
    std::vector<ScenarioResult> scenarios;
    double rr = 0.0;
    SimConfig config;
};

CvaReport report(std::vector<ScenarioResult> scenarios, double rr, const SimConfig& cfg);

/// Simulates and prices every scenario in order. `on_paths` (if set) sees
/// each PathSet before it is discarded.
CvaReport run_scenarios(const ShmParams& params, const SimConfig& cfg, const std::vector<corr::CorrelationSpec>& specs,
                        const ccs::CcsContract& contract,
                        const std::function<void(const ScenarioResult&, const PathSet&)>& on_paths = {});

/// scenario,cva,std_dev,q95
void write_table1(const CvaReport& report, const std::filesystem::path& path);
/// path,cva
void write_cva_paths(const ScenarioResult& result, const std::filesystem::path& path);
/// path,t,r_d,r_f,psi,lambda,rho,df,survival
void write_grid_dump(const PathSet& paths, const std::filesystem::path& path);

} // namespace shmcva::engine
