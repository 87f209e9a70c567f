#include "shmcva/engine.hpp"

#include "shmcva/csv.hpp"
#include "shmcva/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <random>
#include <thread>

namespace shmcva::engine {

namespace {

constexpr std::uint32_t kShmStream = 0;
constexpr std::uint32_t kOuStream = 1;

std::mt19937_64 make_generator(std::uint64_t seed, std::size_t path, std::uint32_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(std::uint64_t(path) >> 32), stream};
    return std::mt19937_64(seq);
}

std::size_t grid_count(const SimConfig& cfg)
{
    return static_cast<std::size_t>(std::llround(cfg.horizon / cfg.grid_step));
}

struct PathWriter {
    PathSet& out;
    const ShmParams& params;
    const SimConfig& cfg;
    const corr::CorrelationSpec& spec;
    const corr::Factor3& factor;
    const hw1f::ExactStepTable& dom_steps;
    const hw1f::ExactStepTable& fgn_steps;
    const corr::OuStepper* ou;

    void simulate(std::size_t path) const
    {
        const double dt = cfg.grid_step / static_cast<double>(cfg.substeps);
        const double sqrt_dt = std::sqrt(dt);
        auto shm_rng = make_generator(cfg.seed, path, kShmStream);
        std::normal_distribution<double> shm_normal;
        std::mt19937_64 ou_rng;
        std::normal_distribution<double> ou_normal;
        if (ou)
            ou_rng = make_generator(cfg.seed, path, kOuStream);

        double r_d = hw1f::initial_short_rate(params.dom);
        double r_f = hw1f::initial_short_rate(params.fgn);
        double psi = params.fx.psi0;
        double lambda = params.cir.lambda0;
        double g = ou ? std::get<corr::StochasticCorrelation>(spec).ou.g0 : 0.0;
        double rho = corr::current_rho(spec, g);
        double int_r = 0.0, int_lambda = 0.0;

        auto record = [&](std::size_t i) {
            const std::size_t k = out.index(path, i);
            out.r_d[k] = r_d;
            out.r_f[k] = r_f;
            out.psi[k] = psi;
            out.lambda[k] = lambda;
            out.rho[k] = rho;
            out.df[k] = std::exp(-int_r);
            out.survival[k] = std::exp(-int_lambda);
            for (double v : {r_d, r_f, psi, lambda, int_r, int_lambda})
                if (!std::isfinite(v))
                    throw Error(ErrorCode::NonFiniteState, "non-finite state on path " + std::to_string(path) +
                                                               " at t = " + csv::format_double(out.times[i]));
        };
        record(0);

        const bool drivers = cfg.record_drivers;
        std::size_t sub = 0;
        for (std::size_t i = 1; i <= out.n_grid; ++i) {
            double s_psi = 0.0, s_dom = 0.0, s_fgn = 0.0, s_lam = 0.0, s_cov = 0.0, s_rho = 0.0;
            for (std::size_t k = 0; k < cfg.substeps; ++k, ++sub) {
                const std::array<double, 4> z{shm_normal(shm_rng), shm_normal(shm_rng), shm_normal(shm_rng),
                                              shm_normal(shm_rng)};
                const auto dw = corr::correlated_increments(factor, rho, z, dt);
                if (drivers) {
                    s_psi += dw.psi;
                    s_dom += dw.dom;
                    s_fgn += dw.fgn;
                    s_lam += dw.lambda;
                    s_cov += dw.psi * dw.lambda;
                    s_rho += rho * dt;
                }
                int_r += r_d * dt;
                int_lambda += std::max(lambda, 0.0) * dt;

                psi = fx::step_fx(params.fx, psi, r_d, r_f, dt, dw.psi);
                r_d = dom_steps.step(sub, r_d, dw.dom / sqrt_dt);
                r_f = fgn_steps.step(sub, r_f, dw.fgn / sqrt_dt);
                lambda = credit::step_cir(params.cir, lambda, dt, dw.lambda);
                if (ou) {
                    g = ou->step(g, ou_normal(ou_rng));
                    rho = corr::rho_of_g(g);
                }
            }
            record(i);
            if (drivers) {
                const std::size_t k = path * out.n_grid + (i - 1);
                auto& d = out.drivers;
                d.dw_psi[k] = s_psi;
                d.dw_dom[k] = s_dom;
                d.dw_fgn[k] = s_fgn;
                d.dw_lambda[k] = s_lam;
                d.covariation[k] = s_cov;
                d.rho_integral[k] = s_rho;
            }
        }
    }
};

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn)
{
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::size_t> failed_at(workers, n);
    auto run = [&](std::size_t w) {
        const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
        for (std::size_t j = lo; j < hi; ++j) {
            try {
                fn(j);
            } catch (...) {
                errors[w] = std::current_exception();
                failed_at[w] = j;
                return;
            }
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(run, w);
        for (auto& t : pool)
            t.join();
    }
    // report the failure with the lowest path index, independent of scheduling
    const auto first = std::min_element(failed_at.begin(), failed_at.end());
    if (*first < n)
        std::rethrow_exception(errors[static_cast<std::size_t>(first - failed_at.begin())]);
}

} // namespace

void validate(const SimConfig& cfg)
{
    if (cfg.n_paths < 1)
        throw Error(ErrorCode::InvalidConfig, "n_paths must be at least 1");
    if (cfg.substeps < 1)
        throw Error(ErrorCode::InvalidConfig, "substeps must be at least 1");
    if (!(cfg.grid_step > 0.0) || !(cfg.horizon > 0.0))
        throw Error(ErrorCode::InvalidConfig, "horizon and grid step must be positive");
    const double n = cfg.horizon / cfg.grid_step;
    if (std::abs(n - std::round(n)) > 1e-9)
        throw Error(ErrorCode::InvalidConfig, "horizon must be a whole number of grid steps");
}

PathSet simulate_paths(const ShmParams& params, const SimConfig& cfg, const corr::CorrelationSpec& spec)
{
    validate(cfg);
    hw1f::validate(params.dom);
    hw1f::validate(params.fgn);
    fx::validate(params.fx);
    credit::validate(params.cir);
    const auto factor = corr::cholesky3(params.corr);

    std::optional<corr::OuStepper> ou;
    const double dt = cfg.grid_step / static_cast<double>(cfg.substeps);
    if (const auto* s = std::get_if<corr::StochasticCorrelation>(&spec)) {
        corr::validate(s->ou);
        ou.emplace(s->ou, dt);
    } else if (!(std::abs(std::get<corr::ConstantCorrelation>(spec).rho) <= 1.0)) {
        throw Error(ErrorCode::InvalidRho, "constant correlation must lie in [-1, 1]");
    }

    PathSet out;
    out.n_paths = cfg.n_paths;
    out.n_grid = grid_count(cfg);
    out.grid_step = cfg.grid_step;
    out.times.resize(out.n_grid + 1);
    for (std::size_t i = 0; i <= out.n_grid; ++i)
        out.times[i] = static_cast<double>(i) * cfg.grid_step;
    const std::size_t cells = out.n_paths * (out.n_grid + 1);
    for (auto* field : {&out.r_d, &out.r_f, &out.psi, &out.lambda, &out.rho, &out.df, &out.survival})
        field->assign(cells, 0.0);
    if (cfg.record_drivers) {
        auto& d = out.drivers;
        for (auto* field : {&d.dw_psi, &d.dw_dom, &d.dw_fgn, &d.dw_lambda, &d.covariation, &d.rho_integral})
            field->assign(out.n_paths * out.n_grid, 0.0);
    }

    const std::size_t total_steps = out.n_grid * cfg.substeps;
    const hw1f::ExactStepTable dom_steps(params.dom, dt, total_steps);
    const hw1f::ExactStepTable fgn_steps(params.fgn, dt, total_steps);
    const PathWriter writer{out, params, cfg, spec, factor, dom_steps, fgn_steps, ou ? &*ou : nullptr};
    parallel_for(cfg.n_paths, cfg.threads, [&writer](std::size_t j) { writer.simulate(j); });
    return out;
}

double pathwise_cva(std::span<const double> df, std::span<const double> exposure, std::span<const double> survival,
                    double rr)
{
    if (!(rr >= 0.0 && rr <= 1.0))
        throw Error(ErrorCode::InvalidRecovery, "recovery rate must lie in [0, 1]");
    if (df.size() != exposure.size() || survival.size() != df.size() + 1)
        throw Error(ErrorCode::GridMismatch, "pathwise_cva: series lengths do not match the grid");
    double sum = 0.0;
    for (std::size_t i = 0; i < df.size(); ++i)
        sum += df[i] * exposure[i] * (survival[i] - survival[i + 1]);
    return (1.0 - rr) * sum;
}

std::vector<double> exposure_profile(const PathSet& paths, const ShmParams& params, const ccs::CcsContract& contract,
                                     std::size_t path)
{
    std::vector<double> v(paths.n_grid + 1, 0.0);
    for (std::size_t i = 0; i <= paths.n_grid; ++i) {
        const double t = paths.times[i];
        if (t > contract.maturity + 1e-9)
            break;
        const std::size_t k = paths.index(path, i);
        const double rd = paths.r_d[k], rf = paths.r_f[k];
        const ccs::ZcbFunction pd = [&](double s, double m) { return hw1f::zcb_price(params.dom, s, m, rd); };
        const ccs::ZcbFunction pf = [&](double s, double m) { return hw1f::zcb_price(params.fgn, s, m, rf); };
        v[i] = ccs::exposure(ccs::value_payer(contract, t, paths.psi[k], pd, pf));
    }
    return v;
}

std::vector<double> cva_pathwise(const PathSet& paths, const ShmParams& params, const ccs::CcsContract& contract,
                                 double rr)
{
    ccs::validate(contract);
    const double step = paths.grid_step;
    if (std::abs(contract.start) > 1e-9 || contract.maturity > paths.times.back() + 1e-9 || std::abs(contract.interval - step) > 1e-9)
        throw Error(ErrorCode::GridMismatch, "contract schedule does not coincide with the simulation grid");

    std::vector<double> cva(paths.n_paths);
    for (std::size_t j = 0; j < paths.n_paths; ++j) {
        const auto v = exposure_profile(paths, params, contract, j);
        const auto df = paths.row(paths.df, j).subspan(1);
        cva[j] = pathwise_cva(df, std::span<const double>(v).subspan(1), paths.row(paths.survival, j), rr);
    }
    return cva;
}

double quantile(std::vector<double> values, double p)
{
    if (values.empty())
        throw Error(ErrorCode::EmptyVector, "quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Statistics summarize(std::span<const double> values)
{
    if (values.empty())
        throw Error(ErrorCode::EmptyVector, "no CVA values to summarize");
    // moments of the shifted sample v - v_0, so a constant sample gives exactly zero spread
    const double n = static_cast<double>(values.size());
    const double shift = values.front();
    double shifted_sum = 0.0;
    for (double v : values)
        shifted_sum += v - shift;
    const double shifted_mean = shifted_sum / n;
    Statistics s;
    s.mean = shift + shifted_mean;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - shift - shifted_mean) * (v - shift - shifted_mean);
        s.std_dev = std::sqrt(ss / (n - 1.0));
    }
    s.q95 = quantile(std::vector<double>(values.begin(), values.end()), 0.95);
    return s;
}

std::string scenario_label(const corr::CorrelationSpec& spec)
{
    if (const auto* c = std::get_if<corr::ConstantCorrelation>(&spec))
        return "const:" + csv::format_double(c->rho);
    return "stochastic";
}

std::string scenario_tag(const corr::CorrelationSpec& spec)
{
    auto label = scenario_label(spec);
    std::replace(label.begin(), label.end(), ':', '_');
    return label;
}

CvaReport report(std::vector<ScenarioResult> scenarios, double rr, const SimConfig& cfg)
{
    for (auto& s : scenarios)
        s.stats = summarize(s.cva);
    return {std::move(scenarios), rr, cfg};
}

CvaReport run_scenarios(const ShmParams& params, const SimConfig& cfg, const std::vector<corr::CorrelationSpec>& specs,
                        const ccs::CcsContract& contract,
                        const std::function<void(const ScenarioResult&, const PathSet&)>& on_paths)
{
    if (specs.empty())
        throw Error(ErrorCode::InvalidConfig, "scenario list is empty");
    std::vector<ScenarioResult> results;
    for (const auto& spec : specs) {
        const auto paths = simulate_paths(params, cfg, spec);
        ScenarioResult r{scenario_label(spec), spec, cva_pathwise(paths, params, contract, params.cir.rr), {}};
        r.stats = summarize(r.cva);
        if (on_paths)
            on_paths(r, paths);
        results.push_back(std::move(r));
    }
    return report(std::move(results), params.cir.rr, cfg);
}

void write_table1(const CvaReport& report, const std::filesystem::path& path)
{
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : report.scenarios)
        rows.push_back({s.label, csv::format_double(s.stats.mean), csv::format_double(s.stats.std_dev),
                        csv::format_double(s.stats.q95)});
    csv::write(path, {"scenario", "cva", "std_dev", "q95"}, rows);
}

void write_cva_paths(const ScenarioResult& result, const std::filesystem::path& path)
{
    std::vector<std::vector<std::string>> rows;
    rows.reserve(result.cva.size());
    for (std::size_t j = 0; j < result.cva.size(); ++j)
        rows.push_back({std::to_string(j), csv::format_double(result.cva[j])});
    csv::write(path, {"path", "cva"}, rows);
}

void write_grid_dump(const PathSet& paths, const std::filesystem::path& path)
{
    std::vector<std::vector<std::string>> rows;
    rows.reserve(paths.n_paths * (paths.n_grid + 1));
    for (std::size_t j = 0; j < paths.n_paths; ++j)
        for (std::size_t i = 0; i <= paths.n_grid; ++i) {
            const std::size_t k = paths.index(j, i);
            rows.push_back({std::to_string(j), csv::format_double(paths.times[i]), csv::format_double(paths.r_d[k]),
                            csv::format_double(paths.r_f[k]), csv::format_double(paths.psi[k]),
                            csv::format_double(paths.lambda[k]), csv::format_double(paths.rho[k]),
                            csv::format_double(paths.df[k]), csv::format_double(paths.survival[k])});
        }
    csv::write(path, {"path", "t", "r_d", "r_f", "psi", "lambda", "rho", "df", "survival"}, rows);
}

} // namespace shmcva::engine
