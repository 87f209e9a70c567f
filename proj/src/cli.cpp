#include "shmcva/cli.hpp"

#include "shmcva/calibration.hpp"
#include "shmcva/csv.hpp"
#include "shmcva/curves.hpp"
#include "shmcva/error.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <thread>

namespace shmcva::cli {

namespace {

constexpr double kDefaultRecovery = 0.25;

template <class F>
auto in_step(std::string_view step, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), std::string(step) + ": " + e.what());
    }
}

std::optional<double> lookup(const std::map<std::string, double>& m, const std::string& key)
{
    const auto it = m.find(key);
    return it == m.end() ? std::nullopt : std::optional<double>(it->second);
}

std::optional<double> lookup(const ParamTable& t, std::string_view key)
{
    const auto it = std::find_if(t.begin(), t.end(), [key](const ParamRow& r) { return r.name == key; });
    return it == t.end() ? std::nullopt : std::optional<double>(it->value);
}

double require(const ParamTable& t, std::string_view key)
{
    if (const auto v = lookup(t, key))
        return *v;
    throw Error(ErrorCode::MissingData, "parameter " + std::string(key) + " is missing");
}

void append_curve(ParamTable& t, const std::string& tag, const curves::NelsonSiegelFit& fit)
{
    const auto& p = fit.curve.params();
    const std::pair<const char*, double> items[] = {{"b0", p.b0}, {"b1", p.b1}, {"b2", p.b2}, {"lambda", p.lambda}};
    for (const auto& [suffix, value] : items)
        t.push_back({"ns_" + tag + "_" + suffix, value, fit.sse, fit.evaluations});
}

curves::YieldCurve curve_from(const ParamTable& t, const std::string& tag)
{
    return curves::YieldCurve({require(t, "ns_" + tag + "_b0"), require(t, "ns_" + tag + "_b1"),
                               require(t, "ns_" + tag + "_b2"), require(t, "ns_" + tag + "_lambda")},
                              tag == "dom" ? "domestic" : "foreign");
}

ParamRow calibrate_sigma(const std::string& name, const std::optional<market::SwaptionQuoteSpec>& quote,
                         const curves::YieldCurve& curve, double beta, const char* file)
{
    if (!quote)
        throw Error(ErrorCode::MissingData, std::string(file) + " not provided and " + name + " not overridden");
    const auto q = calib::make_atm_swaption(curve, quote->expiry, quote->tenor, quote->price);
    const auto s = calib::calibrate_hw_sigma(q, curve, beta);
    return {name, s.sigma, s.objective, s.iterations};
}

market::DatedSeries fx_series(const market::MarketSnapshot& s)
{
    market::DatedSeries out;
    for (const auto& o : s.fx_history) {
        out.dates.push_back(o.date);
        out.values.push_back(o.spot);
    }
    return out;
}

market::DatedSeries intensity_series(const market::MarketSnapshot& s, double rr)
{
    market::DatedSeries out;
    std::vector<double> spreads;
    for (const auto& o : s.cds_history) {
        out.dates.push_back(o.date);
        spreads.push_back(o.spread);
    }
    out.values = credit::spreads_to_intensities(spreads, rr);
    return out;
}

} // namespace

const std::vector<std::string>& override_names()
{
    static const std::vector<std::string> names{
        "beta_d", "sigma_d",      "beta_f",       "sigma_f", "fx_vol", "spot_fx",  "rr",       "kappa",    "theta_lambda",
        "sigma_lambda", "lambda0", "rho12",       "rho13",   "rho23",  "ou_theta", "ou_mu",    "ou_sigma", "ou_g0"};
    return names;
}

ParamTable calibrate(const market::MarketSnapshot& snap, const CalibrationOptions& opt)
{
    const auto& ov = opt.overrides;
    ParamTable t;

    const auto fit_dom = in_step("Curves", [&] { return curves::fit_nelson_siegel(snap.deposits_dom, snap.swaps_dom, "domestic"); });
    const auto fit_for = in_step("Curves", [&] { return curves::fit_nelson_siegel(snap.deposits_for, snap.swaps_for, "foreign"); });
    append_curve(t, "dom", fit_dom);
    append_curve(t, "for", fit_for);

    // Step 1: HW volatilities from one ATM swaption per currency
    const double beta_d = lookup(ov, "beta_d").value_or(opt.beta);
    const double beta_f = lookup(ov, "beta_f").value_or(opt.beta);
    t.push_back({"beta_d", beta_d, {}, {}});
    if (const auto s = lookup(ov, "sigma_d"))
        t.push_back({"sigma_d", *s, {}, {}});
    else
        t.push_back(in_step("Step 1 (domestic swaption calibration)", [&] {
            return calibrate_sigma("sigma_d", snap.swaption_dom, fit_dom.curve, beta_d, "swaption_dom.csv");
        }));
    t.push_back({"beta_f", beta_f, {}, {}});
    if (const auto s = lookup(ov, "sigma_f"))
        t.push_back({"sigma_f", *s, {}, {}});
    else
        t.push_back(in_step("Step 1 (foreign swaption calibration)", [&] {
            return calibrate_sigma("sigma_f", snap.swaption_for, fit_for.curve, beta_f, "swaption_for.csv");
        }));

    t.push_back({"fx_vol", lookup(ov, "fx_vol").value_or(snap.fx_vol), {}, {}});
    t.push_back({"spot_fx", lookup(ov, "spot_fx").value_or(snap.spot_fx), {}, {}});
    const double rr = lookup(ov, "rr").value_or(kDefaultRecovery);
    t.push_back({"rr", rr, {}, {}});

    // Step 2: CIR intensity from the CDS spread history
    in_step("Step 2 (CIR calibration)", [&] {
        const auto k = lookup(ov, "kappa"), th = lookup(ov, "theta_lambda"), sg = lookup(ov, "sigma_lambda");
        if (k && th && sg) {
            t.push_back({"kappa", *k, {}, {}});
            t.push_back({"theta_lambda", *th, {}, {}});
            t.push_back({"sigma_lambda", *sg, {}, {}});
        } else {
            if (snap.cds_history.empty())
                throw Error(ErrorCode::MissingData,
                            "cds_history.csv not provided and kappa/theta_lambda/sigma_lambda not overridden");
            const auto series = intensity_series(snap, rr);
            const auto est = calib::cir_mle(series.values, market::mean_spacing(series.dates));
            t.push_back({"kappa", k.value_or(est.kappa), -est.log_likelihood, est.iterations});
            t.push_back({"theta_lambda", th.value_or(est.theta), -est.log_likelihood, est.iterations});
            t.push_back({"sigma_lambda", sg.value_or(est.sigma), -est.log_likelihood, est.iterations});
        }
        if (const auto l0 = lookup(ov, "lambda0")) {
            t.push_back({"lambda0", *l0, {}, {}});
            return;
        }
        const auto& cds = snap.cds_spreads;
        const auto it = std::find_if(cds.begin(), cds.end(),
                                     [&](const market::TenorQuote& q) { return std::abs(q.tenor - opt.cds_tenor) < 1e-9; });
        if (it != cds.end())
            t.push_back({"lambda0", it->rate / (1.0 - rr), {}, {}});
        else if (!snap.cds_history.empty())
            t.push_back({"lambda0", snap.cds_history.back().spread / (1.0 - rr), {}, {}});
        else
            throw Error(ErrorCode::MissingData, "no CDS quote for lambda0 and lambda0 not overridden");
    });

    // Step 3: correlation matrix R and the OU block for rho(t)
    in_step("Step 3 (correlation estimation)", [&] {
        const auto r12 = lookup(ov, "rho12"), r13 = lookup(ov, "rho13"), r23 = lookup(ov, "rho23");
        if (r12 && r13 && r23) {
            t.push_back({"rho12", *r12, {}, {}});
            t.push_back({"rho13", *r13, {}, {}});
            t.push_back({"rho23", *r23, {}, {}});
        } else {
            if (snap.fx_history.empty() || snap.yield_history_dom.empty() || snap.yield_history_for.empty())
                throw Error(ErrorCode::MissingData,
                            "fx.csv, yields_dom.csv and yields_for.csv are needed unless rho12/rho13/rho23 are overridden");
            const auto aligned = market::align_on_common_dates(
                {fx_series(snap), market::short_end_series(snap.yield_history_dom),
                 market::short_end_series(snap.yield_history_for)});
            const double dt = market::mean_spacing(aligned[0].dates);
            const auto e_fx = corr::extract_residuals(aligned[0].values, dt);
            const auto e_dom = corr::extract_residuals(aligned[1].values, dt);
            const auto e_for = corr::extract_residuals(aligned[2].values, dt);
            t.push_back({"rho12", r12.value_or(corr::pearson(e_fx, e_dom)), {}, {}});
            t.push_back({"rho13", r13.value_or(corr::pearson(e_fx, e_for)), {}, {}});
            t.push_back({"rho23", r23.value_or(corr::pearson(e_dom, e_for)), {}, {}});
        }
        corr::cholesky3({t[t.size() - 3].value, t[t.size() - 2].value, t.back().value});

        const char* ou_keys[] = {"ou_theta", "ou_mu", "ou_sigma", "ou_g0"};
        const bool all_overridden =
            std::all_of(std::begin(ou_keys), std::end(ou_keys), [&](const char* k) { return ov.count(k) > 0; });
        if (!all_overridden && !snap.fx_history.empty() && !snap.cds_history.empty()) {
            const auto aligned = market::align_on_common_dates({fx_series(snap), intensity_series(snap, rr)});
            const double dt = market::mean_spacing(aligned[0].dates);
            const auto e_fx = corr::extract_residuals(aligned[0].values, dt);
            const auto e_lam = corr::extract_residuals(aligned[1].values, dt);
            const auto sliding = corr::sliding_window_corr(e_fx, e_lam, opt.window);
            const auto ou = corr::fit_ou_lsq(sliding.rho, dt);
            const double fitted[] = {ou.theta, ou.mu, ou.sigma, ou.g0};
            for (int i = 0; i < 4; ++i)
                t.push_back({ou_keys[i], lookup(ov, ou_keys[i]).value_or(fitted[i]), {}, {}});
        } else if (all_overridden) {
            for (const char* k : ou_keys)
                t.push_back({k, ov.at(k), {}, {}});
        }
    });
    return t;
}

void apply_overrides(ParamTable& table, const std::map<std::string, double>& overrides)
{
    for (const auto& [name, value] : overrides) {
        const auto it = std::find_if(table.begin(), table.end(), [&](const ParamRow& r) { return r.name == name; });
        if (it == table.end())
            table.push_back({name, value, {}, {}});
        else
            *it = {name, value, {}, {}};
    }
}

void write_params(const ParamTable& table, const std::filesystem::path& path)
{
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : table)
        rows.push_back({r.name, csv::format_double(r.value), r.objective ? csv::format_double(*r.objective) : "",
                        r.iterations ? std::to_string(*r.iterations) : ""});
    csv::write(path, {"parameter", "value", "objective", "iterations"}, rows);
}

ParamTable read_params(const std::filesystem::path& path)
{
    const auto t = csv::read(path, {"parameter", "value", "objective", "iterations"}, "params");
    ParamTable out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        ParamRow r{t.rows[i][0], csv::number(t, i, 1), {}, {}};
        if (!t.rows[i][2].empty())
            r.objective = csv::number(t, i, 2);
        if (!t.rows[i][3].empty())
            r.iterations = static_cast<int>(csv::number(t, i, 3));
        out.push_back(std::move(r));
    }
    return out;
}

engine::ShmParams to_shm_params(const ParamTable& t)
{
    engine::ShmParams p{
        {require(t, "beta_d"), require(t, "sigma_d"), curve_from(t, "dom")},
        {require(t, "beta_f"), require(t, "sigma_f"), curve_from(t, "for")},
        {require(t, "fx_vol"), require(t, "spot_fx")},
        {require(t, "kappa"), require(t, "theta_lambda"), require(t, "sigma_lambda"), require(t, "lambda0"),
         require(t, "rr")},
        {require(t, "rho12"), require(t, "rho13"), require(t, "rho23")},
    };
    return p;
}

std::optional<corr::OuCorrParams> ou_params(const ParamTable& t)
{
    const auto th = lookup(t, "ou_theta"), mu = lookup(t, "ou_mu"), sg = lookup(t, "ou_sigma"), g0 = lookup(t, "ou_g0");
    if (!(th && mu && sg && g0))
        return std::nullopt;
    return corr::OuCorrParams{*th, *mu, *sg, *g0};
}

corr::CorrelationSpec parse_scenario(std::string_view text)
{
    if (text == "stochastic")
        return corr::StochasticCorrelation{};
    constexpr std::string_view prefix = "const:";
    if (text.substr(0, prefix.size()) == prefix) {
        const auto rho = csv::parse_scaled(text.substr(prefix.size()));
        if (rho && std::abs(*rho) <= 1.0)
            return corr::ConstantCorrelation{*rho};
    }
    throw Error(ErrorCode::InvalidConfig,
                "scenario '" + std::string(text) + "' must be 'stochastic' or 'const:<rho>' with |rho| <= 1");
}

const std::vector<std::string>& default_scenarios()
{
    static const std::vector<std::string> s{"stochastic", "const:1",    "const:0.75",
                                            "const:0.5",  "const:0.25", "const:0"};
    return s;
}

ccs::CcsContract default_contract(double psi0)
{
    return ccs::make_contract(1.0, psi0, 0.0, 10.0, 0.25, ccs::Side::Payer);
}

namespace {

struct Options {
    std::string data_dir;
    std::string params_file;
    std::string out_dir = "out";
    std::string valuation_date = "2018-12-23";
    std::size_t paths = 10000;
    std::size_t substeps = 90;
    std::uint64_t seed = 20181223;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::string> scenarios;
    std::size_t window = 50;
    bool grid_dump = false;
    std::map<std::string, std::optional<double>> overrides;
};

std::map<std::string, double> present(const Options& o)
{
    std::map<std::string, double> m;
    for (const auto& [k, v] : o.overrides)
        if (v)
            m[k] = *v;
    return m;
}

ParamTable calibrate_from_data(const Options& o)
{
    if (o.data_dir.empty())
        throw Error(ErrorCode::InvalidConfig, "Load: --data is required to calibrate");
    const auto snap = in_step("Load", [&] {
        return market::load_snapshot(market::fixture_paths(o.data_dir), market::parse_date(o.valuation_date));
    });
    CalibrationOptions copt;
    copt.overrides = present(o);
    copt.window = o.window;
    return calibrate(snap, copt);
}

std::filesystem::path prepare_out(const Options& o)
{
    std::filesystem::path dir(o.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw Error(ErrorCode::InvalidConfig, "output directory " + dir.string() + " is not writable");
    return dir;
}

int cmd_calibrate(const Options& o, std::ostream& out)
{
    const auto dir = prepare_out(o);
    const auto table = calibrate_from_data(o);
    write_params(table, dir / "params.csv");
    for (const auto& r : table)
        out << r.name << " = " << csv::format_double(r.value) << '\n';
    out << "wrote " << (dir / "params.csv").string() << '\n';
    return 0;
}

int cmd_run(const Options& o, std::ostream& out)
{
    const auto dir = prepare_out(o);
    ParamTable table;
    if (!o.params_file.empty()) {
        table = in_step("Load", [&] { return read_params(o.params_file); });
        apply_overrides(table, present(o));
    } else {
        table = calibrate_from_data(o);
        write_params(table, dir / "params.csv");
    }

    const auto labels = o.scenarios.empty() ? default_scenarios() : o.scenarios;
    std::vector<corr::CorrelationSpec> specs;
    for (const auto& l : labels) {
        auto spec = in_step("Step 4 (scenarios)", [&] { return parse_scenario(l); });
        if (auto* s = std::get_if<corr::StochasticCorrelation>(&spec)) {
            const auto ou = ou_params(table);
            if (!ou)
                throw Error(ErrorCode::MissingData,
                            "Step 4 (scenarios): stochastic scenario needs ou_theta, ou_mu, ou_sigma and ou_g0");
            s->ou = *ou;
        }
        specs.push_back(spec);
    }

    const auto params = in_step("Step 4 (parameters)", [&] { return to_shm_params(table); });
    engine::SimConfig cfg;
    cfg.n_paths = o.paths;
    cfg.substeps = o.substeps;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    const auto contract = in_step("Step 4 (contract)", [&] { return default_contract(params.fx.psi0); });

    const auto report = in_step("Step 4-5 (simulation and CVA)", [&] {
        return engine::run_scenarios(params, cfg, specs, contract,
                                     [&](const engine::ScenarioResult& r, const engine::PathSet& paths) {
                                         const auto tag = engine::scenario_tag(r.spec);
                                         engine::write_cva_paths(r, dir / ("cva_paths_" + tag + ".csv"));
                                         if (o.grid_dump)
                                             engine::write_grid_dump(paths, dir / ("grid_dump_" + tag + ".csv"));
                                     });
    });
    engine::write_table1(report, dir / "table1.csv");

    out << "scenario,cva,std_dev,q95\n";
    for (const auto& s : report.scenarios)
        out << s.label << ',' << csv::format_double(s.stats.mean) << ',' << csv::format_double(s.stats.std_dev) << ','
            << csv::format_double(s.stats.q95) << '\n';
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Monte Carlo CVA with wrong-way risk for a cross-currency swap", "shmcva"};
    app.set_config("--config", "", "key = value file; command-line flags take precedence");
    app.require_subcommand(1, 1);
    app.allow_config_extras(CLI::config_extras_mode::error);

    Options o;
    app.add_option("--data", o.data_dir, "Fixture directory with the market CSV files");
    app.add_option("--params", o.params_file, "Parameter file from 'calibrate' (run only; skips calibration)");
    app.add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    app.add_option("--valuation-date", o.valuation_date, "Valuation date YYYY-MM-DD")->capture_default_str();
    app.add_option("--paths", o.paths, "Monte Carlo paths")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--substeps", o.substeps, "Substeps per quarterly grid step")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    app.add_option("--threads", o.threads, "Worker threads (results do not depend on this)")->check(CLI::PositiveNumber);
    app.add_option("--scenario", o.scenarios, "'stochastic' or 'const:<rho>' (repeatable)");
    app.add_option("--window", o.window, "Sliding correlation window")->capture_default_str()->check(CLI::Range(5, 100000));
    app.add_flag("--grid-dump", o.grid_dump, "Write grid_dump_<scenario>.csv");
    for (const auto& name : override_names()) {
        auto flag = name;
        std::replace(flag.begin(), flag.end(), '_', '-');
        const auto names = flag == name ? "--" + name : "--" + flag + ",--" + name;
        app.add_option(names, o.overrides[name], "Override " + name);
    }

    auto* calibrate_cmd = app.add_subcommand("calibrate", "Fit curves and Steps 1-3, write params.csv");
    auto* run_cmd = app.add_subcommand("run", "Simulate the scenarios and write table1.csv");
    calibrate_cmd->fallthrough();
    run_cmd->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: InvalidConfig: " << e.what() << '\n';
        return 2;
    }

    try {
        if (calibrate_cmd->parsed())
            return cmd_calibrate(o, out);
        return cmd_run(o, out);
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: Internal: " << e.what() << '\n';
        return 1;
    }
}

} // namespace shmcva::cli
