// Writes the synthetic market data set under data/fixtures.
//
//   make_fixtures [output_dir]
//
// Curves come from fixed Nelson-Siegel factors, swaption prices from the
// HW1F model on the fitted curves, and the histories from a seeded
// simulation in which FX, the short rates and the default intensity share
// the correlation structure of the model (R for FX and rates, tanh of an OU
// level for FX and intensity).

#include "shmcva/calibration.hpp"
#include "shmcva/correlation.hpp"
#include "shmcva/csv.hpp"
#include "shmcva/curves.hpp"
#include "shmcva/market_data.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <random>

namespace {

using namespace shmcva;

constexpr int kHistoryDays = 2000;
constexpr double kDay = 1.0 / 360.0;

// Nearest multiple of 10^-digits, built from decimal text so the CSV shows it exactly.
double round_to(double x, int digits)
{
    return *csv::parse_scaled(std::to_string(std::llround(x * std::pow(10.0, digits))), digits);
}

std::vector<market::TenorQuote> deposits(const curves::YieldCurve& c)
{
    std::vector<market::TenorQuote> q;
    for (double t : {1.0 / 360.0, 7.0 / 360.0, 0.25, 0.5, 1.0})
        q.push_back({t, round_to(curves::deposit_rate(c, t), 6)});
    return q;
}

std::vector<market::TenorQuote> swaps(const curves::YieldCurve& c)
{
    std::vector<market::TenorQuote> q;
    for (int t = 1; t <= 10; ++t)
        q.push_back({double(t), round_to(curves::par_swap_rate(c, t), 6)});
    return q;
}

market::SwaptionQuoteSpec swaption(const std::vector<market::TenorQuote>& dep, const std::vector<market::TenorQuote>& sw,
                                   double sigma)
{
    const auto fit = curves::fit_nelson_siegel(dep, sw);
    const hw1f::Hw1fParams p{0.01, sigma, fit.curve};
    const auto q = calib::make_atm_swaption(fit.curve, 1.0, 5.0, 0.0);
    return {1.0, 5.0, calib::jamshidian_swaption(p, q)};
}

} // namespace

int main(int argc, char** argv)
{
    const std::filesystem::path dir = argc > 1 ? argv[1] : "data/fixtures";
    std::filesystem::create_directories(dir);

    const curves::YieldCurve usd({0.035, -0.010, -0.005, 2.0}, "USD");
    const curves::YieldCurve eur({0.018, -0.012, -0.002, 2.0}, "EUR");

    market::MarketSnapshot s;
    s.valuation_date = market::parse_date("2018-12-23");
    s.deposits_dom = deposits(usd);
    s.deposits_for = deposits(eur);
    s.swaps_dom = swaps(usd);
    s.swaps_for = swaps(eur);
    s.swaption_dom = swaption(s.deposits_dom, s.swaps_dom, 0.04554);
    s.swaption_for = swaption(s.deposits_for, s.swaps_for, 0.03525);
    s.fx_vol = 0.08;
    s.spot_fx = 1.1435;

    const double rr = 0.25;
    const double lambda0 = 0.3045;
    s.cds_spreads = {{1.0, 0.2100}, {3.0, 0.2210}, {5.0, lambda0 * (1.0 - rr)}, {7.0, 0.2320}, {10.0, 0.2350}};

    // histories on consecutive calendar days ending at the valuation date
    std::mt19937_64 rng(20181223);
    std::normal_distribution<double> n01;
    const auto factor = corr::cholesky3({0.1162656, 0.01965914, 0.1383345});
    const corr::OuCorrParams ou{2.0, 0.3, 0.5, 0.3};
    const corr::OuStepper ou_step(ou, kDay);
    const double kappa = 0.2975, theta = 0.3045, sigma_l = 0.1432;
    const double sq = std::sqrt(kDay);

    double fx = 1.25, y_dom = 0.021, y_for = 0.004, lambda = theta, g = ou.g0, log_vol = 0.0;
    const auto end = std::chrono::sys_days(s.valuation_date);
    for (int i = 0; i < kHistoryDays; ++i) {
        const market::Date d{end - std::chrono::days(kHistoryDays - 1 - i)};
        if (i > 0) {
            const double z1 = n01(rng), z2 = n01(rng), z3 = n01(rng), z4 = n01(rng);
            const double e_fx = z1;
            const double e_dom = factor[1][0] * z1 + factor[1][1] * z2;
            const double e_for = factor[2][0] * z1 + factor[2][1] * z2 + factor[2][2] * z3;
            const double rho = corr::rho_of_g(g);
            const double e_lam = rho * e_fx + std::sqrt(1.0 - rho * rho) * z4;

            log_vol = 0.98 * log_vol + 0.2 * std::sqrt(1.0 - 0.98 * 0.98) * n01(rng);
            const double vol = s.fx_vol * std::exp(log_vol);
            fx *= std::exp(-0.5 * vol * vol * kDay + vol * sq * e_fx);
            y_dom *= std::exp(-0.5 * 0.09 * kDay + 0.3 * sq * e_dom);
            y_for *= std::exp(-0.5 * 0.16 * kDay + 0.4 * sq * e_for);
            const double pos = std::max(lambda, 0.0);
            lambda += kappa * (theta - pos) * kDay + sigma_l * std::sqrt(pos) * sq * e_lam;
            g = ou_step.step(g, n01(rng));
        }
        s.fx_history.push_back({d, round_to(fx, 6)});
        s.yield_history_dom.push_back({d, 0.25, round_to(y_dom, 8)});
        s.yield_history_dom.push_back({d, 10.0, round_to(y_dom + 0.012, 8)});
        s.yield_history_for.push_back({d, 0.25, round_to(y_for, 8)});
        s.yield_history_for.push_back({d, 10.0, round_to(y_for + 0.009, 8)});
        s.cds_history.push_back({d, round_to(std::max(lambda, 1e-4) * (1.0 - rr), 8)});
    }

    const auto paths = market::write_snapshot(s, dir);
    for (const auto& [key, path] : paths)
        std::cout << key << " -> " << path.string() << '\n';
    return 0;
}
