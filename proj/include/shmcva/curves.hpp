#pragma once

#include "shmcva/market_data.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace shmcva::curves {

/// Nelson-Siegel factors. Zero rate for tenor tau, with x = tau / lambda:
///   y(tau) = b0 + b1 (1 - e^-x)/x + b2 [(1 - e^-x)/x - e^-x]
struct NelsonSiegelParams {
    double b0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double lambda = 1.0;
    bool operator==(const NelsonSiegelParams&) const = default;
};

/// Continuously compounded zero curve of one currency.
class YieldCurve {
public:
    YieldCurve(NelsonSiegelParams params, std::string currency);

    static YieldCurve flat(double rate, std::string currency = "");

    const NelsonSiegelParams& params() const noexcept { return params_; }
    const std::string& currency() const noexcept { return currency_; }

    /// Zero rate for a tenor >= 0; tenor 0 returns the short-end limit b0 + b1.
    double zero_rate(double tenor) const;
    /// P^M(0, T) = exp(-y(T) T).
    double discount(double maturity) const;
    /// Analytic instantaneous forward f^M(0, T) for T >= 0.
    double forward(double maturity) const;
    /// d f^M(0, T) / dT.
    double forward_slope(double maturity) const;

private:
    NelsonSiegelParams params_;
    std::string currency_;
};

/// exp(-y(T - t) (T - t)). Throws NegativeTenor when T < t.
double discount_factor(const YieldCurve& curve, double t, double maturity);

/// f^M(0, T) for T > 0. Throws NonPositiveMaturity otherwise.
double inst_forward(const YieldCurve& curve, double maturity);

struct ZeroPoint {
    double tenor = 0.0;
    double zero_rate = 0.0;
};

struct NelsonSiegelFit {
    YieldCurve curve;
    std::vector<ZeroPoint> observations; // zero rates the fit was run on
    double sse = 0.0;
    double max_abs_residual = 0.0;
    int evaluations = 0; // lambda grid points visited
};

/// Least-squares Nelson-Siegel fit to zero-rate observations: grid search
/// over lambda in {0.1, 0.2, ..., 5.0} with a linear solve for (b0, b1, b2)
/// at each grid point.
NelsonSiegelFit fit_zero_rates(std::span<const ZeroPoint> points, std::string currency);

/// Simple-rate deposit to continuously compounded zero rate.
double deposit_zero_rate(const market::TenorQuote& deposit);

/// Bootstraps par swap rates (annual fixed leg, spot start, floating leg
/// valued at par) to zero rates at each swap tenor. Intermediate coupon
/// dates are discounted by linear interpolation in zero rate between known
/// nodes; `short_end` seeds the node set.
std::vector<ZeroPoint> bootstrap_swap_zeros(std::span<const ZeroPoint> short_end,
                                            std::span<const market::TenorQuote> swaps);

/// Converts deposits to zeros, bootstraps the swaps and fits the combined set.
/// Throws InsufficientQuotes or FitDiverged.
NelsonSiegelFit fit_nelson_siegel(std::span<const market::TenorQuote> deposits,
                                  std::span<const market::TenorQuote> swaps,
                                  std::string currency = "");

/// Par rate of a spot-starting swap with annual fixed payments, used to
/// generate consistent synthetic quotes.
double par_swap_rate(const YieldCurve& curve, double tenor);

/// Simple deposit rate implied by the curve.
double deposit_rate(const YieldCurve& curve, double tenor);

/// Writes tenor,zero,df,fwd rows on a uniform grid for plotting.
void dump_curve(const YieldCurve& curve, const std::filesystem::path& path, double max_tenor = 30.0,
                double step = 0.25);

} // namespace shmcva::curves
