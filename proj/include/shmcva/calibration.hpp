#pragma once

#include "shmcva/credit.hpp"
#include "shmcva/curves.hpp"
#include "shmcva/hw1f.hpp"

#include <span>
#include <vector>

namespace shmcva::calib {

/// European swaption on a fixed-vs-floating swap starting at `expiry`, with
/// fixed payments at `payment_dates` (T_1..T_m) on notional 1.
struct SwaptionQuote {
    double expiry = 0.0;
    std::vector<double> payment_dates;
    double fixed_rate = 0.0;
    double price = 0.0;
    bool payer = true;
};

/// Throws InvalidArgument unless 0 < T_0 < T_1 < ... < T_m and K > 0.
void validate(const SwaptionQuote& q);

/// Forward par rate of the underlying swap on the market curve.
double forward_swap_rate(const curves::YieldCurve& curve, double expiry, std::span<const double> payment_dates);

/// ATM payer swaption with fixed payments every `fixed_interval` years.
SwaptionQuote make_atm_swaption(const curves::YieldCurve& curve, double expiry, double tenor, double price,
                                double fixed_interval = 1.0);

/// Put on the zero-coupon bond P(T0, Ti) struck at `strike`, under HW1F.
/// Falls back to the intrinsic value max(K P(0,T0) - P(0,Ti), 0) when the
/// bond-price volatility is zero.
double zcb_put_hw(const hw1f::Hw1fParams& p, double t0, double ti, double strike);
double zcb_call_hw(const hw1f::Hw1fParams& p, double t0, double ti, double strike);

/// Rate r* at which the coupon bond sum c_i P(T0, T_i; r*) equals 1.
/// Throws RootBracketFailure.
double jamshidian_critical_rate(const hw1f::Hw1fParams& p, const SwaptionQuote& q);

/// Swaption price via Jamshidian's decomposition into zero-coupon bond options.
double jamshidian_swaption(const hw1f::Hw1fParams& p, const SwaptionQuote& q);

struct SigmaCalibration {
    double sigma = 0.0;
    double objective = 0.0; // squared price error at sigma
    int iterations = 0;
};

inline constexpr double kMaxCalibrationSigma = 0.5;

/// HW1F volatility matching the quote's price at fixed mean reversion, found
/// by bisection on the increasing sigma -> price map over [0, 0.5].
/// Throws PriceUnattainable.
SigmaCalibration calibrate_hw_sigma(const SwaptionQuote& q, const curves::YieldCurve& curve, double beta_fixed);

/// ln I_nu(z) for nu > -1, z >= 0: peak-centred power series summed in the
/// log domain, or Hankel's expansion when z is large relative to nu^2.
double log_bessel_i(double nu, double z);

struct CirEstimate {
    double kappa = 0.0;
    double theta = 0.0;
    double sigma = 0.0;
    double log_likelihood = 0.0;
    int iterations = 0;
};

/// Log density of lambda_{t+dt} = next given lambda_t = prev (scaled
/// noncentral chi-square).
double cir_transition_log_density(double prev, double next, double dt, double kappa, double theta, double sigma);

/// Sum of transition log densities over the series.
double cir_log_likelihood(std::span<const double> lambdas, double dt, double kappa, double theta, double sigma);

/// Moment-matching start point: AR(1) regression for kappa and theta, the
/// conditional-variance formula for sigma. Throws LikelihoodNonFinite for a
/// constant series.
CirEstimate cir_moment_estimate(std::span<const double> lambdas, double dt);

/// Maximum-likelihood CIR fit (Nelder-Mead over log-parameters started from
/// the moment estimate). Throws NonPositiveIntensityInput, TooShort or
/// LikelihoodNonFinite.
CirEstimate cir_mle(std::span<const double> lambdas, double dt);

} // namespace shmcva::calib
