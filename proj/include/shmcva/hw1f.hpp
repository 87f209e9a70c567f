#pragma once

#include "shmcva/curves.hpp"

#include <cstddef>
#include <vector>

namespace shmcva::hw1f {

/// Hull-White one-factor model fitted to `curve`. beta is the mean-reversion
/// speed (1/yr), sigma the absolute short-rate volatility.
struct Hw1fParams {
    double beta = 0.01;
    double sigma = 0.0;
    curves::YieldCurve curve;
};

/// Throws InvalidArgument unless beta > 0 and sigma >= 0.
void validate(const Hw1fParams& p);

/// Maturity used for the model's initial short rate, r(0) = f^M(0, 1/360).
inline constexpr double kInitialRateTenor = 1.0 / 360.0;

double initial_short_rate(const Hw1fParams& p);

/// alpha(t) = f^M(0,t) + sigma^2 / (2 beta^2) (1 - e^{-beta t})^2
double alpha(const Hw1fParams& p, double t);

struct GaussianMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Law of r(t) given r(s) = r_s. Throws ReversedTimes when s > t.
GaussianMoments conditional_moments(const Hw1fParams& p, double r_s, double s, double t);

/// Exact transition r(s) -> r(t) driven by the standard normal draw z.
double step_exact(const Hw1fParams& p, double r_s, double s, double t, double z);

/// B(t,T) = (1 - e^{-beta (T - t)}) / beta
double bond_b(const Hw1fParams& p, double t, double maturity);
/// Curve-fitted A(t,T).
double bond_a(const Hw1fParams& p, double t, double maturity);

/// Zero-coupon bond P(t,T) = A(t,T) e^{-B(t,T) r_t}. Throws ReversedTimes.
double zcb_price(const Hw1fParams& p, double t, double maturity, double r_t);

/// Drift function that reproduces the initial curve. Throws NonPositiveTime.
double theta(const Hw1fParams& p, double t);

/// Euler step of dr = (theta(t) - beta r) dt + sigma dW with theta taken at
/// the left point. Cross-check for the exact scheme only.
double step_euler(const Hw1fParams& p, double r_t, double t, double dt, double z);

/// Exact-transition coefficients on a uniform grid t_k = k * dt, so that
/// r_{k+1} = decay * r_k + shift[k] + stdev * z.
class ExactStepTable {
public:
    ExactStepTable(const Hw1fParams& p, double dt, std::size_t steps);

    double step(std::size_t k, double r, double z) const noexcept
    {
        return decay_ * r + shift_[k] + stdev_ * z;
    }
    std::size_t size() const noexcept { return shift_.size(); }

private:
    double decay_;
    double stdev_;
    std::vector<double> shift_;
};

} // namespace shmcva::hw1f
