#include "shmcva/hw1f.hpp"

#include "shmcva/error.hpp"

#include <cmath>

namespace shmcva::hw1f {

namespace {

void check_order(double s, double t, const char* op)
{
    if (s > t)
        throw Error(ErrorCode::ReversedTimes, std::string(op) + ": start time after end time");
}

// sigma^2/(2 beta) (1 - e^{-2 beta tau}), written with expm1 for small beta*tau
double ou_variance(double beta, double sigma, double tau)
{
    return sigma * sigma * (-std::expm1(-2.0 * beta * tau)) / (2.0 * beta);
}

double theta_unchecked(const Hw1fParams& p, double t)
{
    return p.curve.forward_slope(t) + p.beta * p.curve.forward(t) + ou_variance(p.beta, p.sigma, t);
}

} // namespace

void validate(const Hw1fParams& p)
{
    if (!(p.beta > 0.0))
        throw Error(ErrorCode::InvalidArgument, "HW1F mean reversion must be positive");
    if (!(p.sigma >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "HW1F volatility must be non-negative");
}

double initial_short_rate(const Hw1fParams& p)
{
    return p.curve.forward(kInitialRateTenor);
}

double alpha(const Hw1fParams& p, double t)
{
    const double g = -std::expm1(-p.beta * t);
    return p.curve.forward(t) + p.sigma * p.sigma / (2.0 * p.beta * p.beta) * g * g;
}

GaussianMoments conditional_moments(const Hw1fParams& p, double r_s, double s, double t)
{
    check_order(s, t, "conditional_moments");
    const double decay = std::exp(-p.beta * (t - s));
    return {r_s * decay + alpha(p, t) - alpha(p, s) * decay, ou_variance(p.beta, p.sigma, t - s)};
}

double step_exact(const Hw1fParams& p, double r_s, double s, double t, double z)
{
    const auto m = conditional_moments(p, r_s, s, t);
    return m.mean + std::sqrt(m.variance) * z;
}

double bond_b(const Hw1fParams& p, double t, double maturity)
{
    return -std::expm1(-p.beta * (maturity - t)) / p.beta;
}

double bond_a(const Hw1fParams& p, double t, double maturity)
{
    const double b = bond_b(p, t, maturity);
    const double ratio = p.curve.discount(maturity) / p.curve.discount(t);
    const double convexity = p.sigma * p.sigma / (4.0 * p.beta) * (-std::expm1(-2.0 * p.beta * t)) * b * b;
    return ratio * std::exp(b * p.curve.forward(t) - convexity);
}

double zcb_price(const Hw1fParams& p, double t, double maturity, double r_t)
{
    check_order(t, maturity, "zcb_price");
    if (t == maturity)
        return 1.0;
    return bond_a(p, t, maturity) * std::exp(-bond_b(p, t, maturity) * r_t);
}

double theta(const Hw1fParams& p, double t)
{
    if (!(t > 0.0))
        throw Error(ErrorCode::NonPositiveTime, "theta: t must be positive");
    return theta_unchecked(p, t);
}

double step_euler(const Hw1fParams& p, double r_t, double t, double dt, double z)
{
    if (!(dt > 0.0))
        throw Error(ErrorCode::NonPositiveStep, "step_euler: dt must be positive");
    return r_t + (theta_unchecked(p, t) - p.beta * r_t) * dt + p.sigma * std::sqrt(dt) * z;
}

ExactStepTable::ExactStepTable(const Hw1fParams& p, double dt, std::size_t steps)
    : decay_(std::exp(-p.beta * dt)), stdev_(std::sqrt(ou_variance(p.beta, p.sigma, dt))), shift_(steps)
{
    if (!(dt > 0.0))
        throw Error(ErrorCode::NonPositiveStep, "ExactStepTable: dt must be positive");
    double a_prev = alpha(p, 0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        const double a_next = alpha(p, static_cast<double>(k + 1) * dt);
        shift_[k] = a_next - a_prev * decay_;
        a_prev = a_next;
    }
}

} // namespace shmcva::hw1f
