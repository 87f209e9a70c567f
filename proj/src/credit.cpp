#include "shmcva/credit.hpp"

#include "shmcva/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace shmcva::credit {

void validate(const CirParams& p)
{
    if (!(p.kappa > 0.0) || !(p.theta >= 0.0) || !(p.sigma >= 0.0) || !(p.lambda0 >= 0.0))
        throw Error(ErrorCode::InvalidArgument,
                    "CIR parameters need kappa > 0 and theta, sigma, lambda0 >= 0");
    if (!(p.rr >= 0.0 && p.rr < 1.0))
        throw Error(ErrorCode::InvalidRecovery, "recovery rate must lie in [0, 1)");
}

double feller_ratio(const CirParams& p)
{
    if (p.sigma == 0.0)
        return std::numeric_limits<double>::infinity();
    return 2.0 * p.kappa * p.theta / (p.sigma * p.sigma);
}

bool feller_satisfied(const CirParams& p)
{
    return 2.0 * p.kappa * p.theta > p.sigma * p.sigma;
}

double step_cir(const CirParams& p, double lambda_t, double dt, double dw_lambda)
{
    if (!(dt > 0.0))
        throw Error(ErrorCode::NonPositiveStep, "step_cir: dt must be positive");
    const double pos = std::max(lambda_t, 0.0);
    return lambda_t + p.kappa * (p.theta - pos) * dt + p.sigma * std::sqrt(pos) * dw_lambda;
}

double cir_mean(const CirParams& p, double lambda_s, double tau)
{
    return p.theta + (lambda_s - p.theta) * std::exp(-p.kappa * tau);
}

double survival_closed_form(const CirParams& p, double s, double t, double lambda_s)
{
    if (s > t)
        throw Error(ErrorCode::ReversedTimes, "survival_closed_form: s after t");
    const double tau = t - s;
    if (tau == 0.0)
        return 1.0;
    const double k = p.kappa;
    if (p.sigma == 0.0) {
        const double b = -std::expm1(-k * tau) / k;
        return std::exp(-p.theta * (tau - b) - b * lambda_s);
    }
    const double s2 = p.sigma * p.sigma;
    const double h = std::sqrt(k * k + 2.0 * s2);
    // eps = h - kappa without cancellation; the bracket below is O(sigma^2) and
    // evaluated term by term so the 2 kappa theta / sigma^2 power stays accurate
    const double eps = 2.0 * s2 / (h + k);
    const double em = -std::expm1(-h * tau); // 1 - e^{-h tau}
    const double log_a_base = std::log1p(eps / (k + h)) - 0.5 * eps * tau -
                              std::log1p(eps * std::exp(-h * tau) / (k + h));
    const double log_a = 2.0 * k * p.theta / s2 * log_a_base;
    const double b = 2.0 * em / (2.0 * h * (1.0 - em) + (k + h) * em);
    return std::exp(log_a - b * lambda_s);
}

std::vector<double> path_survival(std::span<const double> lambdas, double dt)
{
    if (lambdas.empty())
        throw Error(ErrorCode::EmptyPath, "path_survival: empty intensity path");
    if (!(dt > 0.0))
        throw Error(ErrorCode::NonPositiveStep, "path_survival: dt must be positive");
    std::vector<double> out(lambdas.size());
    double hazard = 0.0;
    out[0] = 1.0;
    for (std::size_t i = 1; i < lambdas.size(); ++i) {
        hazard += std::max(lambdas[i - 1], 0.0) * dt;
        out[i] = std::exp(-hazard);
    }
    return out;
}

std::vector<double> default_increments(std::span<const double> survival)
{
    std::vector<double> q;
    if (survival.empty())
        return q;
    q.reserve(survival.size() - 1);
    for (std::size_t i = 1; i < survival.size(); ++i) {
        const double d = survival[i - 1] - survival[i];
        if (d < 0.0)
            throw Error(ErrorCode::NonMonotoneSurvival,
                        "default_increments: survival increases at index " + std::to_string(i));
        q.push_back(d);
    }
    return q;
}

std::vector<double> spreads_to_intensities(std::span<const double> spreads, double rr)
{
    if (!(rr >= 0.0 && rr < 1.0))
        throw Error(ErrorCode::InvalidRecovery, "recovery rate must lie in [0, 1)");
    std::vector<double> out;
    out.reserve(spreads.size());
    for (double s : spreads) {
        if (!(s > 0.0))
            throw Error(ErrorCode::NonPositiveQuote, "credit spreads must be positive");
        out.push_back(s / (1.0 - rr));
    }
    return out;
}

std::vector<double> unconditional_default_increments(const CirParams& p, std::span<const double> grid)
{
    std::vector<double> surv;
    surv.reserve(grid.size());
    for (double t : grid)
        surv.push_back(survival_closed_form(p, 0.0, t, p.lambda0));
    return default_increments(surv);
}

} // namespace shmcva::credit
