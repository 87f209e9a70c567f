#pragma once

#include <span>
#include <vector>

namespace shmcva::credit {

/// CIR default intensity d lambda = kappa (theta - lambda) dt + sigma sqrt(lambda) dW
/// together with the constant recovery rate.
struct CirParams {
    double kappa = 0.0;
    double theta = 0.0;
    double sigma = 0.0;
    double lambda0 = 0.0;
    double rr = 0.25;
};

/// Throws InvalidArgument for kappa <= 0, theta < 0, sigma < 0 or lambda0 < 0,
/// and InvalidRecovery for rr outside [0, 1).
void validate(const CirParams& p);

/// 2 kappa theta / sigma^2 (infinite for sigma = 0).
double feller_ratio(const CirParams& p);

/// Strict Feller condition 2 kappa theta > sigma^2.
bool feller_satisfied(const CirParams& p);

/// Full-truncation Euler step. The returned value may be negative; callers
/// use max(lambda, 0) downstream.
double step_cir(const CirParams& p, double lambda_t, double dt, double dw_lambda);

/// E[lambda_t | lambda_s] = theta + (lambda_s - theta) e^{-kappa (t - s)}
double cir_mean(const CirParams& p, double lambda_s, double tau);

/// E[exp(-int_s^t lambda)] = A(s,t) exp(-B(s,t) lambda_s) in closed form.
/// Throws ReversedTimes.
double survival_closed_form(const CirParams& p, double s, double t, double lambda_s);

/// S(t_i) = exp(-sum_{k < i} max(lambda_k, 0) dt) on a uniform grid; S(t_0) = 1.
/// Throws EmptyPath or NonPositiveStep.
std::vector<double> path_survival(std::span<const double> lambdas, double dt);

/// q_i = S(t_{i-1}) - S(t_i), one entry per interval. Throws
/// NonMonotoneSurvival.
std::vector<double> default_increments(std::span<const double> survival);

/// Credit-triangle intensities s / (1 - RR). Throws InvalidRecovery or
/// NonPositiveQuote.
std::vector<double> spreads_to_intensities(std::span<const double> spreads, double rr);

/// Unconditional default probabilities per interval of `grid` (which starts
/// at 0) from the closed-form survival curve seen from time 0.
std::vector<double> unconditional_default_increments(const CirParams& p, std::span<const double> grid);

} // namespace shmcva::credit
