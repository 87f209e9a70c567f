#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace shmcva::corr {

/// Constant correlations among the FX, domestic-rate and foreign-rate drivers.
struct CorrMatrix {
    double rho12 = 0.0; // FX - domestic
    double rho13 = 0.0; // FX - foreign
    double rho23 = 0.0; // domestic - foreign
};

/// Lower-triangular factor A with A A^T = R, row-major.
using Factor3 = std::array<std::array<double, 3>, 3>;

/// Closed-form Cholesky factor of the 3x3 correlation matrix. Throws
/// InvalidRho, DegeneratePivot (|rho12| = 1) or NotPositiveSemiDefinite.
Factor3 cholesky3(const CorrMatrix& r);

/// Ornstein-Uhlenbeck level G with rho(t) = tanh(G(t)).
struct OuCorrParams {
    double theta = 1.0;
    double mu = 0.0;
    double sigma = 0.0;
    double g0 = 0.0;
};

void validate(const OuCorrParams& p);

struct ConstantCorrelation {
    double rho = 0.0;
};
struct StochasticCorrelation {
    OuCorrParams ou;
};
/// FX / default-intensity dependence.
using CorrelationSpec = std::variant<ConstantCorrelation, StochasticCorrelation>;

/// Exact OU transition over dt with the Brownian increment dw (z = dw / sqrt(dt)).
double step_ou(const OuCorrParams& p, double g_t, double dt, double dw);

/// Precomputed exact OU transition for a fixed dt: g' = mu + (g - mu) decay + stdev z.
struct OuStepper {
    OuStepper(const OuCorrParams& p, double dt);
    double step(double g, double z) const noexcept { return mu + (g - mu) * decay + stdev * z; }
    double mu;
    double decay;
    double stdev;
};

double rho_of_g(double g);

struct Increments {
    double psi = 0.0;
    double dom = 0.0;
    double fgn = 0.0;
    double lambda = 0.0;
};

/// Maps four independent standard normals to correlated Brownian increments
/// over dt: (psi, dom, fgn) through the factor A, lambda through
/// rho_t dW_psi + sqrt(1 - rho_t^2) sqrt(dt) z4. Throws InvalidRho or
/// NonPositiveStep.
Increments correlated_increments(const Factor3& a, double rho_t, const std::array<double, 4>& z, double dt);

/// Current rho for a spec: the constant, or tanh(g) for the stochastic case.
double current_rho(const CorrelationSpec& spec, double g);

/// Pearson correlation of two equally long samples; 0 when either is constant.
double pearson(std::span<const double> x, std::span<const double> y);

struct SlidingCorrelation {
    std::vector<double> rho;             // one value per window, stamped at its right edge
    std::vector<std::size_t> zero_variance; // windows where a side was constant (value set to 0)
};

/// Pearson correlation over each contiguous window of `window` points.
/// Throws InvalidArgument (unequal lengths, window < 5) or WindowTooLarge.
SlidingCorrelation sliding_window_corr(std::span<const double> x, std::span<const double> y,
                                       std::size_t window = 50);

/// Least-squares OU fit on atanh(rho_hat) via the AR(1) regression
/// g_{i+1} = a + b g_i + e. g0 is set to the last transformed observation.
/// A constant series returns mu = g0 = atanh(rho), sigma = 0, theta = 1.
/// Throws SaturatedInput, TooShort or ExplosiveFit.
OuCorrParams fit_ou_lsq(std::span<const double> rho_hat, double dt);

/// Devolatilised log-returns used as Brownian increment estimates: demeaned
/// returns divided by an EWMA volatility forecast (decay 0.94), rescaled to
/// unit sample variance. Throws TooShort, NonPositiveLevel or ZeroVariance.
std::vector<double> extract_residuals(std::span<const double> levels, double dt);

inline constexpr double kEwmaDecay = 0.94;

} // namespace shmcva::corr
