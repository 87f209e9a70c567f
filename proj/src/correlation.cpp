#include "shmcva/correlation.hpp"

#include "shmcva/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace shmcva::corr {

namespace {

void check_rho(double rho, const char* what)
{
    if (!(std::abs(rho) <= 1.0))
        throw Error(ErrorCode::InvalidRho, std::string(what) + " must lie in [-1, 1]");
}

} // namespace

Factor3 cholesky3(const CorrMatrix& r)
{
    check_rho(r.rho12, "rho12");
    check_rho(r.rho13, "rho13");
    check_rho(r.rho23, "rho23");
    const double pivot2 = 1.0 - r.rho12 * r.rho12;
    if (!(pivot2 > 0.0))
        throw Error(ErrorCode::DegeneratePivot, "cholesky3: |rho12| = 1 leaves a zero pivot");
    const double s2 = std::sqrt(pivot2);
    const double radicand = (1.0 - r.rho12 * r.rho12 - r.rho13 * r.rho13 - r.rho23 * r.rho23 +
                             2.0 * r.rho12 * r.rho13 * r.rho23) /
                            pivot2;
    if (radicand < -1e-12)
        throw Error(ErrorCode::NotPositiveSemiDefinite, "cholesky3: correlation matrix is not PSD");

    Factor3 a{};
    a[0] = {1.0, 0.0, 0.0};
    a[1] = {r.rho12, s2, 0.0};
    a[2] = {r.rho13, (r.rho23 - r.rho12 * r.rho13) / s2, std::sqrt(std::max(radicand, 0.0))};
    return a;
}

void validate(const OuCorrParams& p)
{
    if (!(p.theta > 0.0))
        throw Error(ErrorCode::InvalidArgument, "OU mean reversion must be positive");
    if (!(p.sigma >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "OU volatility must be non-negative");
    if (!std::isfinite(p.mu) || !std::isfinite(p.g0))
        throw Error(ErrorCode::InvalidArgument, "OU level parameters must be finite");
}

double step_ou(const OuCorrParams& p, double g_t, double dt, double dw)
{
    if (!(dt > 0.0))
        throw Error(ErrorCode::NonPositiveStep, "step_ou: dt must be positive");
    const OuStepper stepper(p, dt);
    return stepper.step(g_t, dw / std::sqrt(dt));
}

OuStepper::OuStepper(const OuCorrParams& p, double dt)
    : mu(p.mu), decay(std::exp(-p.theta * dt)),
      stdev(p.sigma * std::sqrt(-std::expm1(-2.0 * p.theta * dt) / (2.0 * p.theta)))
{
}

double rho_of_g(double g)
{
    // tanh rounds to +-1 for |g| > ~19; keep the result strictly inside (-1, 1)
    const double r = std::tanh(g);
    constexpr double bound = 1.0 - 1e-16;
    return std::clamp(r, -bound, bound);
}

Increments correlated_increments(const Factor3& a, double rho_t, const std::array<double, 4>& z, double dt)
{
    check_rho(rho_t, "rho(t)");
    if (!(dt > 0.0))
        throw Error(ErrorCode::NonPositiveStep, "correlated_increments: dt must be positive");
    const double sq = std::sqrt(dt);
    const double z1 = sq * z[0], z2 = sq * z[1], z3 = sq * z[2], z4 = sq * z[3];
    Increments out;
    out.psi = z1;
    out.dom = a[1][0] * out.psi + a[1][1] * z2;
    out.fgn = a[2][0] * out.psi + a[2][1] * z2 + a[2][2] * z3;
    out.lambda = rho_t * out.psi + std::sqrt(std::max(0.0, 1.0 - rho_t * rho_t)) * z4;
    return out;
}

double current_rho(const CorrelationSpec& spec, double g)
{
    if (const auto* c = std::get_if<ConstantCorrelation>(&spec))
        return c->rho;
    return rho_of_g(g);
}

double pearson(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "pearson: need two equally long samples");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0)
        return 0.0;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

SlidingCorrelation sliding_window_corr(std::span<const double> x, std::span<const double> y, std::size_t window)
{
    if (x.size() != y.size())
        throw Error(ErrorCode::InvalidArgument, "sliding_window_corr: series lengths differ");
    if (window < 5)
        throw Error(ErrorCode::InvalidArgument, "sliding_window_corr: window must be at least 5");
    if (window > x.size())
        throw Error(ErrorCode::WindowTooLarge, "sliding_window_corr: window longer than the series");

    SlidingCorrelation out;
    out.rho.reserve(x.size() - window + 1);
    for (std::size_t end = window; end <= x.size(); ++end) {
        const auto xs = x.subspan(end - window, window);
        const auto ys = y.subspan(end - window, window);
        const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
        const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
        if (*xmin == *xmax || *ymin == *ymax)
            out.zero_variance.push_back(out.rho.size());
        out.rho.push_back(pearson(xs, ys));
    }
    return out;
}

OuCorrParams fit_ou_lsq(std::span<const double> rho_hat, double dt)
{
    if (!(dt > 0.0))
        throw Error(ErrorCode::NonPositiveStep, "fit_ou_lsq: dt must be positive");
    if (rho_hat.size() < 10)
        throw Error(ErrorCode::TooShort, "fit_ou_lsq: need at least 10 observations");
    std::vector<double> g(rho_hat.size());
    for (std::size_t i = 0; i < rho_hat.size(); ++i) {
        if (!(std::abs(rho_hat[i]) < 1.0 - 1e-12))
            throw Error(ErrorCode::SaturatedInput,
                        "fit_ou_lsq: |rho| too close to 1 at index " + std::to_string(i));
        g[i] = std::atanh(rho_hat[i]);
    }

    const std::size_t m = g.size() - 1;
    const double n = static_cast<double>(m);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += g[i];
        my += g[i + 1];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (g[i] - mx) * (g[i] - mx);
        sxy += (g[i] - mx) * (g[i + 1] - my);
    }
    if (sxx <= 1e-28 * std::max(1.0, mx * mx) * n)
        return {1.0, g.back(), 0.0, g.back()};

    const double b = sxy / sxx;
    if (!(b > 0.0 && b < 1.0))
        throw Error(ErrorCode::ExplosiveFit, "fit_ou_lsq: AR(1) slope outside (0, 1)");
    const double a = my - b * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double e = g[i + 1] - a - b * g[i];
        sse += e * e;
    }
    const double sd_eps = std::sqrt(sse / std::max(n - 2.0, 1.0));
    const double theta = -std::log(b) / dt;
    return {theta, a / (1.0 - b), sd_eps * std::sqrt(2.0 * theta / (1.0 - b * b)), g.back()};
}

std::vector<double> extract_residuals(std::span<const double> levels, double dt)
{
    if (!(dt > 0.0))
        throw Error(ErrorCode::NonPositiveStep, "extract_residuals: dt must be positive");
    if (levels.size() < 30)
        throw Error(ErrorCode::TooShort, "extract_residuals: need at least 30 levels");
    std::vector<double> r(levels.size() - 1);
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (!(levels[i] > 0.0))
            throw Error(ErrorCode::NonPositiveLevel,
                        "extract_residuals: level at index " + std::to_string(i) + " is not positive");
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
        r[i] = std::log(levels[i + 1] / levels[i]);

    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    for (double& x : r)
        x -= mean;

    // seed the variance forecast with the first 30 returns
    const std::size_t seed_n = std::min<std::size_t>(30, r.size());
    double var = 0.0;
    for (std::size_t i = 0; i < seed_n; ++i)
        var += r[i] * r[i];
    var /= static_cast<double>(seed_n);
    if (!(var > 0.0)) {
        double total = 0.0;
        for (double x : r)
            total += x * x;
        var = total / static_cast<double>(r.size());
    }
    if (!(var > 0.0))
        throw Error(ErrorCode::ZeroVariance, "extract_residuals: series has no variation");

    std::vector<double> z(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        z[i] = r[i] / std::sqrt(var);
        var = kEwmaDecay * var + (1.0 - kEwmaDecay) * r[i] * r[i];
        if (!(var > 0.0))
            var = 1e-300;
    }
    const double zm = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
    double ss = 0.0;
    for (double x : z)
        ss += (x - zm) * (x - zm);
    const double sd = std::sqrt(ss / static_cast<double>(z.size() - 1));
    if (!(sd > 0.0) || !std::isfinite(sd))
        throw Error(ErrorCode::ZeroVariance, "extract_residuals: residuals have no variation");
    for (double& x : z)
        x = (x - zm) / sd;
    return z;
}

} // namespace shmcva::corr
