#include "shmcva/calibration.hpp"

#include "shmcva/error.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace shmcva::calib {

namespace {

double norm_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

std::vector<double> coupons(const SwaptionQuote& q)
{
    std::vector<double> c(q.payment_dates.size());
    double prev = q.expiry;
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] = q.fixed_rate * (q.payment_dates[i] - prev);
        prev = q.payment_dates[i];
    }
    c.back() += 1.0;
    return c;
}

double bond_option_vol(const hw1f::Hw1fParams& p, double t0, double ti)
{
    return p.sigma * std::sqrt(-std::expm1(-2.0 * p.beta * t0) / (2.0 * p.beta)) * hw1f::bond_b(p, t0, ti);
}

struct Simplex3 {
    std::array<std::array<double, 3>, 4> x;
    std::array<double, 4> f;
};

// Nelder-Mead with standard coefficients; returns the best vertex.
std::array<double, 3> nelder_mead(const std::function<double(const std::array<double, 3>&)>& fn,
                                  std::array<double, 3> start, double step, int max_iter, int& iterations)
{
    Simplex3 s;
    s.x[0] = start;
    for (int i = 0; i < 3; ++i) {
        s.x[i + 1] = start;
        s.x[i + 1][i] += step;
    }
    for (int i = 0; i < 4; ++i)
        s.f[i] = fn(s.x[i]);

    auto order = [&s] {
        std::array<int, 4> idx{0, 1, 2, 3};
        std::sort(idx.begin(), idx.end(), [&s](int a, int b) { return s.f[a] < s.f[b]; });
        Simplex3 sorted;
        for (int i = 0; i < 4; ++i) {
            sorted.x[i] = s.x[idx[i]];
            sorted.f[i] = s.f[idx[i]];
        }
        s = sorted;
    };
    auto blend = [](const std::array<double, 3>& a, const std::array<double, 3>& b, double w) {
        std::array<double, 3> out;
        for (int k = 0; k < 3; ++k)
            out[k] = a[k] + w * (b[k] - a[k]);
        return out;
    };

    for (int it = 0; it < max_iter; ++it) {
        order();
        ++iterations;
        double spread = 0.0;
        for (int i = 1; i < 4; ++i)
            for (int k = 0; k < 3; ++k)
                spread = std::max(spread, std::abs(s.x[i][k] - s.x[0][k]));
        if (std::abs(s.f[3] - s.f[0]) <= 1e-11 * (1.0 + std::abs(s.f[0])) && spread < 1e-9)
            break;

        std::array<double, 3> centroid{};
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k)
                centroid[k] += s.x[i][k] / 3.0;

        const auto reflected = blend(centroid, s.x[3], -1.0);
        const double fr = fn(reflected);
        if (fr < s.f[0]) {
            const auto expanded = blend(centroid, s.x[3], -2.0);
            const double fe = fn(expanded);
            if (fe < fr) {
                s.x[3] = expanded;
                s.f[3] = fe;
            } else {
                s.x[3] = reflected;
                s.f[3] = fr;
            }
            continue;
        }
        if (fr < s.f[2]) {
            s.x[3] = reflected;
            s.f[3] = fr;
            continue;
        }
        const bool outside = fr < s.f[3];
        const auto contracted = outside ? blend(centroid, reflected, 0.5) : blend(centroid, s.x[3], 0.5);
        const double fc = fn(contracted);
        if (fc < std::min(fr, s.f[3])) {
            s.x[3] = contracted;
            s.f[3] = fc;
            continue;
        }
        for (int i = 1; i < 4; ++i) {
            s.x[i] = blend(s.x[0], s.x[i], 0.5);
            s.f[i] = fn(s.x[i]);
        }
    }
    order();
    return s.x[0];
}

} // namespace

void validate(const SwaptionQuote& q)
{
    if (!(q.expiry > 0.0) || q.payment_dates.empty())
        throw Error(ErrorCode::InvalidArgument, "swaption needs a positive expiry and payment dates");
    double prev = q.expiry;
    for (double d : q.payment_dates) {
        if (!(d > prev))
            throw Error(ErrorCode::InvalidArgument, "swaption payment dates must increase after expiry");
        prev = d;
    }
    if (!(q.fixed_rate > 0.0))
        throw Error(ErrorCode::InvalidArgument, "swaption fixed rate must be positive");
}

double forward_swap_rate(const curves::YieldCurve& curve, double expiry, std::span<const double> payment_dates)
{
    double annuity = 0.0;
    double prev = expiry;
    for (double d : payment_dates) {
        annuity += (d - prev) * curve.discount(d);
        prev = d;
    }
    return (curve.discount(expiry) - curve.discount(payment_dates.back())) / annuity;
}

SwaptionQuote make_atm_swaption(const curves::YieldCurve& curve, double expiry, double tenor, double price,
                                double fixed_interval)
{
    SwaptionQuote q;
    q.expiry = expiry;
    const auto n = static_cast<int>(std::llround(tenor / fixed_interval));
    if (n < 1 || std::abs(n * fixed_interval - tenor) > 1e-9)
        throw Error(ErrorCode::InvalidArgument, "swaption tenor must be a multiple of the fixed interval");
    for (int i = 1; i <= n; ++i)
        q.payment_dates.push_back(expiry + i * fixed_interval);
    q.fixed_rate = forward_swap_rate(curve, expiry, q.payment_dates);
    q.price = price;
    q.payer = true;
    validate(q);
    return q;
}

double zcb_put_hw(const hw1f::Hw1fParams& p, double t0, double ti, double strike)
{
    if (!(t0 > 0.0) || !(ti > t0))
        throw Error(ErrorCode::InvalidArgument, "zcb_put_hw: need 0 < T0 < Ti");
    const double p0 = p.curve.discount(t0);
    const double pi = p.curve.discount(ti);
    const double vol = bond_option_vol(p, t0, ti);
    if (!(vol > 0.0))
        return std::max(strike * p0 - pi, 0.0);
    const double h = std::log(pi / (strike * p0)) / vol + 0.5 * vol;
    return strike * p0 * norm_cdf(-h + vol) - pi * norm_cdf(-h);
}

double zcb_call_hw(const hw1f::Hw1fParams& p, double t0, double ti, double strike)
{
    // put-call parity on the forward bond
    return zcb_put_hw(p, t0, ti, strike) + p.curve.discount(ti) - strike * p.curve.discount(t0);
}

double jamshidian_critical_rate(const hw1f::Hw1fParams& p, const SwaptionQuote& q)
{
    const auto c = coupons(q);
    std::vector<double> a(c.size()), b(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        a[i] = hw1f::bond_a(p, q.expiry, q.payment_dates[i]);
        b[i] = hw1f::bond_b(p, q.expiry, q.payment_dates[i]);
    }
    auto f = [&](double r) {
        double s = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i)
            s += c[i] * a[i] * std::exp(-b[i] * r);
        return s - 1.0;
    };

    double lo = -1.0, hi = 1.0;
    int expansions = 0;
    while (f(lo) * f(hi) > 0.0) {
        if (++expansions > 8)
            throw Error(ErrorCode::RootBracketFailure, "Jamshidian: no sign change for the critical rate");
        lo *= 2.0;
        hi *= 2.0;
    }
    std::uintmax_t max_iter = 300;
    const auto bracket = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(53),
                                                           max_iter);
    double r = 0.5 * (bracket.first + bracket.second);
    // polish: f is convex and decreasing, so Newton from the bracket midpoint is safe
    for (int i = 0; i < 5 && std::abs(f(r)) >= 1e-12; ++i) {
        double d = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k)
            d -= c[k] * a[k] * b[k] * std::exp(-b[k] * r);
        r -= f(r) / d;
    }
    if (!(std::abs(f(r)) < 1e-12))
        throw Error(ErrorCode::RootBracketFailure, "Jamshidian: critical rate did not converge");
    return r;
}

double jamshidian_swaption(const hw1f::Hw1fParams& p, const SwaptionQuote& q)
{
    validate(q);
    const double r_star = jamshidian_critical_rate(p, q);
    const auto c = coupons(q);
    double price = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double strike = hw1f::zcb_price(p, q.expiry, q.payment_dates[i], r_star);
        price += c[i] * (q.payer ? zcb_put_hw(p, q.expiry, q.payment_dates[i], strike)
                                 : zcb_call_hw(p, q.expiry, q.payment_dates[i], strike));
    }
    return price;
}

SigmaCalibration calibrate_hw_sigma(const SwaptionQuote& q, const curves::YieldCurve& curve, double beta_fixed)
{
    auto price_at = [&](double sigma) { return jamshidian_swaption({beta_fixed, sigma, curve}, q); };
    double lo = 0.0, hi = kMaxCalibrationSigma;
    const double p_lo = price_at(lo), p_hi = price_at(hi);
    if (q.price < p_lo || q.price > p_hi)
        throw Error(ErrorCode::PriceUnattainable,
                    "swaption price outside the attainable range for sigma in [0, 0.5]");

    int iterations = 0;
    while (hi - lo > 1e-15 && iterations < 200) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        (price_at(mid) < q.price ? lo : hi) = mid;
        ++iterations;
    }
    const double sigma = 0.5 * (lo + hi);
    const double err = price_at(sigma) - q.price;
    return {sigma, err * err, iterations};
}

double log_bessel_i(double nu, double z)
{
    if (!(nu > -1.0) || !(z >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "log_bessel_i: need nu > -1 and z >= 0");
    if (z == 0.0)
        return nu == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();

    if (z >= 30.0 && nu * nu <= z) {
        // Hankel: I_nu(z) ~ e^z / sqrt(2 pi z) sum_k (-1)^k a_k(nu) / z^k
        const double mu = 4.0 * nu * nu;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 200; ++k) {
            const double odd = 2.0 * k - 1.0;
            const double next = -term * (mu - odd * odd) / (k * 8.0 * z);
            if (std::abs(next) >= std::abs(term))
                break;
            term = next;
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum))
                break;
        }
        return z - 0.5 * std::log(2.0 * M_PI * z) + std::log(sum);
    }

    // power series sum_k (z/2)^{2k+nu} / (k! Gamma(k+nu+1)), summed outward from its largest term
    const double half = 0.5 * z;
    const double q2 = half * half;
    const double peak_real = 0.5 * (-nu + std::sqrt(nu * nu + z * z));
    const double k_star = std::max(0.0, std::floor(peak_real));
    const double log_peak = (2.0 * k_star + nu) * std::log(half) - std::lgamma(k_star + 1.0) -
                            std::lgamma(k_star + nu + 1.0);
    double sum = 1.0;
    double term = 1.0;
    for (double k = k_star;; k += 1.0) {
        term *= q2 / ((k + 1.0) * (k + nu + 1.0));
        sum += term;
        if (term < 1e-17 * sum)
            break;
    }
    term = 1.0;
    for (double k = k_star; k >= 1.0; k -= 1.0) {
        term *= (k * (k + nu)) / q2;
        sum += term;
        if (term < 1e-17 * sum)
            break;
    }
    return log_peak + std::log(sum);
}

double cir_transition_log_density(double prev, double next, double dt, double kappa, double theta, double sigma)
{
    const double s2 = sigma * sigma;
    const double decay = std::exp(-kappa * dt);
    const double c = 2.0 * kappa / (s2 * -std::expm1(-kappa * dt));
    const double u = c * prev * decay;
    const double v = c * next;
    const double q = 2.0 * kappa * theta / s2 - 1.0;
    if (!(q > -1.0))
        return -std::numeric_limits<double>::infinity();
    return std::log(c) - u - v + 0.5 * q * std::log(v / u) + log_bessel_i(q, 2.0 * std::sqrt(u * v));
}

double cir_log_likelihood(std::span<const double> lambdas, double dt, double kappa, double theta, double sigma)
{
    double ll = 0.0;
    for (std::size_t i = 0; i + 1 < lambdas.size(); ++i)
        ll += cir_transition_log_density(lambdas[i], lambdas[i + 1], dt, kappa, theta, sigma);
    return ll;
}

CirEstimate cir_moment_estimate(std::span<const double> lambdas, double dt)
{
    const std::size_t m = lambdas.size() - 1;
    const double n = static_cast<double>(m);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += lambdas[i];
        my += lambdas[i + 1];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (lambdas[i] - mx) * (lambdas[i] - mx);
        sxy += (lambdas[i] - mx) * (lambdas[i + 1] - my);
    }
    if (!(sxx > 0.0))
        throw Error(ErrorCode::LikelihoodNonFinite, "cir_mle: intensity series has zero variance");

    const double b = std::clamp(sxy / sxx, 1e-6, 1.0 - 1e-9);
    const double kappa = -std::log(b) / dt;
    double theta = (my - b * mx) / (1.0 - b);
    if (!(theta > 0.0))
        theta = mx;

    double sse = 0.0, weight = 0.0;
    const double a_coef = (b - b * b) / kappa;
    const double c_coef = theta * (1.0 - b) * (1.0 - b) / (2.0 * kappa);
    for (std::size_t i = 0; i < m; ++i) {
        const double e = lambdas[i + 1] - (theta + (lambdas[i] - theta) * b);
        sse += e * e;
        weight += lambdas[i] * a_coef + c_coef;
    }
    const double sigma = std::sqrt(sse / weight);
    if (!std::isfinite(sigma) || !(sigma > 0.0))
        throw Error(ErrorCode::LikelihoodNonFinite, "cir_mle: moment estimate of sigma is degenerate");
    return {kappa, theta, sigma, 0.0, 0};
}

CirEstimate cir_mle(std::span<const double> lambdas, double dt)
{
    if (!(dt > 0.0))
        throw Error(ErrorCode::NonPositiveStep, "cir_mle: dt must be positive");
    if (lambdas.size() < 100)
        throw Error(ErrorCode::TooShort, "cir_mle: need at least 100 observations");
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        if (!(lambdas[i] > 0.0))
            throw Error(ErrorCode::NonPositiveIntensityInput,
                        "cir_mle: intensity at index " + std::to_string(i) + " is not positive");

    const auto start = cir_moment_estimate(lambdas, dt);
    auto objective = [&](const std::array<double, 3>& x) {
        const double ll = cir_log_likelihood(lambdas, dt, std::exp(x[0]), std::exp(x[1]), std::exp(x[2]));
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };
    std::array<double, 3> x{std::log(start.kappa), std::log(start.theta), std::log(start.sigma)};
    if (!std::isfinite(objective(x)))
        throw Error(ErrorCode::LikelihoodNonFinite, "cir_mle: likelihood not finite at the start point");

    int iterations = 0;
    x = nelder_mead(objective, x, 0.1, 4000, iterations);
    x = nelder_mead(objective, x, 0.02, 4000, iterations); // restart guards against early collapse
    const double ll = -objective(x);
    if (!std::isfinite(ll))
        throw Error(ErrorCode::LikelihoodNonFinite, "cir_mle: likelihood not finite at the optimum");
    return {std::exp(x[0]), std::exp(x[1]), std::exp(x[2]), ll, iterations};
}

} // namespace shmcva::calib
