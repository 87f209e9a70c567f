#include "shmcva/curves.hpp"

#include "shmcva/csv.hpp"
#include "shmcva/error.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace shmcva::curves {

namespace {

// (1 - e^-x) / x with its x -> 0 limit
double slope_loading(double x)
{
    if (x < 1e-8)
        return 1.0 - 0.5 * x;
    return -std::expm1(-x) / x;
}

double interpolate_zero(const std::vector<ZeroPoint>& nodes, double tenor)
{
    if (tenor <= nodes.front().tenor)
        return nodes.front().zero_rate;
    if (tenor >= nodes.back().tenor)
        return nodes.back().zero_rate;
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), tenor,
                                     [](double t, const ZeroPoint& p) { return t < p.tenor; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (tenor - lo.tenor) / (hi.tenor - lo.tenor);
    return lo.zero_rate + w * (hi.zero_rate - lo.zero_rate);
}

// Coupon dates of an annual fixed leg maturing at `tenor`, earliest first.
std::vector<double> annual_schedule(double tenor)
{
    std::vector<double> dates;
    for (double d = tenor; d > 1e-9; d -= 1.0)
        dates.push_back(d);
    std::reverse(dates.begin(), dates.end());
    return dates;
}

} // namespace

YieldCurve::YieldCurve(NelsonSiegelParams params, std::string currency)
    : params_(params), currency_(std::move(currency))
{
    if (!(params_.lambda > 0.0))
        throw Error(ErrorCode::InvalidArgument, "Nelson-Siegel lambda must be positive");
    if (!std::isfinite(params_.b0) || !std::isfinite(params_.b1) || !std::isfinite(params_.b2))
        throw Error(ErrorCode::InvalidArgument, "Nelson-Siegel factors must be finite");
}

YieldCurve YieldCurve::flat(double rate, std::string currency)
{
    return YieldCurve({rate, 0.0, 0.0, 1.0}, std::move(currency));
}

double YieldCurve::zero_rate(double tenor) const
{
    const double x = tenor / params_.lambda;
    const double l1 = slope_loading(x);
    return params_.b0 + params_.b1 * l1 + params_.b2 * (l1 - std::exp(-x));
}

double YieldCurve::discount(double maturity) const
{
    return std::exp(-zero_rate(maturity) * maturity);
}

double YieldCurve::forward(double maturity) const
{
    const double x = maturity / params_.lambda;
    const double e = std::exp(-x);
    return params_.b0 + params_.b1 * e + params_.b2 * x * e;
}

double YieldCurve::forward_slope(double maturity) const
{
    const double x = maturity / params_.lambda;
    const double e = std::exp(-x);
    return (-params_.b1 * e + params_.b2 * (1.0 - x) * e) / params_.lambda;
}

double discount_factor(const YieldCurve& curve, double t, double maturity)
{
    if (maturity < t)
        throw Error(ErrorCode::NegativeTenor, "discount_factor: maturity precedes t");
    const double tau = maturity - t;
    return std::exp(-curve.zero_rate(tau) * tau);
}

double inst_forward(const YieldCurve& curve, double maturity)
{
    if (!(maturity > 0.0))
        throw Error(ErrorCode::NonPositiveMaturity, "inst_forward: maturity must be positive");
    return curve.forward(maturity);
}

NelsonSiegelFit fit_zero_rates(std::span<const ZeroPoint> points, std::string currency)
{
    if (points.size() < 4)
        throw Error(ErrorCode::InsufficientQuotes, "Nelson-Siegel fit needs at least four points");

    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i)
        y(i) = points[static_cast<std::size_t>(i)].zero_rate;

    double best_sse = std::numeric_limits<double>::infinity();
    NelsonSiegelParams best{};
    int evaluations = 0;
    for (int k = 1; k <= 50; ++k) {
        const double lambda = k / 10.0;
        Eigen::MatrixXd design(n, 3);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = points[static_cast<std::size_t>(i)].tenor / lambda;
            const double l1 = slope_loading(x);
            design(i, 0) = 1.0;
            design(i, 1) = l1;
            design(i, 2) = l1 - std::exp(-x);
        }
        const Eigen::Vector3d beta = design.colPivHouseholderQr().solve(y);
        const double sse = (design * beta - y).squaredNorm();
        ++evaluations;
        if (std::isfinite(sse) && sse < best_sse) {
            best_sse = sse;
            best = {beta(0), beta(1), beta(2), lambda};
        }
    }
    if (!std::isfinite(best_sse))
        throw Error(ErrorCode::FitDiverged, "Nelson-Siegel objective is not finite");

    YieldCurve curve(best, std::move(currency));
    double max_res = 0.0;
    for (const auto& p : points)
        max_res = std::max(max_res, std::abs(curve.zero_rate(p.tenor) - p.zero_rate));
    return {curve, std::vector<ZeroPoint>(points.begin(), points.end()), best_sse, max_res, evaluations};
}

double deposit_zero_rate(const market::TenorQuote& deposit)
{
    return std::log1p(deposit.rate * deposit.tenor) / deposit.tenor;
}

std::vector<ZeroPoint> bootstrap_swap_zeros(std::span<const ZeroPoint> short_end,
                                            std::span<const market::TenorQuote> swaps)
{
    std::vector<ZeroPoint> nodes(short_end.begin(), short_end.end());
    std::sort(nodes.begin(), nodes.end(),
              [](const ZeroPoint& a, const ZeroPoint& b) { return a.tenor < b.tenor; });

    std::vector<ZeroPoint> out;
    for (const auto& swap : swaps) {
        std::vector<ZeroPoint> known;
        for (const auto& p : nodes)
            if (p.tenor < swap.tenor - 1e-12)
                known.push_back(p);
        const auto schedule = annual_schedule(swap.tenor);

        auto residual = [&](double y_end) {
            auto zero_at = [&](double d) {
                if (d >= swap.tenor - 1e-12)
                    return y_end;
                if (known.empty())
                    return y_end;
                if (d <= known.back().tenor)
                    return interpolate_zero(known, d);
                const auto& last = known.back();
                const double w = (d - last.tenor) / (swap.tenor - last.tenor);
                return last.zero_rate + w * (y_end - last.zero_rate);
            };
            double annuity = 0.0;
            double prev = 0.0;
            for (double d : schedule) {
                annuity += (d - prev) * std::exp(-zero_at(d) * d);
                prev = d;
            }
            return swap.rate * annuity - (1.0 - std::exp(-y_end * swap.tenor));
        };

        double lo = -0.5, hi = 1.0;
        if (residual(lo) * residual(hi) > 0.0)
            throw Error(ErrorCode::FitDiverged,
                        "swap bootstrap: no zero rate brackets the par rate at tenor " +
                            csv::format_double(swap.tenor));
        std::uintmax_t max_iter = 200;
        const auto root = boost::math::tools::toms748_solve(
            residual, lo, hi, boost::math::tools::eps_tolerance<double>(52), max_iter);
        const double y = 0.5 * (root.first + root.second);

        out.push_back({swap.tenor, y});
        std::erase_if(nodes, [&](const ZeroPoint& p) { return std::abs(p.tenor - swap.tenor) < 1e-12; });
        nodes.push_back({swap.tenor, y});
        std::sort(nodes.begin(), nodes.end(),
                  [](const ZeroPoint& a, const ZeroPoint& b) { return a.tenor < b.tenor; });
    }
    return out;
}

NelsonSiegelFit fit_nelson_siegel(std::span<const market::TenorQuote> deposits,
                                  std::span<const market::TenorQuote> swaps, std::string currency)
{
    std::set<double> short_tenors, long_tenors;
    for (const auto& q : deposits)
        (q.tenor <= 1.0 ? short_tenors : long_tenors).insert(q.tenor);
    for (const auto& q : swaps)
        (q.tenor <= 1.0 ? short_tenors : long_tenors).insert(q.tenor);
    if (deposits.size() + swaps.size() < 4 || short_tenors.size() < 2 || long_tenors.size() < 2)
        throw Error(ErrorCode::InsufficientQuotes,
                    "Nelson-Siegel fit needs >= 4 quotes with two tenors at or below 1y and two above");

    std::vector<ZeroPoint> short_end;
    for (const auto& q : deposits)
        short_end.push_back({q.tenor, deposit_zero_rate(q)});
    auto points = short_end;
    const auto long_end = bootstrap_swap_zeros(short_end, swaps);
    points.insert(points.end(), long_end.begin(), long_end.end());
    return fit_zero_rates(points, std::move(currency));
}

double par_swap_rate(const YieldCurve& curve, double tenor)
{
    double annuity = 0.0;
    double prev = 0.0;
    for (double d : annual_schedule(tenor)) {
        annuity += (d - prev) * curve.discount(d);
        prev = d;
    }
    return (1.0 - curve.discount(tenor)) / annuity;
}

double deposit_rate(const YieldCurve& curve, double tenor)
{
    return std::expm1(curve.zero_rate(tenor) * tenor) / tenor;
}

void dump_curve(const YieldCurve& curve, const std::filesystem::path& path, double max_tenor, double step)
{
    std::vector<std::vector<std::string>> rows;
    const auto n = static_cast<int>(std::floor(max_tenor / step + 1e-9));
    for (int i = 1; i <= n; ++i) {
        const double t = i * step;
        rows.push_back({csv::format_double(t), csv::format_double(curve.zero_rate(t)),
                        csv::format_double(curve.discount(t)), csv::format_double(curve.forward(t))});
    }
    csv::write(path, {"tenor", "zero", "df", "fwd"}, rows);
}

} // namespace shmcva::curves
