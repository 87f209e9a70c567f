#include "shmcva/ccs.hpp"

#include "shmcva/error.hpp"

#include <algorithm>
#include <cmath>

namespace shmcva::ccs {

namespace {

constexpr double kGridTol = 1e-9;

std::size_t period_count(const CcsContract& c)
{
    return static_cast<std::size_t>(std::llround((c.maturity - c.start) / c.interval));
}

void check_valuation_date(const CcsContract& c, double t)
{
    if (t > c.maturity + kGridTol)
        throw Error(ErrorCode::MaturityPassed, "CCS valuation date is after maturity");
    if (t < c.start - kGridTol)
        return;
    const double k = (t - c.start) / c.interval;
    if (std::abs(k - std::round(k)) * c.interval > kGridTol)
        throw Error(ErrorCode::OffGridDate, "CCS valuation date is not a payment date");
}

bool at_maturity(const CcsContract& c, double t)
{
    return std::abs(t - c.maturity) <= kGridTol;
}

} // namespace

CcsContract make_contract(double notional_dom, double psi0, double start, double maturity, double interval, Side side)
{
    CcsContract c{notional_dom / psi0, psi0, start, maturity, interval, side};
    validate(c);
    return c;
}

void validate(const CcsContract& c)
{
    if (!(c.psi0 > 0.0))
        throw Error(ErrorCode::InvalidArgument, "CCS initial spot must be positive");
    if (!(c.start < c.maturity) || !(c.interval > 0.0))
        throw Error(ErrorCode::InvalidArgument, "CCS needs start < maturity and a positive interval");
    const double periods = (c.maturity - c.start) / c.interval;
    if (std::abs(periods - std::round(periods)) > 1e-9)
        throw Error(ErrorCode::InvalidArgument, "CCS schedule must contain a whole number of periods");
}

std::vector<double> payment_dates(const CcsContract& c)
{
    const auto n = period_count(c);
    std::vector<double> dates(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        dates[i] = c.start + static_cast<double>(i) * c.interval;
    dates.back() = c.maturity;
    return dates;
}

double value_payer(const CcsContract& c, double t, double psi_t, const ZcbFunction& pd, const ZcbFunction& pf)
{
    check_valuation_date(c, t);
    const double first = std::max(c.start, t);
    double v = c.notional_for * psi_t * (pf(t, first) - pf(t, c.maturity)) -
               c.notional_dom() * (pd(t, first) - pd(t, c.maturity));
    if (at_maturity(c, t))
        v += c.notional_for * psi_t - c.notional_dom();
    return v;
}

double value_receiver(const CcsContract& c, double t, double psi_t, const ZcbFunction& pd, const ZcbFunction& pf)
{
    return -value_payer(c, t, psi_t, pd, pf);
}

double value(const CcsContract& c, double t, double psi_t, const ZcbFunction& pd, const ZcbFunction& pf)
{
    return c.side == Side::Payer ? value_payer(c, t, psi_t, pd, pf) : value_receiver(c, t, psi_t, pd, pf);
}

double simple_forward(double p_start, double p_end, double delta)
{
    return (p_start / p_end - 1.0) / delta;
}

double fra_sum_oracle(const CcsContract& c, double t, double psi_t, const ZcbFunction& pd, const ZcbFunction& pf)
{
    check_valuation_date(c, t);
    const auto dates = payment_dates(c);
    double foreign = 0.0, domestic = 0.0;
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (dates[i - 1] < t - kGridTol)
            continue; // period already fixed and paid
        const double delta = dates[i] - dates[i - 1];
        const double pf_end = pf(t, dates[i]);
        const double pd_end = pd(t, dates[i]);
        foreign += delta * pf_end * simple_forward(pf(t, dates[i - 1]), pf_end, delta);
        domestic += delta * pd_end * simple_forward(pd(t, dates[i - 1]), pd_end, delta);
    }
    double v = c.notional_for * psi_t * foreign - c.notional_dom() * domestic;
    if (at_maturity(c, t))
        v += c.notional_for * psi_t - c.notional_dom();
    return v;
}

double exposure(double value, double collateral)
{
    return std::max(value - collateral, 0.0);
}

} // namespace shmcva::ccs
