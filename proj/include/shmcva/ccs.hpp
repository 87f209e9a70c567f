#pragma once

#include <functional>
#include <vector>

namespace shmcva::ccs {

enum class Side { Payer, Receiver };

/// Floating-vs-floating cross-currency swap seen from firm X. The payer
/// pays the domestic floating leg and receives the foreign one.
struct CcsContract {
    double notional_for = 1.0;
    double psi0 = 1.0;
    double start = 0.0;
    double maturity = 10.0;
    double interval = 0.25;
    Side side = Side::Payer;

    /// N^d = psi0 N^f
    double notional_dom() const noexcept { return psi0 * notional_for; }
};

/// Contract with N^d = `notional_dom` and N^f = notional_dom / psi0. Throws
/// InvalidArgument unless start < maturity and the schedule has a whole
/// number of periods.
CcsContract make_contract(double notional_dom, double psi0, double start, double maturity,
                          double interval = 0.25, Side side = Side::Payer);

void validate(const CcsContract& c);

/// Payment dates T_alpha, ..., T_beta.
std::vector<double> payment_dates(const CcsContract& c);

/// Zero-coupon bond P(t, T) in one currency.
using ZcbFunction = std::function<double(double t, double maturity)>;

/// Telescoped value from the payer's side:
///   N^f psi_t (P^f(t,T_a') - P^f(t,T_b)) - N^d (P^d(t,T_a') - P^d(t,T_b))
///   + [t = T_b] (N^f psi_t - N^d),        T_a' = max(T_a, t).
/// Throws MaturityPassed or OffGridDate (t must be a payment date or
/// precede the start).
double value_payer(const CcsContract& c, double t, double psi_t, const ZcbFunction& pd, const ZcbFunction& pf);

double value_receiver(const CcsContract& c, double t, double psi_t, const ZcbFunction& pd, const ZcbFunction& pf);

/// Value for the contract's own side.
double value(const CcsContract& c, double t, double psi_t, const ZcbFunction& pd, const ZcbFunction& pf);

/// Period-by-period FRA portfolio: sum of N Delta_i P(t,T_i) F(t;T_{i-1},T_i)
/// for each leg in its own currency, the foreign leg converted at psi_t,
/// plus the maturity notional exchange. Independent check of value_payer.
double fra_sum_oracle(const CcsContract& c, double t, double psi_t, const ZcbFunction& pd, const ZcbFunction& pf);

/// Simply compounded forward (P(t,T1)/P(t,T2) - 1) / delta.
double simple_forward(double p_start, double p_end, double delta);

/// V+ = max(value - collateral, 0).
double exposure(double value, double collateral = 0.0);

} // namespace shmcva::ccs
