#pragma once

namespace shmcva::fx {

/// Garman-Kohlhagen spot in domestic units per foreign unit.
struct FxParams {
    double sigma_psi = 0.0;
    double psi0 = 1.0;
};

void validate(const FxParams& p);

/// Log-Euler step under the domestic risk-neutral measure:
///   psi' = psi exp((r_d - r_f - sigma^2/2) dt + sigma dW)
/// Throws NonPositiveSpot or NonPositiveStep.
double step_fx(const FxParams& p, double psi_t, double r_d, double r_f, double dt, double dw_psi);

} // namespace shmcva::fx
