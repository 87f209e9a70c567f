#include "shmcva/fx.hpp"

#include "shmcva/error.hpp"

#include <cmath>

namespace shmcva::fx {

void validate(const FxParams& p)
{
    if (!(p.sigma_psi >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "FX volatility must be non-negative");
    if (!(p.psi0 > 0.0))
        throw Error(ErrorCode::NonPositiveSpot, "initial FX spot must be positive");
}

double step_fx(const FxParams& p, double psi_t, double r_d, double r_f, double dt, double dw_psi)
{
    if (!(psi_t > 0.0))
        throw Error(ErrorCode::NonPositiveSpot, "step_fx: spot must be positive");
    if (!(dt > 0.0))
        throw Error(ErrorCode::NonPositiveStep, "step_fx: dt must be positive");
    const double s = p.sigma_psi;
    return psi_t * std::exp((r_d - r_f - 0.5 * s * s) * dt + s * dw_psi);
}

} // namespace shmcva::fx
