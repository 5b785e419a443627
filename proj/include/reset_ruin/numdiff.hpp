#ifndef RESET_RUIN_NUMDIFF_HPP
#define RESET_RUIN_NUMDIFF_HPP

#include <limits>

#include "reset_ruin/config.hpp"

namespace reset_ruin {

/// Central difference of q(gamma) at config.gamma() with the given step.
template <typename Scalar, typename RuinFn>
Scalar gamma_central_difference(const WalkConfig<Scalar>& config, RuinFn&& ruin,
                                Scalar step = Scalar(1e-6))
{
    const Scalar plus = ruin(config.with_gamma(config.gamma() + step));
    const Scalar minus = ruin(config.with_gamma(config.gamma() - step));
    return (plus - minus) / (Scalar(2) * step);
}

/// Rounding floor of the central difference above for q in [0, 1]: a few
/// ulps of q divided by the step.
template <typename Scalar>
Scalar central_difference_noise(Scalar step = Scalar(1e-6))
{
    return Scalar(4) * std::numeric_limits<Scalar>::epsilon() / step;
}

} // namespace reset_ruin

#endif // RESET_RUIN_NUMDIFF_HPP
