#ifndef RESET_RUIN_RENEWAL_HPP
#define RESET_RUIN_RENEWAL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <type_traits>
#include <vector>

#include "reset_ruin/compensated_sum.hpp"
#include "reset_ruin/config.hpp"
#include "reset_ruin/spectral.hpp"

namespace reset_ruin {

/// Absorption-time laws of the reset-free walk, indexed from k = 1
/// (element k-1 holds step k). Zero entries are stored.
template <typename Scalar>
struct FiniteTimeDistribution {
    WalkConfig<Scalar> config; ///< gamma is ignored
    int horizon;
    std::vector<Scalar> u; ///< ruin at exactly step k
    std::vector<Scalar> v; ///< success at exactly step k
    std::vector<Scalar> s; ///< u + v
};

/// Smallest K with (ruin_scale sum|A| + success_scale sum|B|) rho^K / (1 - rho)
/// < 2^-46, where rho = 2 sqrt(pq) cos(pi/a) bounds every |lambda|. This
/// certifies the tail mass sum_{k>K} s_{z,k}.
template <typename Scalar>
int truncation_horizon(const SpectralDecomposition<Scalar>& decomposition)
{
    using std::abs;
    using std::ceil;
    using std::cos;
    using std::exp;
    using std::log;
    using std::max;
    using std::sqrt;
    const auto& config = decomposition.config;
    const Scalar rho = Scalar(2) * sqrt(config.p() * config.q()) *
                       cos(std::numbers::pi_v<Scalar> / Scalar(config.a()));
    if (rho <= Scalar(0))
        return 1;
    Scalar ruin_mass{0};
    Scalar success_mass{0};
    for (const auto& mode : decomposition.modes) {
        ruin_mass += abs(mode.A);
        success_mass += abs(mode.B);
    }
    const Scalar peak = max(decomposition.log_ruin_scale, decomposition.log_success_scale);
    const Scalar mass = ruin_mass * exp(decomposition.log_ruin_scale - peak) +
                        success_mass * exp(decomposition.log_success_scale - peak);
    const Scalar log_prefactor = peak + log(mass) - log(Scalar(1) - rho);
    const Scalar log_target = Scalar(-46) * std::numbers::ln2_v<Scalar>;
    const Scalar k = ceil((log_target - log_prefactor) / log(rho));
    return max(1, static_cast<int>(k));
}

template <typename Scalar>
int truncation_horizon(const WalkConfig<Scalar>& config)
{
    return truncation_horizon(decompose(config));
}

/// Finite-time ruin and success laws by mode summation. Steps that cannot
/// reach a boundary (too few steps, or the wrong parity) are exact zeros;
/// rounding residue below zero is clamped since every entry is a probability.
template <typename Scalar>
FiniteTimeDistribution<Scalar> finite_time_spectral(const WalkConfig<Scalar>& config, int horizon)
{
    if (horizon < 1)
        throw DomainError("horizon must be >= 1");
    const auto decomposition = decompose(config);
    const Scalar ruin_scale = decomposition.ruin_scale();
    const Scalar success_scale = decomposition.success_scale();
    const int to_ruin = config.z();
    const int to_success = config.a() - config.z();
    const auto n = static_cast<std::size_t>(horizon);

    FiniteTimeDistribution<Scalar> out{config, horizon,
                                       std::vector<Scalar>(n), std::vector<Scalar>(n),
                                       std::vector<Scalar>(n)};
    std::vector<Scalar> power(decomposition.modes.size(), Scalar(1));
    for (std::size_t k = 0; k < n; ++k) {
        const int step = static_cast<int>(k) + 1;
        CompensatedSum<Scalar> ruin;
        CompensatedSum<Scalar> success;
        for (std::size_t i = 0; i < decomposition.modes.size(); ++i) {
            const auto& mode = decomposition.modes[i];
            ruin += mode.A * power[i];
            success += mode.B * power[i];
            power[i] *= mode.lambda;
        }
        if (step >= to_ruin && (step - to_ruin) % 2 == 0)
            out.u[k] = std::max(Scalar(0), ruin_scale * ruin.value());
        if (step >= to_success && (step - to_success) % 2 == 0)
            out.v[k] = std::max(Scalar(0), success_scale * success.value());
        out.s[k] = out.u[k] + out.v[k];
    }
    return out;
}

/// U_z(s) and S_z(s) at s = 1 - gamma, both at the common scale
/// exp(log_scale). The ruin probability is U / S.
template <typename Scalar>
struct GeneratingFunctions {
    Scalar U;
    Scalar S;
    Scalar log_scale;

    Scalar ruin() const { return U / S; }
    Scalar unscaled_U() const { return U * std::exp(log_scale); }
    Scalar unscaled_S() const { return S * std::exp(log_scale); }
};

/**
 * Geometric closed form of sum_k u_k s^k and sum_k v_k s^k. The series
 * start at the first reachable step m (z for ruin, a - z for success):
 *
 *   sum_{k>=m} lambda^(k-1) s^k = (lambda s)^(m-1) s (1 + f(lambda, gamma))
 *
 * and (rho s)^(m-1) with rho = 2 sqrt(pq) is carried in log form.
 */
template <typename Scalar>
GeneratingFunctions<Scalar> generating_functions(const WalkConfig<Scalar>& config)
{
    if constexpr (!std::is_same_v<working_t<Scalar>, Scalar>) {
        const auto wide = generating_functions(promote<working_t<Scalar>>(config));
        return {Scalar(wide.U), Scalar(wide.S), Scalar(wide.log_scale)};
    }
    using std::log;
    using std::pow;
    using std::sqrt;
    const auto decomposition = decompose(config);
    const Scalar gamma = config.gamma();
    const Scalar s = Scalar(1) - gamma;
    const Scalar rho = Scalar(2) * sqrt(config.p() * config.q());
    const int to_ruin = config.z();
    const int to_success = config.a() - config.z();

    CompensatedSum<Scalar> ruin;
    CompensatedSum<Scalar> success;
    for (const auto& mode : decomposition.modes) {
        const Scalar w = Scalar(1) + reset_weight(mode.lambda, gamma);
        const Scalar r = mode.lambda / rho;
        ruin += mode.A * pow(r, to_ruin - 1) * w;
        success += mode.B * pow(r, to_success - 1) * w;
    }
    const Scalar log_ruin =
        decomposition.log_ruin_scale + Scalar(to_ruin - 1) * log(rho * s) + log(s);
    const Scalar log_success =
        decomposition.log_success_scale + Scalar(to_success - 1) * log(rho * s) + log(s);
    const auto [r, v] = side_limits(config);
    const auto sides = bound_sides<Scalar>(
        {ruin.value(), mode_sum_error(ruin.magnitude(), to_ruin), log_ruin, r.log_floor, r.log_bound},
        {success.value(), mode_sum_error(success.magnitude(), to_success), log_success, v.log_floor,
         v.log_bound},
        config);
    return {sides.U, sides.U + sides.V, sides.peak};
}

template <typename Scalar>
Scalar ruin_probability_renewal(const WalkConfig<Scalar>& config)
{
    return std::clamp(generating_functions(config).ruin(), Scalar(0), Scalar(1));
}

} // namespace reset_ruin

#endif // RESET_RUIN_RENEWAL_HPP
