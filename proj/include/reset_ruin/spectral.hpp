#ifndef RESET_RUIN_SPECTRAL_HPP
#define RESET_RUIN_SPECTRAL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "reset_ruin/compensated_sum.hpp"
#include "reset_ruin/config.hpp"

namespace reset_ruin {

/// Precision the mode sums are accumulated in. The sums cancel heavily when a
/// boundary is far and the walk strongly biased, so double inputs are summed
/// in long double; other types are used as given.
template <typename Scalar>
struct working_precision {
    using type = Scalar;
};
template <>
struct working_precision<double> {
    using type = long double;
};
template <typename Scalar>
using working_t = typename working_precision<Scalar>::type;

template <typename Working, typename Scalar>
WalkConfig<Working> promote(const WalkConfig<Scalar>& config)
{
    return WalkConfig<Working>(config.a(), config.z(), Working(config.p()), Working(config.gamma()));
}

/// sin(pi * m / a) with the integer argument reduced modulo 2a first.
template <typename Scalar>
Scalar sin_pi_ratio(long long m, int a)
{
    using std::sin;
    const long long period = 2LL * a;
    long long r = m % period;
    if (r < 0)
        r += period;
    return sin(std::numbers::pi_v<Scalar> * Scalar(r) / Scalar(a));
}

/// Eigenvalue 2 sqrt(pq) cos(pi nu / a) of the Doob-symmetrised interior operator.
template <typename Scalar>
Scalar eigenvalue(int a, Scalar p, int nu)
{
    using std::sqrt;
    if (a < 2)
        throw DomainError("domain size a must be >= 2");
    if (nu < 1 || nu > a - 1)
        throw DomainError("mode index nu must lie in [1, a-1], got " + std::to_string(nu));
    if (!(p > Scalar(0) && p < Scalar(1)))
        throw DomainError("step probability p must lie in (0, 1)");
    // cos(pi nu/a) = sin(pi (a - 2 nu) / 2a), exactly zero at nu = a/2
    return Scalar(2) * sqrt(p * (Scalar(1) - p)) * sin_pi_ratio<Scalar>(a - 2LL * nu, 2 * a);
}

/**
 * One eigen-triple of the absorbing walk.
 *
 * The first-passage laws of the reset-free walk are
 *   u_{z,k} = ruin_scale    * sum_nu A_nu lambda_nu^(k-1),
 *   v_{z,k} = success_scale * sum_nu B_nu lambda_nu^(k-1).
 * The exponent is k-1, not k: the last interior step carries the factor
 * sqrt(pq) rather than lambda_nu, which keeps modes with lambda_nu = 0 (even
 * a) in play.
 */
template <typename Scalar>
struct SpectralMode {
    int nu;
    Scalar lambda;
    Scalar A; ///< ruin side, unit scale
    Scalar B; ///< success side, unit scale
};

template <typename Scalar>
struct SpectralDecomposition {
    WalkConfig<Scalar> config;
    std::vector<SpectralMode<Scalar>> modes; ///< nu = 1 .. a-1 in order
    Scalar log_ruin_scale;
    Scalar log_success_scale;

    Scalar ruin_scale() const
    {
        using std::exp;
        return exp(log_ruin_scale);
    }
    Scalar success_scale() const
    {
        using std::exp;
        return exp(log_success_scale);
    }
};

/**
 * Eigen-decomposition of the walk's interior operator and the boundary-flux
 * coefficients for the start site.
 *
 * A_nu = sqrt(pq) (2/a) (q/p)^{z/2}     sin(pi nu z/a)     sin(pi nu/a)
 * B_nu = sqrt(pq) (2/a) (p/q)^{(a-z)/2} sin(pi nu (a-z)/a) sin(pi nu/a)
 *
 * Each side keeps its prefactor in log form, so the stored coefficients are
 * O(1) for any a and bias.
 */
template <typename Scalar>
SpectralDecomposition<Scalar> decompose(const WalkConfig<Scalar>& config)
{
    using std::log;
    using std::sqrt;

    const int a = config.a();
    const int z = config.z();
    const Scalar p = config.p();
    const Scalar q = config.q();

    const Scalar log_bias = log(q) - log(p);
    const Scalar log_common = log(sqrt(p * q) * Scalar(2) / Scalar(a));
    SpectralDecomposition<Scalar> out{config, {},
                                      log_common + Scalar(z) / Scalar(2) * log_bias,
                                      log_common - Scalar(a - z) / Scalar(2) * log_bias};
    out.modes.reserve(static_cast<std::size_t>(a - 1));
    for (int nu = 1; nu < a; ++nu) {
        const Scalar edge = sin_pi_ratio<Scalar>(nu, a);
        out.modes.push_back({nu, eigenvalue(a, p, nu),
                             sin_pi_ratio<Scalar>(1LL * nu * z, a) * edge,
                             sin_pi_ratio<Scalar>(1LL * nu * (a - z), a) * edge});
    }
    return out;
}

/// f(lambda, gamma) = lambda (1-gamma) / (1 - lambda (1-gamma)).
template <typename Scalar>
Scalar reset_weight(Scalar lambda, Scalar gamma)
{
    const Scalar s = Scalar(1) - gamma;
    return lambda * s / (Scalar(1) - lambda * s);
}

/// Generating function sum_{k>=1} lambda^(k-1) s^k = s / (1 - lambda s) at
/// s = 1 - gamma; equal to (1 - gamma) (1 + reset_weight(lambda, gamma)).
template <typename Scalar>
Scalar mode_weight(Scalar lambda, Scalar gamma)
{
    const Scalar s = Scalar(1) - gamma;
    return s / (Scalar(1) - lambda * s);
}

/// Reset-free ruin probability. z may sit on either boundary.
template <typename Scalar>
Scalar classical_ruin(int a, int z, Scalar p)
{
    using std::abs;
    using std::expm1;
    using std::log;
    if (a < 2)
        throw DomainError("domain size a must be >= 2");
    if (z < 0 || z > a)
        throw DomainError("start z must lie in [0, a]");
    if (!(p > Scalar(0) && p < Scalar(1)))
        throw DomainError("step probability p must lie in (0, 1)");
    if (z == 0)
        return Scalar(1);
    if (z == a)
        return Scalar(0);
    if (abs(p - Scalar(0.5)) < Scalar(1e-12))
        return Scalar(1) - Scalar(z) / Scalar(a);

    // With r = q/p < 1 the ratio is (r^z - r^a) / (1 - r^a); for r > 1 divide
    // through by r^a and use 1/r instead so no power exceeds one.
    const Scalar log_r = log(Scalar(1) - p) - log(p);
    if (log_r < Scalar(0)) {
        const Scalar one_minus_ra = -expm1(Scalar(a) * log_r);
        const Scalar rz_minus_ra = -std::exp(Scalar(z) * log_r) * expm1(Scalar(a - z) * log_r);
        return rz_minus_ra / one_minus_ra;
    }
    return expm1(-Scalar(a - z) * log_r) / expm1(-Scalar(a) * log_r);
}

enum class Side { ruin, success };

/**
 * One side of the discounted first-passage sum, sum_k c_k s^k with
 * c_k = sum_nu X_nu lambda_nu^(k-1), and its s-derivative.
 *
 * The walk needs at least m steps to reach the boundary (m = z for ruin,
 * a - z for success), so the mode sums vanish for k < m and the series may
 * start there:
 *
 *   sum_k c_k s^k = (rho s)^(m-1) s * sum_nu X_nu r_nu^(m-1) / (1 - lambda_nu s)
 *
 * with rho = 2 sqrt(pq) and r_nu = lambda_nu / rho. Dropping the identically
 * cancelling leading terms removes most of the cancellation that the plain
 * mode weights suffer when s is small or the boundary is far. The prefactor
 * goes to `log_scale` together with the side's coefficient scale.
 */
template <typename Scalar>
struct DiscountedSide {
    Scalar value;
    Scalar error; ///< rounding bound on value
    Scalar slope; ///< d/ds, same scale
    Scalar slope_error;
    Scalar log_scale;
};

/// Rounding bound for a mode sum with absolute term sum `magnitude` whose
/// terms carry r^(m-1): the relative error of r grows m-fold in the power.
template <typename Scalar>
Scalar mode_sum_error(Scalar magnitude, int m)
{
    return Scalar(8 * (4 + m)) * std::numeric_limits<Scalar>::epsilon() * magnitude;
}

template <typename Scalar>
DiscountedSide<Scalar> discounted_side(const SpectralDecomposition<Scalar>& decomposition,
                                       Side side, Scalar gamma)
{
    using std::log;
    using std::pow;
    using std::sqrt;
    const auto& config = decomposition.config;
    const Scalar s = Scalar(1) - gamma;
    const int m = side == Side::ruin ? config.z() : config.a() - config.z();
    const Scalar rho = Scalar(2) * sqrt(config.p() * config.q());

    CompensatedSum<Scalar> value;
    CompensatedSum<Scalar> slope;
    for (const auto& mode : decomposition.modes) {
        const Scalar x = side == Side::ruin ? mode.A : mode.B;
        const Scalar lead = x * pow(mode.lambda / rho, m - 1);
        const Scalar d = Scalar(1) - mode.lambda * s;
        value += lead / d;
        slope += lead * (Scalar(m) - Scalar(m - 1) * mode.lambda * s) / (s * d * d);
    }
    const Scalar log_side =
        side == Side::ruin ? decomposition.log_ruin_scale : decomposition.log_success_scale;
    return {value.value(), mode_sum_error(value.magnitude(), m), slope.value(),
            mode_sum_error(slope.magnitude(), m), log_side + Scalar(m - 1) * log(rho * s) + log(s)};
}

/// Largest spread of the ruin probability that the bracketing below accepts.
inline constexpr double kRatioResolution = 1e-11;

/**
 * One side of the renewal ratio: a computed sum `value` with rounding bound
 * `error`, both at scale exp(log_scale), and a priori bounds
 * [exp(log_floor), exp(log_bound)] on the true unscaled sum.
 */
template <typename Scalar>
struct SideEstimate {
    Scalar value;
    Scalar error;
    Scalar log_scale;
    Scalar log_floor;
    Scalar log_bound;
};

template <typename Scalar>
struct SideLimits {
    Scalar log_floor;
    Scalar log_bound;
};

/// Both sides brought to a common scale exp(peak) and clamped to what they
/// can be, so that U / (U + V) is the ruin probability.
template <typename Scalar>
struct BoundedSides {
    Scalar U;
    Scalar V;
    Scalar peak;
};

/// A priori limits on the two discounted sums. Reaching a boundary m sites
/// away takes at least m steps and happens with at most the reset-free
/// probability, so a side is at most s^m P(boundary); the straight run to it
/// alone contributes (s p_step)^m.
template <typename Scalar>
std::pair<SideLimits<Scalar>, SideLimits<Scalar>> side_limits(const WalkConfig<Scalar>& config)
{
    using std::log;
    const Scalar log_s = log(Scalar(1) - config.gamma());
    const int z = config.z();
    const int a = config.a();
    return {{Scalar(z) * (log_s + log(config.q())), Scalar(z) * log_s + log(classical_ruin(a, z, config.p()))},
            {Scalar(a - z) * (log_s + log(config.p())),
             Scalar(a - z) * log_s + log(classical_ruin(a, a - z, config.q()))}};
}

/**
 * Far boundaries make a side's mode sum cancel to far below its rounding
 * error, and its scale can be large enough for that noise to swamp the other
 * side. Each side is known to lie in [max(0, value - error), min(value +
 * error, bound)], raised to its floor; the point estimate is clamped into that interval and
 * NumericError is thrown when the implied interval for the ratio is wider
 * than kRatioResolution.
 */
template <typename Scalar>
BoundedSides<Scalar> bound_sides(const SideEstimate<Scalar>& ruin, const SideEstimate<Scalar>& success,
                                 const WalkConfig<Scalar>& config)
{
    using std::abs;
    using std::clamp;
    using std::exp;
    using std::isfinite;
    using std::log;
    using std::max;
    using std::min;
    auto top = [](const SideEstimate<Scalar>& e) {
        return min(e.log_scale + log(abs(e.value) + e.error), e.log_bound);
    };
    const Scalar peak = max(top(ruin), top(success));
    // The bounds are themselves rounded; allow them a little room.
    const Scalar slack = Scalar(1) + Scalar(64) * std::numeric_limits<Scalar>::epsilon();
    auto interval = [&](const SideEstimate<Scalar>& e) {
        const Scalar f = exp(e.log_scale - peak);
        const Scalar bound = exp(e.log_bound - peak) * slack;
        const Scalar lo = max(exp(e.log_floor - peak) / slack, (e.value - e.error) * f);
        const Scalar hi = min((e.value + e.error) * f, bound);
        return std::array<Scalar, 3>{lo, hi, clamp(e.value * f, lo, max(lo, hi))};
    };
    const auto u = interval(ruin);
    const auto v = interval(success);
    // z = a/2: both sides are the same sum at different scales, so their
    // rounding errors cancel in the ratio.
    if (ruin.value == success.value && ruin.error == success.error && ruin.value != Scalar(0)) {
        const Scalar f = exp(ruin.log_scale - peak);
        const Scalar g = exp(success.log_scale - peak);
        return {ruin.value * f, success.value * g, peak};
    }
    auto fail = [&](const std::string& why) {
        return NumericError("spectral sums cannot resolve the ruin probability for a=" +
                            std::to_string(config.a()) + ", z=" + std::to_string(config.z()) +
                            ", p=" + std::to_string(double(config.p())) +
                            ", gamma=" + std::to_string(double(config.gamma())) + ": " + why);
    };
    if (!isfinite(peak) || u[1] < u[0] || v[1] < v[0])
        throw fail("a side falls outside its a priori range");
    const Scalar den = u[2] + v[2];
    if (!(den > Scalar(0)))
        throw fail("denominator vanished");
    const Scalar q_lo = u[0] + v[1] > Scalar(0) ? u[0] / (u[0] + v[1]) : Scalar(0);
    const Scalar q_hi = u[1] + v[0] > Scalar(0) ? u[1] / (u[1] + v[0]) : Scalar(1);
    if (q_hi - q_lo > Scalar(kRatioResolution))
        throw fail("ratio only bracketed in [" + std::to_string(double(q_lo)) + ", " +
                   std::to_string(double(q_hi)) + "]");
    return {u[2], v[2], peak};
}

template <typename Scalar>
Scalar ruin_probability_spectral(const SpectralDecomposition<Scalar>& decomposition)
{
    using std::log;
    const auto& config = decomposition.config;
    const Scalar gamma = config.gamma();
    const auto ruin = discounted_side(decomposition, Side::ruin, gamma);
    const auto success = discounted_side(decomposition, Side::success, gamma);
    const auto [r, v] = side_limits(config);
    const auto sides = bound_sides<Scalar>(
        {ruin.value, ruin.error, ruin.log_scale, r.log_floor, r.log_bound},
        {success.value, success.error, success.log_scale, v.log_floor, v.log_bound}, config);
    return std::clamp(sides.U / (sides.U + sides.V), Scalar(0), Scalar(1));
}

/// Ruin probability under geometric resetting from the closed spectral form,
/// evaluated in working_t<Scalar>.
template <typename Scalar>
Scalar ruin_probability_spectral(const WalkConfig<Scalar>& config)
{
    return Scalar(ruin_probability_spectral(decompose(promote<working_t<Scalar>>(config))));
}

/// (q/p)^{a/2} / (1 + (q/p)^{a/2}), the reset-invariant midpoint ruin value.
template <typename Scalar>
Scalar midpoint_value(int a, Scalar p)
{
    using std::exp;
    using std::log;
    if (a < 2 || a % 2 != 0)
        throw DomainError("midpoint value needs an even domain size, got a=" + std::to_string(a));
    if (!(p > Scalar(0) && p < Scalar(1)))
        throw DomainError("step probability p must lie in (0, 1)");
    const Scalar log_c = Scalar(a / 2) * (log(Scalar(1) - p) - log(p));
    return Scalar(1) / (Scalar(1) + exp(-log_c));
}

} // namespace reset_ruin

#endif // RESET_RUIN_SPECTRAL_HPP
