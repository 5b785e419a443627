#ifndef RESET_RUIN_CRITICAL_HPP
#define RESET_RUIN_CRITICAL_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "reset_ruin/config.hpp"
#include "reset_ruin/spectral.hpp"

namespace reset_ruin {

/// Absolute tolerance for declaring h_{a/2} = 0 on even domains.
inline constexpr double kExactZeroTolerance = 1e-9;
/// Half-width of the p-interval used to difference the crossing location.
inline constexpr double kBiasStep = 1e-3;

/**
 * Spectral sums for the gamma-derivative of the ruin probability. With
 * U(s), V(s) the discounted ruin and success sums at s = 1 - gamma:
 *
 *   S1 = U',   S2 = U + V,   S3 = U,   S4 = U' + V'
 *   h  = (-S1 S2 + S3 S4) / S2^2
 *
 * which in plain mode weights d_nu = 1 - lambda_nu s reads S1 = sum A/d^2,
 * S2 = sum (A+B) s/d, S3 = sum A s/d, S4 = sum (A+B)/d^2. All four carry one
 * common scale factored out; h does not depend on it.
 *
 * The numerator is evaluated as U V' - U' V, which is the same quantity with
 * the U U' products cancelled algebraically; near a boundary those products
 * are larger than h by many orders. The sums run in working_t<Scalar>;
 * `h_error` is a first-order bound on the rounding error of h, including the
 * final rounding to Scalar.
 */
template <typename Scalar>
struct DerivativeComponents {
    Scalar s1;
    Scalar s2;
    Scalar s3;
    Scalar s4;
    Scalar h;
    Scalar h_error;

    bool resolved() const { return std::abs(h) > h_error; }
};

template <typename Scalar>
DerivativeComponents<Scalar> derivative(const WalkConfig<Scalar>& config)
{
    using std::abs;
    if constexpr (!std::is_same_v<working_t<Scalar>, Scalar>) {
        const auto w = derivative(promote<working_t<Scalar>>(config));
        const Scalar h = Scalar(w.h);
        return {Scalar(w.s1), Scalar(w.s2), Scalar(w.s3), Scalar(w.s4), h,
                Scalar(w.h_error) + std::numeric_limits<Scalar>::epsilon() * abs(h)};
    }
    using std::exp;
    using std::max;
    const auto decomposition = decompose(config);
    const auto ruin = discounted_side(decomposition, Side::ruin, config.gamma());
    const auto success = discounted_side(decomposition, Side::success, config.gamma());
    const Scalar peak = max(ruin.log_scale, success.log_scale);
    const Scalar fr = exp(ruin.log_scale - peak);
    const Scalar fs = exp(success.log_scale - peak);

    const Scalar U = ruin.value * fr;
    const Scalar dU = ruin.slope * fr;
    const Scalar V = success.value * fs;
    const Scalar dV = success.slope * fs;
    const Scalar S = U + V;
    if (!(S > Scalar(0)))
        throw NumericError("derivative denominator S2 vanished");

    DerivativeComponents<Scalar> out{dU, S, U, dU + dV, {}, {}};
    const Scalar cross = U * dV - dU * V;
    out.h = cross / (S * S);

    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    const Scalar eU = ruin.error * fr;
    const Scalar edU = ruin.slope_error * fr;
    const Scalar eV = success.error * fs;
    const Scalar edV = success.slope_error * fs;
    const Scalar cross_error = eU * abs(dV) + abs(U) * edV + edU * abs(V) + abs(dU) * eV +
                               eps * (abs(U * dV) + abs(dU * V));
    out.h_error = Scalar(4) * (cross_error / (S * S) + Scalar(2) * abs(out.h) * (eU + eV) / S);
    return out;
}

/**
 * Sign structure of h_z over z = 1..a-1 at fixed (p, gamma).
 *
 * A site whose |h| does not exceed its rounding bound has no resolved sign
 * and is skipped when counting sign changes. `z_cross` is a linear
 * interpolation between the two bracketing integer sites; it is a reporting
 * convention for tracking shifts, not a root of any continuous extension.
 */
template <typename Scalar>
struct CriticalPointReport {
    int a;
    Scalar p;
    Scalar gamma;
    std::vector<Scalar> h_values; ///< z = 1..a-1
    std::vector<Scalar> h_errors;
    std::pair<int, int> bracket;  ///< (z0, z0+1), or (m, m) for an exact zero at m
    std::optional<int> exact_zero_site;
    Scalar z_cross;
    bool midpoint_exact;
    bool first_positive; ///< h_1 resolved and > 0
    bool last_negative;  ///< h_{a-1} resolved and < 0
    int unresolved_sites;

    Scalar h(int z) const { return h_values[static_cast<std::size_t>(z - 1)]; }
};

namespace detail {

template <typename Scalar>
std::string describe_h(int a, Scalar p, Scalar gamma, const std::vector<Scalar>& h)
{
    std::ostringstream os;
    os.precision(6);
    os << "a=" << a << " p=" << double(p) << " gamma=" << double(gamma) << " h=[";
    for (std::size_t i = 0; i < h.size(); ++i)
        os << (i ? ", " : "") << double(h[i]);
    os << "]";
    return os.str();
}

} // namespace detail

template <typename Scalar>
CriticalPointReport<Scalar> sign_change(int a, Scalar p, Scalar gamma)
{
    using std::abs;
    if (a < 3)
        throw DomainError("sign-change analysis needs a >= 3");

    CriticalPointReport<Scalar> r{a, p, gamma, {}, {}, {0, 0}, std::nullopt, Scalar(0),
                                  false, false, false, 0};
    std::vector<int> sign;
    const bool even = a % 2 == 0;
    for (int z = 1; z < a; ++z) {
        // A site whose sums cannot even give a positive denominator is unresolved.
        DerivativeComponents<Scalar> d{};
        d.h = std::numeric_limits<Scalar>::quiet_NaN();
        d.h_error = std::numeric_limits<Scalar>::infinity();
        try {
            d = derivative(WalkConfig<Scalar>(a, z, p, gamma));
        } catch (const NumericError&) {
        }
        r.h_values.push_back(d.h);
        r.h_errors.push_back(d.h_error);
        int sg = d.resolved() ? (d.h > 0 ? 1 : -1) : 0;
        if (even && z == a / 2 && abs(d.h) <= Scalar(kExactZeroTolerance))
            sg = 0;
        if (sg == 0)
            ++r.unresolved_sites;
        sign.push_back(sg);
    }
    r.midpoint_exact = even && abs(r.h(a / 2)) <= Scalar(kExactZeroTolerance);
    r.first_positive = sign.front() > 0;
    r.last_negative = sign.back() < 0;

    int changes = 0;
    int previous = 0;
    int last_positive = 0;
    int first_negative = 0;
    bool leading_negative = false;
    for (int z = 1; z < a; ++z) {
        const int sg = sign[static_cast<std::size_t>(z - 1)];
        if (sg == 0)
            continue;
        if (previous == 0 && sg < 0)
            leading_negative = true;
        if (previous != 0 && sg != previous)
            ++changes;
        if (sg > 0)
            last_positive = z;
        if (sg < 0 && first_negative == 0)
            first_negative = z;
        previous = sg;
    }
    if (changes != 1 || leading_negative)
        throw StructuralViolation("expected exactly one +/- sign change in h_z, found " +
                                  std::to_string(changes) + ": " +
                                  detail::describe_h(a, p, gamma, r.h_values));

    if (first_negative == last_positive + 1) {
        const Scalar h0 = r.h(last_positive);
        const Scalar h1 = r.h(first_negative);
        r.bracket = {last_positive, first_negative};
        r.z_cross = Scalar(last_positive) + h0 / (h0 - h1);
    } else if (first_negative == last_positive + 2 &&
               abs(r.h(last_positive + 1)) <= Scalar(kExactZeroTolerance)) {
        r.exact_zero_site = last_positive + 1;
        r.bracket = {last_positive + 1, last_positive + 1};
        r.z_cross = Scalar(last_positive + 1);
    } else {
        throw StructuralViolation("sign change between z=" + std::to_string(last_positive) +
                                  " and z=" + std::to_string(first_negative) +
                                  " is not localised: " +
                                  detail::describe_h(a, p, gamma, r.h_values));
    }
    return r;
}

/// max over the grid of |q_{a/2}(gamma) - midpoint_value(a, p)|.
template <typename Scalar>
Scalar midpoint_invariance_sweep(int a, std::span<const Scalar> p_grid,
                                 std::span<const Scalar> gamma_grid)
{
    using std::abs;
    using std::max;
    if (a < 2 || a % 2 != 0)
        throw DomainError("midpoint sweep needs an even domain size");
    if (p_grid.empty() || gamma_grid.empty())
        throw DomainError("midpoint sweep grids must be non-empty");
    Scalar worst{0};
    for (const Scalar p : p_grid) {
        const Scalar expected = midpoint_value(a, p);
        for (const Scalar gamma : gamma_grid)
            worst = max(worst, abs(ruin_probability_spectral(WalkConfig<Scalar>(a, a / 2, p, gamma)) -
                                   expected));
    }
    return worst;
}

/// Central-difference estimate of C in z_cross ~ a/2 - C (p - q) / 2, taken
/// at p = 1/2 +- eps so that p - q = +-2 eps.
template <typename Scalar>
Scalar bias_shift_coefficient(int a, Scalar gamma, Scalar eps = Scalar(kBiasStep))
{
    if (a < 3 || a % 2 == 0)
        throw DomainError("bias shift coefficient needs an odd domain size >= 3");
    const Scalar half = Scalar(1) / Scalar(2);
    const Scalar up = sign_change(a, half + eps, gamma).z_cross;
    const Scalar down = sign_change(a, half - eps, gamma).z_cross;
    return Scalar(-2) * (up - down) / (Scalar(2) * (Scalar(2) * eps));
}

/// a * max |h_z| over the p-grid and z in {(a-1)/2, (a+1)/2}.
template <typename Scalar>
Scalar central_site_bound(int a, std::span<const Scalar> p_grid, Scalar gamma)
{
    using std::abs;
    using std::max;
    if (a < 3 || a % 2 == 0)
        throw DomainError("central site bound needs an odd domain size >= 3");
    if (p_grid.empty())
        throw DomainError("p grid must be non-empty");
    Scalar worst{0};
    for (const Scalar p : p_grid)
        for (const int z : {(a - 1) / 2, (a + 1) / 2})
            worst = max(worst, abs(derivative(WalkConfig<Scalar>(a, z, p, gamma)).h));
    return Scalar(a) * worst;
}

} // namespace reset_ruin

#endif // RESET_RUIN_CRITICAL_HPP
