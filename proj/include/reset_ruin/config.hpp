#ifndef RESET_RUIN_CONFIG_HPP
#define RESET_RUIN_CONFIG_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace reset_ruin {

/// Raised when an argument lies outside the domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Raised when a computation loses its numerical footing (singular system,
/// vanishing denominator, non-finite result).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a computed sign pattern contradicts the expected critical-point
/// structure. Never caught and repaired inside the library.
struct StructuralViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised by the simulator when a trajectory exceeds its step cap.
struct RunawayError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * A nearest-neighbour walk on {0, ..., a} started at z, stepping right with
 * probability p and returned to z with probability gamma on every tick.
 *
 * The left-step probability q is always derived as 1 - p. Instances are
 * validated on construction and immutable afterwards.
 */
template <typename Scalar = double>
class WalkConfig {
public:
    WalkConfig(int a, int z, Scalar p, Scalar gamma) : a_(a), z_(z), p_(p), gamma_(gamma)
    {
        if (a < 2)
            throw DomainError("domain size a must be >= 2, got " + std::to_string(a));
        if (z < 1 || z > a - 1)
            throw DomainError("start z must lie in [1, a-1], got z=" + std::to_string(z) +
                              " for a=" + std::to_string(a));
        if (!(p > Scalar(0) && p < Scalar(1)))
            throw DomainError("step probability p must lie in (0, 1)");
        if (!(gamma >= Scalar(0) && gamma < Scalar(1)))
            throw DomainError("reset probability gamma must lie in [0, 1)");
    }

    int a() const { return a_; }
    int z() const { return z_; }
    Scalar p() const { return p_; }
    Scalar q() const { return Scalar(1) - p_; }
    Scalar gamma() const { return gamma_; }

    WalkConfig with_z(int z) const { return WalkConfig(a_, z, p_, gamma_); }
    WalkConfig with_p(Scalar p) const { return WalkConfig(a_, z_, p, gamma_); }
    WalkConfig with_gamma(Scalar gamma) const { return WalkConfig(a_, z_, p_, gamma); }

    friend bool operator==(const WalkConfig&, const WalkConfig&) = default;

private:
    int a_;
    int z_;
    Scalar p_;
    Scalar gamma_;
};

} // namespace reset_ruin

#endif // RESET_RUIN_CONFIG_HPP
