#ifndef RESET_RUIN_MONTECARLO_HPP
#define RESET_RUIN_MONTECARLO_HPP

#include <cstdint>

#include "reset_ruin/config.hpp"
#include "reset_ruin/philox.hpp"

namespace reset_ruin {

/// Seed used when the caller does not supply one.
inline constexpr std::uint64_t kDefaultSeed = 42;
/// Trajectory count of the reference validation protocol.
inline constexpr std::uint64_t kDefaultTrajectories = 100'000;
/// Any trajectory longer than this is reported as a runaway.
inline constexpr std::uint64_t kStepCap = 1'000'000'000;

enum class Boundary { ruin, success };

struct TrajectoryOutcome {
    Boundary absorbed_at;
    std::uint64_t steps;
    std::uint64_t resets;
};

struct McEstimate {
    double p_hat;
    double std_error; ///< sqrt(p_hat (1 - p_hat) / n_sim)
    std::uint64_t n_sim;
    std::uint64_t seed;
    double mean_steps;
    double mean_resets;
};

/// One tick: with probability gamma jump back to z (a no-op when already
/// there), otherwise step right w.p. p or left w.p. q. Stops at 0 or a.
TrajectoryOutcome simulate_trajectory(const WalkConfig<double>& config, TrajectoryStream& rng,
                                      std::uint64_t step_cap = kStepCap);

/// Worker count: RESET_RUIN_THREADS if set to a positive integer, capped by
/// the hardware concurrency; otherwise the hardware concurrency.
unsigned worker_count();

/// Fraction of n_sim trajectories absorbed at 0. Trajectory i draws from
/// TrajectoryStream(seed, i) and per-worker tallies are integers, so the
/// result is bit-identical for any `threads` (0 selects worker_count()).
McEstimate estimate_ruin(const WalkConfig<double>& config, std::uint64_t n_sim,
                         std::uint64_t seed = kDefaultSeed, unsigned threads = 0);

} // namespace reset_ruin

#endif // RESET_RUIN_MONTECARLO_HPP
