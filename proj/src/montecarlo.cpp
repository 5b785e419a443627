#include "reset_ruin/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace reset_ruin {

TrajectoryOutcome simulate_trajectory(const WalkConfig<double>& config, TrajectoryStream& rng,
                                      std::uint64_t step_cap)
{
    const int a = config.a();
    const int start = config.z();
    const double p = config.p();
    const double gamma = config.gamma();

    int x = start;
    std::uint64_t steps = 0;
    std::uint64_t resets = 0;
    while (steps < step_cap) {
        ++steps;
        if (rng.next_uniform() < gamma) {
            x = start;
            ++resets;
            continue;
        }
        x += rng.next_uniform() < p ? 1 : -1;
        if (x == 0)
            return {Boundary::ruin, steps, resets};
        if (x == a)
            return {Boundary::success, steps, resets};
    }
    throw RunawayError("trajectory exceeded " + std::to_string(step_cap) + " steps");
}

unsigned worker_count()
{
    const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RESET_RUIN_THREADS")) {
        char* end = nullptr;
        const long requested = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && requested > 0)
            return std::min(hardware, static_cast<unsigned>(requested));
    }
    return hardware;
}

namespace {

struct Tally {
    std::uint64_t ruined = 0;
    std::uint64_t steps = 0;
    std::uint64_t resets = 0;
};

Tally run_range(const WalkConfig<double>& config, std::uint64_t seed, std::uint64_t begin,
                std::uint64_t end)
{
    Tally t;
    for (std::uint64_t i = begin; i < end; ++i) {
        TrajectoryStream rng(seed, i);
        const auto outcome = simulate_trajectory(config, rng);
        t.ruined += outcome.absorbed_at == Boundary::ruin;
        t.steps += outcome.steps;
        t.resets += outcome.resets;
    }
    return t;
}

} // namespace

McEstimate estimate_ruin(const WalkConfig<double>& config, std::uint64_t n_sim, std::uint64_t seed,
                         unsigned threads)
{
    if (n_sim < 1)
        throw DomainError("n_sim must be >= 1");
    if (threads == 0)
        threads = worker_count();
    const auto workers = static_cast<std::uint64_t>(std::min<std::uint64_t>(threads, n_sim));

    std::vector<Tally> tallies(workers);
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::uint64_t w = 0; w < workers; ++w) {
            const std::uint64_t begin = n_sim * w / workers;
            const std::uint64_t end = n_sim * (w + 1) / workers;
            pool.emplace_back([&, w, begin, end] {
                try {
                    tallies[w] = run_range(config, seed, begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    Tally total;
    for (const auto& t : tallies) {
        total.ruined += t.ruined;
        total.steps += t.steps;
        total.resets += t.resets;
    }
    const double n = static_cast<double>(n_sim);
    const double p_hat = static_cast<double>(total.ruined) / n;
    return {p_hat,
            std::sqrt(p_hat * (1.0 - p_hat) / n),
            n_sim,
            seed,
            static_cast<double>(total.steps) / n,
            static_cast<double>(total.resets) / n};
}

} // namespace reset_ruin
