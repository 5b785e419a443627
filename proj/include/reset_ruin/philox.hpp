#ifndef RESET_RUIN_PHILOX_HPP
#define RESET_RUIN_PHILOX_HPP

#include <array>
#include <cstdint>

namespace reset_ruin {

/**
 * Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw 2011).
 *
 * A pure function of (counter, key): 128-bit counter and 64-bit key in, 128
 * random bits out. Known-answer vectors are checked in tests/test_philox.cpp
 * and listed in README.md.
 */
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter counter, Key key);
};

/**
 * Random stream for one trajectory. The key is the 64-bit run seed; the
 * counter is (block index low, block high, trajectory index low, high), so
 * trajectory i always sees the same numbers whatever thread runs it.
 */
class TrajectoryStream {
public:
    TrajectoryStream(std::uint64_t seed, std::uint64_t trajectory);

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    Philox4x32::Key key_;
    std::uint64_t trajectory_;
    std::uint64_t block_ = 0;
    Philox4x32::Counter buffer_{};
    int available_ = 0;
};

} // namespace reset_ruin

#endif // RESET_RUIN_PHILOX_HPP
