#include "reset_ruin/philox.hpp"

namespace reset_ruin {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

inline Philox4x32::Counter round(const Philox4x32::Counter& c, const Philox4x32::Key& k)
{
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

} // namespace

Philox4x32::Counter Philox4x32::generate(Counter counter, Key key)
{
    counter = round(counter, key);
    for (int r = 1; r < 10; ++r) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
        counter = round(counter, key);
    }
    return counter;
}

TrajectoryStream::TrajectoryStream(std::uint64_t seed, std::uint64_t trajectory)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      trajectory_(trajectory)
{
}

std::uint64_t TrajectoryStream::next_u64()
{
    if (available_ == 0) {
        buffer_ = Philox4x32::generate({static_cast<std::uint32_t>(block_),
                                        static_cast<std::uint32_t>(block_ >> 32),
                                        static_cast<std::uint32_t>(trajectory_),
                                        static_cast<std::uint32_t>(trajectory_ >> 32)},
                                       key_);
        ++block_;
        available_ = 2;
    }
    const int i = 2 - available_;
    --available_;
    return static_cast<std::uint64_t>(buffer_[2 * i]) |
           (static_cast<std::uint64_t>(buffer_[2 * i + 1]) << 32);
}

} // namespace reset_ruin
