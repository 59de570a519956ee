#pragma once

#include <array>
#include <cstdint>

namespace nelson2d {

// Philox4x32-10 counter-based generator.  The key is the seed, the counter is
// (block index, stream index); streams never overlap and any (seed, stream)
// pair reproduces its sequence exactly.
class RngStream {
public:
    RngStream(std::uint64_t seed = 0, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    // Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    double exponential();

    // Independent stream derived from this one's (seed, stream) and index.
    RngStream child(std::uint64_t index) const;

    static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key);

private:
    void refill();

    std::uint64_t seed_, stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    bool have_normal_ = false;
    double spare_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace nelson2d
