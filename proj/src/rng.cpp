#include "nelson2d/rng.hpp"

#include <cmath>

#include "nelson2d/types.hpp"

namespace nelson2d {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::array<std::uint32_t, 4> RngStream::philox(std::array<std::uint32_t, 4> c,
                                               std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * c[2];
        c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
        k[0] += kWeylA;
        k[1] += kWeylB;
    }
    return c;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

void RngStream::refill() {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    buf_ = philox(ctr, {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    ++block_;
    pos_ = 0;
}

std::uint32_t RngStream::next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
}

double RngStream::uniform() {
    // 53 random bits, shifted off zero by half an ulp.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    if (have_normal_) {
        have_normal_ = false;
        return spare_normal_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * kPi * uniform();
    spare_normal_ = r * std::sin(phi);
    have_normal_ = true;
    return r * std::cos(phi);
}

double RngStream::exponential() { return -std::log(uniform()); }

RngStream RngStream::child(std::uint64_t index) const {
    return RngStream(seed_, splitmix64(stream_ ^ splitmix64(index + 0x632BE59BD9B4E019ull)));
}

}  // namespace nelson2d
