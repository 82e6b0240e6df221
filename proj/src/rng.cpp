#include "phykeylab/rng.hpp"

#include <cmath>

namespace phykeylab {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

RngStream::RngStream(RngSeed s) {
    // Chain-mix seed and stream id so that nearby values land far apart.
    std::uint64_t x = s.seed;
    std::uint64_t h = splitmix64(x);
    x = h ^ s.stream_id;
    engine_.seed(splitmix64(x));
}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform01_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::complex<double> RngStream::complex_normal() {
    double u1 = uniform01_open();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

int RngStream::next_bit() {
    if (bits_left_ == 0) {
        bit_buffer_ = next_u64();
        bits_left_ = 64;
    }
    int b = static_cast<int>(bit_buffer_ & 1u);
    bit_buffer_ >>= 1;
    --bits_left_;
    return b;
}

}  // namespace phykeylab
