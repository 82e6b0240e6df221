#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>

namespace phykeylab {

/// Seed plus stream id. Identical pairs reproduce identical draw sequences;
/// distinct stream ids under one seed give independent streams.
struct RngSeed {
    std::uint64_t seed = 42;
    std::uint64_t stream_id = 0;
};

/// Deterministic random stream. mt19937_64 keyed by (seed, stream_id) through
/// SplitMix64; uniform and Gaussian draws are derived from raw engine words
/// here rather than through std::*_distribution, whose output sequences are
/// not pinned by the standard.
class RngStream {
public:
    explicit RngStream(RngSeed s);

    std::uint64_t next_u64();

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01();

    /// Uniform in (0, 1]; safe as a log() argument.
    double uniform01_open();

    /// One Box-Muller pair: both components N(0,1). Consumes exactly two
    /// engine words per call, so draw positions are easy to reason about.
    std::complex<double> complex_normal();

    /// Single fair bit, buffered 64 at a time (consumed LSB first).
    int next_bit();

private:
    std::mt19937_64 engine_;
    std::uint64_t bit_buffer_ = 0;
    int bits_left_ = 0;
};

}  // namespace phykeylab
