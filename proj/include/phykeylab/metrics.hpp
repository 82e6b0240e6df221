#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "phykeylab/blockcipher.hpp"
#include "phykeylab/channelsim.hpp"

namespace phykeylab::metrics {

/// Input-to-output growth measure of the cipher:
/// (cipher Frobenius norm / plain Frobenius norm) * block count.
struct ScalabilityReport {
    double input_frobenius = 0;
    double output_frobenius = 0;
    std::uint64_t block_count = 0;
    double factor = 0;
};

/// Step CDF as (value, cumulative probability) pairs; values strictly
/// increasing, probabilities nondecreasing, last exactly 1.
struct CdfSeries {
    std::vector<std::pair<double, double>> points;
};

ScalabilityReport scalability_factor(const blockcipher::MessageMatrix& plain,
                                     const blockcipher::MessageMatrix& cipher);

/// Effective bit throughput per BER point: symbol_rate * log2(M) * (1 - ber).
std::vector<double> bitrate_samples(std::span<const channelsim::BerPoint> points,
                                    double symbol_rate, unsigned order_m);

CdfSeries empirical_cdf(std::span<const double> samples);

/// Frequency (monobit) randomness test: p = erfc(|#1 - #0| / sqrt(2n)).
/// Small p means the ones/zeros balance is implausible for a fair source.
double monobit_p(std::span<const std::uint8_t> bits);

}  // namespace phykeylab::metrics
