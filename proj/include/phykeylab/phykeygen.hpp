#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "phykeylab/rng.hpp"

namespace phykeylab::phykeygen {

enum class Scheme { rss, phase };

const char* scheme_name(Scheme s);

/// Reciprocal block-fading channel seen from three vantage points. Alice and
/// Bob observe the same fade h per coherence block (plus their own receiver
/// noise); Eve observes an independent fade g of the same statistics.
struct ChannelProbeSet {
    std::vector<std::complex<double>> alice;
    std::vector<std::complex<double>> bob;
    std::vector<std::complex<double>> eve;
    double snr_db = 0;
    std::size_t coherence_block = 1;
};

/// Quantizer output: the key bits plus which probe indices produced them
/// (needed for index reconciliation after censoring).
struct KeyBitstream {
    std::vector<std::uint8_t> bits;
    std::vector<std::uint64_t> kept_indices;
    Scheme scheme = Scheme::rss;
    unsigned bits_per_probe = 1;
};

struct QuantizerConfig {
    double q_plus = 0.8;    // upper threshold, in per-window std units
    double q_minus = -0.8;  // lower threshold
    std::size_t window = 250;
    unsigned sectors = 4;   // phase quantizer: power of two >= 2
};

/// Key disagreement probability between two equally long bitstreams.
struct KdpResult {
    double value = 0;
    bool empty = false;  // no bits survived; value is meaningless then
};

struct KgMetrics {
    double kdp = 0;
    double kgr = 0;        // key bits per channel probe
    double monobit_p = 1;  // balance test on the reconciled bits
};

struct SchemeSnrCell {
    Scheme scheme = Scheme::rss;
    double snr_db = 0;
    KgMetrics metrics;
};

/// Draws n_probes observations: one fade per coherence block (circular
/// complex Gaussian, unit power), independent receiver noise per probe with
/// variance 10^(-snr_db/10). Draw order is fixed, so output is reproducible
/// for a given seed regardless of how callers parallelize around it.
ChannelProbeSet simulate_probes(std::size_t n_probes, double snr_db,
                                std::size_t coherence_block, RngSeed rng);

/// Two-threshold scalar quantizer core: per window of `cfg.window` values,
/// normalize by the window mean/population-std; emit 1 above q_plus, 0 below
/// q_minus, censor in between. Exposed for direct testing.
KeyBitstream quantize_values(std::span<const double> values, const QuantizerConfig& cfg);

/// RSS path: quantize_values applied to |observation|^2.
KeyBitstream rss_quantize(std::span<const std::complex<double>> obs,
                          const QuantizerConfig& cfg);

/// Phase path: first probe of each coherence block, arg() mapped to one of
/// cfg.sectors equal sectors, sector index Gray-coded into log2(sectors)
/// bits. Zero-magnitude probes are censored; nothing else is dropped.
KeyBitstream phase_quantize(std::span<const std::complex<double>> obs,
                            const QuantizerConfig& cfg, std::size_t coherence_block);

/// Keeps only bit positions whose probe index both sides retained. This is
/// the index-exchange step of censoring-based key agreement.
std::pair<KeyBitstream, KeyBitstream> reconcile_indices(const KeyBitstream& a,
                                                        const KeyBitstream& b);

/// Fraction of disagreeing bits between two reconciled streams.
KdpResult key_disagreement_probability(const KeyBitstream& a, const KeyBitstream& b);

/// Bits per probe actually banked.
double key_generation_rate(const KeyBitstream& k, std::size_t n_probes);

/// Full scheme-by-SNR comparison grid: `trials` independent channel draws
/// per SNR, each trial quantized under both schemes (with their own
/// configs), reconciled, and scored; cell metrics are trial averages.
/// Parallel over (snr, trial) with one substream per pair, so serial and
/// parallel runs agree bit for bit.
std::vector<SchemeSnrCell> compare_schemes(std::size_t n_probes,
                                           std::span<const double> snr_db_list,
                                           const QuantizerConfig& cfg_rss,
                                           const QuantizerConfig& cfg_phase,
                                           std::size_t trials,
                                           std::size_t coherence_block, RngSeed rng);
std::vector<SchemeSnrCell> compare_schemes_serial(std::size_t n_probes,
                                                  std::span<const double> snr_db_list,
                                                  const QuantizerConfig& cfg_rss,
                                                  const QuantizerConfig& cfg_phase,
                                                  std::size_t trials,
                                                  std::size_t coherence_block, RngSeed rng);

}  // namespace phykeylab::phykeygen
