#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "phykeylab/rng.hpp"

namespace phykeylab::channelsim {

/// Modulated symbols plus enough bookkeeping to invert the mapping.
struct SymbolStream {
    std::vector<std::complex<double>> symbols;
    unsigned order_m = 2;
    std::size_t pad_bits = 0;  // zero bits appended to fill the final symbol
};

struct BerPoint {
    double ebn0_db = 0;
    std::uint64_t bits_simulated = 0;
    std::uint64_t errors = 0;
    double ber = 0;
};

/// Unit-energy M-PSK constellation, index k at angle 2*pi*k/M, rotated by
/// pi/M for M > 2 so no point sits on an axis. The Gray label of index k is
/// gray_encode(k).
std::vector<std::complex<double>> psk_constellation(unsigned order_m);

/// Groups bits MSB-first into log2(M)-bit labels and emits the constellation
/// point carrying each label. A short final group is zero-padded; pad_bits
/// records how many so demodulation can drop them.
SymbolStream psk_modulate(std::span<const std::uint8_t> bits, unsigned order_m);

/// Per-dimension noise deviation for a given Eb/N0: symbol energy 1 split
/// over log2(M) bits, sigma^2 = 1 / (2 * log2(M) * 10^(ebn0_db/10)).
/// ebn0_db = +infinity yields exactly 0.
double noise_sigma_per_dim(unsigned order_m, double ebn0_db);

/// Adds circular complex Gaussian noise at the given Eb/N0.
SymbolStream awgn(const SymbolStream& s, double ebn0_db, RngSeed rng);

/// Nearest-point decision (ties -> smaller constellation index), Gray label
/// back to bits, modulation padding stripped.
std::vector<std::uint8_t> psk_demodulate(const SymbolStream& s, unsigned order_m);

/// Closed-form BPSK AWGN bit error rate: 0.5 * erfc(sqrt(10^(ebn0_db/10))).
double ber_theory_bpsk(double ebn0_db);

/// Monte-Carlo BER sweep: n_bits fresh random bits per Eb/N0 point, each
/// point on its own substream (rng.stream_id + point index) so results do
/// not depend on scheduling. The serial variant is the reference the
/// parallel kernel is checked against.
std::vector<BerPoint> ber_curve(std::uint64_t n_bits, std::span<const double> ebn0_db_list,
                                unsigned order_m, RngSeed rng);
std::vector<BerPoint> ber_curve_serial(std::uint64_t n_bits,
                                       std::span<const double> ebn0_db_list,
                                       unsigned order_m, RngSeed rng);

}  // namespace phykeylab::channelsim
