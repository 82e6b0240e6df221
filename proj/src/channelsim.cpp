#include "phykeylab/channelsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "phykeylab/gray.hpp"

namespace phykeylab::channelsim {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

bool is_pow2(unsigned v) { return v >= 2 && (v & (v - 1)) == 0; }

unsigned log2u(unsigned v) {
    unsigned k = 0;
    while (v > 1) {
        v >>= 1;
        ++k;
    }
    return k;
}

void require_order(unsigned order_m) {
    if (!is_pow2(order_m))
        throw std::invalid_argument("constellation order must be a power of two >= 2");
}

// One BER point, self-contained on its own stream. Chunked so memory stays
// flat no matter how many bits are requested.
BerPoint simulate_point(std::uint64_t n_bits, double ebn0_db, unsigned order_m,
                        RngSeed seed) {
    const unsigned bps = log2u(order_m);
    const double sigma = noise_sigma_per_dim(order_m, ebn0_db);
    const auto constellation = psk_constellation(order_m);
    RngStream rng(seed);

    BerPoint pt;
    pt.ebn0_db = ebn0_db;
    pt.bits_simulated = n_bits;

    const std::size_t chunk_bits = std::size_t(1) << 16;
    std::vector<std::uint8_t> bits;
    std::uint64_t done = 0;
    while (done < n_bits) {
        std::size_t take = static_cast<std::size_t>(
            std::min<std::uint64_t>(n_bits - done, chunk_bits - chunk_bits % bps));
        bits.resize(take);
        for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_bit());
        SymbolStream tx = psk_modulate(bits, order_m);
        if (sigma > 0)
            for (auto& s : tx.symbols) s += rng.complex_normal() * sigma;
        auto rx = psk_demodulate(tx, order_m);
        for (std::size_t i = 0; i < take; ++i) pt.errors += (rx[i] != bits[i]);
        done += take;
    }
    pt.ber = n_bits ? static_cast<double>(pt.errors) / static_cast<double>(n_bits) : 0.0;
    return pt;
}

}  // namespace

std::vector<std::complex<double>> psk_constellation(unsigned order_m) {
    require_order(order_m);
    std::vector<std::complex<double>> pts(order_m);
    const double offset = order_m > 2 ? kPi / order_m : 0.0;
    for (unsigned k = 0; k < order_m; ++k) {
        double theta = 2.0 * kPi * k / order_m + offset;
        pts[k] = {std::cos(theta), std::sin(theta)};
    }
    return pts;
}

SymbolStream psk_modulate(std::span<const std::uint8_t> bits, unsigned order_m) {
    require_order(order_m);
    const unsigned bps = log2u(order_m);
    const auto constellation = psk_constellation(order_m);

    SymbolStream s;
    s.order_m = order_m;
    s.pad_bits = bits.size() % bps ? bps - bits.size() % bps : 0;
    s.symbols.reserve((bits.size() + s.pad_bits) / bps);
    for (std::size_t i = 0; i < bits.size(); i += bps) {
        std::uint32_t label = 0;
        for (unsigned j = 0; j < bps; ++j) {
            std::uint8_t bit = i + j < bits.size() ? bits[i + j] : 0;
            if (bit > 1) throw std::invalid_argument("bitstream values must be 0 or 1");
            label = label << 1 | bit;
        }
        s.symbols.push_back(constellation[gray_decode(label)]);
    }
    return s;
}

double noise_sigma_per_dim(unsigned order_m, double ebn0_db) {
    require_order(order_m);
    if (std::isnan(ebn0_db) || ebn0_db == -std::numeric_limits<double>::infinity())
        throw std::invalid_argument("Eb/N0 must be finite or +infinity");
    if (ebn0_db == std::numeric_limits<double>::infinity()) return 0.0;
    double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    return std::sqrt(1.0 / (2.0 * log2u(order_m) * ebn0));
}

SymbolStream awgn(const SymbolStream& s, double ebn0_db, RngSeed seed) {
    const double sigma = noise_sigma_per_dim(s.order_m, ebn0_db);
    SymbolStream out = s;
    if (sigma == 0.0) return out;
    RngStream rng(seed);
    for (auto& sym : out.symbols) sym += rng.complex_normal() * sigma;
    return out;
}

std::vector<std::uint8_t> psk_demodulate(const SymbolStream& s, unsigned order_m) {
    require_order(order_m);
    if (s.order_m != order_m)
        throw std::invalid_argument("stream order disagrees with requested order");
    const unsigned bps = log2u(order_m);
    if (s.pad_bits >= bps) throw std::invalid_argument("pad_bits out of range");
    const auto constellation = psk_constellation(order_m);

    std::vector<std::uint8_t> bits;
    bits.reserve(s.symbols.size() * bps);
    for (const auto& sym : s.symbols) {
        unsigned best = 0;
        double best_d = std::norm(sym - constellation[0]);
        for (unsigned k = 1; k < order_m; ++k) {
            double d = std::norm(sym - constellation[k]);
            if (d < best_d) {  // strict: ties keep the smaller index
                best_d = d;
                best = k;
            }
        }
        std::uint32_t label = gray_encode(best);
        for (unsigned j = 0; j < bps; ++j)
            bits.push_back(static_cast<std::uint8_t>(label >> (bps - 1 - j) & 1u));
    }
    bits.resize(bits.size() - s.pad_bits);
    return bits;
}

double ber_theory_bpsk(double ebn0_db) {
    if (std::isnan(ebn0_db)) throw std::invalid_argument("Eb/N0 must not be NaN");
    if (ebn0_db == std::numeric_limits<double>::infinity()) return 0.0;
    double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    return 0.5 * std::erfc(std::sqrt(ebn0));
}

std::vector<BerPoint> ber_curve(std::uint64_t n_bits, std::span<const double> ebn0_db_list,
                                unsigned order_m, RngSeed rng) {
    require_order(order_m);
    if (n_bits == 0) throw std::invalid_argument("bit count must be >= 1");
    for (double e : ebn0_db_list) noise_sigma_per_dim(order_m, e);  // validate up front
    std::vector<BerPoint> out(ebn0_db_list.size());
    const auto n = static_cast<std::ptrdiff_t>(ebn0_db_list.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[i] = simulate_point(n_bits, ebn0_db_list[i], order_m,
                                {rng.seed, rng.stream_id + static_cast<std::uint64_t>(i)});
    return out;
}

std::vector<BerPoint> ber_curve_serial(std::uint64_t n_bits,
                                       std::span<const double> ebn0_db_list,
                                       unsigned order_m, RngSeed rng) {
    require_order(order_m);
    if (n_bits == 0) throw std::invalid_argument("bit count must be >= 1");
    for (double e : ebn0_db_list) noise_sigma_per_dim(order_m, e);
    std::vector<BerPoint> out(ebn0_db_list.size());
    for (std::size_t i = 0; i < ebn0_db_list.size(); ++i)
        out[i] = simulate_point(n_bits, ebn0_db_list[i], order_m,
                                {rng.seed, rng.stream_id + i});
    return out;
}

}  // namespace phykeylab::channelsim
