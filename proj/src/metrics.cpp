#include "phykeylab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phykeylab::metrics {

namespace {

double frobenius(const blockcipher::MessageMatrix& m) {
    double acc = 0;
    for (std::int64_t v : m.entries) {
        double d = static_cast<double>(v);
        acc += d * d;
    }
    return std::sqrt(acc);
}

unsigned log2u(unsigned v) {
    unsigned k = 0;
    while (v > 1) {
        v >>= 1;
        ++k;
    }
    return k;
}

}  // namespace

ScalabilityReport scalability_factor(const blockcipher::MessageMatrix& plain,
                                     const blockcipher::MessageMatrix& cipher) {
    if (plain.rows != cipher.rows || plain.cols != cipher.cols)
        throw std::invalid_argument("plain and cipher matrices must agree in extent");
    ScalabilityReport r;
    r.input_frobenius = frobenius(plain);
    r.output_frobenius = frobenius(cipher);
    r.block_count = static_cast<std::uint64_t>(plain.rows / 2) * (plain.cols / 2);
    if (r.input_frobenius == 0.0)
        throw std::domain_error("scalability undefined for all-zero plaintext");
    r.factor = r.output_frobenius / r.input_frobenius * static_cast<double>(r.block_count);
    return r;
}

std::vector<double> bitrate_samples(std::span<const channelsim::BerPoint> points,
                                    double symbol_rate, unsigned order_m) {
    if (!(symbol_rate > 0)) throw std::invalid_argument("symbol rate must be positive");
    if (order_m < 2 || (order_m & (order_m - 1)) != 0)
        throw std::invalid_argument("constellation order must be a power of two >= 2");
    const double bps = log2u(order_m);
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(symbol_rate * bps * (1.0 - p.ber));
    return out;
}

CdfSeries empirical_cdf(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("cdf needs at least one sample");
    for (double v : samples)
        if (std::isnan(v)) throw std::invalid_argument("cdf samples must not be NaN");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    CdfSeries cdf;
    const double n = static_cast<double>(sorted.size());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        cdf.points.emplace_back(sorted[i], static_cast<double>(j) / n);
        i = j;
    }
    cdf.points.back().second = 1.0;  // guard against j/n rounding on the last step
    return cdf;
}

double monobit_p(std::span<const std::uint8_t> bits) {
    if (bits.empty()) throw std::invalid_argument("monobit test needs at least one bit");
    std::int64_t sum = 0;
    for (std::uint8_t b : bits) {
        if (b > 1) throw std::invalid_argument("bitstream values must be 0 or 1");
        sum += b ? 1 : -1;
    }
    double s_obs = std::abs(static_cast<double>(sum)) /
                   std::sqrt(static_cast<double>(bits.size()));
    return std::erfc(s_obs / std::sqrt(2.0));
}

}  // namespace phykeylab::metrics
