#include "phykeylab/phykeygen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "phykeylab/gray.hpp"
#include "phykeylab/metrics.hpp"

namespace phykeylab::phykeygen {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

bool is_pow2(unsigned v) { return v >= 2 && (v & (v - 1)) == 0; }

unsigned log2u(unsigned v) {
    unsigned k = 0;
    while (v > 1) {
        v >>= 1;
        ++k;
    }
    return k;
}

void require_quantizer(const QuantizerConfig& cfg) {
    if (!(cfg.q_plus > cfg.q_minus))
        throw std::invalid_argument("q_plus must exceed q_minus");
    if (cfg.window == 0) throw std::invalid_argument("window must be >= 1");
    if (!is_pow2(cfg.sectors))
        throw std::invalid_argument("sector count must be a power of two >= 2");
}

// Average per-trial metrics for one (scheme, snr, trial) already-quantized
// pair of streams.
KgMetrics score_pair(const KeyBitstream& a, const KeyBitstream& b, std::size_t n_probes) {
    auto [ra, rb] = reconcile_indices(a, b);
    KgMetrics m;
    KdpResult kdp = key_disagreement_probability(ra, rb);
    m.kdp = kdp.empty ? 0.0 : kdp.value;
    m.kgr = key_generation_rate(ra, n_probes);
    m.monobit_p = ra.bits.empty() ? 1.0 : metrics::monobit_p(ra.bits);
    return m;
}

struct TrialMetrics {
    KgMetrics rss;
    KgMetrics phase;
};

TrialMetrics run_trial(std::size_t n_probes, double snr_db, const QuantizerConfig& cfg_rss,
                       const QuantizerConfig& cfg_phase, std::size_t coherence_block,
                       RngSeed seed) {
    ChannelProbeSet probes = simulate_probes(n_probes, snr_db, coherence_block, seed);
    TrialMetrics t;
    t.rss = score_pair(rss_quantize(probes.alice, cfg_rss), rss_quantize(probes.bob, cfg_rss),
                       n_probes);
    t.phase = score_pair(phase_quantize(probes.alice, cfg_phase, coherence_block),
                         phase_quantize(probes.bob, cfg_phase, coherence_block), n_probes);
    return t;
}

void require_compare_args(std::size_t n_probes, std::span<const double> snr_db_list,
                          const QuantizerConfig& cfg_rss, const QuantizerConfig& cfg_phase,
                          std::size_t trials) {
    require_quantizer(cfg_rss);
    require_quantizer(cfg_phase);
    if (trials == 0) throw std::invalid_argument("trial count must be >= 1");
    if (n_probes == 0) throw std::invalid_argument("probe count must be >= 1");
    if (cfg_rss.window > n_probes) throw std::invalid_argument("window exceeds probe count");
    for (double s : snr_db_list)
        if (std::isnan(s)) throw std::invalid_argument("snr must not be NaN");
}

std::vector<SchemeSnrCell> assemble_grid(std::span<const double> snr_db_list,
                                         const std::vector<TrialMetrics>& grid,
                                         std::size_t trials) {
    std::vector<SchemeSnrCell> out;
    out.reserve(snr_db_list.size() * 2);
    for (std::size_t i = 0; i < snr_db_list.size(); ++i) {
        KgMetrics rss{0, 0, 0}, phase{0, 0, 0};
        for (std::size_t t = 0; t < trials; ++t) {
            const TrialMetrics& tm = grid[i * trials + t];
            rss.kdp += tm.rss.kdp;
            rss.kgr += tm.rss.kgr;
            rss.monobit_p += tm.rss.monobit_p;
            phase.kdp += tm.phase.kdp;
            phase.kgr += tm.phase.kgr;
            phase.monobit_p += tm.phase.monobit_p;
        }
        const double inv = 1.0 / static_cast<double>(trials);
        rss.kdp *= inv;
        rss.kgr *= inv;
        rss.monobit_p *= inv;
        phase.kdp *= inv;
        phase.kgr *= inv;
        phase.monobit_p *= inv;
        out.push_back({Scheme::rss, snr_db_list[i], rss});
        out.push_back({Scheme::phase, snr_db_list[i], phase});
    }
    return out;
}

}  // namespace

const char* scheme_name(Scheme s) { return s == Scheme::rss ? "rss" : "phase"; }

ChannelProbeSet simulate_probes(std::size_t n_probes, double snr_db,
                                std::size_t coherence_block, RngSeed rng) {
    if (n_probes == 0) throw std::invalid_argument("probe count must be >= 1");
    if (coherence_block == 0) throw std::invalid_argument("coherence block must be >= 1");
    if (std::isnan(snr_db)) throw std::invalid_argument("snr must not be NaN");

    ChannelProbeSet set;
    set.snr_db = snr_db;
    set.coherence_block = coherence_block;
    set.alice.reserve(n_probes);
    set.bob.reserve(n_probes);
    set.eve.reserve(n_probes);

    // Unit-power fade: each complex dimension has variance 1/2. Receiver
    // noise power 10^(-snr/10) split the same way.
    const double fade_scale = std::sqrt(0.5);
    const double noise_scale = std::sqrt(0.5 * std::pow(10.0, -snr_db / 10.0));

    RngStream stream(rng);
    std::complex<double> h = 0, g = 0;
    for (std::size_t i = 0; i < n_probes; ++i) {
        if (i % coherence_block == 0) {
            h = stream.complex_normal() * fade_scale;
            g = stream.complex_normal() * fade_scale;
        }
        set.alice.push_back(h + stream.complex_normal() * noise_scale);
        set.bob.push_back(h + stream.complex_normal() * noise_scale);
        set.eve.push_back(g + stream.complex_normal() * noise_scale);
    }
    return set;
}

KeyBitstream quantize_values(std::span<const double> values, const QuantizerConfig& cfg) {
    require_quantizer(cfg);
    if (cfg.window > values.size())
        throw std::invalid_argument("window exceeds value count");

    KeyBitstream out;
    out.scheme = Scheme::rss;
    out.bits_per_probe = 1;
    for (std::size_t start = 0; start < values.size(); start += cfg.window) {
        std::size_t end = std::min(values.size(), start + cfg.window);
        std::size_t n = end - start;
        double mean = 0;
        for (std::size_t i = start; i < end; ++i) mean += values[i];
        mean /= static_cast<double>(n);
        double var = 0;
        for (std::size_t i = start; i < end; ++i) {
            double d = values[i] - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);  // population variance
        double sd = std::sqrt(var);
        for (std::size_t i = start; i < end; ++i) {
            if (sd == 0.0) continue;  // flat window carries no information
            double z = (values[i] - mean) / sd;
            if (z > cfg.q_plus) {
                out.bits.push_back(1);
                out.kept_indices.push_back(i);
            } else if (z < cfg.q_minus) {
                out.bits.push_back(0);
                out.kept_indices.push_back(i);
            }
        }
    }
    return out;
}

KeyBitstream rss_quantize(std::span<const std::complex<double>> obs,
                          const QuantizerConfig& cfg) {
    std::vector<double> rss;
    rss.reserve(obs.size());
    for (const auto& v : obs) rss.push_back(std::norm(v));
    return quantize_values(rss, cfg);
}

KeyBitstream phase_quantize(std::span<const std::complex<double>> obs,
                            const QuantizerConfig& cfg, std::size_t coherence_block) {
    require_quantizer(cfg);
    if (coherence_block == 0) throw std::invalid_argument("coherence block must be >= 1");

    const unsigned bits_per = log2u(cfg.sectors);
    KeyBitstream out;
    out.scheme = Scheme::phase;
    out.bits_per_probe = bits_per;
    for (std::size_t i = 0; i < obs.size(); i += coherence_block) {
        const auto& v = obs[i];
        if (v == std::complex<double>(0.0, 0.0)) continue;  // phase undefined
        double theta = std::arg(v);  // (-pi, pi]
        if (theta < 0) theta += kTwoPi;
        auto sector = static_cast<unsigned>(theta / kTwoPi * cfg.sectors);
        if (sector >= cfg.sectors) sector = cfg.sectors - 1;  // theta == 2*pi edge
        std::uint32_t label = gray_encode(sector);
        for (unsigned j = 0; j < bits_per; ++j)
            out.bits.push_back(static_cast<std::uint8_t>(label >> (bits_per - 1 - j) & 1u));
        out.kept_indices.push_back(i);
    }
    return out;
}

std::pair<KeyBitstream, KeyBitstream> reconcile_indices(const KeyBitstream& a,
                                                        const KeyBitstream& b) {
    if (a.scheme != b.scheme || a.bits_per_probe != b.bits_per_probe)
        throw std::invalid_argument("cannot reconcile streams of different schemes");
    const unsigned bp = a.bits_per_probe;

    KeyBitstream ra, rb;
    ra.scheme = rb.scheme = a.scheme;
    ra.bits_per_probe = rb.bits_per_probe = bp;
    std::size_t i = 0, j = 0;
    while (i < a.kept_indices.size() && j < b.kept_indices.size()) {
        if (a.kept_indices[i] < b.kept_indices[j]) {
            ++i;
        } else if (a.kept_indices[i] > b.kept_indices[j]) {
            ++j;
        } else {
            ra.kept_indices.push_back(a.kept_indices[i]);
            rb.kept_indices.push_back(b.kept_indices[j]);
            for (unsigned k = 0; k < bp; ++k) {
                ra.bits.push_back(a.bits[i * bp + k]);
                rb.bits.push_back(b.bits[j * bp + k]);
            }
            ++i;
            ++j;
        }
    }
    return {std::move(ra), std::move(rb)};
}

KdpResult key_disagreement_probability(const KeyBitstream& a, const KeyBitstream& b) {
    if (a.bits.size() != b.bits.size())
        throw std::invalid_argument("streams must be reconciled to equal length");
    if (a.bits.empty()) return {0.0, true};
    std::size_t diff = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) diff += a.bits[i] != b.bits[i];
    return {static_cast<double>(diff) / static_cast<double>(a.bits.size()), false};
}

double key_generation_rate(const KeyBitstream& k, std::size_t n_probes) {
    if (n_probes == 0) throw std::invalid_argument("probe count must be >= 1");
    return static_cast<double>(k.bits.size()) / static_cast<double>(n_probes);
}

std::vector<SchemeSnrCell> compare_schemes(std::size_t n_probes,
                                           std::span<const double> snr_db_list,
                                           const QuantizerConfig& cfg_rss,
                                           const QuantizerConfig& cfg_phase,
                                           std::size_t trials,
                                           std::size_t coherence_block, RngSeed rng) {
    require_compare_args(n_probes, snr_db_list, cfg_rss, cfg_phase, trials);
    std::vector<TrialMetrics> grid(snr_db_list.size() * trials);
    const auto total = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t z = 0; z < total; ++z) {
        const std::size_t i = static_cast<std::size_t>(z) / trials;
        grid[z] = run_trial(n_probes, snr_db_list[i], cfg_rss, cfg_phase, coherence_block,
                            {rng.seed, rng.stream_id + static_cast<std::uint64_t>(z)});
    }
    return assemble_grid(snr_db_list, grid, trials);
}

std::vector<SchemeSnrCell> compare_schemes_serial(std::size_t n_probes,
                                                  std::span<const double> snr_db_list,
                                                  const QuantizerConfig& cfg_rss,
                                                  const QuantizerConfig& cfg_phase,
                                                  std::size_t trials,
                                                  std::size_t coherence_block, RngSeed rng) {
    require_compare_args(n_probes, snr_db_list, cfg_rss, cfg_phase, trials);
    std::vector<TrialMetrics> grid(snr_db_list.size() * trials);
    for (std::size_t z = 0; z < grid.size(); ++z) {
        const std::size_t i = z / trials;
        grid[z] = run_trial(n_probes, snr_db_list[i], cfg_rss, cfg_phase, coherence_block,
                            {rng.seed, rng.stream_id + z});
    }
    return assemble_grid(snr_db_list, grid, trials);
}

}  // namespace phykeylab::phykeygen
