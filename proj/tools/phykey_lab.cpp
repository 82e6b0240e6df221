// phykey-lab: command-line front end for the key-exchange cipher, the PSK
// channel simulator and the physical-layer key generation experiments.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"
#include "phykeylab/blockcipher.hpp"
#include "phykeylab/channelsim.hpp"
#include "phykeylab/io.hpp"
#include "phykeylab/keyexchange.hpp"
#include "phykeylab/metrics.hpp"
#include "phykeylab/phykeygen.hpp"
#include "phykeylab/pipeline.hpp"

namespace {

using phykeylab::RngSeed;
namespace bc = phykeylab::blockcipher;
namespace cs = phykeylab::channelsim;
namespace io = phykeylab::io;
namespace kx = phykeylab::keyexchange;
namespace met = phykeylab::metrics;
namespace pk = phykeylab::phykeygen;
namespace pl = phykeylab::pipeline;

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t comma = csv.find(',', pos);
        std::string tok = csv.substr(pos, comma == std::string::npos ? std::string::npos
                                                                     : comma - pos);
        if (tok.empty()) throw std::runtime_error(std::string("empty entry in ") + what);
        if (tok == "inf") {
            out.push_back(std::numeric_limits<double>::infinity());
        } else {
            std::size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size())
                throw std::runtime_error("bad number '" + tok + "' in " + what);
            out.push_back(v);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw std::runtime_error(std::string(what) + " must not be empty");
    return out;
}

kx::BigInt parse_bigint(const std::string& s, const char* what) {
    try {
        return kx::BigInt(s, 10);
    } catch (const std::exception&) {
        throw std::runtime_error("bad integer '" + s + "' for " + what);
    }
}

// Shared state filled by CLI11 option callbacks.
struct Options {
    std::uint64_t seed = 42;
    bool verbose = false;
    int threads = 0;

    std::string modulus, generator, secret_a, secret_b;
    unsigned secret_bits = 32;
    std::string out, in, cipher_out, plain_out, report_path;
    std::string cmk, k2_entered;
    std::int64_t k2 = 0;
    bool raw = false;

    std::uint64_t bits = 1000000;
    std::string ebn0;
    unsigned order = 2;
    bool noiseless = false;
    bool serial = false;

    std::uint64_t probes = 10000;
    std::string snr;
    std::string scheme = "both";
    std::uint64_t trials = 50;
    double q_plus = 0.8;
    double q_minus = -0.8;
    std::uint64_t window = 250;
    unsigned sectors = 4;
    std::uint64_t coherence = 1;

    std::string ber_csv, plain_file, cipher_file;
    double symbol_rate = 1000000.0;
};

int cmd_keyexchange(const Options& o) {
    auto params = kx::make_params(parse_bigint(o.modulus, "--modulus"),
                                  parse_bigint(o.generator, "--generator"));
    phykeylab::RngStream rng({o.seed, 0});
    kx::SecretExponent a{o.secret_a.empty() ? kx::draw_secret(rng, o.secret_bits).value
                                            : parse_bigint(o.secret_a, "--secret-a")};
    kx::SecretExponent b{o.secret_b.empty() ? kx::draw_secret(rng, o.secret_bits).value
                                            : parse_bigint(o.secret_b, "--secret-b")};
    auto share_a = kx::public_share(params, a);
    auto share_b = kx::public_share(params, b);
    auto cmk1 = kx::shared_key(params, share_b, a);
    auto cmk3 = kx::shared_key(params, share_a, b);
    if (!kx::verify_common(cmk1, cmk3.value))
        throw std::runtime_error("exchange failed: sides disagree on the shared key");

    nlohmann::json j;
    j["n"] = params.modulus_n.get_str();
    j["g"] = params.generator_g.get_str();
    j["prime_checked"] = params.prime_checked;
    j["share_a"] = share_a.value.get_str();
    j["share_b"] = share_b.value.get_str();
    j["shared_key"] = cmk1.value.get_str();
    std::string text = j.dump(2) + "\n";
    if (o.out.empty())
        std::cout << text;
    else
        io::write_file_atomic(o.out, text);
    if (o.verbose)
        std::cerr << "shared key " << cmk1.value.get_str() << " ("
                  << (params.prime_checked ? "prime" : "composite") << " modulus)\n";
    return 0;
}

bc::MessageMatrix load_plain_matrix(const Options& o, std::vector<std::uint8_t>& bytes_out) {
    auto bytes = io::read_file(o.in);
    std::size_t rows, cols;
    if (o.raw) {
        if (bytes.empty()) throw std::runtime_error("input file is empty");
        rows = 1;
        cols = bytes.size();
        bytes_out = bytes;
    } else {
        auto img = io::parse_pgm(bytes);
        rows = img.height;
        cols = img.width;
        bytes_out = std::move(img.pixels);
    }
    std::vector<std::int64_t> values(bytes_out.begin(), bytes_out.end());
    return bc::make_message_matrix(rows, cols, values);
}

int cmd_encrypt(const Options& o) {
    std::vector<std::uint8_t> bytes;
    auto plain = load_plain_matrix(o, bytes);
    auto key = bc::key_matrix(o.k2);
    auto cipher_blocks = bc::encrypt_blocks(bc::to_block_matrix(plain), key);
    auto cipher = bc::from_block_matrix(cipher_blocks.blocks, plain.rows, plain.cols,
                                        plain.pad_rows, plain.pad_cols);
    io::write_file_atomic(o.out, io::write_cipher_file(cipher));
    if (o.verbose)
        std::cerr << "encrypted " << cipher_blocks.blocks.size() << " blocks ("
                  << plain.rows << "x" << plain.cols << ")\n";
    return 0;
}

int cmd_decrypt(const Options& o) {
    auto cipher = io::read_cipher_file(io::read_file(o.in));
    auto key = bc::key_matrix(o.k2);
    bc::CipherBlockSet cipher_blocks{bc::to_block_matrix(cipher).blocks};
    auto plain_blocks = bc::decrypt_blocks(cipher_blocks, key);
    auto plain = bc::from_block_matrix(plain_blocks.blocks, cipher.rows, cipher.cols,
                                       cipher.pad_rows, cipher.pad_cols);
    auto values = bc::unpadded_values(plain);
    std::vector<std::uint8_t> bytes;
    bytes.reserve(values.size());
    for (std::int64_t v : values) {
        if (v < 0 || v > 255)
            throw std::runtime_error("decrypted value out of byte range (wrong --k2?)");
        bytes.push_back(static_cast<std::uint8_t>(v));
    }
    if (o.raw) {
        io::write_file_atomic(o.out, std::span<const std::uint8_t>(bytes));
    } else {
        std::size_t width = cipher.cols - static_cast<std::size_t>(cipher.pad_cols);
        std::size_t height = cipher.rows - static_cast<std::size_t>(cipher.pad_rows);
        io::write_file_atomic(o.out, io::write_pgm({width, height, bytes}));
    }
    if (o.verbose)
        std::cerr << "decrypted " << cipher_blocks.blocks.size() << " blocks\n";
    return 0;
}

int cmd_ber(const Options& o) {
    auto points = parse_double_list(o.ebn0, "--ebn0");
    if (o.noiseless)
        std::fill(points.begin(), points.end(), std::numeric_limits<double>::infinity());
    auto curve = o.serial
                     ? cs::ber_curve_serial(o.bits, points, o.order, RngSeed{o.seed, 0})
                     : cs::ber_curve(o.bits, points, o.order, RngSeed{o.seed, 0});
    std::string csv = "ebn0_db,ber,bits,errors\n";
    for (const auto& p : curve)
        csv += fmt_g(p.ebn0_db) + "," + fmt_g(p.ber) + "," + std::to_string(p.bits_simulated) +
               "," + std::to_string(p.errors) + "\n";
    io::write_file_atomic(o.out, csv);
    if (o.verbose)
        for (const auto& p : curve)
            std::cerr << "ebn0 " << fmt_g(p.ebn0_db) << " dB: ber " << fmt_g(p.ber) << " ("
                      << p.errors << "/" << p.bits_simulated << ")\n";
    return 0;
}

int cmd_phykey(const Options& o) {
    auto snrs = parse_double_list(o.snr, "--snr");
    if (o.scheme != "rss" && o.scheme != "phase" && o.scheme != "both")
        throw std::runtime_error("--scheme must be rss, phase or both");
    pk::QuantizerConfig cfg;
    cfg.q_plus = o.q_plus;
    cfg.q_minus = o.q_minus;
    cfg.window = o.window;
    cfg.sectors = o.sectors;
    auto grid = o.serial
                    ? pk::compare_schemes_serial(o.probes, snrs, cfg, cfg, o.trials,
                                                 o.coherence, RngSeed{o.seed, 0})
                    : pk::compare_schemes(o.probes, snrs, cfg, cfg, o.trials, o.coherence,
                                          RngSeed{o.seed, 0});
    std::string csv = "scheme,snr_db,kdp,kgr,monobit_p\n";
    for (const auto& cell : grid) {
        if (o.scheme != "both" && o.scheme != pk::scheme_name(cell.scheme)) continue;
        csv += std::string(pk::scheme_name(cell.scheme)) + "," + fmt_g(cell.snr_db) + "," +
               fmt_g(cell.metrics.kdp) + "," + fmt_g(cell.metrics.kgr) + "," +
               fmt_g(cell.metrics.monobit_p) + "\n";
    }
    io::write_file_atomic(o.out, csv);
    if (o.verbose)
        for (const auto& cell : grid)
            std::cerr << pk::scheme_name(cell.scheme) << " @ " << fmt_g(cell.snr_db)
                      << " dB: kdp " << fmt_g(cell.metrics.kdp) << ", kgr "
                      << fmt_g(cell.metrics.kgr) << "\n";
    return 0;
}

std::vector<cs::BerPoint> parse_ber_csv(const std::string& path) {
    auto bytes = io::read_file(path);
    std::string text(bytes.begin(), bytes.end());
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        if (nl > pos) lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    if (lines.empty() || lines[0] != "ebn0_db,ber,bits,errors")
        throw std::runtime_error(path + ": expected header ebn0_db,ber,bits,errors");
    std::vector<cs::BerPoint> points;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::vector<std::string> cells;
        std::size_t p = 0;
        while (true) {
            std::size_t c = lines[i].find(',', p);
            cells.push_back(lines[i].substr(p, c == std::string::npos ? std::string::npos
                                                                      : c - p));
            if (c == std::string::npos) break;
            p = c + 1;
        }
        if (cells.size() != 4)
            throw std::runtime_error(path + ": row " + std::to_string(i) +
                                     " must have 4 columns");
        cs::BerPoint pt;
        try {
            pt.ebn0_db = cells[0] == "inf" ? std::numeric_limits<double>::infinity()
                                           : std::stod(cells[0]);
            pt.ber = std::stod(cells[1]);
            pt.bits_simulated = std::stoull(cells[2]);
            pt.errors = std::stoull(cells[3]);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ": row " + std::to_string(i) + " is malformed");
        }
        points.push_back(pt);
    }
    if (points.empty()) throw std::runtime_error(path + ": no data rows");
    return points;
}

int cmd_report(const Options& o) {
    auto points = parse_ber_csv(o.ber_csv);
    auto rates = met::bitrate_samples(points, o.symbol_rate, o.order);
    auto cdf = met::empirical_cdf(rates);
    std::string csv = "bitrate,cdf\n";
    for (const auto& [value, prob] : cdf.points)
        csv += fmt_g(value) + "," + fmt_g(prob) + "\n";
    io::write_file_atomic(o.out, csv);

    nlohmann::json j;
    j["rows"] = cdf.points.size();
    if (!o.plain_file.empty() && !o.cipher_file.empty()) {
        std::vector<std::uint8_t> plain_bytes;
        Options po = o;
        po.in = o.plain_file;
        auto plain = load_plain_matrix(po, plain_bytes);
        auto cipher = io::read_cipher_file(io::read_file(o.cipher_file));
        j["scalability_factor"] = met::scalability_factor(plain, cipher).factor;
        j["monobit_p"] = met::monobit_p(bc::binarize(plain_bytes));
    }
    std::cout << j.dump(2) + "\n";
    return 0;
}

int cmd_pipeline(const Options& o) {
    pl::PipelineOptions popt;
    popt.input_path = o.in;
    popt.cipher_path = o.cipher_out;
    popt.output_path = o.plain_out;
    popt.report_path = o.report_path;
    popt.raw_input = o.raw;
    popt.modulus = parse_bigint(o.modulus, "--modulus");
    popt.generator = parse_bigint(o.generator, "--generator");
    if (!o.secret_a.empty()) popt.secret_a = parse_bigint(o.secret_a, "--secret-a");
    if (!o.secret_b.empty()) popt.secret_b = parse_bigint(o.secret_b, "--secret-b");
    popt.secret_bits = o.secret_bits;
    if (!o.cmk.empty()) popt.cmk_entered = parse_bigint(o.cmk, "--cmk");
    if (!o.k2_entered.empty()) popt.k2_entered = parse_bigint(o.k2_entered, "--k2");
    popt.seed = o.seed;

    auto rep = pl::run_pipeline(popt);
    if (o.verbose)
        for (const auto& line : rep.transcript) std::cout << line << "\n";
    if (!rep.common_key_ok) {
        std::cerr << "wrong common key\n";
        return 2;
    }
    if (!rep.encryption_key_ok) {
        std::cerr << "wrong encryption key\n";
        return 3;
    }
    if (!o.verbose) std::cout << "roundtrip " << (rep.roundtrip_ok ? "ok" : "MISMATCH") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"key exchange, matrix block cipher, PSK channel and PHY key-generation lab"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    app.add_option("--seed", o.seed, "base seed for all randomized subcommands")
        ->capture_default_str();
    app.add_flag("--verbose", o.verbose, "narrate intermediate values");
    app.add_option("--threads", o.threads, "worker thread cap (0 = library default)");

    auto* kxc = app.add_subcommand("keyexchange", "run the exchange and print/write JSON");
    kxc->add_option("--modulus", o.modulus, "modulus n (decimal)")->required();
    kxc->add_option("--generator", o.generator, "generator g (decimal)")->required();
    kxc->add_option("--secret-a", o.secret_a, "fixed secret exponent a");
    kxc->add_option("--secret-b", o.secret_b, "fixed secret exponent b");
    kxc->add_option("--secret-bits", o.secret_bits, "width of drawn secrets")
        ->capture_default_str();
    kxc->add_option("--out", o.out, "write JSON here instead of stdout");

    auto* enc = app.add_subcommand("encrypt", "encrypt a PGM image or raw byte file");
    enc->add_option("--in", o.in, "plaintext file")->required();
    enc->add_option("--out", o.out, "ciphertext container")->required();
    enc->add_option("--k2", o.k2, "encryption key (integer >= 1)")->required();
    enc->add_flag("--raw", o.raw, "treat input as raw bytes, not PGM");

    auto* dec = app.add_subcommand("decrypt", "invert an encrypted container");
    dec->add_option("--in", o.in, "ciphertext container")->required();
    dec->add_option("--out", o.out, "decrypted output file")->required();
    dec->add_option("--k2", o.k2, "encryption key (integer >= 1)")->required();
    dec->add_flag("--raw", o.raw, "write raw bytes instead of PGM");

    auto* ber = app.add_subcommand("ber", "Monte-Carlo PSK bit error rates to CSV");
    ber->add_option("--bits", o.bits, "bits per Eb/N0 point")->capture_default_str();
    ber->add_option("--ebn0", o.ebn0, "comma-separated Eb/N0 list in dB")->required();
    ber->add_option("--order", o.order, "constellation order M")->capture_default_str();
    ber->add_flag("--noiseless", o.noiseless, "disable noise on every point");
    ber->add_flag("--serial", o.serial, "use the serial reference kernel");
    ber->add_option("--out", o.out, "output CSV")->required();

    auto* phy = app.add_subcommand("phykey", "channel-probing key generation metrics to CSV");
    phy->add_option("--probes", o.probes, "channel probes per trial")->capture_default_str();
    phy->add_option("--snr", o.snr, "comma-separated SNR list in dB")->required();
    phy->add_option("--scheme", o.scheme, "rss, phase or both")->capture_default_str();
    phy->add_option("--trials", o.trials, "independent trials per SNR")->capture_default_str();
    phy->add_option("--q-plus", o.q_plus, "upper censoring threshold")->capture_default_str();
    phy->add_option("--q-minus", o.q_minus, "lower censoring threshold")->capture_default_str();
    phy->add_option("--window", o.window, "normalization window length")->capture_default_str();
    phy->add_option("--sectors", o.sectors, "phase sectors (power of two)")
        ->capture_default_str();
    phy->add_option("--coherence", o.coherence, "probes per coherence block")
        ->capture_default_str();
    phy->add_flag("--serial", o.serial, "use the serial reference kernel");
    phy->add_option("--out", o.out, "output CSV")->required();

    auto* rep = app.add_subcommand("report", "bitrate CDF from a BER CSV, plus file metrics");
    rep->add_option("--ber-csv", o.ber_csv, "input CSV from the ber subcommand")->required();
    rep->add_option("--symbol-rate", o.symbol_rate, "symbols per second")
        ->capture_default_str();
    rep->add_option("--order", o.order, "constellation order M")->capture_default_str();
    rep->add_option("--out", o.out, "output CSV")->required();
    rep->add_option("--plain", o.plain_file, "plaintext file for scalability/monobit");
    rep->add_option("--cipher", o.cipher_file, "ciphertext container for scalability");
    rep->add_flag("--raw", o.raw, "treat --plain as raw bytes, not PGM");

    auto* pip = app.add_subcommand("pipeline", "exchange keys, gate, encrypt, decrypt, report");
    pip->add_option("--in", o.in, "plaintext file")->required();
    pip->add_option("--cipher-out", o.cipher_out, "ciphertext container")->required();
    pip->add_option("--plain-out", o.plain_out, "decrypted output file")->required();
    pip->add_option("--report", o.report_path, "write the run report JSON here");
    pip->add_option("--modulus", o.modulus, "modulus n (decimal)")->required();
    pip->add_option("--generator", o.generator, "generator g (decimal)")->required();
    pip->add_option("--secret-a", o.secret_a, "fixed secret exponent a");
    pip->add_option("--secret-b", o.secret_b, "fixed secret exponent b");
    pip->add_option("--secret-bits", o.secret_bits, "width of drawn secrets")
        ->capture_default_str();
    pip->add_option("--cmk", o.cmk, "common key as typed in (gate check)");
    pip->add_option("--k2", o.k2_entered, "encryption key as typed in (gate check)");
    pip->add_flag("--raw", o.raw, "treat input as raw bytes, not PGM");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

#ifdef _OPENMP
    if (o.threads > 0) omp_set_num_threads(o.threads);
#endif

    try {
        if (kxc->parsed()) return cmd_keyexchange(o);
        if (enc->parsed()) return cmd_encrypt(o);
        if (dec->parsed()) return cmd_decrypt(o);
        if (ber->parsed()) return cmd_ber(o);
        if (phy->parsed()) return cmd_phykey(o);
        if (rep->parsed()) return cmd_report(o);
        if (pip->parsed()) return cmd_pipeline(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
