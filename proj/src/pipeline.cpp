#include "phykeylab/pipeline.hpp"

#include <stdexcept>

#include "json.hpp"

#include "phykeylab/blockcipher.hpp"
#include "phykeylab/io.hpp"
#include "phykeylab/metrics.hpp"
#include "phykeylab/rng.hpp"

namespace phykeylab::pipeline {

namespace {

using keyexchange::BigInt;

std::string dec(const BigInt& v) { return v.get_str(10); }

// Session key for the cipher, derived from the shared key: small enough
// that pixel-range plaintexts stay far from the 64-bit limit.
BigInt derive_k2(const BigInt& cmk) { return 1 + cmk % 1000000; }

void maybe_write_report(const PipelineOptions& opt, const PipelineReport& rep) {
    if (!opt.report_path.empty()) io::write_file_atomic(opt.report_path, rep.to_json());
}

}  // namespace

std::string PipelineReport::to_json() const {
    nlohmann::json j;  // keys serialize sorted, so output is reproducible
    j["n"] = dec(n);
    j["g"] = dec(g);
    j["prime_checked"] = prime_checked;
    j["share_a"] = dec(share_a);
    j["share_b"] = dec(share_b);
    j["shared_key"] = dec(shared_key);
    j["common_key_ok"] = common_key_ok;
    j["encryption_key_ok"] = encryption_key_ok;
    j["k2"] = k2 ? nlohmann::json(dec(*k2)) : nlohmann::json(nullptr);
    j["unexplained_paper_value"] = k2 ? nlohmann::json(dec(*k2)) : nlohmann::json(nullptr);
    j["scalability_factor"] =
        scalability ? nlohmann::json(*scalability) : nlohmann::json(nullptr);
    j["message_bits"] = message_bits;
    j["rle_runs"] = rle_runs;
    j["input_sha256"] = input_sha256;
    j["output_sha256"] = output_sha256;
    j["roundtrip_ok"] = roundtrip_ok;
    j["seed"] = seed;
    return j.dump(2) + "\n";
}

PipelineReport run_pipeline(const PipelineOptions& opt) {
    if (opt.input_path.empty() || opt.cipher_path.empty() || opt.output_path.empty())
        throw std::invalid_argument("input, cipher and output paths are all required");

    PipelineReport rep;
    rep.seed = opt.seed;
    auto say = [&rep](std::string line) { rep.transcript.push_back(std::move(line)); };

    // --- key exchange ---
    auto params = keyexchange::make_params(opt.modulus, opt.generator);
    rep.n = params.modulus_n;
    rep.g = params.generator_g;
    rep.prime_checked = params.prime_checked;
    say("n = " + dec(rep.n));
    say("g = " + dec(rep.g));
    say(std::string("n prime: ") + (rep.prime_checked ? "yes" : "no"));

    RngStream rng({opt.seed, 0});
    keyexchange::SecretExponent a{opt.secret_a ? *opt.secret_a
                                               : keyexchange::draw_secret(rng, opt.secret_bits).value};
    keyexchange::SecretExponent b{opt.secret_b ? *opt.secret_b
                                               : keyexchange::draw_secret(rng, opt.secret_bits).value};
    say("a (secret) = " + dec(a.value));
    say("b (secret) = " + dec(b.value));

    auto share_a = keyexchange::public_share(params, a);
    auto share_b = keyexchange::public_share(params, b);
    rep.share_a = share_a.value;
    rep.share_b = share_b.value;
    say("share_a = g^a mod n = " + dec(rep.share_a));
    say("share_b = g^b mod n = " + dec(rep.share_b));

    auto cmk1 = keyexchange::shared_key(params, share_b, a);
    auto cmk3 = keyexchange::shared_key(params, share_a, b);
    rep.shared_key = cmk1.value;
    // k1 is printed here, between the secrets and the cmk entry, to keep the
    // transcript line order of the original console tool.
    BigInt k2_true = derive_k2(cmk1.value);
    say("k1 = " + dec(k2_true));
    say("cmk1 = share_b^a mod n = " + dec(cmk1.value));
    say("cmk2 (entered) = " + dec(opt.cmk_entered ? *opt.cmk_entered : cmk3.value));
    say("cmk3 = share_a^b mod n = " + dec(cmk3.value));

    // --- common-key gate ---
    BigInt cmk_entered = opt.cmk_entered ? *opt.cmk_entered : cmk3.value;
    rep.common_key_ok = keyexchange::verify_common(cmk1, cmk_entered);
    say(std::string("common key gate: ") +
        (rep.common_key_ok ? "correct common key" : "wrong common key"));
    if (!rep.common_key_ok) {
        maybe_write_report(opt, rep);
        return rep;
    }

    // --- encryption-key gate ---
    rep.k2 = k2_true;
    say("k2 = " + dec(k2_true));
    auto token = keyexchange::issue_token(k2_true, cmk1);
    say("c1 = k2 * cmk2 = " + dec(token.c1));
    BigInt k2_entered = opt.k2_entered ? *opt.k2_entered : k2_true;
    rep.encryption_key_ok = keyexchange::verify_encryption_key(k2_entered, token, cmk1);
    say(std::string("encryption key gate: ") +
        (rep.encryption_key_ok ? "Correct encryption key" : "wrong encryption key"));
    if (!rep.encryption_key_ok) {
        maybe_write_report(opt, rep);
        return rep;
    }

    // --- load plaintext ---
    auto input_bytes = io::read_file(opt.input_path);
    rep.input_sha256 = io::sha256_hex(input_bytes);

    std::size_t rows, cols;
    std::vector<std::uint8_t> plain_bytes;
    if (opt.raw_input) {
        if (input_bytes.empty()) throw std::runtime_error("input file is empty");
        rows = 1;
        cols = input_bytes.size();
        plain_bytes = input_bytes;
    } else {
        auto img = io::parse_pgm(input_bytes);
        rows = img.height;
        cols = img.width;
        plain_bytes = std::move(img.pixels);
    }

    auto bits = blockcipher::binarize(plain_bytes);
    rep.message_bits = bits.size();
    rep.rle_runs = blockcipher::compress(bits).runs.size();

    std::vector<std::int64_t> values(plain_bytes.begin(), plain_bytes.end());
    auto plain = blockcipher::make_message_matrix(rows, cols, values);
    say("matrix: " + std::to_string(plain.rows) + " x " + std::to_string(plain.cols) +
        " (pad " + std::to_string(plain.pad_rows) + ", " + std::to_string(plain.pad_cols) +
        ")");

    // --- encrypt / decrypt ---
    auto key = blockcipher::key_matrix(mpz_get_si(k2_true.get_mpz_t()));
    auto plain_blocks = blockcipher::to_block_matrix(plain);
    say("blocks: " + std::to_string(plain_blocks.blocks.size()));
    auto cipher_blocks = blockcipher::encrypt_blocks(plain_blocks, key);
    auto cipher = blockcipher::from_block_matrix(cipher_blocks.blocks, plain.rows, plain.cols,
                                                 plain.pad_rows, plain.pad_cols);
    io::write_file_atomic(opt.cipher_path, io::write_cipher_file(cipher));

    auto decrypted_blocks = blockcipher::decrypt_blocks(cipher_blocks, key);
    auto decrypted = blockcipher::from_block_matrix(decrypted_blocks.blocks, plain.rows,
                                                    plain.cols, plain.pad_rows, plain.pad_cols);
    if (decrypted.entries != plain.entries)
        throw std::runtime_error("decryption failed to invert encryption");

    auto restored = blockcipher::unpadded_values(decrypted);
    std::vector<std::uint8_t> out_bytes;
    out_bytes.reserve(restored.size());
    for (std::int64_t v : restored) {
        if (v < 0 || v > 255)
            throw std::runtime_error("decrypted value out of byte range");
        out_bytes.push_back(static_cast<std::uint8_t>(v));
    }
    std::vector<std::uint8_t> output_file_bytes =
        opt.raw_input ? out_bytes
                      : io::write_pgm({cols, rows, out_bytes});
    io::write_file_atomic(opt.output_path, output_file_bytes);
    rep.output_sha256 = io::sha256_hex(output_file_bytes);
    rep.roundtrip_ok = output_file_bytes == input_bytes;

    // --- metrics ---
    try {
        rep.scalability = metrics::scalability_factor(plain, cipher).factor;
        say("scalability factor = " + std::to_string(*rep.scalability));
    } catch (const std::domain_error&) {
        say("scalability factor undefined (all-zero plaintext)");
    }
    say("message_bits = " + std::to_string(rep.message_bits) +
        ", rle_runs = " + std::to_string(rep.rle_runs));
    say("input sha256  = " + rep.input_sha256);
    say("output sha256 = " + rep.output_sha256);
    say(std::string("roundtrip: ") + (rep.roundtrip_ok ? "ok" : "MISMATCH"));

    maybe_write_report(opt, rep);
    return rep;
}

}  // namespace phykeylab::pipeline
