#include <algorithm>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "phykeylab/blockcipher.hpp"
#include "phykeylab/io.hpp"
#include "phykeylab/pipeline.hpp"

using namespace phykeylab;
using pipeline::PipelineOptions;
using pipeline::run_pipeline;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("phykeylab_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

PipelineOptions base_options(const fs::path& dir) {
    PipelineOptions opt;
    opt.input_path = dir / "in.pgm";
    opt.cipher_path = dir / "cipher.phk";
    opt.output_path = dir / "out.pgm";
    opt.modulus = 23;
    opt.generator = 5;
    opt.secret_a = 6;
    opt.secret_b = 15;
    return opt;
}

std::vector<std::uint8_t> ramp_pgm(std::size_t w, std::size_t h) {
    io::PgmImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(w * h);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = static_cast<std::uint8_t>(i * 7 % 256);
    return io::write_pgm(img);
}

bool transcript_has(const pipeline::PipelineReport& rep, const std::string& line) {
    return std::find(rep.transcript.begin(), rep.transcript.end(), line) !=
           rep.transcript.end();
}

}  // namespace

TEST_CASE("pipeline happy path on a pgm image") {
    TempDir dir("pipe_happy");
    auto opt = base_options(dir.path);
    opt.report_path = dir.path / "report.json";
    io::write_file_atomic(opt.input_path, ramp_pgm(4, 4));

    auto rep = run_pipeline(opt);
    CHECK(rep.n == 23);
    CHECK(rep.g == 5);
    CHECK(rep.prime_checked);
    CHECK(rep.share_a == 8);   // 5^6 mod 23
    CHECK(rep.share_b == 19);  // 5^15 mod 23
    CHECK(rep.shared_key == 2);
    CHECK(rep.common_key_ok);
    CHECK(rep.encryption_key_ok);
    REQUIRE(rep.k2.has_value());
    CHECK(*rep.k2 == 3);  // 1 + 2 mod 1e6
    CHECK(rep.roundtrip_ok);
    CHECK(rep.input_sha256 == rep.output_sha256);
    CHECK(rep.message_bits == 128);
    REQUIRE(rep.scalability.has_value());
    CHECK(*rep.scalability > 0.0);

    CHECK(transcript_has(rep, "n = 23"));
    CHECK(transcript_has(rep, "k1 = 3"));
    CHECK(transcript_has(rep, "cmk1 = share_b^a mod n = 2"));
    CHECK(transcript_has(rep, "common key gate: correct common key"));
    CHECK(transcript_has(rep, "k2 = 3"));
    CHECK(transcript_has(rep, "c1 = k2 * cmk2 = 6"));
    CHECK(transcript_has(rep, "encryption key gate: Correct encryption key"));
    CHECK(transcript_has(rep, "roundtrip: ok"));

    // output file is byte-identical to the input
    CHECK(io::read_file(opt.output_path) == io::read_file(opt.input_path));

    // the cipher file holds genuine ciphertext for k2 = 3
    auto cipher = io::read_cipher_file(io::read_file(opt.cipher_path));
    auto key = blockcipher::key_matrix(3);
    auto plain_blocks = blockcipher::decrypt_blocks(
        blockcipher::CipherBlockSet{blockcipher::to_block_matrix(cipher).blocks}, key);
    auto plain = blockcipher::from_block_matrix(plain_blocks.blocks, cipher.rows,
                                                cipher.cols, cipher.pad_rows, cipher.pad_cols);
    auto img = io::parse_pgm(io::read_file(opt.input_path));
    auto restored = blockcipher::unpadded_values(plain);
    REQUIRE(restored.size() == img.pixels.size());
    for (std::size_t i = 0; i < restored.size(); ++i)
        CHECK(restored[i] == img.pixels[i]);
    CHECK(cipher.entries !=
          blockcipher::make_message_matrix(
              4, 4, std::vector<std::int64_t>(img.pixels.begin(), img.pixels.end()))
              .entries);

    // report file parses and mirrors the struct
    auto j = nlohmann::json::parse(io::read_file(opt.report_path));
    CHECK(j["n"] == "23");
    CHECK(j["shared_key"] == "2");
    CHECK(j["k2"] == "3");
    CHECK(j["unexplained_paper_value"] == "3");
    CHECK(j["common_key_ok"] == true);
    CHECK(j["encryption_key_ok"] == true);
    CHECK(j["roundtrip_ok"] == true);
    CHECK(j["seed"] == 42);
    CHECK(j["scalability_factor"].is_number());
    CHECK(j["input_sha256"] == j["output_sha256"]);
}

TEST_CASE("pipeline stops at the common-key gate") {
    TempDir dir("pipe_cmk");
    auto opt = base_options(dir.path);
    opt.report_path = dir.path / "report.json";
    opt.cmk_entered = 999;  // true shared key is 2
    io::write_file_atomic(opt.input_path, ramp_pgm(4, 4));

    auto rep = run_pipeline(opt);
    CHECK(!rep.common_key_ok);
    CHECK(!rep.encryption_key_ok);
    CHECK(!rep.k2.has_value());
    CHECK(transcript_has(rep, "cmk2 (entered) = 999"));
    CHECK(transcript_has(rep, "common key gate: wrong common key"));
    CHECK(!transcript_has(rep, "k2 = 3"));

    // no ciphertext or plaintext output on a failed gate, but the report lands
    CHECK(!fs::exists(opt.cipher_path));
    CHECK(!fs::exists(opt.output_path));
    REQUIRE(fs::exists(opt.report_path));
    auto j = nlohmann::json::parse(io::read_file(opt.report_path));
    CHECK(j["common_key_ok"] == false);
    CHECK(j["k2"].is_null());
    CHECK(j["unexplained_paper_value"].is_null());
    CHECK(j["scalability_factor"].is_null());
}

TEST_CASE("pipeline stops at the encryption-key gate") {
    TempDir dir("pipe_k2");
    auto opt = base_options(dir.path);
    opt.k2_entered = 4;  // true k2 is 3
    io::write_file_atomic(opt.input_path, ramp_pgm(4, 4));

    auto rep = run_pipeline(opt);
    CHECK(rep.common_key_ok);
    CHECK(!rep.encryption_key_ok);
    CHECK(transcript_has(rep, "encryption key gate: wrong encryption key"));
    CHECK(!fs::exists(opt.cipher_path));
    CHECK(!fs::exists(opt.output_path));

    // entering a multiple of the true key must still fail: the check is
    // exact division of c1 by the common key, compared against the entry
    opt.k2_entered = 6;
    auto rep2 = run_pipeline(opt);
    CHECK(!rep2.encryption_key_ok);
}

TEST_CASE("pipeline raw mode and run-length accounting") {
    TempDir dir("pipe_raw");
    auto opt = base_options(dir.path);
    opt.raw_input = true;
    opt.input_path = dir.path / "in.bin";
    opt.output_path = dir.path / "out.bin";
    io::write_file_atomic(opt.input_path, std::vector<std::uint8_t>{0xA5});

    auto rep = run_pipeline(opt);
    CHECK(rep.roundtrip_ok);
    CHECK(rep.message_bits == 8);
    CHECK(rep.rle_runs == 7);  // 1 0 1 00 1 0 1
    CHECK(io::read_file(opt.output_path) == std::vector<std::uint8_t>{0xA5});
}

TEST_CASE("pipeline on all-zero input leaves scalability undefined") {
    TempDir dir("pipe_zero");
    auto opt = base_options(dir.path);
    opt.raw_input = true;
    opt.input_path = dir.path / "in.bin";
    opt.output_path = dir.path / "out.bin";
    io::write_file_atomic(opt.input_path, std::vector<std::uint8_t>(4, 0));

    auto rep = run_pipeline(opt);
    CHECK(rep.roundtrip_ok);
    CHECK(!rep.scalability.has_value());
    CHECK(rep.rle_runs == 1);
    CHECK(transcript_has(rep, "scalability factor undefined (all-zero plaintext)"));
    auto j = nlohmann::json::parse(rep.to_json());
    CHECK(j["scalability_factor"].is_null());
    CHECK(j["roundtrip_ok"] == true);
}

TEST_CASE("pipeline draws secrets from the seed deterministically") {
    TempDir dir("pipe_seed");
    auto opt = base_options(dir.path);
    opt.modulus = 1000003;
    opt.generator = 2;
    opt.secret_a.reset();
    opt.secret_b.reset();
    opt.secret_bits = 20;
    opt.raw_input = true;
    opt.input_path = dir.path / "in.bin";
    opt.output_path = dir.path / "out.bin";
    io::write_file_atomic(opt.input_path, std::vector<std::uint8_t>{1, 2, 3, 4});

    opt.seed = 7;
    auto r1 = run_pipeline(opt);
    auto r2 = run_pipeline(opt);
    CHECK(r1.to_json() == r2.to_json());
    CHECK(r1.transcript == r2.transcript);
    CHECK(r1.common_key_ok);
    CHECK(r1.roundtrip_ok);

    opt.seed = 8;
    auto r3 = run_pipeline(opt);
    CHECK(r3.common_key_ok);
    CHECK(r1.share_a != r3.share_a);  // different seed, different secrets
}

TEST_CASE("pipeline input validation") {
    TempDir dir("pipe_bad");
    auto opt = base_options(dir.path);
    opt.input_path.clear();
    CHECK_THROWS_AS(run_pipeline(opt), std::invalid_argument);

    opt = base_options(dir.path);  // input file never written
    CHECK_THROWS_AS(run_pipeline(opt), std::runtime_error);

    io::write_file_atomic(opt.input_path, std::string("not a pgm"));
    CHECK_THROWS_AS(run_pipeline(opt), std::runtime_error);

    opt.modulus = 1;  // parameter validation happens before anything else
    CHECK_THROWS_AS(run_pipeline(opt), std::invalid_argument);
}

TEST_CASE("composite modulus is accepted but flagged") {
    TempDir dir("pipe_comp");
    auto opt = base_options(dir.path);
    opt.modulus = 5392;
    opt.generator = 2;
    opt.secret_a = 12;
    opt.secret_b = 9;
    opt.raw_input = true;
    opt.input_path = dir.path / "in.bin";
    opt.output_path = dir.path / "out.bin";
    io::write_file_atomic(opt.input_path, std::vector<std::uint8_t>{10, 20, 30, 40});

    auto rep = run_pipeline(opt);
    CHECK(!rep.prime_checked);
    CHECK(transcript_has(rep, "n prime: no"));
    CHECK(rep.common_key_ok);
    CHECK(rep.encryption_key_ok);
    CHECK(rep.roundtrip_ok);
}
