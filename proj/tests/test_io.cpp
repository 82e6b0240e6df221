#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "doctest.h"
#include "phykeylab/blockcipher.hpp"
#include "phykeylab/io.hpp"
#include "phykeylab/rng.hpp"

using namespace phykeylab::io;
using phykeylab::blockcipher::MessageMatrix;
using phykeylab::blockcipher::make_message_matrix;
using phykeylab::RngStream;

namespace {

std::vector<std::uint8_t> bytes_of(std::string_view s) {
    return {s.begin(), s.end()};
}

std::string error_of(std::span<const std::uint8_t> bad) {
    try {
        parse_pgm(bad);
    } catch (const std::runtime_error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("pgm: parse a plain header") {
    auto data = bytes_of("P5\n2 3\n255\n");
    for (int i = 0; i < 6; ++i) data.push_back(static_cast<std::uint8_t>(10 * i));
    auto img = parse_pgm(data);
    CHECK(img.width == 2);
    CHECK(img.height == 3);
    REQUIRE(img.pixels.size() == 6);
    CHECK(img.pixels[0] == 0);
    CHECK(img.pixels[5] == 50);
}

TEST_CASE("pgm: comments and loose whitespace in the header") {
    auto data = bytes_of("P5 # comment right after magic\n# full line\n 2\t2 # mid\n255 ");
    for (int i = 0; i < 4; ++i) data.push_back(200);
    auto img = parse_pgm(data);
    CHECK(img.width == 2);
    CHECK(img.height == 2);
    CHECK(img.pixels == std::vector<std::uint8_t>(4, 200));
}

TEST_CASE("pgm: payload bytes that look like whitespace survive") {
    PgmImage img;
    img.width = 2;
    img.height = 2;
    img.pixels = {'\n', ' ', '#', '\t'};
    auto data = write_pgm(img);
    auto back = parse_pgm(data);
    CHECK(back.pixels == img.pixels);
}

TEST_CASE("pgm: writer emits the canonical header") {
    PgmImage img;
    img.width = 3;
    img.height = 1;
    img.pixels = {1, 2, 3};
    auto data = write_pgm(img);
    std::string head(data.begin(), data.begin() + 9);
    CHECK(head == "P5\n3 1\n25");  // "P5\n3 1\n255\n" then payload
    CHECK(data.size() == 11 + 3);
    CHECK(parse_pgm(data).pixels == img.pixels);

    img.pixels.pop_back();
    CHECK_THROWS_AS(write_pgm(img), std::invalid_argument);
}

TEST_CASE("pgm: malformed inputs name the byte offset") {
    CHECK(error_of(bytes_of("P4\n1 1\n255\nx")) ==
          "pgm parse error at byte 0: bad magic, want P5");
    CHECK(error_of(bytes_of("")) == "pgm parse error at byte 0: bad magic, want P5");

    // maxval token starts at byte 7
    auto bad_maxval = bytes_of("P5\n2 2\n15\n");
    bad_maxval.resize(bad_maxval.size() + 4, 0);
    CHECK(error_of(bad_maxval) ==
          "pgm parse error at byte 7: maxval 15 unsupported, want 255");

    auto truncated = bytes_of("P5\n2 2\n255\n");
    truncated.push_back(9);  // 1 of 4 payload bytes
    CHECK(error_of(truncated) ==
          "pgm parse error at byte 12: truncated payload, want 4 bytes, have 1");

    CHECK(error_of(bytes_of("P5\n2 2\n255")) ==
          "pgm parse error at byte 10: expected single whitespace after maxval");
    CHECK(error_of(bytes_of("P5\nx 2\n255\n")) ==
          "pgm parse error at byte 3: expected digit for width");
    CHECK(error_of(bytes_of("P5\n2\n255\n")).find("missing") != std::string::npos);
    CHECK(error_of(bytes_of("P5\n0 2\n255\n\0\0")).find("zero image extent") !=
          std::string::npos);
}

TEST_CASE("cipher container: roundtrip with negative entries") {
    MessageMatrix m;
    m.rows = 2;
    m.cols = 4;
    m.pad_rows = 0;
    m.pad_cols = 1;
    m.entries = {1, -2, 3, 0, -9223372036854775807LL, 255, 7, 9223372036854775807LL};
    auto data = write_cipher_file(m);
    CHECK(data.size() == 14 + 8 * 8);
    CHECK(data[0] == 'P');
    CHECK(data[1] == 'H');
    CHECK(data[2] == 'K');
    CHECK(data[3] == '1');
    CHECK(data[4] == 2);   // rows, little endian
    CHECK(data[8] == 4);   // cols
    CHECK(data[12] == 0);  // pad_rows
    CHECK(data[13] == 1);  // pad_cols
    CHECK(data[14] == 1);  // first entry, low byte

    auto back = read_cipher_file(data);
    CHECK(back.rows == m.rows);
    CHECK(back.cols == m.cols);
    CHECK(back.pad_rows == m.pad_rows);
    CHECK(back.pad_cols == m.pad_cols);
    CHECK(back.entries == m.entries);
}

TEST_CASE("cipher container: randomized roundtrip") {
    RngStream rng({42, 70});
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t rows = (rng.next_u64() % 20 + 1) * 2;
        std::size_t cols = (rng.next_u64() % 20 + 1) * 2;
        MessageMatrix m;
        m.rows = rows;
        m.cols = cols;
        m.pad_rows = rng.next_bit();
        m.pad_cols = rng.next_bit();
        m.entries.resize(rows * cols);
        for (auto& v : m.entries) v = static_cast<std::int64_t>(rng.next_u64());
        auto back = read_cipher_file(write_cipher_file(m));
        CHECK(back.entries == m.entries);
        CHECK(back.pad_rows == m.pad_rows);
        CHECK(back.pad_cols == m.pad_cols);
    }
}

TEST_CASE("cipher container: rejects damage") {
    auto m = make_message_matrix(2, 2, std::vector<std::int64_t>{1, 2, 3, 4});
    auto good = write_cipher_file(m);

    auto bad = good;
    bad[0] = 'X';
    CHECK_THROWS_WITH_AS(read_cipher_file(bad),
                         "ciphertext container: bad magic, want PHK1", std::runtime_error);
    bad = good;
    bad.pop_back();
    CHECK_THROWS_AS(read_cipher_file(bad), std::runtime_error);
    bad = good;
    bad.push_back(0);
    CHECK_THROWS_AS(read_cipher_file(bad), std::runtime_error);
    bad = good;
    bad[12] = 2;  // pad flag out of range
    CHECK_THROWS_AS(read_cipher_file(bad), std::runtime_error);
    bad = good;
    bad[4] = 3;  // odd row count
    CHECK_THROWS_AS(read_cipher_file(bad), std::runtime_error);
    CHECK_THROWS_AS(read_cipher_file(std::vector<std::uint8_t>{}), std::runtime_error);

    MessageMatrix odd;
    odd.rows = 3;
    odd.cols = 2;
    odd.entries = {1, 2, 3, 4, 5, 6};
    CHECK_THROWS_AS(write_cipher_file(odd), std::invalid_argument);
}

TEST_CASE("file io: atomic write then read back") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path();
    auto path = dir / "phykeylab_io_test.bin";
    std::vector<std::uint8_t> payload{0, 1, 2, 253, 254, 255};
    write_file_atomic(path, payload);
    CHECK(read_file(path) == payload);

    // overwrite in place
    std::vector<std::uint8_t> second{9};
    write_file_atomic(path, second);
    CHECK(read_file(path) == second);

    // string overload
    write_file_atomic(path, std::string("hello\n"));
    auto text = read_file(path);
    CHECK(std::string(text.begin(), text.end()) == "hello\n");

    // no temp litter left behind
    std::size_t stray = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        auto name = e.path().filename().string();
        if (name.rfind("phykeylab_io_test.bin.tmp", 0) == 0) ++stray;
    }
    CHECK(stray == 0);
    fs::remove(path);

    CHECK_THROWS_AS(read_file(dir / "phykeylab_definitely_missing_462"),
                    std::runtime_error);
}

TEST_CASE("sha-256 standard vectors") {
    CHECK(sha256_hex(bytes_of("")) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex(bytes_of("abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex(bytes_of("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")) ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    CHECK(sha256_hex(bytes_of(
              "abcdefghbcdefghicdefghijdefghijkefghijklfghijklmghijklmnhijklmno"
              "ijklmnopjklmnopqklmnopqrlmnopqrsmnopqrstnopqrstu")) ==
          "cf5b16a778af8380036ce59e7b0492370b249b11e8f07a51afac45037afee9d1");

    std::vector<std::uint8_t> million(1000000, 'a');
    CHECK(sha256_hex(million) ==
          "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");

    auto digest = sha256(bytes_of("abc"));
    CHECK(digest[0] == 0xba);
    CHECK(digest[31] == 0xad);

    // length extension boundary: 55, 56, 63, 64, 65 byte messages all parse
    for (std::size_t n : {55u, 56u, 63u, 64u, 65u}) {
        std::vector<std::uint8_t> msg(n, 'x');
        CHECK(sha256_hex(msg).size() == 64);
    }
}
