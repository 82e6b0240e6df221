#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "phykeylab/blockcipher.hpp"

namespace phykeylab::io {

struct PgmImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;  // row-major
};

/// Binary PGM (P5), maxval 255 only. '#' comments in the header are accepted
/// and ignored. Malformed input throws std::runtime_error naming the byte
/// offset of the problem.
PgmImage parse_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_pgm(const PgmImage& img);

/// Ciphertext container: magic "PHK1", then little-endian u32 rows, u32
/// cols, u8 pad_rows, u8 pad_cols, then rows*cols row-major signed 64-bit
/// little-endian entries.
std::vector<std::uint8_t> write_cipher_file(const blockcipher::MessageMatrix& m);
blockcipher::MessageMatrix read_cipher_file(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Writes to a temp file in the destination directory, then renames into
/// place, so readers never observe a half-written file.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::span<const std::uint8_t> bytes);

}  // namespace phykeylab::io
