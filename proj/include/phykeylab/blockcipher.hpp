#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace phykeylab::blockcipher {

/// Row-major 2x2 integer block: {m00, m01, m10, m11}.
using Block = std::array<std::int64_t, 4>;

/// Key matrix Mk2 = [[1, 1], [k2, k2+1]] (det = 1) and its exact integer
/// inverse kM = [[k2+1, -1], [-k2, 1]]. Unimodularity is what makes the
/// cipher lossless over the integers: no division, no rounding.
struct CipherKeyMatrix {
    std::int64_t k2 = 1;
    Block entries{};
    Block inverse_entries{};
};

/// Even-padded integer matrix plus a record of how much padding was added,
/// so the original extent is recoverable after a round trip.
struct MessageMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    int pad_rows = 0;  // 0 or 1 zero-rows appended
    int pad_cols = 0;  // 0 or 1 zero-cols appended
    std::vector<std::int64_t> entries;  // row-major, rows*cols

    std::int64_t& at(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
    std::int64_t at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
};

struct BlockSet {
    std::vector<Block> blocks;
};

struct CipherBlockSet {
    std::vector<Block> blocks;
};

/// Run-length code over a bitstream; runs alternate between 0s and 1s.
struct CompressedBits {
    struct Run {
        std::uint8_t bit;
        std::uint64_t length;
    };
    std::vector<Run> runs;
    std::uint64_t original_bit_count = 0;
};

CipherKeyMatrix key_matrix(std::int64_t k2);

/// Bytes to bits, MSB first within each byte (0xA5 -> 1,0,1,0,0,1,0,1).
std::vector<std::uint8_t> binarize(std::span<const std::uint8_t> bytes);

CompressedBits compress(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> decompress(const CompressedBits& c);

/// Wraps raw values (row-major, rows*cols of them) into a MessageMatrix,
/// zero-padding odd dimensions up to even.
MessageMatrix make_message_matrix(std::size_t rows, std::size_t cols,
                                  std::span<const std::int64_t> values);

/// Elementwise round-half-away-from-zero.
std::vector<std::int64_t> round_off_values(std::span<const double> values);

/// round_off_values + make_message_matrix in one step.
MessageMatrix round_off(std::size_t rows, std::size_t cols, std::span<const double> values);

/// Partition into 2x2 tiles, row-major tile order.
BlockSet to_block_matrix(const MessageMatrix& m);

/// Reassemble tiles into a matrix with the given (even) extent and recorded
/// padding. Exact inverse of to_block_matrix.
MessageMatrix from_block_matrix(std::span<const Block> blocks, std::size_t rows,
                                std::size_t cols, int pad_rows, int pad_cols);

/// Values of the unpadded region, row-major.
std::vector<std::int64_t> unpadded_values(const MessageMatrix& m);

/// C_i = P_i * Mk2 per block (right multiplication). The *_serial variants
/// are the reference implementations the parallel kernels are checked
/// against; both orderings produce bit-identical output.
CipherBlockSet encrypt_blocks(const BlockSet& plain, const CipherKeyMatrix& key);
CipherBlockSet encrypt_blocks_serial(const BlockSet& plain, const CipherKeyMatrix& key);

/// P_i = C_i * kM per block; exact integer inverse of encrypt_blocks.
BlockSet decrypt_blocks(const CipherBlockSet& cipher, const CipherKeyMatrix& key);
BlockSet decrypt_blocks_serial(const CipherBlockSet& cipher, const CipherKeyMatrix& key);

}  // namespace phykeylab::blockcipher
