#include "phykeylab/blockcipher.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace phykeylab::blockcipher {

namespace {

using i128 = __int128;

Block mul2x2(const Block& x, const Block& y) {
    // Entries are pre-bounded by the callers, so plain 64-bit arithmetic
    // cannot wrap here.
    return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
            x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

std::int64_t max_abs_entry(std::span<const Block> blocks) {
    std::int64_t m = 0;
    for (const Block& b : blocks)
        for (std::int64_t v : b) {
            std::int64_t a = v < 0 ? (v == std::numeric_limits<std::int64_t>::min()
                                          ? std::numeric_limits<std::int64_t>::max()
                                          : -v)
                                   : v;
            if (a > m) m = a;
        }
    return m;
}

// Worst-case output magnitude of span * key is max_in * max column L1 norm of
// the key. Checking once up front keeps the per-block kernel branch-free and
// lets the OpenMP region run without exceptions in flight.
void check_product_range(std::span<const Block> blocks, const Block& key) {
    i128 max_in = max_abs_entry(blocks);
    i128 col0 = (key[0] < 0 ? -(i128)key[0] : (i128)key[0]) +
                (key[2] < 0 ? -(i128)key[2] : (i128)key[2]);
    i128 col1 = (key[1] < 0 ? -(i128)key[1] : (i128)key[1]) +
                (key[3] < 0 ? -(i128)key[3] : (i128)key[3]);
    i128 bound = max_in * (col0 > col1 ? col0 : col1);
    if (bound > std::numeric_limits<std::int64_t>::max())
        throw std::overflow_error("block product exceeds 64-bit range");
}

std::vector<Block> map_blocks(std::span<const Block> in, const Block& key) {
    check_product_range(in, key);
    std::vector<Block> out(in.size());
    const auto n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = mul2x2(in[i], key);
    return out;
}

std::vector<Block> map_blocks_serial(std::span<const Block> in, const Block& key) {
    check_product_range(in, key);
    std::vector<Block> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = mul2x2(in[i], key);
    return out;
}

}  // namespace

CipherKeyMatrix key_matrix(std::int64_t k2) {
    if (k2 < 1) throw std::invalid_argument("k2 must be >= 1");
    if (k2 == std::numeric_limits<std::int64_t>::max())
        throw std::overflow_error("k2 + 1 exceeds 64-bit range");
    CipherKeyMatrix m;
    m.k2 = k2;
    m.entries = {1, 1, k2, k2 + 1};
    m.inverse_entries = {k2 + 1, -1, -k2, 1};
    return m;
}

std::vector<std::uint8_t> binarize(std::span<const std::uint8_t> bytes) {
    std::vector<std::uint8_t> bits;
    bits.reserve(bytes.size() * 8);
    for (std::uint8_t b : bytes)
        for (int i = 7; i >= 0; --i) bits.push_back((b >> i) & 1u);
    return bits;
}

CompressedBits compress(std::span<const std::uint8_t> bits) {
    CompressedBits c;
    c.original_bit_count = bits.size();
    for (std::uint8_t bit : bits) {
        if (bit > 1) throw std::invalid_argument("bitstream values must be 0 or 1");
        if (!c.runs.empty() && c.runs.back().bit == bit)
            ++c.runs.back().length;
        else
            c.runs.push_back({bit, 1});
    }
    return c;
}

std::vector<std::uint8_t> decompress(const CompressedBits& c) {
    std::vector<std::uint8_t> bits;
    bits.reserve(c.original_bit_count);
    for (const auto& run : c.runs) bits.insert(bits.end(), run.length, run.bit);
    if (bits.size() != c.original_bit_count)
        throw std::invalid_argument("run lengths disagree with original bit count");
    return bits;
}

MessageMatrix make_message_matrix(std::size_t rows, std::size_t cols,
                                  std::span<const std::int64_t> values) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("matrix extent must be >= 1");
    if (values.size() != rows * cols)
        throw std::invalid_argument("value count disagrees with matrix extent");
    MessageMatrix m;
    m.pad_rows = rows % 2 ? 1 : 0;
    m.pad_cols = cols % 2 ? 1 : 0;
    m.rows = rows + m.pad_rows;
    m.cols = cols + m.pad_cols;
    m.entries.assign(m.rows * m.cols, 0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = values[r * cols + c];
    return m;
}

std::vector<std::int64_t> round_off_values(std::span<const double> values) {
    std::vector<std::int64_t> out;
    out.reserve(values.size());
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("cannot round non-finite value");
        out.push_back(std::llround(v));  // half away from zero
    }
    return out;
}

MessageMatrix round_off(std::size_t rows, std::size_t cols, std::span<const double> values) {
    auto rounded = round_off_values(values);
    return make_message_matrix(rows, cols, rounded);
}

BlockSet to_block_matrix(const MessageMatrix& m) {
    if (m.rows == 0 || m.cols == 0 || m.rows % 2 || m.cols % 2)
        throw std::invalid_argument("message matrix extent must be even and nonzero");
    if (m.entries.size() != m.rows * m.cols)
        throw std::invalid_argument("message matrix storage is inconsistent");
    BlockSet b;
    b.blocks.reserve(m.rows / 2 * (m.cols / 2));
    for (std::size_t i = 0; i < m.rows; i += 2)
        for (std::size_t j = 0; j < m.cols; j += 2)
            b.blocks.push_back({m.at(i, j), m.at(i, j + 1), m.at(i + 1, j), m.at(i + 1, j + 1)});
    return b;
}

MessageMatrix from_block_matrix(std::span<const Block> blocks, std::size_t rows,
                                std::size_t cols, int pad_rows, int pad_cols) {
    if (rows == 0 || cols == 0 || rows % 2 || cols % 2)
        throw std::invalid_argument("matrix extent must be even and nonzero");
    if (pad_rows < 0 || pad_rows > 1 || pad_cols < 0 || pad_cols > 1)
        throw std::invalid_argument("pad flags must be 0 or 1");
    if (blocks.size() != rows / 2 * (cols / 2))
        throw std::invalid_argument("block count disagrees with matrix extent");
    MessageMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.pad_rows = pad_rows;
    m.pad_cols = pad_cols;
    m.entries.assign(rows * cols, 0);
    std::size_t z = 0;
    for (std::size_t i = 0; i < rows; i += 2)
        for (std::size_t j = 0; j < cols; j += 2, ++z) {
            const Block& b = blocks[z];
            m.at(i, j) = b[0];
            m.at(i, j + 1) = b[1];
            m.at(i + 1, j) = b[2];
            m.at(i + 1, j + 1) = b[3];
        }
    return m;
}

std::vector<std::int64_t> unpadded_values(const MessageMatrix& m) {
    std::size_t rows = m.rows - static_cast<std::size_t>(m.pad_rows);
    std::size_t cols = m.cols - static_cast<std::size_t>(m.pad_cols);
    std::vector<std::int64_t> out;
    out.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) out.push_back(m.at(r, c));
    return out;
}

CipherBlockSet encrypt_blocks(const BlockSet& plain, const CipherKeyMatrix& key) {
    return {map_blocks(plain.blocks, key.entries)};
}

CipherBlockSet encrypt_blocks_serial(const BlockSet& plain, const CipherKeyMatrix& key) {
    return {map_blocks_serial(plain.blocks, key.entries)};
}

BlockSet decrypt_blocks(const CipherBlockSet& cipher, const CipherKeyMatrix& key) {
    return {map_blocks(cipher.blocks, key.inverse_entries)};
}

BlockSet decrypt_blocks_serial(const CipherBlockSet& cipher, const CipherKeyMatrix& key) {
    return {map_blocks_serial(cipher.blocks, key.inverse_entries)};
}

}  // namespace phykeylab::blockcipher
