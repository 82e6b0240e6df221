#include "phykeylab/io.hpp"

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace phykeylab::io {

namespace {

[[noreturn]] void pgm_fail(std::size_t offset, const std::string& what) {
    throw std::runtime_error("pgm parse error at byte " + std::to_string(offset) + ": " + what);
}

bool is_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

// Header scanner: whitespace separates tokens, '#' starts a comment that
// runs to end of line.
struct HeaderScanner {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;
    std::size_t token_start = 0;  // where the last token began

    void skip_separators() {
        while (pos < bytes.size()) {
            if (is_space(bytes[pos])) {
                ++pos;
            } else if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    std::uint64_t next_uint(const char* field) {
        skip_separators();
        token_start = pos;
        if (pos >= bytes.size()) pgm_fail(pos, std::string("missing ") + field);
        if (bytes[pos] < '0' || bytes[pos] > '9')
            pgm_fail(pos, std::string("expected digit for ") + field);
        std::uint64_t v = 0;
        while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
            v = v * 10 + (bytes[pos] - '0');
            if (v > std::numeric_limits<std::uint32_t>::max())
                pgm_fail(pos, std::string(field) + " out of range");
            ++pos;
        }
        return v;
    }
};

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

std::uint32_t get_u32le(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint32_t>(b[off]) | static_cast<std::uint32_t>(b[off + 1]) << 8 |
           static_cast<std::uint32_t>(b[off + 2]) << 16 |
           static_cast<std::uint32_t>(b[off + 3]) << 24;
}

void put_i64le(std::vector<std::uint8_t>& out, std::int64_t v) {
    auto u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

std::int64_t get_i64le(std::span<const std::uint8_t> b, std::size_t off) {
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[off + i]) << (8 * i);
    return static_cast<std::int64_t>(u);
}

}  // namespace

PgmImage parse_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        pgm_fail(0, "bad magic, want P5");
    HeaderScanner sc{bytes, 2};
    std::uint64_t width = sc.next_uint("width");
    std::uint64_t height = sc.next_uint("height");
    if (width == 0 || height == 0) pgm_fail(sc.token_start, "zero image extent");
    std::uint64_t maxval = sc.next_uint("maxval");
    if (maxval != 255)
        pgm_fail(sc.token_start,
                 "maxval " + std::to_string(maxval) + " unsupported, want 255");
    if (sc.pos >= bytes.size() || !is_space(bytes[sc.pos]))
        pgm_fail(sc.pos, "expected single whitespace after maxval");
    ++sc.pos;  // exactly one separator byte before the payload

    std::uint64_t need = width * height;
    if (bytes.size() - sc.pos < need)
        pgm_fail(bytes.size(),
                 "truncated payload, want " + std::to_string(need) + " bytes, have " +
                     std::to_string(bytes.size() - sc.pos));
    PgmImage img;
    img.width = width;
    img.height = height;
    img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(sc.pos),
                      bytes.begin() + static_cast<std::ptrdiff_t>(sc.pos + need));
    return img;
}

std::vector<std::uint8_t> write_pgm(const PgmImage& img) {
    if (img.width == 0 || img.height == 0)
        throw std::invalid_argument("image extent must be >= 1");
    if (img.pixels.size() != img.width * img.height)
        throw std::invalid_argument("pixel count disagrees with image extent");
    std::string header = "P5\n" + std::to_string(img.width) + " " +
                         std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

std::vector<std::uint8_t> write_cipher_file(const blockcipher::MessageMatrix& m) {
    if (m.rows == 0 || m.cols == 0 || m.rows % 2 || m.cols % 2)
        throw std::invalid_argument("matrix extent must be even and nonzero");
    if (m.rows > std::numeric_limits<std::uint32_t>::max() ||
        m.cols > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("matrix extent exceeds container limit");
    if (m.entries.size() != m.rows * m.cols)
        throw std::invalid_argument("matrix storage is inconsistent");
    std::vector<std::uint8_t> out;
    out.reserve(14 + m.entries.size() * 8);
    out.insert(out.end(), {'P', 'H', 'K', '1'});
    put_u32le(out, static_cast<std::uint32_t>(m.rows));
    put_u32le(out, static_cast<std::uint32_t>(m.cols));
    out.push_back(static_cast<std::uint8_t>(m.pad_rows));
    out.push_back(static_cast<std::uint8_t>(m.pad_cols));
    for (std::int64_t v : m.entries) put_i64le(out, v);
    return out;
}

blockcipher::MessageMatrix read_cipher_file(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 14 || bytes[0] != 'P' || bytes[1] != 'H' || bytes[2] != 'K' ||
        bytes[3] != '1')
        throw std::runtime_error("ciphertext container: bad magic, want PHK1");
    std::uint32_t rows = get_u32le(bytes, 4);
    std::uint32_t cols = get_u32le(bytes, 8);
    std::uint8_t pad_rows = bytes[12];
    std::uint8_t pad_cols = bytes[13];
    if (rows == 0 || cols == 0 || rows % 2 || cols % 2)
        throw std::runtime_error("ciphertext container: matrix extent must be even and nonzero");
    if (pad_rows > 1 || pad_cols > 1)
        throw std::runtime_error("ciphertext container: pad flags must be 0 or 1");
    std::uint64_t count = static_cast<std::uint64_t>(rows) * cols;
    if (bytes.size() - 14 != count * 8)
        throw std::runtime_error("ciphertext container: payload size mismatch, want " +
                                 std::to_string(count * 8) + " bytes, have " +
                                 std::to_string(bytes.size() - 14));
    blockcipher::MessageMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.pad_rows = pad_rows;
    m.pad_cols = pad_cols;
    m.entries.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) m.entries[i] = get_i64le(bytes, 14 + i * 8);
    return m;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error("read failed on " + path.string());
    return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp" + std::to_string(static_cast<unsigned long>(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed on " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() +
                                 ": " + ec.message());
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
    write_file_atomic(path, std::span<const std::uint8_t>(
                                reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace phykeylab::io
