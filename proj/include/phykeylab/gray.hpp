#pragma once

#include <cstdint>

namespace phykeylab {

constexpr std::uint32_t gray_encode(std::uint32_t x) { return x ^ (x >> 1); }

constexpr std::uint32_t gray_decode(std::uint32_t g) {
    std::uint32_t x = g;
    for (std::uint32_t shift = 1; shift < 32; shift <<= 1) x ^= x >> shift;
    return x;
}

}  // namespace phykeylab
