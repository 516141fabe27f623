#include "sst/bfloat16.hpp"

#include <bit>
#include <cstring>

namespace sst {

float bf16_to_float(std::uint16_t bits) {
    std::uint32_t wide = static_cast<std::uint32_t>(bits) << 16;
    return std::bit_cast<float>(wide);
}

std::uint16_t float_to_bf16(float value) {
    std::uint32_t u = std::bit_cast<std::uint32_t>(value);
    if ((u & 0x7f800000u) == 0x7f800000u && (u & 0x007fffffu) != 0) {
        // NaN: keep the sign, force a quiet payload that survives truncation.
        return static_cast<std::uint16_t>((u >> 16) | 0x0040u);
    }
    // Round to nearest even on the 16 truncated bits.
    std::uint32_t rounding_bias = 0x7fffu + ((u >> 16) & 1u);
    u += rounding_bias;
    return static_cast<std::uint16_t>(u >> 16);
}

std::uint16_t canonical_bf16(std::uint16_t bits) {
    return bits == 0x8000u ? std::uint16_t{0} : bits;
}

Bfloat16 Bfloat16::from_float(float value) { return Bfloat16{float_to_bf16(value)}; }

float Bfloat16::to_float() const { return bf16_to_float(bits); }

}  // namespace sst
