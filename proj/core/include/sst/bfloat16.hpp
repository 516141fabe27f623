// bfloat16.hpp - software bfloat16: 1 sign / 8 exponent / 7 stored mantissa bits,
// i.e. the upper half of an IEEE fp32 word. Conversion from fp32 rounds to
// nearest even. Widening back to fp32 is exact.
#pragma once

#include <cstdint>

namespace sst {

struct Bfloat16 {
    std::uint16_t bits = 0;

    static Bfloat16 from_bits(std::uint16_t b) { return Bfloat16{b}; }
    static Bfloat16 from_float(float value);

    float to_float() const;

    bool is_zero() const { return (bits & 0x7fffu) == 0; }

    friend bool operator==(Bfloat16 a, Bfloat16 b) { return a.bits == b.bits; }
};

float bf16_to_float(std::uint16_t bits);
std::uint16_t float_to_bf16(float value);

// Maps -0.0 to +0.0 so pattern checks, pruning and the compressed format see a
// single canonical zero. All matrix ingest paths apply this.
std::uint16_t canonical_bf16(std::uint16_t bits);

}  // namespace sst
