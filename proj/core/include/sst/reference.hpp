// reference.hpp - arithmetic reference paths used to check the cycle model.
//
// Accumulation mirrors the hardware exactly: the accumulator is seeded with
// the first product (the accumulate-flag reset) and every later product is
// added in stream order. int8 uses exact int32 sums; bfloat16 products are
// exact in fp32 and summed with round-to-nearest-even.
#pragma once

#include <cstdint>
#include <span>

#include "sst/matrix.hpp"

namespace sst {

struct MacResult {
    Precision precision = Precision::kInt8;
    std::int32_t int_value = 0;
    float float_value = 0.0f;

    std::uint32_t bits() const;
};

// Dot product of equal-length raw streams.
MacResult spe_mac_reference(Precision p, std::span<const RawScalar> a,
                            std::span<const RawScalar> b);

// Triple-loop GEMM over a dense A (k ascending per output).
AccumMatrix reference_gemm(const DenseMatrix& a, const DenseMatrix& b);

// Same product computed over the compressed entry stream of A, i.e. exactly
// the value/position sequence an SPE row consumes.
AccumMatrix reference_gemm(const CompressedMatrix& a, const DenseMatrix& b);

}  // namespace sst
