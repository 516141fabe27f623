// oracles.hpp - test-side reference computations, kept independent of the
// library paths they check. The GEMM oracle re-derives the canonical entry
// stream from dense data by the format rules (non-zeros in ascending position,
// explicit zeros at the smallest unused positions) rather than calling
// encode(), and folds products in stream order exactly as the hardware does.
#pragma once

#include <cstdint>
#include <vector>

#include "sst/matrix.hpp"
#include "sst/sparsity.hpp"

namespace oracle {

struct StreamEntry {
    sst::RawScalar value;
    std::uint8_t position;  // column = group_base + position
};

std::vector<StreamEntry> canonical_stream(const sst::DenseMatrix& a, std::size_t row,
                                          sst::SparsityLevel level);

// Wide-integer dot product (int8 route check).
long long dot_i64(const std::vector<std::int8_t>& a, const std::vector<std::int8_t>& b);

// Stream-order GEMM over the canonical streams: bit-exact expectation for the
// cycle model in both precisions.
sst::AccumMatrix gemm(const sst::DenseMatrix& a, const sst::DenseMatrix& b,
                      sst::SparsityLevel level);

// Independent int64 triple loop over the dense operands.
std::vector<long long> gemm_i64(const sst::DenseMatrix& a, const sst::DenseMatrix& b);

bool bits_equal(const sst::AccumMatrix& x, const sst::AccumMatrix& y);

}  // namespace oracle
