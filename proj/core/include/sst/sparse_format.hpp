// sparse_format.hpp - encode/decode/validate/prune for the index-based N:M
// compressed format, plus storage-ratio arithmetic.
#pragma once

#include "sst/errors.hpp"
#include "sst/matrix.hpp"
#include "sst/sparsity.hpp"

namespace sst {

// True iff every group of group_size consecutive row elements has at most
// nonzeros_per_group non-zeros. Trailing partial groups count as zero-padded.
bool validate_pattern(const DenseMatrix& m, SparsityLevel level);

// Compresses a pattern-conforming matrix. Per group the non-zero values are
// emitted in ascending position order; groups with fewer non-zeros than the
// quota store explicit zeros at the smallest unused positions. logical_cols is
// m.cols rounded up to a multiple of group_size.
// Throws PatternViolation (first offending row/group) on non-conforming input.
CompressedMatrix encode(const DenseMatrix& m, SparsityLevel level);

// Expands back to rows x logical_cols. Throws IndexOutOfGroup on a position
// index >= group_size.
DenseMatrix decode(const CompressedMatrix& c);

// Within each group keeps the nonzeros_per_group entries of largest absolute
// value (ties: lower position wins) and zeroes the rest. Output satisfies
// validate_pattern; kept entries are unchanged.
DenseMatrix prune_magnitude(const DenseMatrix& m, SparsityLevel level);

// Dense storage bits over compressed storage bits (values + 2-bit indices).
// Dense level returns 1.
double compression_ratio(SparsityLevel level, Precision p);

// Ratio for the alternative bitmap scheme: one presence bit per logical
// element plus the non-zero values.
double bitmap_compression_ratio(SparsityLevel level, Precision p);

// Strict structural check of a compressed container: sizes, index ranges, and
// canonical (strictly increasing) group order. Used when loading files.
void validate_compressed(const CompressedMatrix& c);

}  // namespace sst
