// matrix.hpp - dense and index-compressed matrix containers.
//
// Scalars are stored as 16-bit raw words so one container serves both
// precisions: int8 occupies the low byte (sign-extended on read), bfloat16
// stores its bit pattern directly.
#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "sst/bfloat16.hpp"
#include "sst/sparsity.hpp"

namespace sst {

using RawScalar = std::uint16_t;

inline RawScalar raw_from_int8(std::int8_t v) {
    return static_cast<RawScalar>(static_cast<std::uint8_t>(v));
}
inline std::int8_t raw_to_int8(RawScalar r) {
    return static_cast<std::int8_t>(static_cast<std::uint8_t>(r & 0xffu));
}
inline RawScalar raw_from_bf16(Bfloat16 v) { return v.bits; }
inline Bfloat16 raw_to_bf16(RawScalar r) { return Bfloat16::from_bits(r); }

inline bool raw_is_zero(Precision p, RawScalar r) {
    return p == Precision::kInt8 ? raw_to_int8(r) == 0 : raw_to_bf16(r).is_zero();
}

// Numeric view used for magnitude comparisons and reporting.
inline double raw_to_double(Precision p, RawScalar r) {
    return p == Precision::kInt8 ? static_cast<double>(raw_to_int8(r))
                                 : static_cast<double>(bf16_to_float(r));
}

// Canonical storage form: -0.0 bfloat16 collapses to +0.0.
inline RawScalar canonical_raw(Precision p, RawScalar r) {
    return p == Precision::kInt8 ? r : canonical_bf16(r);
}

struct DenseMatrix {
    Precision precision = Precision::kInt8;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<RawScalar> data;  // row-major, rows * cols entries

    DenseMatrix() = default;
    DenseMatrix(Precision p, std::size_t r, std::size_t c)
        : precision(p), rows(r), cols(c), data(r * c, 0) {}

    RawScalar& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    RawScalar at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool operator==(const DenseMatrix& other) const = default;

    static DenseMatrix zeros(Precision p, std::size_t rows, std::size_t cols) {
        return DenseMatrix(p, rows, cols);
    }
    static DenseMatrix identity(Precision p, std::size_t n);
};

// Index-based compressed form of an N:M sparse matrix. Each group of
// group_size logical columns stores exactly nonzeros_per_group values with a
// 2-bit intra-group position each; short groups are padded with explicit zeros
// at the smallest unused positions so every group occupies fixed storage.
struct CompressedMatrix {
    SparsityLevel level = SparsityLevel::k2of4;
    Precision precision = Precision::kInt8;
    std::size_t rows = 0;
    std::size_t logical_cols = 0;   // uncompressed K, multiple of group_size
    std::size_t original_cols = 0;  // caller-visible K before padding
    std::vector<RawScalar> values;
    std::vector<std::uint8_t> indices;  // one position per value, < group_size

    std::size_t groups_per_row() const {
        return logical_cols / static_cast<std::size_t>(group_size(level));
    }
    std::size_t entries_per_row() const {
        return groups_per_row() * static_cast<std::size_t>(nonzeros_per_group(level));
    }

    bool operator==(const CompressedMatrix& other) const = default;
};

// 32-bit accumulator block produced by a GEMM run: int32 words for int8
// operands, fp32 words for bfloat16. Stored as raw bits.
struct AccumMatrix {
    Precision precision = Precision::kInt8;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint32_t> bits;

    AccumMatrix() = default;
    AccumMatrix(Precision p, std::size_t r, std::size_t c)
        : precision(p), rows(r), cols(c), bits(r * c, 0) {}

    std::uint32_t& raw_at(std::size_t r, std::size_t c) { return bits[r * cols + c]; }
    std::uint32_t raw_at(std::size_t r, std::size_t c) const { return bits[r * cols + c]; }
    std::int32_t int_at(std::size_t r, std::size_t c) const {
        return static_cast<std::int32_t>(raw_at(r, c));
    }
    float float_at(std::size_t r, std::size_t c) const;

    bool operator==(const AccumMatrix& other) const = default;
};

std::uint64_t checksum(const AccumMatrix& m);  // FNV-1a over raw words

// Deterministic generators (seeded xoshiro-free mt19937 driven, identical
// output on every platform). bfloat16 draws avoid exact zeros so sparsity is
// introduced only by pruning.
DenseMatrix make_random_dense(Precision p, std::size_t rows, std::size_t cols,
                              std::uint64_t seed);
DenseMatrix make_random_pattern_dense(Precision p, std::size_t rows, std::size_t cols,
                                      SparsityLevel level, std::uint64_t seed);

}  // namespace sst
