#include "sst/reference.hpp"

#include <bit>
#include <cassert>

#include "sst/errors.hpp"

namespace sst {

namespace {

struct Acc {
    bool seeded = false;
    std::int32_t i = 0;
    float f = 0.0f;

    void feed_int(std::int32_t product) {
        if (seeded) {
            i += product;
        } else {
            i = product;
            seeded = true;
        }
    }
    void feed_float(float product) {
        if (seeded) {
            f += product;
        } else {
            f = product;
            seeded = true;
        }
    }
};

std::int32_t int_product(RawScalar a, RawScalar b) {
    return static_cast<std::int32_t>(raw_to_int8(a)) * static_cast<std::int32_t>(raw_to_int8(b));
}

float float_product(RawScalar a, RawScalar b) {
    // bf16 x bf16 needs at most 16 significand bits: exact in fp32.
    return bf16_to_float(a) * bf16_to_float(b);
}

}  // namespace

std::uint32_t MacResult::bits() const {
    return precision == Precision::kInt8 ? static_cast<std::uint32_t>(int_value)
                                         : std::bit_cast<std::uint32_t>(float_value);
}

MacResult spe_mac_reference(Precision p, std::span<const RawScalar> a,
                            std::span<const RawScalar> b) {
    if (a.size() != b.size()) throw ArityMismatch("mac reference streams differ in length");
    Acc acc;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (p == Precision::kInt8) {
            acc.feed_int(int_product(a[k], b[k]));
        } else {
            acc.feed_float(float_product(a[k], b[k]));
        }
    }
    return MacResult{p, acc.i, acc.f};
}

AccumMatrix reference_gemm(const DenseMatrix& a, const DenseMatrix& b) {
    assert(a.cols == b.rows);
    AccumMatrix c(a.precision, a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.cols; ++j) {
            Acc acc;
            for (std::size_t k = 0; k < a.cols; ++k) {
                if (a.precision == Precision::kInt8) {
                    acc.feed_int(int_product(a.at(i, k), b.at(k, j)));
                } else {
                    acc.feed_float(float_product(a.at(i, k), b.at(k, j)));
                }
            }
            c.raw_at(i, j) = a.precision == Precision::kInt8
                                 ? static_cast<std::uint32_t>(acc.i)
                                 : std::bit_cast<std::uint32_t>(acc.f);
        }
    }
    return c;
}

AccumMatrix reference_gemm(const CompressedMatrix& a, const DenseMatrix& b) {
    assert(a.logical_cols == b.rows);
    const auto g = static_cast<std::size_t>(group_size(a.level));
    const auto quota = static_cast<std::size_t>(nonzeros_per_group(a.level));
    AccumMatrix c(a.precision, a.rows, b.cols);
    const std::size_t per_row = a.entries_per_row();
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.cols; ++j) {
            Acc acc;
            for (std::size_t e = 0; e < per_row; ++e) {
                std::size_t entry = i * per_row + e;
                std::size_t k = (e / quota) * g + a.indices[entry];
                if (a.precision == Precision::kInt8) {
                    acc.feed_int(int_product(a.values[entry], b.at(k, j)));
                } else {
                    acc.feed_float(float_product(a.values[entry], b.at(k, j)));
                }
            }
            c.raw_at(i, j) = a.precision == Precision::kInt8
                                 ? static_cast<std::uint32_t>(acc.i)
                                 : std::bit_cast<std::uint32_t>(acc.f);
        }
    }
    return c;
}

}  // namespace sst
