#include "sst/sparse_format.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace sst {

namespace {

std::size_t padded_cols(std::size_t cols, SparsityLevel level) {
    auto g = static_cast<std::size_t>(group_size(level));
    return (cols + g - 1) / g * g;
}

}  // namespace

bool validate_pattern(const DenseMatrix& m, SparsityLevel level) {
    const auto g = static_cast<std::size_t>(group_size(level));
    const auto quota = static_cast<std::size_t>(nonzeros_per_group(level));
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t base = 0; base < m.cols; base += g) {
            std::size_t nonzeros = 0;
            for (std::size_t i = 0; i < g && base + i < m.cols; ++i) {
                if (!raw_is_zero(m.precision, m.at(r, base + i))) ++nonzeros;
            }
            if (nonzeros > quota) return false;
        }
    }
    return true;
}

CompressedMatrix encode(const DenseMatrix& m, SparsityLevel level) {
    const auto g = static_cast<std::size_t>(group_size(level));
    const auto quota = static_cast<std::size_t>(nonzeros_per_group(level));

    CompressedMatrix c;
    c.level = level;
    c.precision = m.precision;
    c.rows = m.rows;
    c.original_cols = m.cols;
    c.logical_cols = padded_cols(m.cols, level);
    c.values.reserve(m.rows * c.entries_per_row());
    c.indices.reserve(m.rows * c.entries_per_row());

    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t base = 0, group = 0; base < c.logical_cols; base += g, ++group) {
            RawScalar slot_value[4] = {0, 0, 0, 0};
            bool stored[4] = {false, false, false, false};
            std::size_t nonzeros = 0;
            for (std::size_t i = 0; i < g; ++i) {
                std::size_t col = base + i;
                RawScalar v = col < m.cols ? canonical_raw(m.precision, m.at(r, col)) : 0;
                if (raw_is_zero(m.precision, v)) continue;
                if (nonzeros == quota) throw PatternViolation(r, group, "too many non-zeros");
                slot_value[i] = v;
                stored[i] = true;
                ++nonzeros;
            }
            // Canonical zero-fill: explicit zeros at the smallest unused
            // positions, merged so indices stay strictly increasing.
            for (std::size_t i = 0; nonzeros < quota; ++i) {
                if (stored[i]) continue;
                stored[i] = true;
                ++nonzeros;
            }
            for (std::size_t i = 0; i < g; ++i) {
                if (!stored[i]) continue;
                c.values.push_back(slot_value[i]);
                c.indices.push_back(static_cast<std::uint8_t>(i));
            }
        }
    }
    return c;
}

DenseMatrix decode(const CompressedMatrix& c) {
    const auto g = static_cast<std::size_t>(group_size(c.level));
    const auto quota = static_cast<std::size_t>(nonzeros_per_group(c.level));
    DenseMatrix m(c.precision, c.rows, c.logical_cols);
    std::size_t e = 0;
    for (std::size_t r = 0; r < c.rows; ++r) {
        for (std::size_t base = 0; base < c.logical_cols; base += g) {
            for (std::size_t i = 0; i < quota; ++i, ++e) {
                std::uint8_t idx = c.indices[e];
                if (idx >= g) {
                    throw IndexOutOfGroup("index " + std::to_string(idx) +
                                          " outside group of " + std::to_string(g));
                }
                RawScalar v = c.values[e];
                if (!raw_is_zero(c.precision, v)) m.at(r, base + idx) = v;
            }
        }
    }
    return m;
}

DenseMatrix prune_magnitude(const DenseMatrix& m, SparsityLevel level) {
    const auto g = static_cast<std::size_t>(group_size(level));
    const auto quota = static_cast<std::size_t>(nonzeros_per_group(level));
    DenseMatrix out = m;
    for (auto& v : out.data) v = canonical_raw(out.precision, v);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t base = 0; base < m.cols; base += g) {
            std::size_t n = std::min(g, m.cols - base);
            // Rank positions by |value| descending; equal magnitudes keep the
            // lower position.
            std::size_t order[4];
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            std::stable_sort(order, order + n, [&](std::size_t a, std::size_t b) {
                return std::abs(raw_to_double(m.precision, m.at(r, base + a))) >
                       std::abs(raw_to_double(m.precision, m.at(r, base + b)));
            });
            for (std::size_t k = quota; k < n; ++k) out.at(r, base + order[k]) = 0;
        }
    }
    return out;
}

double compression_ratio(SparsityLevel level, Precision p) {
    if (!is_sparse(level)) return 1.0;
    double dense_bits = static_cast<double>(group_size(level)) * value_bits(p);
    double packed_bits =
        static_cast<double>(nonzeros_per_group(level)) * (value_bits(p) + kIndexBits);
    return dense_bits / packed_bits;
}

double bitmap_compression_ratio(SparsityLevel level, Precision p) {
    double dense_bits = static_cast<double>(group_size(level)) * value_bits(p);
    double packed_bits = static_cast<double>(group_size(level)) +
                         static_cast<double>(nonzeros_per_group(level)) * value_bits(p);
    return dense_bits / packed_bits;
}

void validate_compressed(const CompressedMatrix& c) {
    if (!is_sparse(c.level)) throw SchemaError("compressed matrix cannot be dense level");
    const auto g = static_cast<std::size_t>(group_size(c.level));
    const auto quota = static_cast<std::size_t>(nonzeros_per_group(c.level));
    if (c.logical_cols % g != 0) {
        throw SchemaError("logical_cols must be a multiple of the group size");
    }
    if (c.original_cols > c.logical_cols) {
        throw SchemaError("original_cols exceeds logical_cols");
    }
    std::size_t expected = c.rows * c.entries_per_row();
    if (c.values.size() != expected || c.indices.size() != expected) {
        throw SchemaError("value/index payload size mismatch");
    }
    for (std::size_t e = 0; e < c.indices.size(); ++e) {
        if (c.indices[e] >= g) throw SchemaError("position index outside group");
        if (quota > 1 && e % quota != 0 && c.indices[e] <= c.indices[e - 1]) {
            throw SchemaError("group indices not strictly increasing");
        }
    }
}

}  // namespace sst
