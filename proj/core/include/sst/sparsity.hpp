// sparsity.hpp - supported structured-sparsity levels and operand precisions.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sst {

// N:M structured sparsity of the A operand. Every group of group_size
// consecutive row elements holds at most nonzeros_per_group non-zeros.
enum class SparsityLevel : std::uint8_t {
    kDense = 0,
    k2of4 = 1,
    k1of3 = 2,
    k1of4 = 3,
};

constexpr int group_size(SparsityLevel level) {
    switch (level) {
        case SparsityLevel::kDense: return 1;
        case SparsityLevel::k2of4: return 4;
        case SparsityLevel::k1of3: return 3;
        case SparsityLevel::k1of4: return 4;
    }
    return 1;
}

constexpr int nonzeros_per_group(SparsityLevel level) {
    switch (level) {
        case SparsityLevel::kDense: return 1;
        case SparsityLevel::k2of4: return 2;
        case SparsityLevel::k1of3: return 1;
        case SparsityLevel::k1of4: return 1;
    }
    return 1;
}

// Cycle-count advantage over dense operation: group_size / nonzeros_per_group.
constexpr int speedup_factor(SparsityLevel level) {
    return group_size(level) / nonzeros_per_group(level);
}

constexpr bool is_sparse(SparsityLevel level) { return level != SparsityLevel::kDense; }

std::string_view to_string(SparsityLevel level);
std::optional<SparsityLevel> parse_sparsity_level(std::string_view text);

enum class Precision : std::uint8_t {
    kInt8 = 0,
    kBfloat16 = 1,
};

constexpr int value_bits(Precision p) { return p == Precision::kInt8 ? 8 : 16; }

// int8 accumulates into int32, bfloat16 into IEEE fp32; both are 32-bit words.
constexpr int accumulator_bits(Precision) { return 32; }

std::string_view to_string(Precision p);
std::optional<Precision> parse_precision(std::string_view text);

constexpr std::uint8_t kIndexBits = 2;  // per-value position index in the compressed format

}  // namespace sst
