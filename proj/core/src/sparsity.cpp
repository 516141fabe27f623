#include "sst/sparsity.hpp"

namespace sst {

std::string_view to_string(SparsityLevel level) {
    switch (level) {
        case SparsityLevel::kDense: return "dense";
        case SparsityLevel::k2of4: return "2:4";
        case SparsityLevel::k1of3: return "1:3";
        case SparsityLevel::k1of4: return "1:4";
    }
    return "dense";
}

std::optional<SparsityLevel> parse_sparsity_level(std::string_view text) {
    if (text == "dense" || text == "Dense") return SparsityLevel::kDense;
    if (text == "2:4" || text == "2of4") return SparsityLevel::k2of4;
    if (text == "1:3" || text == "1of3") return SparsityLevel::k1of3;
    if (text == "1:4" || text == "1of4") return SparsityLevel::k1of4;
    return std::nullopt;
}

std::string_view to_string(Precision p) {
    return p == Precision::kInt8 ? "int8" : "bfloat16";
}

std::optional<Precision> parse_precision(std::string_view text) {
    if (text == "int8" || text == "i8") return Precision::kInt8;
    if (text == "bfloat16" || text == "bf16") return Precision::kBfloat16;
    return std::nullopt;
}

}  // namespace sst
