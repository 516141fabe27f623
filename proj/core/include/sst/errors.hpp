// errors.hpp - exception types thrown across the library.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sst {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A dense matrix does not satisfy the requested N:M pattern. Reports the first
// offending row/group.
struct PatternViolation : Error {
    PatternViolation(std::size_t row, std::size_t group, const std::string& detail)
        : Error("pattern violation at row " + std::to_string(row) + ", group " +
                std::to_string(group) + ": " + detail),
          row(row),
          group(group) {}
    std::size_t row;
    std::size_t group;
};

// A compressed matrix carries a position index outside its group (corrupt input).
struct IndexOutOfGroup : Error {
    using Error::Error;
};

// Operand lane arity does not match the configured sparsity mode.
struct ArityMismatch : Error {
    using Error::Error;
};

// A sparse tile was submitted to a dense-only fabric.
struct CapabilityError : Error {
    using Error::Error;
};

// Problem dimensions are not aligned to the native size and auto-padding is off.
struct DimensionError : Error {
    using Error::Error;
};

// The bank read plan cannot deliver operands within the declared widths.
struct BandwidthInfeasible : Error {
    using Error::Error;
};

// Internal scheduling bug: more than six live results in the extraction buffer.
struct ExtractOverflow : Error {
    using Error::Error;
};

// Malformed descriptor or report file.
struct SchemaError : Error {
    using Error::Error;
};

// Bad run configuration (unknown level names, non-positive sizes, ...).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace sst
