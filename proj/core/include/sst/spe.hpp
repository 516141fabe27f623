// spe.hpp - cycle-level model of one sparse processing element.
//
// Timing model, common to the whole grid: neighbor forwarding always costs one
// cycle (realized by the synchronous exchange between step() calls). In dense,
// 1:3 and 1:4 modes the MAC consumes the operands of the arriving beat; in 2:4
// mode the A value and index pass through a second pipeline stage, so the MAC
// fires one cycle after arrival while the four B hold registers (reloaded
// every other beat) keep the group alive for both of its MACs.
//
// A beat's accumulate flag travels with the A bundle. A deasserted flag resets
// the accumulator to the fresh product and hands the previous value to the
// extraction logic in the same cycle, so back-to-back tiles lose no cycles.
#pragma once

#include <array>
#include <cstdint>

#include "sst/errors.hpp"
#include "sst/matrix.hpp"
#include "sst/sparsity.hpp"

namespace sst {

// One A-lane beat: compressed value + intra-group position (index unused in
// dense mode). valid=false marks a pipeline bubble; nothing is computed on it.
struct ABundle {
    RawScalar value = 0;
    std::uint8_t index = 0;
    bool accumulate = true;
    bool valid = false;
};

// One B-lane beat: the operand group for this column (1, 3 or 4 live values).
struct BBundle {
    std::array<RawScalar, 4> values{};
    std::uint8_t count = 0;
    bool valid = false;
};

struct SpeInput {
    ABundle a;
    BBundle b;
    bool enable = true;
};

struct SpeCapture {
    bool valid = false;
    std::uint32_t result_bits = 0;
};

struct SpeOutputs {
    ABundle a_forward;   // to the right neighbor (one-cycle hop via exchange)
    BBundle b_forward;   // to the lower neighbor
    SpeCapture capture;  // completed accumulator released by an accumulate reset
    bool mac_executed = false;
};

constexpr std::uint8_t expected_b_count(SparsityLevel mode) {
    switch (mode) {
        case SparsityLevel::kDense: return 1;
        case SparsityLevel::k2of4: return 4;
        case SparsityLevel::k1of3: return 3;
        case SparsityLevel::k1of4: return 4;
    }
    return 1;
}

class Spe {
public:
    Spe() = default;
    Spe(SparsityLevel mode, Precision precision) { configure(mode, precision); }

    // Static per-tile configuration; clears all pipeline state.
    void configure(SparsityLevel mode, Precision precision);

    SpeOutputs step(const SpeInput& in);

    SparsityLevel mode() const { return mode_; }
    Precision precision() const { return precision_; }
    std::uint32_t accumulator_bits() const;
    bool has_pipeline_state() const { return a_stage_.valid; }

private:
    void mac(const ABundle& a, const BBundle& direct_b, SpeOutputs& out);

    SparsityLevel mode_ = SparsityLevel::kDense;
    Precision precision_ = Precision::kInt8;

    ABundle a_stage_;                  // second A pipeline stage (2:4 mode only)
    std::array<RawScalar, 4> b_hold_{};  // operand hold registers
    std::uint8_t b_hold_count_ = 0;
    bool b_hold_valid_ = false;
    std::uint8_t phase_ = 0;  // beat parity for the 2:4 reload cadence

    std::int32_t acc_int_ = 0;
    float acc_float_ = 0.0f;
    bool acc_seeded_ = false;  // set by the first MAC; gates result capture
};

}  // namespace sst
