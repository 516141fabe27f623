#include "sst/spe.hpp"

#include <bit>
#include <string>

namespace sst {

void Spe::configure(SparsityLevel mode, Precision precision) {
    mode_ = mode;
    precision_ = precision;
    a_stage_ = ABundle{};
    b_hold_ = {};
    b_hold_count_ = 0;
    b_hold_valid_ = false;
    phase_ = 0;
    acc_int_ = 0;
    acc_float_ = 0.0f;
    acc_seeded_ = false;
}

std::uint32_t Spe::accumulator_bits() const {
    return precision_ == Precision::kInt8 ? static_cast<std::uint32_t>(acc_int_)
                                          : std::bit_cast<std::uint32_t>(acc_float_);
}

void Spe::mac(const ABundle& a, const BBundle& direct_b, SpeOutputs& out) {
    if (!a.valid) return;

    RawScalar b_raw;
    if (mode_ == SparsityLevel::kDense) {
        b_raw = direct_b.values[0];
    } else if (mode_ == SparsityLevel::k2of4) {
        if (a.index >= 4 || !b_hold_valid_) {
            throw IndexOutOfGroup("2:4 index " + std::to_string(a.index) + " with " +
                                  (b_hold_valid_ ? "held group" : "no held group"));
        }
        b_raw = b_hold_[a.index];
    } else {
        // 1:3 / 1:4 select directly from the arriving group; the index never
        // reaches a dead lane (position 3 in 1:3 is rejected here).
        if (a.index >= expected_b_count(mode_) || a.index >= group_size(mode_)) {
            throw IndexOutOfGroup("index " + std::to_string(a.index) + " invalid for " +
                                  std::string(to_string(mode_)));
        }
        b_raw = direct_b.values[a.index];
    }

    if (precision_ == Precision::kInt8) {
        std::int32_t product = static_cast<std::int32_t>(raw_to_int8(a.value)) *
                               static_cast<std::int32_t>(raw_to_int8(b_raw));
        if (a.accumulate && acc_seeded_) {
            acc_int_ += product;
        } else {
            // The deasserted flag consumes this cycle's operands: the old
            // result (if any) leaves and the accumulator restarts at a*b.
            if (!a.accumulate && acc_seeded_) {
                out.capture = SpeCapture{true, static_cast<std::uint32_t>(acc_int_)};
            }
            acc_int_ = product;
        }
    } else {
        float product = bf16_to_float(a.value) * bf16_to_float(b_raw);
        if (a.accumulate && acc_seeded_) {
            acc_float_ += product;
        } else {
            if (!a.accumulate && acc_seeded_) {
                out.capture = SpeCapture{true, std::bit_cast<std::uint32_t>(acc_float_)};
            }
            acc_float_ = product;
        }
    }
    acc_seeded_ = true;
    out.mac_executed = true;
}

SpeOutputs Spe::step(const SpeInput& in) {
    if (!in.enable) return SpeOutputs{};  // stalled: no state change, nothing forwarded

    if (in.b.valid && in.b.count != expected_b_count(mode_)) {
        throw ArityMismatch("expected " + std::to_string(expected_b_count(mode_)) +
                            " B values in " + std::string(to_string(mode_)) + " mode, got " +
                            std::to_string(in.b.count));
    }
    if (in.a.valid != in.b.valid) {
        // Lanes run in lockstep; drain beats are invalid on both sides.
        throw ArityMismatch("A/B beats out of lockstep");
    }

    SpeOutputs out;
    out.a_forward = in.a;
    out.b_forward = in.b;

    if (mode_ == SparsityLevel::k2of4) {
        // MAC consumes the staged beat; its group was latched on the even beat.
        mac(a_stage_, in.b, out);
        a_stage_ = in.a;
        if (in.b.valid) {
            if (phase_ % 2 == 0) {
                b_hold_ = in.b.values;
                b_hold_count_ = in.b.count;
                b_hold_valid_ = true;
            }
            phase_ ^= 1;
        }
    } else {
        mac(in.a, in.b, out);
        if (in.b.valid) {  // hold registers reload every cycle in these modes
            b_hold_ = in.b.values;
            b_hold_count_ = in.b.count;
            b_hold_valid_ = true;
        }
    }
    return out;
}

}  // namespace sst
