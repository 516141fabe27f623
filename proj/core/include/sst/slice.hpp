// slice.hpp - one systolic sparse tensor slice: a 4x4 SPE grid, static
// triangular setup delays on the A/B edges, and the six-register extraction
// buffer that turns diagonal completions into column-wise output.
//
// SPEs finish a tile along anti-diagonals. Captured results stage per column;
// when the bottom SPE of a column captures, that column is emitted (four
// values in one cycle), giving valid_out runs of exactly four cycles per tile
// and at most six live results in the buffer at any time.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sst/errors.hpp"
#include "sst/matrix.hpp"
#include "sst/spe.hpp"
#include "sst/trace.hpp"

namespace sst {

constexpr int kExtractBufferSlots = 6;

struct SliceConfig {
    bool systolic_setup_a = true;  // row r delayed r cycles at the A interface
    bool systolic_setup_b = true;  // column c delayed c cycles at the B interface
};

struct SliceInputs {
    std::array<ABundle, 4> a{};  // one lane per SPE row
    std::array<BBundle, 4> b{};  // one lane per SPE column
    bool enable = true;
};

struct SliceOutputs {
    std::array<ABundle, 4> a_out{};      // to the right neighbor
    std::array<BBundle, 4> b_ded_out{};  // dedicated vertical wires, down neighbor
    std::array<std::uint32_t, 4> c_data{};
    bool valid_out = false;
    std::uint8_t c_column = 0;   // which output column c_data carries
    std::uint64_t c_wave = 0;    // completed-tile ordinal for this slice
    bool accumulate_out = true;  // accumulate flag re-emitted on the chain
};

class Slice {
public:
    Slice(const SliceConfig& config, SparsityLevel level, Precision precision);

    // Tile-boundary reconfiguration; throws ConfigError while beats are in flight.
    void set_mode(SparsityLevel level, Precision precision);
    void reset();

    SliceOutputs step(const SliceInputs& in);

    void set_trace(TraceSink* sink, int slice_id);

    SparsityLevel level() const { return level_; }
    Precision precision() const { return precision_; }
    std::uint64_t cycles() const { return cycle_; }
    std::uint64_t mac_count() const { return mac_count_; }
    int buffer_occupancy() const;
    const Spe& spe(int r, int c) const;

private:
    struct Stage {
        std::array<std::uint32_t, 4> values{};
        int received = 0;
        std::uint64_t wave = 0;
    };

    void handle_capture(int r, int c, std::uint32_t bits, SliceOutputs& out);

    SliceConfig config_;
    SparsityLevel level_ = SparsityLevel::kDense;
    Precision precision_ = Precision::kInt8;

    std::array<Spe, 16> pes_;
    std::array<std::vector<ABundle>, 4> delay_a_;
    std::array<std::size_t, 4> delay_a_pos_{};
    std::array<std::vector<BBundle>, 4> delay_b_;
    std::array<std::size_t, 4> delay_b_pos_{};
    std::array<std::array<ABundle, 4>, 4> h_fwd_{};
    std::array<std::array<BBundle, 4>, 4> v_fwd_{};
    std::array<Stage, 4> stage_;

    bool streaming_ = false;
    std::uint64_t cycle_ = 0;
    std::uint64_t mac_count_ = 0;
    TraceSink* trace_ = nullptr;
    int slice_id_ = 0;
};

// Drives one slice through a full 4xKx4 tile (plus drain) and reads the
// resulting accumulator block. With accumulate_chain the block adds onto the
// accumulators left by the previous tile.
struct TileRunResult {
    AccumMatrix block;
    std::uint64_t steady_cycles_per_tile = 0;
    std::uint64_t total_cycles = 0;
};

TileRunResult slice_run_tile(Slice& slice, const CompressedMatrix& a_tile,
                             const DenseMatrix& b_tile, bool accumulate_chain = false);
TileRunResult slice_run_tile(Slice& slice, const DenseMatrix& a_tile,
                             const DenseMatrix& b_tile, bool accumulate_chain = false);

}  // namespace sst
