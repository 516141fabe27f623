#include "sst/slice.hpp"

#include <string>

namespace sst {

namespace {

constexpr int kGrid = 4;

}  // namespace

Slice::Slice(const SliceConfig& config, SparsityLevel level, Precision precision)
    : config_(config) {
    set_mode(level, precision);
}

void Slice::set_mode(SparsityLevel level, Precision precision) {
    if (streaming_) {
        throw ConfigError("sparsity level / precision may only change at tile boundaries");
    }
    level_ = level;
    precision_ = precision;
    reset();
}

void Slice::reset() {
    for (auto& pe : pes_) pe.configure(level_, precision_);
    for (int r = 0; r < kGrid; ++r) {
        delay_a_[r].assign(static_cast<std::size_t>(config_.systolic_setup_a ? r : 0),
                           ABundle{});
        delay_a_pos_[r] = 0;
    }
    for (int c = 0; c < kGrid; ++c) {
        delay_b_[c].assign(static_cast<std::size_t>(config_.systolic_setup_b ? c : 0),
                           BBundle{});
        delay_b_pos_[c] = 0;
    }
    for (auto& row : h_fwd_) row.fill(ABundle{});
    for (auto& row : v_fwd_) row.fill(BBundle{});
    for (auto& st : stage_) st = Stage{};
    streaming_ = false;
    cycle_ = 0;
    mac_count_ = 0;
}

void Slice::set_trace(TraceSink* sink, int slice_id) {
    trace_ = sink;
    slice_id_ = slice_id;
}

int Slice::buffer_occupancy() const {
    int live = 0;
    for (const auto& st : stage_) live += st.received;
    return live;
}

void Slice::handle_capture(int r, int c, std::uint32_t bits, SliceOutputs& out) {
    Stage& st = stage_[c];
    if (st.received != r) {
        throw ExtractOverflow("extraction stage for column " + std::to_string(c) +
                              " expected row " + std::to_string(st.received) + ", got " +
                              std::to_string(r));
    }
    if (trace_) trace_->on_capture(cycle_ - 1, slice_id_, r * kGrid + c, bits);
    if (r < kGrid - 1) {
        st.values[static_cast<std::size_t>(r)] = bits;
        st.received = r + 1;
        return;
    }
    // Bottom row completes the column: the three buffered values leave with the
    // fresh one, so the slot pressure never exceeds the six-register budget.
    if (out.valid_out) {
        throw ExtractOverflow("two columns completed in one cycle");
    }
    out.c_data = {st.values[0], st.values[1], st.values[2], bits};
    out.valid_out = true;
    out.c_column = static_cast<std::uint8_t>(c);
    out.c_wave = st.wave;
    st.received = 0;
    ++st.wave;
    if (trace_) trace_->on_emit(cycle_ - 1, slice_id_, c, out.c_wave);
}

SliceOutputs Slice::step(const SliceInputs& in) {
    if (!in.enable) return SliceOutputs{};  // global stall: freeze every register
    ++cycle_;

    std::array<ABundle, 4> a_in;
    std::array<BBundle, 4> b_in;
    for (int r = 0; r < kGrid; ++r) {
        if (delay_a_[r].empty()) {
            a_in[r] = in.a[r];
        } else {
            auto& line = delay_a_[r];
            auto& pos = delay_a_pos_[r];
            a_in[r] = line[pos];
            line[pos] = in.a[r];
            pos = (pos + 1) % line.size();
        }
        if (in.a[r].valid) streaming_ = true;
    }
    for (int c = 0; c < kGrid; ++c) {
        if (delay_b_[c].empty()) {
            b_in[c] = in.b[c];
        } else {
            auto& line = delay_b_[c];
            auto& pos = delay_b_pos_[c];
            b_in[c] = line[pos];
            line[pos] = in.b[c];
            pos = (pos + 1) % line.size();
        }
    }

    SliceOutputs out;
    std::array<std::array<ABundle, 4>, 4> next_h;
    std::array<std::array<BBundle, 4>, 4> next_v;
    for (int r = 0; r < kGrid; ++r) {
        for (int c = 0; c < kGrid; ++c) {
            SpeInput si;
            si.a = c == 0 ? a_in[r] : h_fwd_[r][c - 1];
            si.b = r == 0 ? b_in[c] : v_fwd_[r - 1][c];
            SpeOutputs so = pes_[static_cast<std::size_t>(r * kGrid + c)].step(si);
            next_h[r][c] = so.a_forward;
            next_v[r][c] = so.b_forward;
            if (so.mac_executed) {
                ++mac_count_;
                if (trace_) trace_->on_mac(cycle_ - 1, slice_id_, r * kGrid + c);
            }
            if (so.capture.valid) handle_capture(r, c, so.capture.result_bits, out);
        }
    }
    h_fwd_ = next_h;
    v_fwd_ = next_v;

    for (int r = 0; r < kGrid; ++r) out.a_out[r] = next_h[r][kGrid - 1];
    for (int c = 0; c < kGrid; ++c) out.b_ded_out[c] = next_v[kGrid - 1][c];
    out.accumulate_out = out.a_out[0].valid ? out.a_out[0].accumulate : true;

    int live = buffer_occupancy();
    if (live > kExtractBufferSlots) {
        throw ExtractOverflow("extraction buffer holds " + std::to_string(live) + " results");
    }
    if (trace_) trace_->on_buffer(cycle_ - 1, slice_id_, live);
    return out;
}

const Spe& Slice::spe(int r, int c) const {
    return pes_[static_cast<std::size_t>(r * kGrid + c)];
}

TileRunResult slice_run_tile(Slice& slice, const CompressedMatrix& a_tile,
                             const DenseMatrix& b_tile, bool accumulate_chain) {
    if (a_tile.rows != 4) throw DimensionError("tile A must have 4 rows");
    if (a_tile.logical_cols != b_tile.rows) throw DimensionError("tile K mismatch");
    if (b_tile.cols != 4) throw DimensionError("tile B must have 4 columns");

    const auto g = static_cast<std::size_t>(group_size(a_tile.level));
    const auto quota = static_cast<std::size_t>(nonzeros_per_group(a_tile.level));
    const std::size_t beats = a_tile.entries_per_row();
    const std::uint8_t b_count = expected_b_count(a_tile.level);

    TileRunResult result;
    result.steady_cycles_per_tile = beats;

    // Feed the tile's beats followed by enough bubbles to drain the grid.
    const std::size_t total_steps = beats + 16;
    for (std::size_t s = 0; s < total_steps; ++s) {
        SliceInputs in;
        if (s < beats) {
            for (std::size_t r = 0; r < 4; ++r) {
                const std::size_t e = r * beats + s;
                in.a[r] = ABundle{a_tile.values[e], a_tile.indices[e],
                                  accumulate_chain || s != 0, true};
            }
            const std::size_t group = s / quota;
            for (std::size_t c = 0; c < 4; ++c) {
                BBundle bb;
                bb.count = b_count;
                bb.valid = true;
                for (std::size_t i = 0; i < b_count; ++i) {
                    std::size_t k = group * g + i;
                    bb.values[i] = k < b_tile.rows ? b_tile.at(k, c) : RawScalar{0};
                }
                in.b[c] = bb;
            }
        }
        SliceOutputs out = slice.step(in);
        if (out.valid_out) {
            // A non-chained tile pushes the previous accumulators out; the
            // caller of the previous run already holds them.
        }
        result.total_cycles = s + 1;
    }

    result.block = AccumMatrix(a_tile.precision, 4, 4);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            result.block.raw_at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
                slice.spe(r, c).accumulator_bits();
        }
    }
    return result;
}

TileRunResult slice_run_tile(Slice& slice, const DenseMatrix& a_tile,
                             const DenseMatrix& b_tile, bool accumulate_chain) {
    if (a_tile.rows != 4) throw DimensionError("tile A must have 4 rows");
    // Dense tiles ride the same driver through a unit-group compressed view.
    CompressedMatrix view;
    view.level = SparsityLevel::kDense;
    view.precision = a_tile.precision;
    view.rows = a_tile.rows;
    view.logical_cols = a_tile.cols;
    view.original_cols = a_tile.cols;
    view.values = a_tile.data;
    view.indices.assign(a_tile.data.size(), 0);
    return slice_run_tile(slice, view, b_tile, accumulate_chain);
}

}  // namespace sst
