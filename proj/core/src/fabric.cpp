#include "sst/fabric.hpp"

#include <algorithm>
#include <cassert>
#include <memory>

#include "sst/errors.hpp"
#include "sst/sparse_format.hpp"

namespace sst {

namespace {

constexpr std::size_t kMaxReduction = 1u << 17;  // int32 accumulators cannot wrap below this
constexpr std::size_t kMinTileBeats = 4;         // extraction needs four cycles per tile

std::size_t round_up(std::size_t v, std::size_t multiple) {
    return (v + multiple - 1) / multiple * multiple;
}

struct Geometry {
    SparsityLevel level;
    Precision precision;
    int y, x;
    std::size_t m, k, n;     // original
    std::size_t mp, kp, np;  // padded
    std::size_t tm, tn, tiles;
    std::size_t entries;      // beats per output tile (K-hat / speedup)
    std::size_t slot_period;  // max(entries, 4): extraction-bound tiles stretch
    std::size_t flush_slot;
    std::size_t g, quota;
    std::uint8_t b_count;
};

Geometry make_geometry(const FabricConfig& cfg, const GemmProblem& p, bool auto_pad) {
    Geometry geo;
    geo.level = p.a_level;
    geo.precision = cfg.precision;
    geo.y = cfg.y;
    geo.x = cfg.x;
    geo.m = p.m;
    geo.k = p.k;
    geo.n = p.n;
    geo.g = static_cast<std::size_t>(group_size(p.a_level));
    geo.quota = static_cast<std::size_t>(nonzeros_per_group(p.a_level));
    geo.b_count = expected_b_count(p.a_level);

    const auto native_rows = static_cast<std::size_t>(cfg.native_rows());
    const auto native_cols = static_cast<std::size_t>(cfg.native_cols());
    geo.mp = round_up(p.m, native_rows);
    geo.np = round_up(p.n, native_cols);
    geo.kp = round_up(p.k, geo.g);
    if (!auto_pad && (geo.mp != p.m || geo.np != p.n || geo.kp != p.k)) {
        throw DimensionError("problem " + std::to_string(p.m) + "x" + std::to_string(p.k) +
                             "x" + std::to_string(p.n) + " is not aligned to the native " +
                             std::to_string(native_rows) + "x" + std::to_string(native_cols) +
                             " size and auto-padding is disabled");
    }
    if (geo.kp > kMaxReduction) {
        throw ConfigError("reduction dimension exceeds the no-overflow bound");
    }

    geo.tm = geo.mp / native_rows;
    geo.tn = geo.np / native_cols;
    geo.tiles = geo.tm * geo.tn;
    geo.entries = geo.kp / static_cast<std::size_t>(speedup_factor(p.a_level));
    geo.slot_period = std::max(geo.entries, kMinTileBeats);
    geo.flush_slot = geo.tiles * geo.slot_period;
    return geo;
}

// Uniform beat-addressable view of the A operand: compressed entries for the
// sparse levels, unit groups for dense.
struct StreamA {
    std::size_t entries_per_row = 0;
    std::vector<RawScalar> values;
    std::vector<std::uint8_t> indices;
};

StreamA build_stream_a(const Geometry& geo, const GemmProblem& p) {
    StreamA s;
    if (!is_sparse(geo.level)) {
        const DenseMatrix& a = *p.a_dense;
        s.entries_per_row = geo.kp;  // g == 1
        s.values.assign(geo.mp * geo.kp, 0);
        s.indices.assign(geo.mp * geo.kp, 0);
        for (std::size_t r = 0; r < a.rows; ++r) {
            for (std::size_t c = 0; c < a.cols; ++c) {
                s.values[r * geo.kp + c] = canonical_raw(a.precision, a.at(r, c));
            }
        }
        return s;
    }

    CompressedMatrix comp;
    if (p.a_compressed) {
        comp = *p.a_compressed;
        validate_compressed(comp);
    } else {
        comp = encode(*p.a_dense, geo.level);  // throws PatternViolation on bad input
    }
    s.entries_per_row = comp.entries_per_row();
    s.values = std::move(comp.values);
    s.indices = std::move(comp.indices);
    // Row padding: canonical zero-fill rows up to the native multiple.
    s.values.resize(geo.mp * s.entries_per_row, 0);
    s.indices.resize(geo.mp * s.entries_per_row, 0);
    for (std::size_t r = comp.rows; r < geo.mp; ++r) {
        for (std::size_t e = 0; e < s.entries_per_row; ++e) {
            s.indices[r * s.entries_per_row + e] = static_cast<std::uint8_t>(e % geo.quota);
        }
    }
    return s;
}

DenseMatrix build_padded_b(const Geometry& geo, const DenseMatrix& b) {
    DenseMatrix padded(geo.precision, geo.kp, geo.np);
    for (std::size_t r = 0; r < b.rows; ++r) {
        for (std::size_t c = 0; c < b.cols; ++c) {
            padded.at(r, c) = canonical_raw(b.precision, b.at(r, c));
        }
    }
    return padded;
}

struct SlotRef {
    bool valid = false;   // carries a beat this cycle
    bool flush = false;   // the drain beat that ejects the final tile
    std::size_t tile = 0;
    std::size_t beat = 0;  // position within the tile's reduction stream
};

SlotRef classify_slot(const Geometry& geo, std::int64_t slot) {
    SlotRef ref;
    if (slot < 0) return ref;
    const auto s = static_cast<std::size_t>(slot);
    if (s == geo.flush_slot) {
        ref.valid = true;
        ref.flush = true;
        return ref;
    }
    if (s > geo.flush_slot) return ref;
    ref.tile = s / geo.slot_period;
    ref.beat = s % geo.slot_period;
    ref.valid = ref.beat < geo.entries;  // beats past the reduction are bubbles
    return ref;
}

struct TeeTrace : TraceSink {
    TraceSink* first;
    TraceSink* second;
    TeeTrace(TraceSink* a, TraceSink* b) : first(a), second(b) {}
    void on_mac(std::uint64_t cycle, int s, int p) override {
        first->on_mac(cycle, s, p);
        second->on_mac(cycle, s, p);
    }
    void on_capture(std::uint64_t cycle, int s, int p, std::uint32_t v) override {
        first->on_capture(cycle, s, p, v);
        second->on_capture(cycle, s, p, v);
    }
    void on_emit(std::uint64_t cycle, int s, int c, std::uint64_t w) override {
        first->on_emit(cycle, s, c, w);
        second->on_emit(cycle, s, c, w);
    }
    void on_buffer(std::uint64_t cycle, int s, int o) override {
        first->on_buffer(cycle, s, o);
        second->on_buffer(cycle, s, o);
    }
};

// Bank bookkeeping shared by run_gemm and bank_schedule.
class BankTracker {
public:
    BankTracker(const FabricConfig& cfg, const Geometry& geo) : cfg_(cfg), geo_(geo) {
        layout_ = BankLayout::for_config(cfg);
        const bool sparse_layout = cfg.capability == FabricCapability::kDynamicSparse;
        b_banks_per_chain_ = sparse_layout ? 4 : 1;
        for (int sy = 0; sy < cfg.y; ++sy) {
            banks_.push_back({"A[" + std::to_string(sy) + "]", layout_.a_width_bits, 0, 0});
        }
        b_base_ = banks_.size();
        for (int sx = 0; sx < cfg.x; ++sx) {
            for (int i = 0; i < b_banks_per_chain_; ++i) {
                std::string name = b_banks_per_chain_ == 1
                                       ? "B[" + std::to_string(sx) + "]"
                                       : "B[" + std::to_string(sx) + "," + std::to_string(i) + "]";
                banks_.push_back({name, layout_.b_width_bits, 0, 0});
            }
        }
        c_base_ = banks_.size();
        for (int sy = 0; sy < cfg.y; ++sy) {
            for (int sx = 0; sx < cfg.x; ++sx) {
                banks_.push_back({"C[" + std::to_string(sy) + "," + std::to_string(sx) + "]",
                                  layout_.c_width_bits, 0, 0});
            }
        }
    }

    void record(std::size_t bank, int bits, std::vector<std::pair<int, int>>* window_row) {
        BankActivity& act = banks_[bank];
        ++act.reads;
        act.peak_bits_per_cycle = std::max(act.peak_bits_per_cycle, bits);
        if (bits > act.width_bits) {
            throw BandwidthInfeasible(act.name + " needs " + std::to_string(bits) +
                                      " bits in one cycle, width is " +
                                      std::to_string(act.width_bits));
        }
        if (window_row) window_row->emplace_back(static_cast<int>(bank), bits);
    }

    // A-side read for slice row sy injecting a real beat this cycle.
    void read_a(int sy, std::vector<std::pair<int, int>>* w) {
        const bool indices = is_sparse(geo_.level);
        int bits = 4 * value_bits(cfg_.precision) + (indices ? 4 * kIndexBits : 0);
        record(static_cast<std::size_t>(sy), bits, w);
    }

    // B-side reads for chain sx on a beat that starts a new group.
    void read_b(int sx, std::vector<std::pair<int, int>>* w) {
        int live = live_b_banks();
        for (int i = 0; i < live; ++i) {
            std::size_t bank = b_base_ + static_cast<std::size_t>(sx) *
                                             static_cast<std::size_t>(b_banks_per_chain_) +
                               static_cast<std::size_t>(i);
            record(bank, 4 * value_bits(cfg_.precision), w);
        }
    }

    void write_c(int sy, int sx, std::vector<std::pair<int, int>>* w) {
        std::size_t bank =
            c_base_ + static_cast<std::size_t>(sy) * static_cast<std::size_t>(cfg_.x) +
            static_cast<std::size_t>(sx);
        record(bank, 128, w);
    }

    // Dense uses one bank per chain; 1:3 leaves the fourth bank idle.
    int live_b_banks() const {
        if (!is_sparse(geo_.level)) return 1;
        return std::min<int>(static_cast<int>(geo_.g), b_banks_per_chain_);
    }

    std::vector<BankActivity> take() { return std::move(banks_); }

private:
    const FabricConfig& cfg_;
    const Geometry& geo_;
    BankLayout layout_{};
    int b_banks_per_chain_ = 1;
    std::size_t b_base_ = 0;
    std::size_t c_base_ = 0;
    std::vector<BankActivity> banks_;
};

}  // namespace

GemmProblem GemmProblem::from_dense(SparsityLevel level, DenseMatrix a, DenseMatrix b) {
    if (a.cols != b.rows) throw DimensionError("A columns must match B rows");
    GemmProblem p;
    p.a_level = level;
    p.m = a.rows;
    p.k = a.cols;
    p.n = b.cols;
    p.a_dense = std::move(a);
    p.b = std::move(b);
    return p;
}

GemmProblem GemmProblem::from_compressed(CompressedMatrix a, DenseMatrix b) {
    validate_compressed(a);
    if (a.logical_cols != round_up(b.rows, static_cast<std::size_t>(group_size(a.level)))) {
        throw DimensionError("compressed A logical columns must match padded B rows");
    }
    GemmProblem p;
    p.a_level = a.level;
    p.m = a.rows;
    p.k = b.rows;
    p.n = b.cols;
    p.a_compressed = std::move(a);
    p.b = std::move(b);
    return p;
}

GemmProblem GemmProblem::random(Precision prec, SparsityLevel level, std::size_t m,
                                std::size_t k, std::size_t n, std::uint64_t seed) {
    DenseMatrix a = make_random_pattern_dense(prec, m, k, level, seed);
    DenseMatrix b = make_random_dense(prec, k, n, seed ^ 0x9e3779b97f4a7c15ull);
    return from_dense(level, std::move(a), std::move(b));
}

BankLayout BankLayout::for_config(const FabricConfig& cfg) {
    const bool sparse_layout = cfg.capability == FabricCapability::kDynamicSparse;
    BankLayout layout;
    layout.a_banks = cfg.y;
    layout.a_width_bits = 4 * value_bits(cfg.precision) + (sparse_layout ? 4 * kIndexBits : 0);
    layout.b_banks = sparse_layout ? 4 * cfg.x : cfg.x;
    layout.b_width_bits = 4 * value_bits(cfg.precision);
    layout.c_banks = cfg.x * cfg.y;
    layout.c_width_bits = 128;
    layout.depth = cfg.bank_depth;
    return layout;
}

BramCounts count_brams(const FabricConfig& cfg) {
    const BankLayout layout = BankLayout::for_config(cfg);
    auto brams_per_bank = [&](int width_bits) {
        auto words = static_cast<int>((layout.depth + 511) / 512);
        return (width_bits + 39) / 40 * words;
    };
    BramCounts counts;
    counts.a = layout.a_banks * brams_per_bank(layout.a_width_bits);
    counts.b = layout.b_banks * brams_per_bank(layout.b_width_bits);
    counts.c = layout.c_banks * brams_per_bank(layout.c_width_bits);
    counts.total = counts.a + counts.b + counts.c;
    return counts;
}

Fabric::Fabric(const FabricConfig& cfg) : cfg_(cfg) {
    if (cfg.y < 1 || cfg.x < 1) throw ConfigError("fabric needs at least one slice");
}

GemmResult Fabric::run_gemm(const GemmProblem& problem, const GemmRunOptions& options) {
    if (is_sparse(problem.a_level) && cfg_.capability == FabricCapability::kDenseOnly) {
        throw CapabilityError("dense-only fabric cannot run a " +
                              std::string(to_string(problem.a_level)) + " tile");
    }
    if (problem.m == 0 || problem.k == 0 || problem.n == 0) {
        throw DimensionError("GEMM dimensions must be positive");
    }

    const Geometry geo = make_geometry(cfg_, problem, options.auto_pad);
    const StreamA stream = build_stream_a(geo, problem);
    const DenseMatrix b = build_padded_b(geo, problem.b);

    std::unique_ptr<TraceAudit> audit;
    std::unique_ptr<TeeTrace> tee;
    TraceSink* sink = options.trace;
    if (options.audit) {
        audit = std::make_unique<TraceAudit>();
        if (sink) {
            tee = std::make_unique<TeeTrace>(sink, audit.get());
            sink = tee.get();
        } else {
            sink = audit.get();
        }
    }

    // Slice grid; setup triangles only on the two feeding edges.
    std::vector<Slice> slices;
    slices.reserve(static_cast<std::size_t>(cfg_.y * cfg_.x));
    for (int sy = 0; sy < cfg_.y; ++sy) {
        for (int sx = 0; sx < cfg_.x; ++sx) {
            SliceConfig sc{sx == 0, sy == 0};
            slices.emplace_back(sc, problem.a_level, cfg_.precision);
            if (sink) slices.back().set_trace(sink, sy * cfg_.x + sx);
        }
    }
    auto slice_at = [&](int sy, int sx) -> Slice& {
        return slices[static_cast<std::size_t>(sy * cfg_.x + sx)];
    };

    BankTracker bank_tracker(cfg_, geo);
    AccumMatrix padded_c(cfg_.precision, geo.mp, geo.np);
    const std::uint64_t expected_emissions =
        static_cast<std::uint64_t>(geo.tiles) * 4u *
        static_cast<std::uint64_t>(cfg_.y * cfg_.x);
    std::uint64_t emissions = 0;
    std::uint64_t total_macs = 0;
    std::uint64_t enabled_cycles = 0;
    std::uint64_t cycle = 0;

    std::vector<SliceOutputs> prev(slices.size());
    std::vector<SliceOutputs> next(slices.size());

    const std::uint64_t hard_bound =
        geo.flush_slot + 4ull * static_cast<std::uint64_t>(cfg_.y + cfg_.x) + 64;

    auto a_edge_beat = [&](int sy, int r, std::int64_t slot) -> ABundle {
        SlotRef ref = classify_slot(geo, slot);
        if (!ref.valid) return ABundle{};
        if (ref.flush) return ABundle{0, 0, false, true};
        const std::size_t m_t = ref.tile % geo.tm;
        const std::size_t row = m_t * static_cast<std::size_t>(cfg_.native_rows()) +
                                static_cast<std::size_t>(4 * sy + r);
        const std::size_t e = row * stream.entries_per_row + ref.beat;
        return ABundle{stream.values[e], stream.indices[e], ref.beat != 0, true};
    };
    auto b_edge_beat = [&](int sx, int c, std::int64_t slot) -> BBundle {
        SlotRef ref = classify_slot(geo, slot);
        if (!ref.valid) return BBundle{};
        BBundle bb;
        bb.count = geo.b_count;
        bb.valid = true;
        if (ref.flush) return bb;  // zero group ejects the last tile
        const std::size_t n_t = ref.tile / geo.tm;
        const std::size_t col = n_t * static_cast<std::size_t>(cfg_.native_cols()) +
                                static_cast<std::size_t>(4 * sx + c);
        const std::size_t group = ref.beat / geo.quota;
        for (std::size_t i = 0; i < geo.b_count; ++i) {
            bb.values[i] = b.at(group * geo.g + i, col);
        }
        return bb;
    };

    while (emissions < expected_emissions) {
        if (cycle > hard_bound && !options.stall) {
            throw Error("fabric did not drain within the expected cycle bound");
        }
        if (options.stall && options.stall(cycle)) {
            ++cycle;
            continue;
        }
        const auto t = static_cast<std::int64_t>(enabled_cycles);

        for (int sy = 0; sy < cfg_.y; ++sy) {
            for (int sx = 0; sx < cfg_.x; ++sx) {
                SliceInputs in;
                if (sx == 0) {
                    const std::int64_t slot = t - 4 * sy;
                    for (int r = 0; r < 4; ++r) in.a[r] = a_edge_beat(sy, r, slot);
                    SlotRef ref = classify_slot(geo, slot);
                    if (ref.valid && !ref.flush) bank_tracker.read_a(sy, nullptr);
                } else {
                    in.a = prev[static_cast<std::size_t>(sy * cfg_.x + sx - 1)].a_out;
                }
                if (sy == 0) {
                    const std::int64_t slot = t - 4 * sx;
                    for (int c = 0; c < 4; ++c) in.b[c] = b_edge_beat(sx, c, slot);
                    SlotRef ref = classify_slot(geo, slot);
                    if (ref.valid && !ref.flush && ref.beat % geo.quota == 0) {
                        bank_tracker.read_b(sx, nullptr);
                    }
                } else {
                    in.b = prev[static_cast<std::size_t>((sy - 1) * cfg_.x + sx)].b_ded_out;
                }

                SliceOutputs out = slice_at(sy, sx).step(in);
                if (out.valid_out) {
                    const std::size_t tile = out.c_wave;
                    const std::size_t m_t = tile % geo.tm;
                    const std::size_t n_t = tile / geo.tm;
                    const std::size_t row0 =
                        m_t * static_cast<std::size_t>(cfg_.native_rows()) +
                        static_cast<std::size_t>(4 * sy);
                    const std::size_t col = n_t * static_cast<std::size_t>(cfg_.native_cols()) +
                                            static_cast<std::size_t>(4 * sx) + out.c_column;
                    for (std::size_t r = 0; r < 4; ++r) {
                        padded_c.raw_at(row0 + r, col) = out.c_data[r];
                    }
                    bank_tracker.write_c(sy, sx, nullptr);
                    ++emissions;
                }
                next[static_cast<std::size_t>(sy * cfg_.x + sx)] = out;
            }
        }
        std::swap(prev, next);
        ++enabled_cycles;
        ++cycle;
    }

    for (const Slice& s : slices) total_macs += s.mac_count();

    GemmResult result;
    result.cycles = cycle;
    result.steady_state_cycles_per_tile = geo.entries;
    result.output_tiles = geo.tiles;
    result.fill_drain_cycles = cycle - static_cast<std::uint64_t>(geo.tiles) * geo.slot_period;
    result.total_macs = total_macs;
    result.spe_busy_utilization =
        static_cast<double>(total_macs) /
        (16.0 * cfg_.y * cfg_.x * static_cast<double>(enabled_cycles));
    result.padding_efficiency = static_cast<double>(geo.m) * static_cast<double>(geo.k) *
                                static_cast<double>(geo.n) /
                                (static_cast<double>(geo.mp) * static_cast<double>(geo.kp) *
                                 static_cast<double>(geo.np));
    result.was_padded = geo.mp != geo.m || geo.np != geo.n || geo.kp != geo.k;
    result.padded_m = geo.mp;
    result.padded_k = geo.kp;
    result.padded_n = geo.np;
    result.brams = count_brams(cfg_);
    result.bank_activity = bank_tracker.take();

    // Padded rows/columns must have produced zero accumulators.
    for (std::size_t r = 0; r < geo.mp; ++r) {
        for (std::size_t c = 0; c < geo.np; ++c) {
            if (r < geo.m && c < geo.n) continue;
            bool zero = cfg_.precision == Precision::kInt8
                            ? padded_c.int_at(r, c) == 0
                            : padded_c.float_at(r, c) == 0.0f;
            if (!zero) throw Error("padded output region is not zero");
        }
    }
    result.c = AccumMatrix(cfg_.precision, geo.m, geo.n);
    for (std::size_t r = 0; r < geo.m; ++r) {
        for (std::size_t c = 0; c < geo.n; ++c) {
            result.c.raw_at(r, c) = padded_c.raw_at(r, c);
        }
    }
    result.checksum = checksum(result.c);

    if (audit) {
        result.max_buffer_occupancy = audit->max_buffer_occupancy();
        result.extraction_regular = audit->column_runs_regular();
        result.spe_activity_contiguous = audit->per_spe_contiguous();
    }
    return result;
}

BankSchedule bank_schedule(const FabricConfig& cfg, const GemmProblem& problem) {
    if (is_sparse(problem.a_level) && cfg.capability == FabricCapability::kDenseOnly) {
        throw CapabilityError("dense-only fabric cannot schedule a sparse problem");
    }
    const Geometry geo = make_geometry(cfg, problem, true);
    BankTracker tracker(cfg, geo);

    BankSchedule plan;
    plan.required_a_depth = geo.entries;
    plan.required_b_depth = geo.kp / geo.g;
    plan.window_cycles = std::min<std::size_t>(geo.slot_period + 4, 64);
    plan.window.resize(plan.window_cycles);

    const std::uint64_t feed_cycles =
        geo.flush_slot + 4ull * static_cast<std::uint64_t>(std::max(cfg.y, cfg.x) - 1) + 1;
    for (std::uint64_t t = 0; t < feed_cycles; ++t) {
        auto* row = t < plan.window_cycles ? &plan.window[t] : nullptr;
        for (int sy = 0; sy < cfg.y; ++sy) {
            SlotRef ref = classify_slot(geo, static_cast<std::int64_t>(t) - 4 * sy);
            if (ref.valid && !ref.flush) tracker.read_a(sy, row);
        }
        for (int sx = 0; sx < cfg.x; ++sx) {
            SlotRef ref = classify_slot(geo, static_cast<std::int64_t>(t) - 4 * sx);
            if (ref.valid && !ref.flush && ref.beat % geo.quota == 0) {
                tracker.read_b(sx, row);
            }
        }
    }
    plan.feed_cycles = feed_cycles;
    plan.banks = tracker.take();
    plan.feasible = true;
    for (const auto& bank : plan.banks) {
        if (bank.peak_bits_per_cycle > bank.width_bits) plan.feasible = false;
    }
    return plan;
}

std::uint64_t calibrate_fill_drain(const FabricConfig& cfg, SparsityLevel level) {
    const auto k = static_cast<std::size_t>(8 * speedup_factor(level));
    GemmProblem p = GemmProblem::random(cfg.precision, level,
                                        static_cast<std::size_t>(cfg.native_rows()), k,
                                        static_cast<std::size_t>(cfg.native_cols()), 7);
    Fabric fabric(cfg);
    GemmResult r = fabric.run_gemm(p);
    return r.cycles - r.output_tiles * r.steady_state_cycles_per_tile;
}

}  // namespace sst
