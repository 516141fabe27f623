#include <doctest.h>

#include <array>
#include <vector>

#include "sst/sparse_format.hpp"
#include "sst/slice.hpp"
#include "support/oracles.hpp"

using namespace sst;

namespace {

struct SliceStream {
    std::array<std::vector<ABundle>, 4> a;
    std::array<std::vector<BBundle>, 4> b;
    std::size_t beats = 0;
};

// Flat (un-skewed) beat streams for one 4xKx4 tile; the slice's setup
// triangles provide the systolic skew.
SliceStream make_slice_stream(const DenseMatrix& a_tile, const DenseMatrix& b_tile,
                              SparsityLevel level, bool deassert_first) {
    const auto g = static_cast<std::size_t>(group_size(level));
    const auto quota = static_cast<std::size_t>(nonzeros_per_group(level));
    SliceStream s;
    for (std::size_t r = 0; r < 4; ++r) {
        auto entries = oracle::canonical_stream(a_tile, r, level);
        s.beats = entries.size();
        for (std::size_t e = 0; e < entries.size(); ++e) {
            s.a[r].push_back(ABundle{entries[e].value, entries[e].position,
                                     !(deassert_first && e == 0), true});
        }
    }
    for (std::size_t c = 0; c < 4; ++c) {
        for (std::size_t e = 0; e < s.beats; ++e) {
            BBundle bb;
            bb.count = expected_b_count(level);
            bb.valid = true;
            for (std::size_t i = 0; i < bb.count; ++i) {
                std::size_t k = (e / quota) * g + i;
                bb.values[i] = k < b_tile.rows ? b_tile.at(k, c) : RawScalar{0};
            }
            s.b[c].push_back(bb);
        }
    }
    return s;
}

struct Emission {
    std::uint64_t step;
    int column;
    std::uint64_t wave;
    std::array<std::uint32_t, 4> values;
};

// Streams the tiles back-to-back, then a flush wave, then drains.
std::vector<Emission> drive(Slice& slice, const std::vector<SliceStream>& tiles,
                            std::size_t drain = 20) {
    std::vector<Emission> emissions;
    std::uint64_t step = 0;
    auto do_step = [&](const SliceInputs& in) {
        SliceOutputs out = slice.step(in);
        if (out.valid_out) {
            emissions.push_back(Emission{step, out.c_column, out.c_wave, out.c_data});
        }
        ++step;
    };
    for (const SliceStream& tile : tiles) {
        for (std::size_t e = 0; e < tile.beats; ++e) {
            SliceInputs in;
            for (std::size_t r = 0; r < 4; ++r) in.a[r] = tile.a[r][e];
            for (std::size_t c = 0; c < 4; ++c) in.b[c] = tile.b[c][e];
            do_step(in);
        }
    }
    SliceInputs flush;
    for (std::size_t r = 0; r < 4; ++r) flush.a[r] = ABundle{0, 0, false, true};
    for (std::size_t c = 0; c < 4; ++c) {
        flush.b[c].count = tiles.front().b[c][0].count;
        flush.b[c].valid = true;
    }
    do_step(flush);
    for (std::size_t i = 0; i < drain; ++i) do_step(SliceInputs{});
    return emissions;
}

AccumMatrix read_block(const Slice& slice) {
    AccumMatrix block(slice.precision(), 4, 4);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            block.raw_at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
                slice.spe(r, c).accumulator_bits();
        }
    }
    return block;
}

}  // namespace

TEST_CASE("identity tile copies B through, extracted column-major") {
    DenseMatrix a = DenseMatrix::identity(Precision::kInt8, 4);
    DenseMatrix b = make_random_dense(Precision::kInt8, 4, 4, 50);
    Slice slice(SliceConfig{}, SparsityLevel::kDense, Precision::kInt8);
    auto emissions = drive(slice, {make_slice_stream(a, b, SparsityLevel::kDense, true)});

    REQUIRE(emissions.size() == 4);
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(emissions[j].column == static_cast<int>(j));
        CHECK(emissions[j].wave == 0);
        if (j > 0) CHECK(emissions[j].step == emissions[j - 1].step + 1);
        for (std::size_t r = 0; r < 4; ++r) {
            CHECK(static_cast<std::int32_t>(emissions[j].values[r]) ==
                  static_cast<std::int32_t>(raw_to_int8(b.at(r, j))));
        }
    }
}

TEST_CASE("sparse tile block matches the reference product bit-exactly") {
    for (SparsityLevel level : {SparsityLevel::k2of4, SparsityLevel::k1of3,
                                SparsityLevel::k1of4}) {
        for (Precision p : {Precision::kInt8, Precision::kBfloat16}) {
            const std::size_t k = 8 * static_cast<std::size_t>(group_size(level));
            DenseMatrix a = make_random_pattern_dense(p, 4, k, level, 61);
            DenseMatrix b = make_random_dense(p, k, 4, 62);
            Slice slice(SliceConfig{}, level, p);
            TileRunResult run = slice_run_tile(slice, encode(a, level), b, false);
            CHECK(run.steady_cycles_per_tile ==
                  k / static_cast<std::size_t>(speedup_factor(level)));
            CHECK(oracle::bits_equal(run.block, oracle::gemm(a, b, level)));
        }
    }
}

TEST_CASE("tile cycle counts follow K/speedup") {
    DenseMatrix a = make_random_dense(Precision::kInt8, 4, 32, 70);
    DenseMatrix b = make_random_dense(Precision::kInt8, 32, 4, 71);
    Slice slice(SliceConfig{}, SparsityLevel::kDense, Precision::kInt8);
    CHECK(slice_run_tile(slice, a, b, false).steady_cycles_per_tile == 32);

    DenseMatrix a24 = prune_magnitude(a, SparsityLevel::k2of4);
    Slice slice24(SliceConfig{}, SparsityLevel::k2of4, Precision::kInt8);
    CHECK(slice_run_tile(slice24, encode(a24, SparsityLevel::k2of4), b, false)
              .steady_cycles_per_tile == 16);
}

TEST_CASE("back-to-back tiles: full utilization, regular extraction, small buffer") {
    const SparsityLevel level = SparsityLevel::k1of4;
    const std::size_t k = 16;  // four beats per tile
    DenseMatrix a1 = make_random_pattern_dense(Precision::kInt8, 4, k, level, 81);
    DenseMatrix a2 = make_random_pattern_dense(Precision::kInt8, 4, k, level, 82);
    DenseMatrix b = make_random_dense(Precision::kInt8, k, 4, 83);

    Slice slice(SliceConfig{}, level, Precision::kInt8);
    TraceAudit audit;
    slice.set_trace(&audit, 0);
    auto emissions = drive(slice, {make_slice_stream(a1, b, level, true),
                                   make_slice_stream(a2, b, level, true)});

    REQUIRE(emissions.size() == 8);  // two waves of four columns
    CHECK(audit.column_runs_regular());
    CHECK(audit.max_buffer_occupancy() <= kExtractBufferSlots);
    CHECK(audit.per_spe_contiguous());
    // every SPE MACs every cycle between pipeline fill and the last beat
    CHECK(audit.all_busy(6, 7, 16));
    for (std::size_t j = 0; j < 4; ++j) {
        for (std::size_t r = 0; r < 4; ++r) {
            CHECK(static_cast<std::int32_t>(emissions[j].values[r]) ==
                  static_cast<std::int32_t>(oracle::gemm(a1, b, level).raw_at(r, j)));
            CHECK(static_cast<std::int32_t>(emissions[4 + j].values[r]) ==
                  static_cast<std::int32_t>(oracle::gemm(a2, b, level).raw_at(r, j)));
        }
    }
}

TEST_CASE("setup triangles are equivalent to pre-skewed feeds") {
    const SparsityLevel level = SparsityLevel::k2of4;
    const std::size_t k = 16;
    DenseMatrix a = make_random_pattern_dense(Precision::kInt8, 4, k, level, 91);
    DenseMatrix b = make_random_dense(Precision::kInt8, k, 4, 92);
    SliceStream s = make_slice_stream(a, b, level, true);

    // The flush wave overwrites the accumulators, so both runs compare the
    // emitted columns rather than reading the grid afterwards.
    Slice with_setup(SliceConfig{true, true}, level, Precision::kInt8);
    auto em_flat = drive(with_setup, {s});

    Slice skewed(SliceConfig{false, false}, level, Precision::kInt8);
    std::vector<Emission> em_skew;
    std::uint64_t step = 0;
    const std::size_t total = s.beats + 1 + 24;
    for (std::size_t t = 0; t < total; ++t) {
        SliceInputs in;
        for (std::size_t r = 0; r < 4; ++r) {
            std::int64_t beat = static_cast<std::int64_t>(t) - static_cast<std::int64_t>(r);
            if (beat >= 0 && beat < static_cast<std::int64_t>(s.beats)) {
                in.a[r] = s.a[r][static_cast<std::size_t>(beat)];
            } else if (beat == static_cast<std::int64_t>(s.beats)) {
                in.a[r] = ABundle{0, 0, false, true};
            }
        }
        for (std::size_t c = 0; c < 4; ++c) {
            std::int64_t beat = static_cast<std::int64_t>(t) - static_cast<std::int64_t>(c);
            if (beat >= 0 && beat < static_cast<std::int64_t>(s.beats)) {
                in.b[c] = s.b[c][static_cast<std::size_t>(beat)];
            } else if (beat == static_cast<std::int64_t>(s.beats)) {
                in.b[c].count = s.b[c][0].count;
                in.b[c].valid = true;
            }
        }
        SliceOutputs out = skewed.step(in);
        if (out.valid_out) em_skew.push_back(Emission{step, out.c_column, out.c_wave, out.c_data});
        ++step;
    }
    REQUIRE(em_flat.size() == 4);
    REQUIRE(em_skew.size() == 4);
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(em_flat[j].column == em_skew[j].column);
        CHECK(em_flat[j].values == em_skew[j].values);
    }
}

TEST_CASE("accumulator chaining adds tile products") {
    const std::size_t k = 8;
    DenseMatrix a1 = make_random_dense(Precision::kInt8, 4, k, 101);
    DenseMatrix a2 = make_random_dense(Precision::kInt8, 4, k, 102);
    DenseMatrix b1 = make_random_dense(Precision::kInt8, k, 4, 103);
    DenseMatrix b2 = make_random_dense(Precision::kInt8, k, 4, 104);

    Slice slice(SliceConfig{}, SparsityLevel::kDense, Precision::kInt8);
    slice_run_tile(slice, a1, b1, false);
    TileRunResult chained = slice_run_tile(slice, a2, b2, true);

    auto r1 = oracle::gemm_i64(a1, b1);
    auto r2 = oracle::gemm_i64(a2, b2);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            CHECK(chained.block.int_at(r, c) ==
                  static_cast<std::int32_t>(r1[r * 4 + c] + r2[r * 4 + c]));
        }
    }
}

TEST_CASE("accumulate flag re-emits on the output chain") {
    DenseMatrix a = make_random_dense(Precision::kInt8, 4, 8, 111);
    DenseMatrix b = make_random_dense(Precision::kInt8, 8, 4, 112);
    SliceStream s = make_slice_stream(a, b, SparsityLevel::kDense, true);
    Slice slice(SliceConfig{}, SparsityLevel::kDense, Precision::kInt8);
    int deasserts = 0;
    for (std::size_t e = 0; e < s.beats; ++e) {
        SliceInputs in;
        for (std::size_t r = 0; r < 4; ++r) in.a[r] = s.a[r][e];
        for (std::size_t c = 0; c < 4; ++c) in.b[c] = s.b[c][e];
        SliceOutputs out = slice.step(in);
        if (out.a_out[0].valid && !out.accumulate_out) ++deasserts;
    }
    for (std::size_t i = 0; i < 8; ++i) {
        SliceOutputs out = slice.step(SliceInputs{});
        if (out.a_out[0].valid && !out.accumulate_out) ++deasserts;
    }
    CHECK(deasserts == 1);  // exactly one deassert per tile crosses to the neighbor
}

TEST_CASE("sparsity level changes are rejected mid-tile") {
    Slice slice(SliceConfig{}, SparsityLevel::k1of4, Precision::kInt8);
    SliceInputs in;
    in.a[0] = ABundle{raw_from_int8(3), 0, false, true};
    for (std::size_t c = 0; c < 4; ++c) {
        in.b[c].count = 4;
        in.b[c].valid = true;
    }
    in.a[1] = in.a[2] = in.a[3] = in.a[0];
    slice.step(in);
    CHECK_THROWS_AS(slice.set_mode(SparsityLevel::kDense, Precision::kInt8), ConfigError);
    slice.reset();
    CHECK_NOTHROW(slice.set_mode(SparsityLevel::kDense, Precision::kInt8));
}
