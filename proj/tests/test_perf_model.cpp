#include <doctest.h>

#include <cmath>

#include "sst/io.hpp"
#include "sst/perf_model.hpp"
#include "sst/reference_values.hpp"
#include "sst/sparse_format.hpp"

using namespace sst;

namespace {

const std::string kDataDir = SST_TEST_DATA_DIR;

PlatformSpec scaled_platform(int y, int x) {
    PlatformSpec p = PlatformSpec::sst_default();
    p.fabric.y = y;
    p.fabric.x = x;
    return p;
}

constexpr SparsityLevel kAllLevels[] = {SparsityLevel::kDense, SparsityLevel::k2of4,
                                        SparsityLevel::k1of3, SparsityLevel::k1of4};

}  // namespace

TEST_CASE("estimated compute cycles match the simulator exactly") {
    for (int grid : {1, 2}) {
        PlatformSpec platform = scaled_platform(grid, grid);
        for (SparsityLevel level : kAllLevels) {
            const auto g = static_cast<std::int64_t>(group_size(level));
            const std::int64_t shapes[][3] = {
                {4 * grid, g * 8, 4 * grid},
                {8 * grid, g * 16, 8 * grid},
                {4 * grid, g * 5, 8 * grid},
            };
            std::uint64_t constant = fill_drain_constant(platform.fabric, level);
            for (const auto& shape : shapes) {
                LayerSpec layer{"probe", shape[0], shape[1], shape[2], level, 1, true};
                LayerEstimate est = estimate_layer(layer, Precision::kInt8, platform);

                FabricConfig cfg = platform.fabric;
                cfg.precision = Precision::kInt8;
                Fabric fabric(cfg);
                GemmProblem p = GemmProblem::random(
                    Precision::kInt8, level, static_cast<std::size_t>(shape[0]),
                    static_cast<std::size_t>(shape[1]), static_cast<std::size_t>(shape[2]), 4);
                GemmResult r = fabric.run_gemm(p);
                CHECK(est.compute_cycles == r.cycles);
                // the constant is the same for every shape at this grid/level
                CHECK(r.cycles - r.output_tiles * std::max<std::uint64_t>(
                                     r.steady_state_cycles_per_tile, 4) == constant);
            }
        }
    }
}

TEST_CASE("closed-form compute term for the default platform") {
    PlatformSpec platform = PlatformSpec::sst_default();
    std::uint64_t constant = fill_drain_constant(platform.fabric, SparsityLevel::kDense);
    LayerSpec dense{"square160", 160, 160, 160, SparsityLevel::kDense, 1, true};
    LayerEstimate est = estimate_layer(dense, Precision::kInt8, platform);
    CHECK(est.compute_cycles - constant == 2560);  // (160/40)^2 * 160

    LayerSpec quarter = dense;
    quarter.level = SparsityLevel::k1of4;
    std::uint64_t sparse_constant = fill_drain_constant(platform.fabric, SparsityLevel::k1of4);
    LayerEstimate est4 = estimate_layer(quarter, Precision::kInt8, platform);
    CHECK(est4.compute_cycles - sparse_constant == 640);  // 4x compute speedup
}

TEST_CASE("weight traffic shrinks by the compression ratio") {
    PlatformSpec platform = PlatformSpec::sst_default();
    LayerSpec layer{"fc", 400, 400, 200, SparsityLevel::k2of4, 1, true};
    LayerEstimate est = estimate_layer(layer, Precision::kInt8, platform);
    CHECK(est.dense_weight_bytes == 400.0 * 400.0);
    CHECK(est.weight_bytes == doctest::Approx(400.0 * 400.0 / 1.6));
}

TEST_CASE("layer time is monotone in sparsity level and bandwidth") {
    PlatformSpec platform = PlatformSpec::sst_default();
    platform.dram_bw_bytes_per_s = 1e9;  // low enough that memory can bind
    double prev = 1e30;
    for (SparsityLevel level : kAllLevels) {
        LayerSpec layer{"probe", 400, 384, 400, level, 1, true};
        LayerEstimate est = estimate_layer(layer, Precision::kInt8, platform);
        CHECK(est.layer_time_s <= prev);
        CHECK(est.layer_time_s >= est.compute_time_s);
        CHECK(est.layer_time_s >= est.memory_time_s);
        prev = est.layer_time_s;

        PlatformSpec fast = platform;
        fast.dram_bw_bytes_per_s = 1e11;
        CHECK(estimate_layer(layer, Precision::kInt8, fast).layer_time_s <=
              est.layer_time_s);
    }
}

TEST_CASE("serial memory mode is never faster than overlapped") {
    PlatformSpec overlap = PlatformSpec::sst_default();
    PlatformSpec serial = overlap;
    serial.overlap_compute_memory = false;
    LayerSpec layer{"probe", 320, 768, 160, SparsityLevel::k1of3, 1, true};
    CHECK(estimate_layer(layer, Precision::kBfloat16, serial).layer_time_s >=
          estimate_layer(layer, Precision::kBfloat16, overlap).layer_time_s);
}

TEST_CASE("uniform single-level network reduces weights by exactly the format ratio") {
    NetworkSpec net;
    net.name = "uniform";
    net.precision = Precision::kInt8;
    net.layers.push_back(LayerSpec{"a", 80, 80, 80, SparsityLevel::k1of3, 3, true});
    net.layers.push_back(LayerSpec{"b", 120, 240, 40, SparsityLevel::k1of3, 2, true});
    NetworkEstimate est =
        estimate_network(net, PlatformSpec::sst_default(), PlatformSpec::dense_baseline());
    CHECK(est.weight_reduction ==
          doctest::Approx(compression_ratio(SparsityLevel::k1of3, Precision::kInt8))
              .epsilon(1e-12));
}

TEST_CASE("all-dense network speedup equals the clock ratio") {
    NetworkSpec net = load_network(kDataDir + "/networks/deit_small_dense.json");
    NetworkEstimate est =
        estimate_network(net, PlatformSpec::sst_default(), PlatformSpec::dense_baseline());
    CHECK(est.speedup == doctest::Approx(601.0 / 596.0).epsilon(1e-9));
    CHECK(est.weight_reduction == doctest::Approx(1.0));
}

TEST_CASE("speedup never exceeds the best layer factor times the clock ratio") {
    NetworkSpec net = load_network(kDataDir + "/networks/deit_base_1of4.json");
    NetworkEstimate est =
        estimate_network(net, PlatformSpec::sst_default(), PlatformSpec::dense_baseline());
    CHECK(est.speedup <= 4.0 * (601.0 / 596.0) + 1e-9);
}

TEST_CASE("published network speedups and weight reductions reproduce") {
    ReferenceValues rv = ReferenceValues::load(kDataDir + "/reference_values.json");
    for (const NetworkReferenceRow& row : rv.network_speedups) {
        NetworkSpec net = load_network(kDataDir + "/" + row.file);

        NetworkSpec int8_net = net;
        int8_net.precision = Precision::kInt8;
        NetworkEstimate i8 = estimate_network(int8_net, PlatformSpec::sst_default(),
                                              PlatformSpec::dense_baseline());
        CHECK(std::fabs(i8.speedup - row.speedup) / row.speedup < 0.15);
        CHECK(std::fabs(i8.weight_reduction - row.weight_reduction_int8) /
                  row.weight_reduction_int8 < 0.10);

        NetworkSpec bf16_net = net;
        bf16_net.precision = Precision::kBfloat16;
        NetworkEstimate bf16 = estimate_network(bf16_net, PlatformSpec::sst_default(),
                                                PlatformSpec::dense_baseline());
        CHECK(std::fabs(bf16.speedup - row.speedup) / row.speedup < 0.15);
        CHECK(std::fabs(bf16.weight_reduction - row.weight_reduction_bfloat16) /
                  row.weight_reduction_bfloat16 < 0.10);
    }
}

TEST_CASE("effective throughput reproduces every published design point") {
    ReferenceValues rv = ReferenceValues::load(kDataDir + "/reference_values.json");
    REQUIRE(rv.gemm_designs.size() == 6);
    for (const GemmDesignRow& row : rv.gemm_designs) {
        FabricConfig cfg{10, 10, row.precision, FabricCapability::kDynamicSparse, 512,
                         row.frequency_mhz * 1e6};
        double tops =
            effective_throughput_tops(cfg, row.frequency_mhz * 1e6, row.throughput_level);
        CHECK(std::fabs(tops - row.effective_tops) / row.effective_tops < 0.005);
    }
    // formula spot check: 2 * 40 * 40 * f * speedup
    FabricConfig cfg{10, 10, Precision::kInt8, FabricCapability::kDynamicSparse, 512, 601e6};
    CHECK(effective_throughput_tops(cfg, 601e6, SparsityLevel::k1of4) ==
          doctest::Approx(2.0 * 1600 * 601e6 * 4 / 1e12).epsilon(1e-12));
}
