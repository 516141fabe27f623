// perf_model.hpp - analytical per-layer / per-network estimator: zero padding
// to the native array size, compute cycles from the tiling formula plus a
// fill/drain constant calibrated against the cycle simulator, compressed
// weight traffic, and a DRAM bandwidth bound.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sst/fabric.hpp"
#include "sst/sparsity.hpp"

namespace sst {

struct LayerSpec {
    std::string name;
    std::int64_t m = 0, k = 0, n = 0;  // A is m x k (weights side), B is k x n
    SparsityLevel level = SparsityLevel::kDense;
    std::int64_t count = 1;
    // False for GEMMs whose A operand is itself an activation (attention
    // score/context products): they carry no stored weights.
    bool weights = true;
};

struct NetworkSpec {
    std::string name;
    Precision precision = Precision::kInt8;
    std::vector<LayerSpec> layers;
    std::string source_note;
};

struct PlatformSpec {
    FabricConfig fabric;
    double dram_bw_bytes_per_s = 1e11;
    double frequency_hz_int8 = 601e6;
    double frequency_hz_bf16 = 578e6;
    // Compute and DRAM transfers overlap via double buffering (layer time is
    // the max of the two); serial mode sums them for sensitivity analysis.
    bool overlap_compute_memory = true;

    double frequency_for(Precision p) const {
        return p == Precision::kInt8 ? frequency_hz_int8 : frequency_hz_bf16;
    }

    static PlatformSpec sst_default();
    static PlatformSpec dense_baseline();
};

struct LayerEstimate {
    std::string name;
    SparsityLevel level = SparsityLevel::kDense;
    std::int64_t count = 1;
    std::int64_t m = 0, k = 0, n = 0;
    std::int64_t padded_m = 0, padded_k = 0, padded_n = 0;
    std::uint64_t compute_cycles = 0;  // per instance
    double dense_weight_bytes = 0.0;   // padded A at full precision
    double weight_bytes = 0.0;         // padded A in the compressed format
    double activation_bytes = 0.0;     // B in + C out at value precision
    double compute_time_s = 0.0;
    double memory_time_s = 0.0;
    double layer_time_s = 0.0;  // per instance
    bool weights = true;
};

struct NetworkEstimate {
    std::string network;
    Precision precision = Precision::kInt8;
    double total_time_s = 0.0;
    double baseline_time_s = 0.0;
    double speedup = 0.0;
    double weight_reduction = 0.0;
    std::vector<LayerEstimate> layers;
    std::vector<LayerEstimate> baseline_layers;
};

LayerEstimate estimate_layer(const LayerSpec& layer, Precision precision,
                             const PlatformSpec& platform);

// Baseline evaluates every layer dense (zeros retained) on its own clocks.
NetworkEstimate estimate_network(const NetworkSpec& network, const PlatformSpec& platform,
                                 const PlatformSpec& baseline);

// Native-size throughput credited with the sparsity speedup, in TOPs.
double effective_throughput_tops(const FabricConfig& fabric, double frequency_hz,
                                 SparsityLevel level);

// Memoized fill/drain constant per (grid size, level); first use per key runs
// the cycle simulator once.
std::uint64_t fill_drain_constant(const FabricConfig& fabric, SparsityLevel level);

}  // namespace sst
