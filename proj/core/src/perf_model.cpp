#include "sst/perf_model.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

#include "sst/errors.hpp"
#include "sst/sparse_format.hpp"

namespace sst {

namespace {

std::int64_t round_up(std::int64_t v, std::int64_t multiple) {
    return (v + multiple - 1) / multiple * multiple;
}

}  // namespace

PlatformSpec PlatformSpec::sst_default() {
    PlatformSpec p;
    p.fabric = FabricConfig{10, 10, Precision::kInt8, FabricCapability::kDynamicSparse, 512,
                            601e6};
    return p;
}

PlatformSpec PlatformSpec::dense_baseline() {
    PlatformSpec p;
    p.fabric = FabricConfig{10, 10, Precision::kInt8, FabricCapability::kDenseOnly, 512,
                            596e6};
    p.frequency_hz_int8 = 596e6;
    p.frequency_hz_bf16 = 580e6;
    return p;
}

std::uint64_t fill_drain_constant(const FabricConfig& fabric, SparsityLevel level) {
    static std::mutex mutex;
    static std::map<std::tuple<int, int, SparsityLevel>, std::uint64_t> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_tuple(fabric.y, fabric.x, level);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    // The constant is timing-structural, so calibrate on the cheap precision.
    FabricConfig probe = fabric;
    probe.precision = Precision::kInt8;
    std::uint64_t constant = calibrate_fill_drain(probe, level);
    cache.emplace(key, constant);
    return constant;
}

LayerEstimate estimate_layer(const LayerSpec& layer, Precision precision,
                             const PlatformSpec& platform) {
    if (layer.m <= 0 || layer.k <= 0 || layer.n <= 0 || layer.count <= 0) {
        throw ConfigError("layer '" + layer.name + "' has non-positive dimensions");
    }
    const FabricConfig& fabric = platform.fabric;
    const auto g = static_cast<std::int64_t>(group_size(layer.level));
    const auto speedup = static_cast<std::int64_t>(speedup_factor(layer.level));

    LayerEstimate e;
    e.name = layer.name;
    e.level = layer.level;
    e.count = layer.count;
    e.m = layer.m;
    e.k = layer.k;
    e.n = layer.n;
    e.weights = layer.weights;
    e.padded_m = round_up(layer.m, fabric.native_rows());
    e.padded_n = round_up(layer.n, fabric.native_cols());
    e.padded_k = round_up(layer.k, g);

    const std::int64_t tiles =
        (e.padded_m / fabric.native_rows()) * (e.padded_n / fabric.native_cols());
    // Tiles shorter than the four extraction cycles are output-port bound.
    const std::int64_t beats = std::max<std::int64_t>(e.padded_k / speedup, 4);
    e.compute_cycles = static_cast<std::uint64_t>(tiles * beats) +
                       fill_drain_constant(fabric, layer.level);

    const double bytes_per_value = value_bits(precision) / 8.0;
    e.dense_weight_bytes =
        static_cast<double>(e.padded_m) * static_cast<double>(e.padded_k) * bytes_per_value;
    e.weight_bytes = e.dense_weight_bytes / compression_ratio(layer.level, precision);
    e.activation_bytes = (static_cast<double>(e.padded_k) + static_cast<double>(e.padded_m)) *
                         static_cast<double>(e.padded_n) * bytes_per_value;

    e.compute_time_s =
        static_cast<double>(e.compute_cycles) / platform.frequency_for(precision);
    e.memory_time_s = (e.weight_bytes + e.activation_bytes) / platform.dram_bw_bytes_per_s;
    e.layer_time_s = platform.overlap_compute_memory
                         ? std::max(e.compute_time_s, e.memory_time_s)
                         : e.compute_time_s + e.memory_time_s;
    return e;
}

NetworkEstimate estimate_network(const NetworkSpec& network, const PlatformSpec& platform,
                                 const PlatformSpec& baseline) {
    if (network.layers.empty()) throw ConfigError("network has no layers");

    NetworkEstimate out;
    out.network = network.name;
    out.precision = network.precision;

    double dense_weight_total = 0.0;
    double compressed_weight_total = 0.0;
    for (const LayerSpec& layer : network.layers) {
        LayerEstimate sparse_est = estimate_layer(layer, network.precision, platform);
        LayerSpec dense_layer = layer;
        dense_layer.level = SparsityLevel::kDense;
        LayerEstimate base_est = estimate_layer(dense_layer, network.precision, baseline);

        out.total_time_s += sparse_est.layer_time_s * static_cast<double>(layer.count);
        out.baseline_time_s += base_est.layer_time_s * static_cast<double>(layer.count);
        if (layer.weights) {
            dense_weight_total +=
                sparse_est.dense_weight_bytes * static_cast<double>(layer.count);
            compressed_weight_total +=
                sparse_est.weight_bytes * static_cast<double>(layer.count);
        }
        out.layers.push_back(std::move(sparse_est));
        out.baseline_layers.push_back(std::move(base_est));
    }
    out.speedup = out.baseline_time_s / out.total_time_s;
    out.weight_reduction =
        compressed_weight_total > 0.0 ? dense_weight_total / compressed_weight_total : 1.0;
    return out;
}

double effective_throughput_tops(const FabricConfig& fabric, double frequency_hz,
                                 SparsityLevel level) {
    return 2.0 * fabric.native_rows() * fabric.native_cols() * frequency_hz *
           speedup_factor(level) / 1e12;
}

}  // namespace sst
