// reference_values.hpp - loader for the versioned data file holding the
// published reference results this project reproduces (storage ratios,
// design frequencies, BRAM counts, effective throughput, network speedups).
#pragma once

#include <string>
#include <vector>

#include "sst/sparsity.hpp"

namespace sst {

struct SparsitySummaryRow {
    SparsityLevel level;
    double compression_int8;
    double compression_bfloat16;
    int speedup;
};

struct GemmDesignRow {
    std::string design;  // "sst", "dense_baseline" or "clb_dsp"
    Precision precision;
    double frequency_mhz;
    int brams;
    double effective_tops;
    SparsityLevel throughput_level;  // level credited in the throughput figure
};

struct NetworkReferenceRow {
    std::string network;
    std::string config;
    std::string file;  // network spec path relative to the data directory
    double speedup;
    double weight_reduction_int8;
    double weight_reduction_bfloat16;
};

struct ReferenceValues {
    int version = 0;
    std::string description;
    std::vector<SparsitySummaryRow> sparsity_summary;
    std::vector<GemmDesignRow> gemm_designs;
    std::vector<NetworkReferenceRow> network_speedups;
    double index_over_bitmap_1of4_int8 = 0.0;
    double index_over_bitmap_1of4_bfloat16 = 0.0;

    static ReferenceValues load(const std::string& path);
};

// Data directory resolution: explicit argument, then $SST_DATA_DIR, then the
// location configured at build time.
std::string default_data_dir();

}  // namespace sst
