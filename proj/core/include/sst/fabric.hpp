// fabric.hpp - parametric Y x X grid of SST slices with banked A/B/C buffers,
// dedicated vertical B chains, and the tiling controller for arbitrary
// M' x K' x N' GEMM problems.
//
// The controller is output-stationary: each output tile streams its full
// reduction back-to-back (accumulate deasserted exactly once per tile) and
// tiles follow each other with no idle beats. Coarse systolic skew (4 cycles
// per slice row/column) comes from staggered bank schedules; the in-slice
// setup triangles add the fine 0..3 skew on the two feeding edges.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sst/matrix.hpp"
#include "sst/slice.hpp"
#include "sst/sparsity.hpp"
#include "sst/trace.hpp"

namespace sst {

enum class FabricCapability : std::uint8_t {
    kDenseOnly,      // SDT_GIO-like baseline: accepts only dense tiles
    kDynamicSparse,  // dynamically configured dense / 2:4 / 1:3 / 1:4
};

struct FabricConfig {
    int y = 1;  // slice rows
    int x = 1;  // slice columns
    Precision precision = Precision::kInt8;
    FabricCapability capability = FabricCapability::kDynamicSparse;
    std::size_t bank_depth = 512;
    double frequency_hz = 601e6;

    int native_rows() const { return 4 * y; }
    int native_cols() const { return 4 * x; }
};

struct GemmProblem {
    SparsityLevel a_level = SparsityLevel::kDense;
    std::size_t m = 0, k = 0, n = 0;
    // Exactly one of the two A forms is set.
    std::optional<DenseMatrix> a_dense;
    std::optional<CompressedMatrix> a_compressed;
    DenseMatrix b;

    static GemmProblem from_dense(SparsityLevel level, DenseMatrix a, DenseMatrix b);
    static GemmProblem from_compressed(CompressedMatrix a, DenseMatrix b);
    // Seeded generator: values drawn first, then magnitude-pruned to the level.
    static GemmProblem random(Precision p, SparsityLevel level, std::size_t m,
                              std::size_t k, std::size_t n, std::uint64_t seed);
};

struct BankLayout {
    int a_banks;
    int a_width_bits;
    int b_banks;  // total across all chains
    int b_width_bits;
    int c_banks;
    int c_width_bits;
    std::size_t depth;

    static BankLayout for_config(const FabricConfig& cfg);
};

struct BramCounts {
    int a = 0;
    int b = 0;
    int c = 0;
    int total = 0;
};

// BRAMs per bank under the 512x40-bit primitive: ceil(width/40) * ceil(depth/512).
BramCounts count_brams(const FabricConfig& cfg);

struct BankActivity {
    std::string name;
    int width_bits = 0;
    std::uint64_t reads = 0;
    int peak_bits_per_cycle = 0;
};

struct BankSchedule {
    bool feasible = true;
    std::uint64_t feed_cycles = 0;
    std::size_t required_a_depth = 0;  // words per bank per output tile
    std::size_t required_b_depth = 0;
    std::vector<BankActivity> banks;
    // Per-cycle read plan for the first window_cycles cycles: (bank, bits).
    std::size_t window_cycles = 0;
    std::vector<std::vector<std::pair<int, int>>> window;
};

struct GemmRunOptions {
    bool auto_pad = true;
    // Test hook: cycles where the global enable is deasserted.
    std::function<bool(std::uint64_t)> stall = nullptr;
    TraceSink* trace = nullptr;
    bool audit = false;  // attach an internal TraceAudit (slower)
};

struct GemmResult {
    AccumMatrix c;  // trimmed to the original m x n
    std::uint64_t cycles = 0;
    std::uint64_t steady_state_cycles_per_tile = 0;
    std::uint64_t output_tiles = 0;
    std::uint64_t fill_drain_cycles = 0;
    std::uint64_t total_macs = 0;
    double spe_busy_utilization = 0.0;
    double padding_efficiency = 1.0;
    bool was_padded = false;
    std::size_t padded_m = 0, padded_k = 0, padded_n = 0;
    BramCounts brams;
    std::uint64_t checksum = 0;
    std::vector<BankActivity> bank_activity;
    // Populated when options.audit is set.
    int max_buffer_occupancy = 0;
    bool extraction_regular = false;
    bool spe_activity_contiguous = false;
};

class Fabric {
public:
    explicit Fabric(const FabricConfig& cfg);

    GemmResult run_gemm(const GemmProblem& problem, const GemmRunOptions& options = {});

    const FabricConfig& config() const { return cfg_; }

private:
    FabricConfig cfg_;
};

BankSchedule bank_schedule(const FabricConfig& cfg, const GemmProblem& problem);

// Total cycles beyond tiles * steady-state cycles: the pipeline fill/drain
// constant for this grid size and level. Measured by running a minimal
// problem through the simulator.
std::uint64_t calibrate_fill_drain(const FabricConfig& cfg, SparsityLevel level);

}  // namespace sst
