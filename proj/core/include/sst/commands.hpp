// commands.hpp - the operations behind the command-line front end. Each
// command returns the process exit code: 0 success, 1 usage/config error,
// 2 verification failure. Reports are deterministic: identical options and
// seeds produce byte-identical output.
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "sst/sparsity.hpp"

namespace sst {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitVerification = 2,
};

enum class ReportFormat { kJson, kCsv };

// Default platform constants, after environment overrides (SST_DRAM_BW,
// SST_FREQ_INT8_MHZ, SST_FREQ_BF16_MHZ, SST_BASELINE_FREQ_INT8_MHZ,
// SST_BASELINE_FREQ_BF16_MHZ).
struct PlatformOverrides {
    std::optional<int> y, x;
    std::optional<double> frequency_int8_mhz, frequency_bf16_mhz;
    std::optional<double> baseline_frequency_int8_mhz, baseline_frequency_bf16_mhz;
    std::optional<double> dram_bw_bytes_per_s;
    std::optional<std::size_t> bank_depth;
    bool serial_memory = false;
};

struct SimOptions {
    int y = 1, x = 1;
    Precision precision = Precision::kInt8;
    SparsityLevel level = SparsityLevel::kDense;
    std::size_t m = 4, k = 16, n = 4;
    std::uint64_t seed = 1;
    bool identity = false;             // A = I (dense only), B seeded
    std::optional<std::string> problem_path;  // overrides the generated problem
    std::size_t bank_depth = 512;
    double frequency_mhz = 601.0;
    bool dense_only_fabric = false;
    std::optional<std::string> trace_path;  // per-cycle CSV event log
    std::optional<std::string> out_path;
    ReportFormat format = ReportFormat::kJson;
};

struct EstimateOptions {
    std::string network_path;
    PlatformOverrides platform;
    std::optional<std::string> out_path;
    ReportFormat format = ReportFormat::kJson;
};

struct PruneOptions {
    std::string input_path;
    SparsityLevel level = SparsityLevel::k2of4;
    std::string out_path;
    std::optional<std::string> compressed_out_path;
    std::optional<std::string> report_path;
};

struct VerifyOptions {
    int problems = 216;
    std::uint64_t seed = 1;
    int max_grid = 3;  // sweeps Y, X in [1, max_grid]
    std::optional<std::string> out_path;
};

struct TablesOptions {
    std::string data_dir;  // empty: default_data_dir()
    std::optional<std::string> out_path;
    ReportFormat format = ReportFormat::kJson;
};

int cmd_sim(const SimOptions& options, std::ostream& log);
int cmd_estimate(const EstimateOptions& options, std::ostream& log);
int cmd_prune(const PruneOptions& options, std::ostream& log);
int cmd_verify(const VerifyOptions& options, std::ostream& log);
int cmd_tables(const TablesOptions& options, std::ostream& log);

}  // namespace sst
