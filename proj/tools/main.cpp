// sst - command-line front end: cycle simulation, analytical estimation,
// magnitude pruning, randomized verification, and reference-table checks.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sst/commands.hpp"

namespace {

sst::SparsityLevel parse_level_or_throw(const std::string& text) {
    auto level = sst::parse_sparsity_level(text);
    if (!level) throw CLI::ValidationError("level", "unknown sparsity level '" + text + "'");
    return *level;
}

sst::Precision parse_precision_or_throw(const std::string& text) {
    auto p = sst::parse_precision(text);
    if (!p) throw CLI::ValidationError("precision", "unknown precision '" + text + "'");
    return *p;
}

sst::ReportFormat parse_format_or_throw(const std::string& text) {
    if (text == "json") return sst::ReportFormat::kJson;
    if (text == "csv") return sst::ReportFormat::kCsv;
    throw CLI::ValidationError("format", "report format must be json or csv");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"systolic sparse tensor slice simulator and estimator"};
    app.require_subcommand(1);

    // ---- sim ----
    auto* sim = app.add_subcommand("sim", "run the cycle simulator and check the oracle");
    sst::SimOptions sim_options;
    std::string sim_level = "dense", sim_precision = "int8", sim_format = "json";
    std::string sim_problem, sim_trace, sim_out;
    sim->add_option("--Y", sim_options.y, "slice rows")->check(CLI::PositiveNumber);
    sim->add_option("--X", sim_options.x, "slice columns")->check(CLI::PositiveNumber);
    sim->add_option("--level", sim_level, "dense, 2:4, 1:3 or 1:4");
    sim->add_option("--precision", sim_precision, "int8 or bfloat16");
    sim->add_option("--M", sim_options.m, "GEMM M dimension");
    sim->add_option("--K", sim_options.k, "GEMM K dimension");
    sim->add_option("--N", sim_options.n, "GEMM N dimension");
    sim->add_option("--seed", sim_options.seed, "operand generator seed");
    sim->add_flag("--identity", sim_options.identity, "use A = identity (dense)");
    sim->add_option("--problem", sim_problem, "problem descriptor JSON file");
    sim->add_option("--depth", sim_options.bank_depth, "bank depth in elements");
    sim->add_option("--frequency", sim_options.frequency_mhz, "clock in MHz");
    sim->add_flag("--dense-only", sim_options.dense_only_fabric,
                  "model the dense-only baseline fabric");
    sim->add_option("--trace", sim_trace, "write a per-cycle CSV event log");
    sim->add_option("--out", sim_out, "report path (default: stdout)");
    sim->add_option("--format", sim_format, "report format: json or csv");

    // ---- estimate ----
    auto* estimate = app.add_subcommand("estimate", "analytical network speedup estimate");
    sst::EstimateOptions est_options;
    std::string est_format = "json", est_out;
    int est_y = 0, est_x = 0;
    double est_freq_i8 = 0, est_freq_bf16 = 0, est_base_i8 = 0, est_base_bf16 = 0,
           est_dram = 0;
    estimate->add_option("network", est_options.network_path, "network spec JSON file")
        ->required();
    estimate->add_option("--Y", est_y, "slice rows (default 10)");
    estimate->add_option("--X", est_x, "slice columns (default 10)");
    estimate->add_option("--frequency-int8", est_freq_i8, "SST int8 clock in MHz");
    estimate->add_option("--frequency-bf16", est_freq_bf16, "SST bfloat16 clock in MHz");
    estimate->add_option("--baseline-frequency-int8", est_base_i8, "baseline int8 MHz");
    estimate->add_option("--baseline-frequency-bf16", est_base_bf16, "baseline bfloat16 MHz");
    estimate->add_option("--dram-bw", est_dram, "DRAM bandwidth in bytes/s");
    estimate->add_flag("--serial-memory", est_options.platform.serial_memory,
                       "serialize compute and DRAM instead of overlapping");
    estimate->add_option("--out", est_out, "report path (default: stdout)");
    estimate->add_option("--format", est_format, "report format: json or csv");

    // ---- prune ----
    auto* prune = app.add_subcommand("prune", "magnitude-prune a dense matrix to N:M");
    sst::PruneOptions prune_options;
    std::string prune_level = "2:4", prune_compressed, prune_report;
    prune->add_option("input", prune_options.input_path, "dense matrix JSON file")->required();
    prune->add_option("--level", prune_level, "2:4, 1:3 or 1:4");
    prune->add_option("--out", prune_options.out_path, "pruned dense matrix path")->required();
    prune->add_option("--compressed-out", prune_compressed, "also write the compressed form");
    prune->add_option("--report", prune_report, "stats report path (default: stdout)");

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "randomized simulator-vs-oracle sweep");
    sst::VerifyOptions verify_options;
    std::string verify_out;
    verify->add_option("--problems", verify_options.problems, "number of randomized problems")
        ->check(CLI::PositiveNumber);
    verify->add_option("--seed", verify_options.seed, "sweep seed");
    verify->add_option("--max-grid", verify_options.max_grid, "sweep Y,X in [1,max]")
        ->check(CLI::PositiveNumber);
    verify->add_option("--out", verify_out, "report path (default: stdout)");

    // ---- tables ----
    auto* tables = app.add_subcommand("tables", "reproduce the reference result tables");
    sst::TablesOptions tables_options;
    std::string tables_format = "json", tables_out;
    tables->add_option("--data-dir", tables_options.data_dir,
                       "directory holding reference_values.json");
    tables->add_option("--out", tables_out, "report path (default: stdout)");
    tables->add_option("--format", tables_format, "report format: json or csv");

    try {
        app.parse(argc, argv);

        if (sim->parsed()) {
            sim_options.level = parse_level_or_throw(sim_level);
            sim_options.precision = parse_precision_or_throw(sim_precision);
            sim_options.format = parse_format_or_throw(sim_format);
            if (!sim_problem.empty()) sim_options.problem_path = sim_problem;
            if (!sim_trace.empty()) sim_options.trace_path = sim_trace;
            if (!sim_out.empty()) sim_options.out_path = sim_out;
            return sst::cmd_sim(sim_options, std::cout);
        }
        if (estimate->parsed()) {
            est_options.format = parse_format_or_throw(est_format);
            if (!est_out.empty()) est_options.out_path = est_out;
            if (est_y > 0) est_options.platform.y = est_y;
            if (est_x > 0) est_options.platform.x = est_x;
            if (est_freq_i8 > 0) est_options.platform.frequency_int8_mhz = est_freq_i8;
            if (est_freq_bf16 > 0) est_options.platform.frequency_bf16_mhz = est_freq_bf16;
            if (est_base_i8 > 0) est_options.platform.baseline_frequency_int8_mhz = est_base_i8;
            if (est_base_bf16 > 0) {
                est_options.platform.baseline_frequency_bf16_mhz = est_base_bf16;
            }
            if (est_dram > 0) est_options.platform.dram_bw_bytes_per_s = est_dram;
            return sst::cmd_estimate(est_options, std::cout);
        }
        if (prune->parsed()) {
            prune_options.level = parse_level_or_throw(prune_level);
            if (!prune_compressed.empty()) {
                prune_options.compressed_out_path = prune_compressed;
            }
            if (!prune_report.empty()) prune_options.report_path = prune_report;
            return sst::cmd_prune(prune_options, std::cout);
        }
        if (verify->parsed()) {
            if (!verify_out.empty()) verify_options.out_path = verify_out;
            return sst::cmd_verify(verify_options, std::cout);
        }
        if (tables->parsed()) {
            tables_options.format = parse_format_or_throw(tables_format);
            if (!tables_out.empty()) tables_options.out_path = tables_out;
            return sst::cmd_tables(tables_options, std::cout);
        }
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : sst::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return sst::kExitUsage;
    }
    return sst::kExitUsage;
}
