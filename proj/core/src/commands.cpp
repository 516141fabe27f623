#include "sst/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "sst/errors.hpp"
#include "sst/io.hpp"
#include "sst/perf_model.hpp"
#include "sst/reference.hpp"
#include "sst/reference_values.hpp"
#include "sst/sparse_format.hpp"

namespace sst {

namespace {

using json = nlohmann::ordered_json;

void emit_report(const std::string& text, const std::optional<std::string>& out_path,
                 std::ostream& log) {
    if (out_path) {
        write_text_file(*out_path, text);
    } else {
        log << text;
    }
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << "0x" << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

int run_guarded(std::ostream& log, const std::function<int()>& body) {
    try {
        return body();
    } catch (const PatternViolation& e) {
        log << "error: " << e.what() << "\n";
        return kExitVerification;
    } catch (const IndexOutOfGroup& e) {
        log << "error: " << e.what() << "\n";
        return kExitVerification;
    } catch (const Error& e) {
        log << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

std::optional<double> env_double(const char* name) {
    if (const char* v = std::getenv(name)) return std::atof(v);
    return std::nullopt;
}

std::pair<PlatformSpec, PlatformSpec> make_platforms(const PlatformOverrides& o) {
    PlatformSpec sst = PlatformSpec::sst_default();
    PlatformSpec baseline = PlatformSpec::dense_baseline();

    if (auto v = env_double("SST_DRAM_BW")) sst.dram_bw_bytes_per_s = *v;
    if (auto v = env_double("SST_FREQ_INT8_MHZ")) sst.frequency_hz_int8 = *v * 1e6;
    if (auto v = env_double("SST_FREQ_BF16_MHZ")) sst.frequency_hz_bf16 = *v * 1e6;
    if (auto v = env_double("SST_BASELINE_FREQ_INT8_MHZ")) baseline.frequency_hz_int8 = *v * 1e6;
    if (auto v = env_double("SST_BASELINE_FREQ_BF16_MHZ")) baseline.frequency_hz_bf16 = *v * 1e6;

    if (o.y) sst.fabric.y = baseline.fabric.y = *o.y;
    if (o.x) sst.fabric.x = baseline.fabric.x = *o.x;
    if (o.bank_depth) sst.fabric.bank_depth = baseline.fabric.bank_depth = *o.bank_depth;
    if (o.frequency_int8_mhz) sst.frequency_hz_int8 = *o.frequency_int8_mhz * 1e6;
    if (o.frequency_bf16_mhz) sst.frequency_hz_bf16 = *o.frequency_bf16_mhz * 1e6;
    if (o.baseline_frequency_int8_mhz) {
        baseline.frequency_hz_int8 = *o.baseline_frequency_int8_mhz * 1e6;
    }
    if (o.baseline_frequency_bf16_mhz) {
        baseline.frequency_hz_bf16 = *o.baseline_frequency_bf16_mhz * 1e6;
    }
    if (auto v = o.dram_bw_bytes_per_s) {
        sst.dram_bw_bytes_per_s = baseline.dram_bw_bytes_per_s = *v;
    }
    sst.overlap_compute_memory = !o.serial_memory;
    baseline.overlap_compute_memory = !o.serial_memory;
    return {sst, baseline};
}

AccumMatrix sim_oracle(const GemmProblem& problem) {
    const auto g = static_cast<std::size_t>(group_size(problem.a_level));
    const std::size_t kp = (problem.k + g - 1) / g * g;
    DenseMatrix padded_b(problem.b.precision, kp, problem.b.cols);
    for (std::size_t r = 0; r < problem.b.rows; ++r) {
        for (std::size_t c = 0; c < problem.b.cols; ++c) {
            padded_b.at(r, c) = canonical_raw(problem.b.precision, problem.b.at(r, c));
        }
    }
    if (!is_sparse(problem.a_level)) {
        DenseMatrix a = *problem.a_dense;
        for (auto& v : a.data) v = canonical_raw(a.precision, v);
        return reference_gemm(a, padded_b);
    }
    CompressedMatrix comp =
        problem.a_compressed ? *problem.a_compressed : encode(*problem.a_dense, problem.a_level);
    return reference_gemm(comp, padded_b);
}

std::size_t compare_results(const AccumMatrix& got, const AccumMatrix& expected) {
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < got.bits.size(); ++i) {
        if (got.bits[i] != expected.bits[i]) ++mismatches;
    }
    return mismatches;
}

std::string csv_number(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

json utilization_json(const GemmResult& r) {
    json u;
    u["spe_busy"] = r.spe_busy_utilization;
    u["padding_efficiency"] = r.padding_efficiency;
    return u;
}

json brams_json(const BramCounts& b) {
    json j;
    j["a"] = b.a;
    j["b"] = b.b;
    j["c"] = b.c;
    j["total"] = b.total;
    return j;
}

}  // namespace

int cmd_sim(const SimOptions& options, std::ostream& log) {
    return run_guarded(log, [&]() -> int {
        FabricConfig cfg;
        cfg.y = options.y;
        cfg.x = options.x;
        cfg.precision = options.precision;
        cfg.capability = options.dense_only_fabric ? FabricCapability::kDenseOnly
                                                   : FabricCapability::kDynamicSparse;
        cfg.bank_depth = options.bank_depth;
        cfg.frequency_hz = options.frequency_mhz * 1e6;

        GemmProblem problem;
        json problem_json;
        if (options.problem_path) {
            ProblemDescriptor desc = load_problem(*options.problem_path);
            cfg.precision = desc.precision;
            problem = materialize_problem(desc);
            problem_json["source"] = *options.problem_path;
        } else if (options.identity) {
            DenseMatrix a = DenseMatrix::identity(options.precision, options.m);
            DenseMatrix b =
                make_random_dense(options.precision, options.m, options.n, options.seed);
            problem = GemmProblem::from_dense(SparsityLevel::kDense, std::move(a), std::move(b));
            problem_json["identity"] = true;
            problem_json["seed"] = options.seed;
        } else {
            problem = GemmProblem::random(options.precision, options.level, options.m,
                                          options.k, options.n, options.seed);
            problem_json["seed"] = options.seed;
        }
        problem_json["m"] = problem.m;
        problem_json["k"] = problem.k;
        problem_json["n"] = problem.n;
        problem_json["precision"] = std::string(to_string(cfg.precision));
        problem_json["level"] = std::string(to_string(problem.a_level));

        std::ofstream trace_file;
        std::unique_ptr<CsvTraceSink> trace;
        GemmRunOptions run_options;
        run_options.audit = true;
        if (options.trace_path) {
            trace_file.open(*options.trace_path);
            if (!trace_file) throw ConfigError("cannot write trace to " + *options.trace_path);
            trace = std::make_unique<CsvTraceSink>(trace_file);
            run_options.trace = trace.get();
        }

        Fabric fabric(cfg);
        GemmResult result = fabric.run_gemm(problem, run_options);
        AccumMatrix expected = sim_oracle(problem);
        std::size_t mismatches = compare_results(result.c, expected);
        bool pass = mismatches == 0 && result.extraction_regular &&
                    result.max_buffer_occupancy <= kExtractBufferSlots;

        json report;
        report["command"] = "sim";
        report["fabric"] = {{"y", cfg.y},
                            {"x", cfg.x},
                            {"native_rows", cfg.native_rows()},
                            {"native_cols", cfg.native_cols()},
                            {"capability", options.dense_only_fabric ? "dense_only"
                                                                     : "dynamic_sparse"},
                            {"bank_depth", cfg.bank_depth},
                            {"frequency_mhz", cfg.frequency_hz / 1e6}};
        report["problem"] = problem_json;
        report["cycles"] = result.cycles;
        report["steady_state_cycles_per_tile"] = result.steady_state_cycles_per_tile;
        report["output_tiles"] = result.output_tiles;
        report["fill_drain_cycles"] = result.fill_drain_cycles;
        report["total_macs"] = result.total_macs;
        report["utilization"] = utilization_json(result);
        report["padded"] = {{"m", result.padded_m},
                            {"k", result.padded_k},
                            {"n", result.padded_n},
                            {"was_padded", result.was_padded}};
        report["brams"] = brams_json(result.brams);
        report["checksum_of_c"] = hex64(result.checksum);
        report["max_buffer_occupancy"] = result.max_buffer_occupancy;
        report["extraction_regular"] = result.extraction_regular;
        report["oracle_mismatches"] = mismatches;
        report["pass"] = pass;

        if (options.format == ReportFormat::kJson) {
            emit_report(report.dump(2) + "\n", options.out_path, log);
        } else {
            std::ostringstream csv;
            csv << "key,value\n";
            for (auto& [key, value] : report.items()) {
                if (value.is_object()) {
                    for (auto& [k2, v2] : value.items()) {
                        csv << key << '.' << k2 << ',' << v2.dump() << '\n';
                    }
                } else {
                    csv << key << ',' << value.dump() << '\n';
                }
            }
            emit_report(csv.str(), options.out_path, log);
        }
        return pass ? kExitOk : kExitVerification;
    });
}

int cmd_estimate(const EstimateOptions& options, std::ostream& log) {
    return run_guarded(log, [&]() -> int {
        auto [sst_platform, baseline] = make_platforms(options.platform);
        NetworkSpec network = load_network(options.network_path);
        NetworkEstimate est = estimate_network(network, sst_platform, baseline);

        json report;
        report["command"] = "estimate";
        report["network"] = est.network;
        report["precision"] = std::string(to_string(est.precision));
        report["platform"] = {
            {"native_rows", sst_platform.fabric.native_rows()},
            {"native_cols", sst_platform.fabric.native_cols()},
            {"frequency_mhz", sst_platform.frequency_for(est.precision) / 1e6},
            {"baseline_frequency_mhz", baseline.frequency_for(est.precision) / 1e6},
            {"dram_bw_bytes_per_s", sst_platform.dram_bw_bytes_per_s},
            {"memory_overlap", sst_platform.overlap_compute_memory}};
        json layers = json::array();
        for (std::size_t i = 0; i < est.layers.size(); ++i) {
            const LayerEstimate& l = est.layers[i];
            const LayerEstimate& b = est.baseline_layers[i];
            json lj;
            lj["name"] = l.name;
            lj["level"] = std::string(to_string(l.level));
            lj["count"] = l.count;
            lj["m"] = l.m;
            lj["k"] = l.k;
            lj["n"] = l.n;
            lj["padded_m"] = l.padded_m;
            lj["padded_k"] = l.padded_k;
            lj["padded_n"] = l.padded_n;
            lj["compute_cycles"] = l.compute_cycles;
            lj["weight_bytes"] = l.weight_bytes;
            lj["activation_bytes"] = l.activation_bytes;
            lj["layer_time_us"] = l.layer_time_s * 1e6;
            lj["baseline_time_us"] = b.layer_time_s * 1e6;
            lj["layer_speedup"] = b.layer_time_s / l.layer_time_s;
            layers.push_back(std::move(lj));
        }
        report["layers"] = std::move(layers);
        report["total_time_ms"] = est.total_time_s * 1e3;
        report["baseline_time_ms"] = est.baseline_time_s * 1e3;
        report["speedup"] = est.speedup;
        report["weight_reduction"] = est.weight_reduction;

        if (options.format == ReportFormat::kJson) {
            emit_report(report.dump(2) + "\n", options.out_path, log);
        } else {
            std::ostringstream csv;
            csv << "name,level,count,m,k,n,compute_cycles,weight_bytes,activation_bytes,"
                   "layer_time_us,baseline_time_us,layer_speedup\n";
            for (std::size_t i = 0; i < est.layers.size(); ++i) {
                const LayerEstimate& l = est.layers[i];
                const LayerEstimate& b = est.baseline_layers[i];
                csv << l.name << ',' << to_string(l.level) << ',' << l.count << ',' << l.m
                    << ',' << l.k << ',' << l.n << ',' << l.compute_cycles << ','
                    << csv_number(l.weight_bytes) << ',' << csv_number(l.activation_bytes)
                    << ',' << csv_number(l.layer_time_s * 1e6) << ','
                    << csv_number(b.layer_time_s * 1e6) << ','
                    << csv_number(b.layer_time_s / l.layer_time_s) << '\n';
            }
            csv << "total,,,,,,,,," << csv_number(est.total_time_s * 1e6) << ','
                << csv_number(est.baseline_time_s * 1e6) << ',' << csv_number(est.speedup)
                << '\n';
            csv << "weight_reduction,,,,,,,,,,," << csv_number(est.weight_reduction) << '\n';
            emit_report(csv.str(), options.out_path, log);
        }
        return kExitOk;
    });
}

int cmd_prune(const PruneOptions& options, std::ostream& log) {
    return run_guarded(log, [&]() -> int {
        if (!is_sparse(options.level)) throw ConfigError("prune level must be sparse");
        DenseMatrix input = load_dense_matrix(options.input_path);
        DenseMatrix pruned = prune_magnitude(input, options.level);
        CompressedMatrix packed = encode(pruned, options.level);
        save_dense_matrix(pruned, options.out_path);
        if (options.compressed_out_path) {
            save_compressed_matrix(packed, *options.compressed_out_path);
        }

        std::size_t zeros = 0;
        for (RawScalar v : pruned.data) {
            if (raw_is_zero(pruned.precision, v)) ++zeros;
        }
        const double dense_bits =
            static_cast<double>(packed.rows) * static_cast<double>(packed.logical_cols) *
            value_bits(pruned.precision);
        const double packed_bits = static_cast<double>(packed.values.size()) *
                                   (value_bits(pruned.precision) + kIndexBits);

        json report;
        report["command"] = "prune";
        report["input"] = options.input_path;
        report["output"] = options.out_path;
        report["level"] = std::string(to_string(options.level));
        report["precision"] = std::string(to_string(pruned.precision));
        report["rows"] = pruned.rows;
        report["cols"] = pruned.cols;
        report["fraction_zeroed"] =
            static_cast<double>(zeros) / static_cast<double>(pruned.data.size());
        report["dense_bytes"] = dense_bits / 8.0;
        report["compressed_bytes"] = packed_bits / 8.0;
        report["achieved_ratio"] = dense_bits / packed_bits;
        report["format_ratio"] = compression_ratio(options.level, pruned.precision);
        emit_report(report.dump(2) + "\n", options.report_path, log);
        return kExitOk;
    });
}

int cmd_verify(const VerifyOptions& options, std::ostream& log) {
    return run_guarded(log, [&]() -> int {
        const SparsityLevel levels[] = {SparsityLevel::kDense, SparsityLevel::k2of4,
                                        SparsityLevel::k1of3, SparsityLevel::k1of4};
        const Precision precisions[] = {Precision::kInt8, Precision::kBfloat16};

        int ran = 0, failed = 0;
        std::uint64_t stamp = options.seed;
        json failures = json::array();
        while (ran < options.problems) {
            for (int y = 1; y <= options.max_grid && ran < options.problems; ++y) {
                for (int x = 1; x <= options.max_grid && ran < options.problems; ++x) {
                    for (SparsityLevel level : levels) {
                        for (Precision precision : precisions) {
                            if (ran >= options.problems) break;
                            stamp = stamp * 6364136223846793005ull + 1442695040888963407ull;
                            const auto g = static_cast<std::size_t>(group_size(level));
                            std::size_t m = 4u * static_cast<std::size_t>(y) *
                                            (1 + (stamp >> 8) % 2);
                            std::size_t n = 4u * static_cast<std::size_t>(x) *
                                            (1 + (stamp >> 16) % 2);
                            std::size_t k = g * (1 + (stamp >> 24) % 12);

                            FabricConfig cfg{y, x, precision,
                                             FabricCapability::kDynamicSparse, 512, 601e6};
                            Fabric fabric(cfg);
                            GemmProblem problem =
                                GemmProblem::random(precision, level, m, k, n, stamp);
                            GemmResult result = fabric.run_gemm(problem);
                            AccumMatrix expected = sim_oracle(problem);
                            std::size_t mismatches = compare_results(result.c, expected);
                            ++ran;
                            if (mismatches != 0) {
                                ++failed;
                                json f;
                                f["y"] = y;
                                f["x"] = x;
                                f["level"] = std::string(to_string(level));
                                f["precision"] = std::string(to_string(precision));
                                f["m"] = m;
                                f["k"] = k;
                                f["n"] = n;
                                f["mismatches"] = mismatches;
                                failures.push_back(std::move(f));
                            }
                        }
                    }
                }
            }
        }

        json report;
        report["command"] = "verify";
        report["problems"] = ran;
        report["failed"] = failed;
        report["grid_range"] = options.max_grid;
        report["failures"] = std::move(failures);
        report["pass"] = failed == 0;
        emit_report(report.dump(2) + "\n", options.out_path, log);
        return failed == 0 ? kExitOk : kExitVerification;
    });
}

int cmd_tables(const TablesOptions& options, std::ostream& log) {
    return run_guarded(log, [&]() -> int {
        std::string dir = options.data_dir.empty() ? default_data_dir() : options.data_dir;
        ReferenceValues rv = ReferenceValues::load(dir + "/reference_values.json");

        json cells = json::array();
        bool all_pass = true;
        auto add_cell = [&](const std::string& table, const std::string& cell, double computed,
                            double reference, double tolerance) {
            bool pass = std::fabs(computed - reference) <= tolerance;
            all_pass = all_pass && pass;
            json c;
            c["table"] = table;
            c["cell"] = cell;
            c["computed"] = computed;
            c["reference"] = reference;
            c["tolerance"] = tolerance;
            c["pass"] = pass;
            cells.push_back(std::move(c));
        };

        for (const SparsitySummaryRow& row : rv.sparsity_summary) {
            std::string name(to_string(row.level));
            add_cell("sparsity_summary", name + " compression int8",
                     compression_ratio(row.level, Precision::kInt8), row.compression_int8,
                     0.01);
            add_cell("sparsity_summary", name + " compression bfloat16",
                     compression_ratio(row.level, Precision::kBfloat16),
                     row.compression_bfloat16, 0.01);
            add_cell("sparsity_summary", name + " speedup",
                     static_cast<double>(speedup_factor(row.level)),
                     static_cast<double>(row.speedup), 0.0);
        }

        for (const GemmDesignRow& row : rv.gemm_designs) {
            FabricConfig cfg{10, 10, row.precision, FabricCapability::kDynamicSparse, 512,
                             row.frequency_mhz * 1e6};
            std::string name = row.design + " " + std::string(to_string(row.precision));
            double tops =
                effective_throughput_tops(cfg, row.frequency_mhz * 1e6, row.throughput_level);
            add_cell("gemm_designs", name + " effective TOPs", tops, row.effective_tops,
                     row.effective_tops * 0.005);
            // All published designs carry the sparse-parity banking, so the
            // BRAM total is the sparse-capable layout for every row.
            add_cell("gemm_designs", name + " BRAMs",
                     static_cast<double>(count_brams(cfg).total),
                     static_cast<double>(row.brams), 0.0);
        }

        double idx_int8 = compression_ratio(SparsityLevel::k1of4, Precision::kInt8) /
                          bitmap_compression_ratio(SparsityLevel::k1of4, Precision::kInt8);
        double idx_bf16 = compression_ratio(SparsityLevel::k1of4, Precision::kBfloat16) /
                          bitmap_compression_ratio(SparsityLevel::k1of4, Precision::kBfloat16);
        add_cell("format_comparison", "index/bitmap 1:4 int8", idx_int8,
                 rv.index_over_bitmap_1of4_int8, 0.01);
        add_cell("format_comparison", "index/bitmap 1:4 bfloat16", idx_bf16,
                 rv.index_over_bitmap_1of4_bfloat16, 0.01);

        json report;
        report["command"] = "tables";
        report["data_dir"] = dir;
        report["reference_version"] = rv.version;
        report["cells"] = std::move(cells);
        report["pass"] = all_pass;

        if (options.format == ReportFormat::kJson) {
            emit_report(report.dump(2) + "\n", options.out_path, log);
        } else {
            std::ostringstream csv;
            csv << "table,cell,computed,reference,tolerance,pass\n";
            for (const auto& c : report["cells"]) {
                csv << c["table"].get<std::string>() << ','
                    << c["cell"].get<std::string>() << ','
                    << csv_number(c["computed"].get<double>()) << ','
                    << csv_number(c["reference"].get<double>()) << ','
                    << csv_number(c["tolerance"].get<double>()) << ','
                    << (c["pass"].get<bool>() ? "true" : "false") << '\n';
            }
            emit_report(csv.str(), options.out_path, log);
        }
        return all_pass ? kExitOk : kExitVerification;
    });
}

}  // namespace sst
