#include "sst/reference_values.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "sst/errors.hpp"

#ifndef SST_DEFAULT_DATA_DIR
#define SST_DEFAULT_DATA_DIR "data"
#endif

namespace sst {

namespace {

using json = nlohmann::ordered_json;

SparsityLevel level_field(const json& j, const char* field, const std::string& context) {
    auto level = parse_sparsity_level(j.at(field).get<std::string>());
    if (!level) throw SchemaError(context + ": bad sparsity level");
    return *level;
}

Precision precision_field(const json& j, const std::string& context) {
    auto p = parse_precision(j.at("precision").get<std::string>());
    if (!p) throw SchemaError(context + ": bad precision");
    return *p;
}

}  // namespace

ReferenceValues ReferenceValues::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open reference values file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("'" + path + "': " + e.what());
    }

    ReferenceValues rv;
    rv.version = j.at("version").get<int>();
    rv.description = j.at("description").get<std::string>();
    for (const auto& row : j.at("sparsity_summary")) {
        rv.sparsity_summary.push_back(
            SparsitySummaryRow{level_field(row, "level", path),
                               row.at("compression_int8").get<double>(),
                               row.at("compression_bfloat16").get<double>(),
                               row.at("speedup").get<int>()});
    }
    for (const auto& row : j.at("gemm_designs")) {
        rv.gemm_designs.push_back(GemmDesignRow{
            row.at("design").get<std::string>(), precision_field(row, path),
            row.at("frequency_mhz").get<double>(), row.at("brams").get<int>(),
            row.at("effective_tops").get<double>(),
            level_field(row, "throughput_level", path)});
    }
    for (const auto& row : j.at("network_speedups")) {
        rv.network_speedups.push_back(NetworkReferenceRow{
            row.at("network").get<std::string>(), row.at("config").get<std::string>(),
            row.at("file").get<std::string>(), row.at("speedup").get<double>(),
            row.at("weight_reduction_int8").get<double>(),
            row.at("weight_reduction_bfloat16").get<double>()});
    }
    const auto& fmt = j.at("format_comparison");
    rv.index_over_bitmap_1of4_int8 = fmt.at("index_over_bitmap_1of4_int8").get<double>();
    rv.index_over_bitmap_1of4_bfloat16 =
        fmt.at("index_over_bitmap_1of4_bfloat16").get<double>();
    return rv;
}

std::string default_data_dir() {
    if (const char* env = std::getenv("SST_DATA_DIR")) return env;
    return SST_DEFAULT_DATA_DIR;
}

}  // namespace sst
