#include "sst/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sst/errors.hpp"
#include "sst/sparse_format.hpp"

namespace sst {

namespace {

using json = nlohmann::ordered_json;

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("'" + path + "': " + e.what());
    }
}

template <typename T>
T require(const json& j, const std::string& field, const std::string& context) {
    if (!j.contains(field)) {
        throw SchemaError(context + ": missing field '" + field + "'");
    }
    try {
        return j.at(field).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(context + ": field '" + field + "': " + e.what());
    }
}

Precision require_precision(const json& j, const std::string& context) {
    auto text = require<std::string>(j, "precision", context);
    auto p = parse_precision(text);
    if (!p) throw SchemaError(context + ": unknown precision '" + text + "'");
    return *p;
}

SparsityLevel require_level(const json& j, const std::string& context) {
    auto text = require<std::string>(j, "level", context);
    auto level = parse_sparsity_level(text);
    if (!level) throw SchemaError(context + ": unknown sparsity level '" + text + "'");
    return *level;
}

json values_to_json(Precision p, const std::vector<RawScalar>& values) {
    json arr = json::array();
    for (RawScalar v : values) {
        if (p == Precision::kInt8) {
            arr.push_back(static_cast<int>(raw_to_int8(v)));
        } else {
            arr.push_back(static_cast<double>(bf16_to_float(v)));
        }
    }
    return arr;
}

std::vector<RawScalar> values_from_json(Precision p, const json& arr,
                                        const std::string& context) {
    if (!arr.is_array()) throw SchemaError(context + ": 'values' must be an array");
    std::vector<RawScalar> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (p == Precision::kInt8) {
            auto i = v.get<std::int64_t>();
            if (i < -128 || i > 127) {
                throw SchemaError(context + ": int8 value " + std::to_string(i) +
                                  " out of range");
            }
            out.push_back(raw_from_int8(static_cast<std::int8_t>(i)));
        } else {
            out.push_back(canonical_bf16(float_to_bf16(static_cast<float>(v.get<double>()))));
        }
    }
    return out;
}

DenseMatrix dense_from_json(const json& j, const std::string& context) {
    DenseMatrix m;
    m.precision = require_precision(j, context);
    m.rows = require<std::size_t>(j, "rows", context);
    m.cols = require<std::size_t>(j, "cols", context);
    m.data = values_from_json(m.precision, require<json>(j, "values", context), context);
    if (m.data.size() != m.rows * m.cols) {
        throw SchemaError(context + ": expected " + std::to_string(m.rows * m.cols) +
                          " values, got " + std::to_string(m.data.size()));
    }
    return m;
}

json dense_to_json(const DenseMatrix& m) {
    json j;
    j["type"] = "dense_matrix";
    j["precision"] = std::string(to_string(m.precision));
    j["level"] = "dense";
    j["rows"] = m.rows;
    j["cols"] = m.cols;
    j["values"] = values_to_json(m.precision, m.data);
    return j;
}

CompressedMatrix compressed_from_json(const json& j, const std::string& context) {
    CompressedMatrix c;
    c.precision = require_precision(j, context);
    c.level = require_level(j, context);
    c.rows = require<std::size_t>(j, "rows", context);
    c.logical_cols = require<std::size_t>(j, "logical_cols", context);
    c.original_cols = j.contains("original_cols")
                          ? require<std::size_t>(j, "original_cols", context)
                          : c.logical_cols;
    c.values = values_from_json(c.precision, require<json>(j, "values", context), context);
    const json& idx = require<json>(j, "indices", context);
    if (!idx.is_array()) throw SchemaError(context + ": 'indices' must be an array");
    for (const auto& v : idx) c.indices.push_back(v.get<std::uint8_t>());
    try {
        validate_compressed(c);
    } catch (const SchemaError& e) {
        throw SchemaError(context + ": " + e.what());
    }
    return c;
}

json compressed_to_json(const CompressedMatrix& c) {
    json j;
    j["type"] = "compressed_matrix";
    j["precision"] = std::string(to_string(c.precision));
    j["level"] = std::string(to_string(c.level));
    j["rows"] = c.rows;
    j["logical_cols"] = c.logical_cols;
    j["original_cols"] = c.original_cols;
    j["values"] = values_to_json(c.precision, c.values);
    j["indices"] = c.indices;
    return j;
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write '" + path + "'");
    out << content;
}

void save_dense_matrix(const DenseMatrix& m, const std::string& path) {
    write_text_file(path, dense_to_json(m).dump(2) + "\n");
}

void save_compressed_matrix(const CompressedMatrix& m, const std::string& path) {
    write_text_file(path, compressed_to_json(m).dump(2) + "\n");
}

MatrixFile load_matrix(const std::string& path) {
    json j = parse_file(path);
    auto type = require<std::string>(j, "type", path);
    MatrixFile out;
    if (type == "dense_matrix") {
        out.dense = dense_from_json(j, path);
    } else if (type == "compressed_matrix") {
        out.compressed = compressed_from_json(j, path);
    } else {
        throw SchemaError(path + ": unknown matrix type '" + type + "'");
    }
    return out;
}

DenseMatrix load_dense_matrix(const std::string& path) {
    MatrixFile f = load_matrix(path);
    if (f.dense) return *f.dense;
    return decode(*f.compressed);
}

ProblemDescriptor load_problem(const std::string& path) {
    json j = parse_file(path);
    ProblemDescriptor desc;
    desc.precision = require_precision(j, path);
    desc.level = require_level(j, path);
    if (j.contains("a")) {
        const json& a = j.at("a");
        auto type = require<std::string>(a, "type", path + ":a");
        MatrixFile mf;
        if (type == "dense_matrix") {
            mf.dense = dense_from_json(a, path + ":a");
        } else if (type == "compressed_matrix") {
            mf.compressed = compressed_from_json(a, path + ":a");
        } else {
            throw SchemaError(path + ":a: unknown matrix type '" + type + "'");
        }
        desc.a = std::move(mf);
        desc.b = dense_from_json(require<json>(j, "b", path), path + ":b");
        desc.m = desc.a->dense ? desc.a->dense->rows : desc.a->compressed->rows;
        desc.k = desc.b->rows;
        desc.n = desc.b->cols;
    } else {
        desc.m = require<std::size_t>(j, "m", path);
        desc.k = require<std::size_t>(j, "k", path);
        desc.n = require<std::size_t>(j, "n", path);
        desc.seed = require<std::uint64_t>(j, "seed", path);
    }
    return desc;
}

GemmProblem materialize_problem(const ProblemDescriptor& desc) {
    if (desc.seed) {
        return GemmProblem::random(desc.precision, desc.level, desc.m, desc.k, desc.n,
                                   *desc.seed);
    }
    if (desc.a->compressed) {
        if (desc.a->compressed->level != desc.level) {
            throw SchemaError("descriptor level does not match the compressed matrix level");
        }
        return GemmProblem::from_compressed(*desc.a->compressed, *desc.b);
    }
    return GemmProblem::from_dense(desc.level, *desc.a->dense, *desc.b);
}

NetworkSpec load_network(const std::string& path) {
    json j = parse_file(path);
    NetworkSpec net;
    net.name = require<std::string>(j, "name", path);
    net.precision = require_precision(j, path);
    if (j.contains("source_note")) net.source_note = j.at("source_note").get<std::string>();
    const json& layers = require<json>(j, "layers", path);
    if (!layers.is_array() || layers.empty()) {
        throw SchemaError(path + ": 'layers' must be a non-empty array");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const json& lj = layers[i];
        std::string context = path + ":layers[" + std::to_string(i) + "]";
        LayerSpec layer;
        layer.name = require<std::string>(lj, "name", context);
        layer.m = require<std::int64_t>(lj, "m", context);
        layer.k = require<std::int64_t>(lj, "k", context);
        layer.n = require<std::int64_t>(lj, "n", context);
        layer.level = require_level(lj, context);
        layer.count = lj.contains("count") ? require<std::int64_t>(lj, "count", context) : 1;
        layer.weights = lj.contains("weights") ? require<bool>(lj, "weights", context) : true;
        net.layers.push_back(std::move(layer));
    }
    return net;
}

void save_network(const NetworkSpec& network, const std::string& path) {
    json j;
    j["name"] = network.name;
    j["precision"] = std::string(to_string(network.precision));
    j["source_note"] = network.source_note;
    json layers = json::array();
    for (const LayerSpec& layer : network.layers) {
        json lj;
        lj["name"] = layer.name;
        lj["m"] = layer.m;
        lj["k"] = layer.k;
        lj["n"] = layer.n;
        lj["level"] = std::string(to_string(layer.level));
        lj["count"] = layer.count;
        lj["weights"] = layer.weights;
        layers.push_back(std::move(lj));
    }
    j["layers"] = std::move(layers);
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace sst
