// io.hpp - JSON interchange for matrices, problem descriptors and network
// specs. int8 values serialize as integers; bfloat16 values serialize as
// their exact decimal float value (every bfloat16 is a dyadic rational with a
// short round-trippable representation), so files round-trip bit-exactly.
#pragma once

#include <optional>
#include <string>

#include "sst/fabric.hpp"
#include "sst/matrix.hpp"
#include "sst/perf_model.hpp"

namespace sst {

void save_dense_matrix(const DenseMatrix& m, const std::string& path);
void save_compressed_matrix(const CompressedMatrix& m, const std::string& path);

struct MatrixFile {
    std::optional<DenseMatrix> dense;
    std::optional<CompressedMatrix> compressed;
};

// Loads either container kind; throws SchemaError with a field diagnostic.
MatrixFile load_matrix(const std::string& path);
DenseMatrix load_dense_matrix(const std::string& path);

// Problem descriptor: either {m,k,n,precision,level,seed} for generated
// operands or {precision,level,a,b} with inline matrix objects.
struct ProblemDescriptor {
    Precision precision = Precision::kInt8;
    SparsityLevel level = SparsityLevel::kDense;
    std::size_t m = 0, k = 0, n = 0;
    std::optional<std::uint64_t> seed;
    std::optional<MatrixFile> a;
    std::optional<DenseMatrix> b;
};

ProblemDescriptor load_problem(const std::string& path);
GemmProblem materialize_problem(const ProblemDescriptor& desc);

NetworkSpec load_network(const std::string& path);
void save_network(const NetworkSpec& network, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace sst
