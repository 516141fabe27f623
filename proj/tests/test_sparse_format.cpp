#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sst/sparse_format.hpp"
#include "support/oracles.hpp"

using namespace sst;

namespace {

DenseMatrix row_i8(std::vector<int> values) {
    DenseMatrix m(Precision::kInt8, 1, values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        m.at(0, i) = raw_from_int8(static_cast<std::int8_t>(values[i]));
    }
    return m;
}

std::vector<int> row_values(const DenseMatrix& m, std::size_t row) {
    std::vector<int> out;
    for (std::size_t c = 0; c < m.cols; ++c) out.push_back(raw_to_int8(m.at(row, c)));
    return out;
}

constexpr SparsityLevel kSparseLevels[] = {SparsityLevel::k2of4, SparsityLevel::k1of3,
                                           SparsityLevel::k1of4};

}  // namespace

TEST_CASE("validate_pattern fixtures") {
    CHECK(validate_pattern(row_i8({0, 5, 0, 7}), SparsityLevel::k2of4));
    CHECK(!validate_pattern(row_i8({1, 2, 3, 0}), SparsityLevel::k2of4));
    DenseMatrix zeros(Precision::kInt8, 4, 8);
    for (SparsityLevel level : kSparseLevels) CHECK(validate_pattern(zeros, level));
    // trailing partial group evaluates as zero-padded
    CHECK(validate_pattern(row_i8({0, 1, 2, 0, 9}), SparsityLevel::k2of4));
    CHECK(!validate_pattern(row_i8({0, 1, 2, 0, 9, 9}), SparsityLevel::k1of4));
}

TEST_CASE("encode fixtures") {
    auto c = encode(row_i8({0, 5, 0, 7}), SparsityLevel::k2of4);
    CHECK(c.values == std::vector<RawScalar>{raw_from_int8(5), raw_from_int8(7)});
    CHECK(c.indices == std::vector<std::uint8_t>{1, 3});

    c = encode(row_i8({0, 0, 9}), SparsityLevel::k1of3);
    CHECK(c.values == std::vector<RawScalar>{raw_from_int8(9)});
    CHECK(c.indices == std::vector<std::uint8_t>{2});

    c = encode(row_i8({0, 0, 0, 0}), SparsityLevel::k1of4);
    CHECK(c.values == std::vector<RawScalar>{0});
    CHECK(c.indices == std::vector<std::uint8_t>{0});

    // zero-fill merges ahead of a later stored value to keep indices increasing
    c = encode(row_i8({0, 9, 0, 0}), SparsityLevel::k2of4);
    CHECK(c.values == std::vector<RawScalar>{0, raw_from_int8(9)});
    CHECK(c.indices == std::vector<std::uint8_t>{0, 1});

    // column padding to the group multiple
    c = encode(row_i8({1, 0, 0, 0, 2}), SparsityLevel::k1of4);
    CHECK(c.logical_cols == 8);
    CHECK(c.original_cols == 5);
    CHECK(c.values == std::vector<RawScalar>{raw_from_int8(1), raw_from_int8(2)});
    CHECK(c.indices == std::vector<std::uint8_t>{0, 0});
}

TEST_CASE("encode reports the first offending row and group") {
    DenseMatrix m(Precision::kInt8, 3, 8);
    m.at(2, 4) = raw_from_int8(1);
    m.at(2, 5) = raw_from_int8(2);
    m.at(2, 6) = raw_from_int8(3);
    CHECK(!validate_pattern(m, SparsityLevel::k2of4));
    try {
        encode(m, SparsityLevel::k2of4);
        FAIL("expected PatternViolation");
    } catch (const PatternViolation& e) {
        CHECK(e.row == 2);
        CHECK(e.group == 1);
    }
}

TEST_CASE("decode fixtures") {
    CompressedMatrix c;
    c.level = SparsityLevel::k2of4;
    c.precision = Precision::kInt8;
    c.rows = 1;
    c.logical_cols = 4;
    c.original_cols = 4;
    c.values = {raw_from_int8(5), raw_from_int8(7)};
    c.indices = {1, 3};
    CHECK(row_values(decode(c), 0) == std::vector<int>{0, 5, 0, 7});

    CompressedMatrix empty;
    empty.level = SparsityLevel::k1of3;
    empty.precision = Precision::kInt8;
    DenseMatrix d = decode(empty);
    CHECK(d.rows == 0);
    CHECK(d.cols == 0);

    c.indices = {1, 4};  // corrupt: position outside the group
    CHECK_THROWS_AS(decode(c), IndexOutOfGroup);
}

TEST_CASE("round-trip and canonical form over random conforming matrices") {
    int cases = 0;
    for (Precision p : {Precision::kInt8, Precision::kBfloat16}) {
        for (SparsityLevel level : kSparseLevels) {
            for (std::size_t cols : {16u, 18u, 9u}) {
                DenseMatrix m = make_random_pattern_dense(p, 8, cols, level, 91 + cases);
                CHECK(validate_pattern(m, level));
                CompressedMatrix c = encode(m, level);
                validate_compressed(c);  // sizes, ranges, strictly increasing groups
                DenseMatrix back = decode(c);

                const auto g = static_cast<std::size_t>(group_size(level));
                DenseMatrix padded(p, m.rows, (cols + g - 1) / g * g);
                for (std::size_t r = 0; r < m.rows; ++r) {
                    for (std::size_t cc = 0; cc < m.cols; ++cc) {
                        padded.at(r, cc) = m.at(r, cc);
                    }
                }
                CHECK(back == padded);
                // re-encoding the decoded matrix reproduces identical bytes
                CHECK(encode(back, level) == c);
                ++cases;
            }
        }
    }
    CHECK(cases == 18);
}

TEST_CASE("prune_magnitude fixtures") {
    CHECK(row_values(prune_magnitude(row_i8({1, -9, 3, 2}), SparsityLevel::k2of4), 0) ==
          std::vector<int>{0, -9, 3, 0});
    CHECK(row_values(prune_magnitude(row_i8({4, 4, 4, 4}), SparsityLevel::k1of4), 0) ==
          std::vector<int>{4, 0, 0, 0});

    DenseMatrix sparse = make_random_pattern_dense(Precision::kInt8, 6, 24,
                                                   SparsityLevel::k1of3, 5);
    CHECK(prune_magnitude(sparse, SparsityLevel::k1of3) == sparse);  // idempotent
}

TEST_CASE("pruning keeps the heaviest subset of every group") {
    for (SparsityLevel level : kSparseLevels) {
        const auto g = static_cast<std::size_t>(group_size(level));
        const auto quota = static_cast<std::size_t>(nonzeros_per_group(level));
        DenseMatrix m = make_random_dense(Precision::kBfloat16, 5, 4 * g, 1234);
        DenseMatrix pruned = prune_magnitude(m, level);
        CHECK(validate_pattern(pruned, level));
        for (std::size_t r = 0; r < m.rows; ++r) {
            for (std::size_t base = 0; base < m.cols; base += g) {
                double kept = 0;
                for (std::size_t i = 0; i < g; ++i) {
                    if (!raw_is_zero(pruned.precision, pruned.at(r, base + i))) {
                        // survivors are unchanged
                        CHECK(pruned.at(r, base + i) == m.at(r, base + i));
                        kept += std::fabs(raw_to_double(m.precision, m.at(r, base + i)));
                    }
                }
                // enumerate every size-quota subset of the group
                std::vector<std::size_t> pick(quota);
                double best = 0;
                auto recurse = [&](auto&& self, std::size_t start, std::size_t depth,
                                   double sum) -> void {
                    if (depth == quota) {
                        best = std::max(best, sum);
                        return;
                    }
                    for (std::size_t i = start; i < g; ++i) {
                        self(self, i + 1, depth + 1,
                             sum + std::fabs(raw_to_double(m.precision, m.at(r, base + i))));
                    }
                };
                recurse(recurse, 0, 0, 0.0);
                CHECK(kept == doctest::Approx(best));
            }
        }
    }
}

TEST_CASE("compression ratios match the published summary") {
    CHECK(compression_ratio(SparsityLevel::kDense, Precision::kInt8) == 1.0);
    CHECK(compression_ratio(SparsityLevel::kDense, Precision::kBfloat16) == 1.0);
    CHECK(compression_ratio(SparsityLevel::k2of4, Precision::kInt8) ==
          doctest::Approx(1.6).epsilon(1e-12));
    CHECK(compression_ratio(SparsityLevel::k2of4, Precision::kBfloat16) ==
          doctest::Approx(1.78).epsilon(0.005));
    CHECK(compression_ratio(SparsityLevel::k1of3, Precision::kInt8) ==
          doctest::Approx(2.4).epsilon(1e-12));
    CHECK(compression_ratio(SparsityLevel::k1of3, Precision::kBfloat16) ==
          doctest::Approx(2.67).epsilon(0.005));
    CHECK(compression_ratio(SparsityLevel::k1of4, Precision::kInt8) ==
          doctest::Approx(3.2).epsilon(1e-12));
    CHECK(compression_ratio(SparsityLevel::k1of4, Precision::kBfloat16) ==
          doctest::Approx(3.56).epsilon(0.005));
}

TEST_CASE("index format beats the bitmap format exactly where expected") {
    // 2:4 ties, 1:3 and 1:4 strictly favor the index format
    CHECK(bitmap_compression_ratio(SparsityLevel::k2of4, Precision::kInt8) ==
          doctest::Approx(1.6));
    CHECK(compression_ratio(SparsityLevel::k2of4, Precision::kInt8) ==
          doctest::Approx(bitmap_compression_ratio(SparsityLevel::k2of4, Precision::kInt8)));
    for (Precision p : {Precision::kInt8, Precision::kBfloat16}) {
        for (SparsityLevel level : {SparsityLevel::k1of3, SparsityLevel::k1of4}) {
            CHECK(compression_ratio(level, p) > bitmap_compression_ratio(level, p));
        }
    }
    CHECK(bitmap_compression_ratio(SparsityLevel::k1of4, Precision::kInt8) ==
          doctest::Approx(32.0 / 12.0));
    CHECK(compression_ratio(SparsityLevel::k1of4, Precision::kInt8) /
              bitmap_compression_ratio(SparsityLevel::k1of4, Precision::kInt8) ==
          doctest::Approx(1.20).epsilon(0.005));
    CHECK(bitmap_compression_ratio(SparsityLevel::k1of4, Precision::kBfloat16) ==
          doctest::Approx(3.2));
    CHECK(compression_ratio(SparsityLevel::k1of4, Precision::kBfloat16) /
              bitmap_compression_ratio(SparsityLevel::k1of4, Precision::kBfloat16) ==
          doctest::Approx(1.1111).epsilon(0.005));
}

TEST_CASE("canonical stream oracle agrees with encode") {
    for (SparsityLevel level : kSparseLevels) {
        DenseMatrix m = make_random_pattern_dense(Precision::kInt8, 4, 24, level, 777);
        CompressedMatrix c = encode(m, level);
        const std::size_t per_row = c.entries_per_row();
        for (std::size_t r = 0; r < m.rows; ++r) {
            auto stream = oracle::canonical_stream(m, r, level);
            REQUIRE(stream.size() == per_row);
            for (std::size_t e = 0; e < per_row; ++e) {
                CHECK(stream[e].value == c.values[r * per_row + e]);
                CHECK(stream[e].position == c.indices[r * per_row + e]);
            }
        }
    }
}
