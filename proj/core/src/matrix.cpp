#include "sst/matrix.hpp"

#include <bit>
#include <random>

#include "sst/sparse_format.hpp"

namespace sst {

DenseMatrix DenseMatrix::identity(Precision p, std::size_t n) {
    DenseMatrix m(p, n, n);
    RawScalar one = p == Precision::kInt8 ? raw_from_int8(1) : float_to_bf16(1.0f);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = one;
    return m;
}

float AccumMatrix::float_at(std::size_t r, std::size_t c) const {
    return std::bit_cast<float>(raw_at(r, c));
}

std::uint64_t checksum(const AccumMatrix& m) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(m.rows));
    mix(static_cast<std::uint64_t>(m.cols));
    for (std::uint32_t w : m.bits) mix(w);
    return h;
}

namespace {

// mt19937_64 raw output is standardized; the bounded draw below avoids
// std::uniform_int_distribution, whose algorithm varies between stdlibs.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

RawScalar draw_scalar(Precision p, std::mt19937_64& rng) {
    if (p == Precision::kInt8) {
        return raw_from_int8(static_cast<std::int8_t>(bounded(rng, 256) - 128));
    }
    // n/64 with n in [-255, 255] \ {0}: at most 8 significant bits, so every
    // draw is exactly representable in bfloat16.
    std::int64_t n = static_cast<std::int64_t>(bounded(rng, 510)) - 255;
    if (n >= 0) ++n;
    return float_to_bf16(static_cast<float>(n) / 64.0f);
}

}  // namespace

DenseMatrix make_random_dense(Precision p, std::size_t rows, std::size_t cols,
                              std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    DenseMatrix m(p, rows, cols);
    for (auto& v : m.data) v = draw_scalar(p, rng);
    return m;
}

DenseMatrix make_random_pattern_dense(Precision p, std::size_t rows, std::size_t cols,
                                      SparsityLevel level, std::uint64_t seed) {
    DenseMatrix m = make_random_dense(p, rows, cols, seed);
    if (!is_sparse(level)) return m;
    return prune_magnitude(m, level);
}

}  // namespace sst
