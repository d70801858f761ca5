#pragma once

// Counter-based deterministic randomness. Every draw is a pure function of
// (seed, counter); advancing the counter is the only state change, so the
// batched pipeline and the scalar reference loops can consume identical
// sub-blocks of one logical stream without any sequencing coupling.
//
// Construction (frozen): SplitMix64. The k-th draw for seed s is
//     word = mix64(mix64(s) + k * 0x9E3779B97F4A7C15)
// where mix64 is the Stafford variant-13 finalizer, and uniforms take the top
// 53 bits: (word >> 11) * 2^-53, giving values in [0, 1).

#include <cstdint>
#include <numeric>
#include <vector>

#include "temo/tensor.hpp"

namespace temo {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

} // namespace detail

struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t counter = 0;

    /// Draw at an absolute counter position without touching stream state.
    static double value_at(std::uint64_t seed, std::uint64_t counter) {
        const std::uint64_t w =
            detail::mix64(detail::mix64(seed) + counter * 0x9e3779b97f4a7c15ULL);
        return static_cast<double>(w >> 11) * 0x1.0p-53;
    }

    /// Next uniform in [0, 1); advances the counter by one.
    double next() { return value_at(seed, counter++); }

    /// Stream positioned at this one's seed with an offset counter.
    RngStream at(std::uint64_t c) const { return {seed, c}; }
};

/// Fill a rows x cols tensor in row-major order, consuming exactly
/// rows * cols draws. Element (i, j) uses counter + i*cols + j, so lanes can
/// fill disjoint ranges in parallel with identical results.
inline Tensor2D uniform_tensor(RngStream& stream, std::size_t rows, std::size_t cols) {
    detail::require(rows >= 1 && cols >= 1, "uniform_tensor: empty shape");
    Tensor2D out(rows, cols);
    const std::uint64_t seed = stream.seed;
    const std::uint64_t base = stream.counter;
    parallel_for(out.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            out.data[i] = RngStream::value_at(seed, base + i);
    });
    stream.counter += rows * cols;
    return out;
}

/// Fisher-Yates permutation of [0, n), consuming exactly n - 1 draws.
inline std::vector<std::size_t> shuffle_indices(RngStream& stream, std::size_t n) {
    detail::require(n >= 1, "shuffle_indices: n must be positive");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n - 1; i >= 1; --i) {
        const auto j = static_cast<std::size_t>(stream.next() * static_cast<double>(i + 1));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

} // namespace temo
