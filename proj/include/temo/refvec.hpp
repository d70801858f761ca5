#pragma once

// Reference-vector machinery: simplex-lattice generation, unit normalization,
// the per-vector minimum neighbor angle used to normalize the angle penalty,
// and range-based adaptation.

#include <cstddef>
#include <vector>

#include "temo/tensor.hpp"

namespace temo {

/// Number of compositions of H into m nonnegative parts: C(H+m-1, m-1).
inline std::size_t lattice_count(std::size_t m, std::size_t H) {
    std::size_t num = 1;
    for (std::size_t i = 1; i < m; ++i) num = num * (H + i) / i;
    return num;
}

/// Smallest density whose lattice size is closest to target (ties -> smaller H).
inline std::size_t lattice_density_for(std::size_t m, std::size_t target) {
    std::size_t best_h = 1;
    std::size_t best_diff = static_cast<std::size_t>(-1);
    for (std::size_t h = 1; h < 100000; ++h) {
        const std::size_t c = lattice_count(m, h);
        const std::size_t diff = c > target ? c - target : target - c;
        if (diff < best_diff) {
            best_diff = diff;
            best_h = h;
        }
        if (c >= target) break;
    }
    return best_h;
}

/// All compositions of H into m nonnegative parts, divided by H; r x m with
/// rows summing to 1. Rows are emitted in lexicographic order with the
/// leading component descending from H.
inline Tensor2D simplex_lattice(std::size_t m, std::size_t H) {
    detail::require(m >= 2, "simplex_lattice: m must be at least 2");
    detail::require(H >= 1, "simplex_lattice: H must be at least 1");
    const std::size_t r = lattice_count(m, H);
    Tensor2D out(r, m);
    std::vector<std::size_t> parts(m, 0);
    std::size_t row = 0;
    auto emit = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
        if (pos == m - 1) {
            parts[pos] = left;
            for (std::size_t j = 0; j < m; ++j)
                out(row, j) = static_cast<double>(parts[j]) / static_cast<double>(H);
            ++row;
            return;
        }
        for (std::size_t take = left + 1; take-- > 0;) {
            parts[pos] = take;
            self(self, pos + 1, left - take);
        }
    };
    emit(emit, 0, H);
    return out;
}

/// Scale each row to unit Euclidean norm. Zero rows are a contract violation.
inline Tensor2D normalize_to_unit(const Tensor2D& v) {
    Tensor2D out(v.rows, v.cols);
    for (std::size_t i = 0; i < v.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < v.cols; ++j) s += v(i, j) * v(i, j);
        const double norm = std::sqrt(s);
        detail::require(norm > 0.0, "normalize_to_unit: zero row");
        for (std::size_t j = 0; j < v.cols; ++j) out(i, j) = v(i, j) / norm;
    }
    return out;
}

/// Per-vector minimum angle to any other vector (self excluded), r x 1.
/// The pairwise angle matrix has a zero diagonal, so the diagonal is masked
/// out before taking the row minimum; arccos is monotone, so the minimum
/// angle is the arccos of the maximum off-diagonal cosine.
inline Tensor2D min_vector_angles(const Tensor2D& v) {
    detail::require(v.rows >= 2, "min_vector_angles: needs at least two vectors");
    const Tensor2D cos = matmul(v, transpose(v));
    const Tensor2D norms = row_norms(v);
    Tensor2D gamma(v.rows, 1);
    parallel_for(v.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            double best = -inf;
            for (std::size_t j = 0; j < v.rows; ++j) {
                if (j == i) continue;
                const double c = cos(i, j) / (norms.data[i] * norms.data[j]);
                if (c > best) best = c;
            }
            gamma.data[i] = acos_clamped(best);
        }
    });
    for (double g : gamma.data)
        detail::require(g > 0.0, "min_vector_angles: duplicate reference vectors");
    return gamma;
}

struct RefVectorSet {
    Tensor2D v0;    // initial unit vectors, r x m
    Tensor2D v;     // current unit vectors, r x m
    Tensor2D gamma; // min neighbor angle per vector, r x 1
};

inline RefVectorSet make_ref_set(std::size_t m, std::size_t H) {
    RefVectorSet refs;
    refs.v0 = normalize_to_unit(simplex_lattice(m, H));
    refs.v = refs.v0;
    refs.gamma = min_vector_angles(refs.v);
    return refs;
}

/// Rescale the initial vectors by the objective range and re-normalize:
/// v_i = unit(v0_i (*) (z_max - z_min)). Skipped (current V returned) unless
/// the range is strictly positive in every dimension.
inline Tensor2D adapt_vectors(const Tensor2D& v0, const Tensor2D& v_current,
                              const Tensor2D& z_min, const Tensor2D& z_max) {
    detail::require(z_min.rows == 1 && z_max.rows == 1 && z_min.cols == v0.cols &&
                        z_max.cols == v0.cols,
                    "adapt_vectors: range shape mismatch");
    for (std::size_t j = 0; j < v0.cols; ++j)
        if (!(z_max.data[j] > z_min.data[j])) return v_current;
    Tensor2D scaled(v0.rows, v0.cols);
    for (std::size_t i = 0; i < v0.rows; ++i)
        for (std::size_t j = 0; j < v0.cols; ++j)
            scaled(i, j) = v0(i, j) * (z_max.data[j] - z_min.data[j]);
    return normalize_to_unit(scaled);
}

/// In-place adaptation of a reference set; gamma is recomputed when the
/// vectors change.
inline void adapt(RefVectorSet& refs, const Tensor2D& z_min, const Tensor2D& z_max) {
    for (std::size_t j = 0; j < refs.v0.cols; ++j)
        if (!(z_max.data[j] > z_min.data[j])) return;
    refs.v = adapt_vectors(refs.v0, refs.v, z_min, z_max);
    refs.gamma = min_vector_angles(refs.v);
}

} // namespace temo
