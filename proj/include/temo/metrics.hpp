#pragma once

// Quality indicators: inverted generational distance, hypervolume (exact
// sweep for two objectives, seeded Monte Carlo for more), and expected
// utility over a weight distribution. Orientation is explicit per call:
// igd / hv_* take minimization sets, eu takes maximization sets; negating
// both the set and the reference point converts between the two.

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "temo/refvec.hpp"
#include "temo/rng.hpp"
#include "temo/tensor.hpp"

namespace temo {

/// Mean distance from each reference-front point to its nearest solution.
inline double igd(const Tensor2D& f, const Tensor2D& f_ref) {
    detail::require(f.rows >= 1 && f_ref.rows >= 1, "igd: empty set");
    detail::require(f.cols == f_ref.cols, "igd: objective count mismatch");
    std::vector<double> nearest(f_ref.rows);
    parallel_for(f_ref.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto ref = f_ref.row(i);
            double best = inf;
            for (std::size_t j = 0; j < f.rows; ++j) {
                const auto sol = f.row(j);
                double s = 0.0;
                for (std::size_t k = 0; k < ref.size(); ++k) {
                    const double diff = sol[k] - ref[k];
                    s += diff * diff;
                }
                if (s < best) best = s;
            }
            nearest[i] = std::sqrt(best);
        }
    });
    double sum = 0.0;
    for (double v : nearest) sum += v;
    return sum / static_cast<double>(f_ref.rows);
}

/// Exact dominated area for two minimized objectives relative to ref,
/// computed by a sweep over the nondominated subset.
inline double hv_exact_2d(const Tensor2D& f, const Tensor2D& ref) {
    detail::require(f.cols == 2 && ref.cols == 2 && ref.rows == 1, "hv_exact_2d: needs 2-D");
    std::vector<std::pair<double, double>> pts;
    pts.reserve(f.rows);
    for (std::size_t i = 0; i < f.rows; ++i) {
        if (f(i, 0) <= ref.data[0] && f(i, 1) <= ref.data[1])
            pts.emplace_back(f(i, 0), f(i, 1));
    }
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    double prev = ref.data[1];
    for (const auto& [x, y] : pts) {
        if (y < prev) {
            area += (ref.data[0] - x) * (prev - y);
            prev = y;
        }
    }
    return area;
}

struct HvEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo hypervolume with an explicit sampling box [lo, ref]. With a
/// fixed box and seed the estimate is monotone under insertions: each
/// sample's dominated flag can only switch on.
inline HvEstimate hv_mc_box(const Tensor2D& f, const Tensor2D& lo, const Tensor2D& ref,
                            std::size_t samples, std::uint64_t seed) {
    detail::require(samples >= 1, "hv_mc: needs at least one sample");
    detail::require(f.rows >= 1 && ref.rows == 1 && ref.cols == f.cols, "hv_mc: bad shapes");
    detail::require(lo.rows == 1 && lo.cols == f.cols, "hv_mc: bad box");
    const std::size_t m = f.cols;
    double volume = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double side = ref.data[k] - lo.data[k];
        if (side <= 0.0) return {0.0, 0.0};
        volume *= side;
    }
    // Count dominated samples; each sample depends only on its index.
    std::vector<std::uint8_t> dominated_flags(samples);
    parallel_for(samples, [&](std::size_t b, std::size_t e) {
        std::vector<double> pt(m);
        for (std::size_t s = b; s < e; ++s) {
            for (std::size_t k = 0; k < m; ++k) {
                const double u = RngStream::value_at(seed, s * m + k);
                pt[k] = lo.data[k] + u * (ref.data[k] - lo.data[k]);
            }
            bool dominated = false;
            for (std::size_t i = 0; i < f.rows && !dominated; ++i) {
                const auto row = f.row(i);
                bool all_le = true;
                for (std::size_t k = 0; k < m; ++k) {
                    if (row[k] > pt[k]) {
                        all_le = false;
                        break;
                    }
                }
                dominated = all_le;
            }
            dominated_flags[s] = dominated ? 1 : 0;
        }
    });
    std::size_t hits = 0;
    for (std::uint8_t v : dominated_flags) hits += v;
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    const double se = volume * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    return {volume * p, se};
}

/// Monte Carlo hypervolume for minimized objectives, sampling the box
/// [componentwise min of F, ref]. Deterministic for a given seed.
inline HvEstimate hv_mc(const Tensor2D& f, const Tensor2D& ref, std::size_t samples,
                        std::uint64_t seed) {
    return hv_mc_box(f, col_min(f), ref, samples, seed);
}

/// Expected utility of a maximization set: mean over weight rows of the best
/// weighted solution value.
inline double eu(const Tensor2D& f, const Tensor2D& w) {
    detail::require(f.rows >= 1 && w.rows >= 1, "eu: empty set");
    detail::require(f.cols == w.cols, "eu: objective count mismatch");
    std::vector<double> best(w.rows);
    parallel_for(w.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto wi = w.row(i);
            double top = -inf;
            for (std::size_t j = 0; j < f.rows; ++j) {
                const auto fj = f.row(j);
                double dot = 0.0;
                for (std::size_t k = 0; k < wi.size(); ++k) dot += fj[k] * wi[k];
                if (dot > top) top = dot;
            }
            best[i] = top;
        }
    });
    double sum = 0.0;
    for (double v : best) sum += v;
    return sum / static_cast<double>(w.rows);
}

/// Simplex-lattice weight rows summing to exactly 1: the last component is
/// one minus the others.
inline Tensor2D utility_weights(std::size_t m, std::size_t H) {
    Tensor2D w = simplex_lattice(m, H);
    for (std::size_t i = 0; i < w.rows; ++i) {
        double partial = 0.0;
        for (std::size_t j = 0; j + 1 < m; ++j) partial += w(i, j);
        w(i, m - 1) = 1.0 - partial;
    }
    return w;
}

/// Smallest lattice density giving at least `target` weight rows.
inline std::size_t utility_weight_density(std::size_t m, std::size_t target = 100) {
    std::size_t h = 1;
    while (lattice_count(m, h) < target) ++h;
    return h;
}

inline Tensor2D negated(const Tensor2D& a) {
    return map(a, [](double x) { return -x; });
}

} // namespace temo
