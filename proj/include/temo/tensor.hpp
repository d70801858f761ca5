#pragma once

// Dense row-major 2-D tensor and the kernel set the batched evolutionary
// pipeline is written against. Every kernel is bit-reproducible: per output
// element the reduction order is fixed, so lane count and scheduling never
// change results. There is no implicit broadcasting; shape expansion is
// always explicit through repeat_col / repeat_row.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "temo/parallel.hpp"

namespace temo {

struct Tensor2D {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data; // row-major, size == rows * cols

    Tensor2D() = default;
    Tensor2D(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    static Tensor2D from_rows(std::initializer_list<std::initializer_list<double>> init) {
        Tensor2D t(init.size(), init.size() ? init.begin()->size() : 0);
        std::size_t i = 0;
        for (const auto& row : init) {
            if (row.size() != t.cols)
                throw std::invalid_argument("Tensor2D::from_rows: ragged rows");
            std::size_t j = 0;
            for (double v : row) t(i, j++) = v;
            ++i;
        }
        return t;
    }

    static Tensor2D identity(std::size_t n) {
        Tensor2D t(n, n, 0.0);
        for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
        return t;
    }

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

    std::size_t size() const { return rows * cols; }

    bool same_shape(const Tensor2D& o) const { return rows == o.rows && cols == o.cols; }
};

namespace detail {

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Scalar conventions shared by the batched kernels and their callers.

/// Sign with sgn(x) = 1 for x >= 0, -1 otherwise.
inline double sgn(double x) { return x >= 0.0 ? 1.0 : -1.0; }

/// Step function with H(x) = 1 for x >= 0, 0 otherwise.
inline double heaviside(double x) { return x >= 0.0 ? 1.0 : 0.0; }

/// arccos with the argument clamped to [-1, 1] first.
inline double acos_clamped(double x) {
    if (x > 1.0) x = 1.0;
    if (x < -1.0) x = -1.0;
    return std::acos(x);
}

inline double clamp(double x, double lo, double hi) {
    return x < lo ? lo : (x > hi ? hi : x);
}

// ---------------------------------------------------------------------------
// Elementwise maps. Binary forms require identical shapes.

template <class F>
Tensor2D map(const Tensor2D& a, F&& f) {
    Tensor2D out(a.rows, a.cols);
    const double* src = a.data.data();
    double* dst = out.data.data();
    parallel_for(a.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) dst[i] = f(src[i]);
    });
    return out;
}

template <class F>
Tensor2D zip(const Tensor2D& a, const Tensor2D& b, F&& f) {
    detail::require(a.same_shape(b), "zip: shape mismatch");
    Tensor2D out(a.rows, a.cols);
    const double* pa = a.data.data();
    const double* pb = b.data.data();
    double* dst = out.data.data();
    parallel_for(a.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) dst[i] = f(pa[i], pb[i]);
    });
    return out;
}

inline Tensor2D add(const Tensor2D& a, const Tensor2D& b) {
    return zip(a, b, [](double x, double y) { return x + y; });
}
inline Tensor2D sub(const Tensor2D& a, const Tensor2D& b) {
    return zip(a, b, [](double x, double y) { return x - y; });
}
inline Tensor2D hadamard(const Tensor2D& a, const Tensor2D& b) {
    return zip(a, b, [](double x, double y) { return x * y; });
}
inline Tensor2D divide(const Tensor2D& a, const Tensor2D& b) {
    return zip(a, b, [](double x, double y) { return x / y; });
}

/// Elementwise power. Negative base with a fractional exponent is a contract
/// violation (every base produced by the reproduction formulas is in [0, 2]).
inline Tensor2D pow_elements(const Tensor2D& a, double e) {
    if (e != std::floor(e)) {
        for (double x : a.data)
            if (x < 0.0)
                throw std::domain_error("pow_elements: negative base, fractional exponent");
    }
    return map(a, [e](double x) { return std::pow(x, e); });
}

// ---------------------------------------------------------------------------
// Linear algebra and reductions.

/// Matrix product, n x k times k x p. Per output element the k-summation runs
/// in ascending order, so results do not depend on the lane partition.
inline Tensor2D matmul(const Tensor2D& a, const Tensor2D& b) {
    detail::require(a.cols == b.rows, "matmul: inner dimensions differ");
    Tensor2D out(a.rows, b.cols, 0.0);
    const std::size_t k = a.cols, p = b.cols;
    parallel_for(a.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double* arow = a.data.data() + i * k;
            double* orow = out.data.data() + i * p;
            for (std::size_t kk = 0; kk < k; ++kk) {
                const double av = arow[kk];
                const double* brow = b.data.data() + kk * p;
                for (std::size_t j = 0; j < p; ++j) orow[j] += av * brow[j];
            }
        }
    });
    return out;
}

inline Tensor2D transpose(const Tensor2D& a) {
    Tensor2D out(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) out(j, i) = a(i, j);
    return out;
}

/// Euclidean norm of each row, n x 1.
inline Tensor2D row_norms(const Tensor2D& a) {
    Tensor2D out(a.rows, 1);
    parallel_for(a.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            double s = 0.0;
            const double* r = a.data.data() + i * a.cols;
            for (std::size_t j = 0; j < a.cols; ++j) s += r[j] * r[j];
            out.data[i] = std::sqrt(s);
        }
    });
    return out;
}

struct RowMinResult {
    Tensor2D values;                  // n x 1
    std::vector<std::size_t> indices; // argmin per row, ties -> lowest column
};

inline RowMinResult row_min_argmin(const Tensor2D& a) {
    detail::require(a.cols >= 1, "row_min_argmin: needs at least one column");
    RowMinResult res{Tensor2D(a.rows, 1), std::vector<std::size_t>(a.rows)};
    parallel_for(a.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double* r = a.data.data() + i * a.cols;
            double best = r[0];
            std::size_t arg = 0;
            for (std::size_t j = 1; j < a.cols; ++j) {
                if (r[j] < best) {
                    best = r[j];
                    arg = j;
                }
            }
            res.values.data[i] = best;
            res.indices[i] = arg;
        }
    });
    return res;
}

/// Column-wise minimum, 1 x k.
inline Tensor2D col_min(const Tensor2D& a) {
    detail::require(a.rows >= 1, "col_min: empty tensor");
    Tensor2D out(1, a.cols);
    for (std::size_t j = 0; j < a.cols; ++j) out.data[j] = a(0, j);
    for (std::size_t i = 1; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j)
            if (a(i, j) < out.data[j]) out.data[j] = a(i, j);
    return out;
}

inline Tensor2D col_max(const Tensor2D& a) {
    detail::require(a.rows >= 1, "col_max: empty tensor");
    Tensor2D out(1, a.cols);
    for (std::size_t j = 0; j < a.cols; ++j) out.data[j] = a(0, j);
    for (std::size_t i = 1; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j)
            if (a(i, j) > out.data[j]) out.data[j] = a(i, j);
    return out;
}

// ---------------------------------------------------------------------------
// Shape expansion.

/// Replicate an n x 1 column r times -> n x r.
inline Tensor2D repeat_col(const Tensor2D& v, std::size_t r) {
    detail::require(v.cols == 1, "repeat_col: input must be n x 1");
    detail::require(r >= 1, "repeat_col: r must be positive");
    Tensor2D out(v.rows, r);
    parallel_for(v.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double x = v.data[i];
            double* row = out.data.data() + i * r;
            for (std::size_t j = 0; j < r; ++j) row[j] = x;
        }
    });
    return out;
}

/// Replicate a 1 x r row n times -> n x r.
inline Tensor2D repeat_row(const Tensor2D& v, std::size_t n) {
    detail::require(v.rows == 1, "repeat_row: input must be 1 x r");
    detail::require(n >= 1, "repeat_row: n must be positive");
    Tensor2D out(n, v.cols);
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            double* row = out.data.data() + i * v.cols;
            for (std::size_t j = 0; j < v.cols; ++j) row[j] = v.data[j];
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Masking and gathering.

/// Replace every element satisfying pred; all others are copied bit-identically.
template <class Pred>
Tensor2D masked_replace(const Tensor2D& a, Pred&& pred, double replacement) {
    return map(a, [&](double x) { return pred(x) ? replacement : x; });
}

/// Row gather with -1 sentinels. A sentinel gathers row 0 as a placeholder;
/// callers mask those slots afterwards.
inline Tensor2D gather_rows(const Tensor2D& a, std::span<const std::ptrdiff_t> idx) {
    Tensor2D out(idx.size(), a.cols);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const std::ptrdiff_t k = idx[i];
        detail::require(k >= -1 && k < static_cast<std::ptrdiff_t>(a.rows),
                        "gather_rows: index out of range");
        const std::size_t src = k < 0 ? 0 : static_cast<std::size_t>(k);
        for (std::size_t j = 0; j < a.cols; ++j) out(i, j) = a(src, j);
    }
    return out;
}

inline Tensor2D vconcat(const Tensor2D& a, const Tensor2D& b) {
    if (a.rows == 0) return b;
    if (b.rows == 0) return a;
    detail::require(a.cols == b.cols, "vconcat: column counts differ");
    Tensor2D out(a.rows + b.rows, a.cols);
    std::copy(a.data.begin(), a.data.end(), out.data.begin());
    std::copy(b.data.begin(), b.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(a.size()));
    return out;
}

inline constexpr double inf = std::numeric_limits<double>::infinity();

} // namespace temo
