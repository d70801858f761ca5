#pragma once

// Reference-vector guided selection, batched end to end: translate the
// objective tensor to the ideal point, compute angles to the reference
// vectors, partition the population by nearest vector, score each
// subpopulation with the angle-penalized distance (APD), and keep the best
// row per vector. Also provides nondominated sorting and crowding distance
// for the NSGA-II baseline.

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "temo/refvec.hpp"
#include "temo/tensor.hpp"

namespace temo {

// ---------------------------------------------------------------------------
// Stage operations.

/// Shift every objective column so its minimum is zero. Returns the shifted
/// tensor and the ideal point z* (1 x m).
inline std::pair<Tensor2D, Tensor2D> translate(const Tensor2D& f) {
    detail::require(f.rows >= 1, "translate: empty objective tensor");
    Tensor2D z = col_min(f);
    Tensor2D fp(f.rows, f.cols);
    parallel_for(f.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            for (std::size_t j = 0; j < f.cols; ++j) fp(i, j) = f(i, j) - z.data[j];
    });
    return {std::move(fp), std::move(z)};
}

/// Pairwise angles between translated objectives and reference vectors,
/// n x r in [0, pi]. A zero-norm objective row (an individual exactly at the
/// ideal point) is defined to have angle 0 to every vector.
inline Tensor2D angles(const Tensor2D& fp, const Tensor2D& v) {
    detail::require(fp.cols == v.cols, "angles: objective count mismatch");
    const Tensor2D dots = matmul(fp, transpose(v));
    const Tensor2D fp_norms = row_norms(fp);
    const Tensor2D v_norms = row_norms(v);
    Tensor2D theta(fp.rows, v.rows);
    parallel_for(fp.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double nf = fp_norms.data[i];
            for (std::size_t j = 0; j < v.rows; ++j) {
                theta(i, j) =
                    nf == 0.0 ? 0.0
                              : acos_clamped(dots(i, j) / (nf * v_norms.data[j]));
            }
        }
    });
    return theta;
}

struct PartitionResult {
    Tensor2D assoc;  // A: per-row argmin column index, replicated to n x r
    Tensor2D t_part; // n x r; entry (i, j) is i where row i's argmin is j, else -1
};

/// Partition the population by nearest reference vector. Each row of t_part
/// carries exactly one non-(-1) entry, equal to the row index.
inline PartitionResult partition(const Tensor2D& theta) {
    const RowMinResult rm = row_min_argmin(theta);
    Tensor2D arg_col(theta.rows, 1);
    for (std::size_t i = 0; i < theta.rows; ++i)
        arg_col.data[i] = static_cast<double>(rm.indices[i]);
    PartitionResult res{repeat_col(arg_col, theta.cols), Tensor2D(theta.rows, theta.cols)};
    parallel_for(theta.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            for (std::size_t j = 0; j < theta.cols; ++j)
                res.t_part(i, j) =
                    rm.indices[i] == j ? static_cast<double>(i) : -1.0;
    });
    return res;
}

namespace detail {

inline double apd_value(double theta, double gamma, double penalty, double norm) {
    return (1.0 + penalty * (theta / gamma)) * norm;
}

inline double apd_penalty(std::size_t m, std::size_t t, std::size_t t_max, double alpha) {
    return static_cast<double>(m) *
           std::pow(static_cast<double>(t) / static_cast<double>(t_max), alpha);
}

} // namespace detail

/// Angle-penalized distance table, n x r. Column j holds
/// (1 + m (t/t_max)^alpha theta_ij / gamma_j) * ||f'_i|| for rows assigned to
/// vector j and +inf elsewhere. Columns are independent: they may be computed
/// in any order or concurrently with identical results.
inline Tensor2D apd_table(const Tensor2D& theta, const Tensor2D& t_part,
                          const Tensor2D& gamma, const Tensor2D& fp, std::size_t t,
                          std::size_t t_max, double alpha, std::size_t m) {
    detail::require(t <= t_max && t_max >= 1, "apd_table: bad generation index");
    for (double g : gamma.data)
        detail::require(g > 0.0, "apd_table: gamma must be positive");
    const std::size_t n = theta.rows, r = theta.cols;
    const Tensor2D norms = row_norms(fp);
    const double penalty = detail::apd_penalty(m, t, t_max, alpha);
    Tensor2D table(n, r);
    parallel_for(r, [&](std::size_t lo, std::size_t hi) {
        std::vector<std::ptrdiff_t> idx(n);
        Tensor2D theta_col(n, 1);
        for (std::size_t j = lo; j < hi; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                idx[i] = static_cast<std::ptrdiff_t>(t_part(i, j));
                theta_col.data[i] = theta(i, j);
            }
            // Gather with -1 -> row-0 placeholder, then mask invalid slots.
            const Tensor2D theta_g = gather_rows(theta_col, idx);
            const Tensor2D norm_g = gather_rows(norms, idx);
            for (std::size_t i = 0; i < n; ++i) {
                table(i, j) = idx[i] < 0 ? inf
                                         : detail::apd_value(theta_g.data[i], gamma.data[j],
                                                             penalty, norm_g.data[i]);
            }
        }
    });
    return table;
}

// ---------------------------------------------------------------------------
// Full selection.

struct SelectionOutcome {
    std::vector<std::size_t> elite_indices; // one per valid vector, ascending vector index
    std::vector<char> validity;             // per reference vector
    Tensor2D apd_table;                     // n x r diagnostic (empty if not requested)
};

namespace detail {

struct RvCore {
    std::vector<std::size_t> assoc; // nearest vector per row
    std::vector<double> theta;      // angle to the associated vector
    std::vector<double> apd;        // APD against the associated vector
};

// Association by maximum cosine; arccos is monotone, so this matches the
// argmin over the angle tensor, and the angle itself is only evaluated for
// the associated pair.
inline RvCore rv_core(const Tensor2D& f, const RefVectorSet& refs, std::size_t t,
                      std::size_t t_max, double alpha) {
    require(f.cols == refs.v.cols, "rv_select: objective count mismatch");
    require(t_max >= 1, "rv_select: t_max must be positive");
    for (double g : refs.gamma.data) require(g > 0.0, "rv_select: gamma must be positive");
    const std::size_t n = f.rows, r = refs.v.rows, m = f.cols;
    const Tensor2D z = col_min(f);
    Tensor2D fp(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) fp(i, j) = f(i, j) - z.data[j];
    const Tensor2D fp_norms = row_norms(fp);
    const Tensor2D v_norms = row_norms(refs.v);
    const double penalty = apd_penalty(m, t, t_max, alpha);

    RvCore core{std::vector<std::size_t>(n), std::vector<double>(n), std::vector<double>(n)};
    const Tensor2D& v = refs.v;
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double nf = fp_norms.data[i];
            std::size_t arg = 0;
            double best_theta;
            if (nf == 0.0) {
                best_theta = 0.0; // at the ideal point: angle 0 to every vector
            } else {
                const double* fr = fp.data.data() + i * m;
                double best_cos = -inf;
                for (std::size_t j = 0; j < r; ++j) {
                    const double* vr = v.data.data() + j * m;
                    double dot = 0.0;
                    for (std::size_t k = 0; k < m; ++k) dot += fr[k] * vr[k];
                    const double c = dot / (nf * v_norms.data[j]);
                    if (c > best_cos) {
                        best_cos = c;
                        arg = j;
                    }
                }
                best_theta = acos_clamped(best_cos);
            }
            core.assoc[i] = arg;
            core.theta[i] = best_theta;
            core.apd[i] = apd_value(best_theta, refs.gamma.data[arg], penalty, nf);
        }
    });
    return core;
}

} // namespace detail

/// One elite row per reference vector, chosen by minimal APD within the
/// vector's subpopulation (ties -> lowest row index). Vectors with an empty
/// subpopulation are flagged invalid. Equivalent to composing
/// translate -> angles -> partition -> apd_table -> per-column argmin.
inline SelectionOutcome rv_select(const Tensor2D& f, const RefVectorSet& refs,
                                  std::size_t t, std::size_t t_max, double alpha,
                                  bool want_table = true) {
    const std::size_t n = f.rows, r = refs.v.rows;
    const detail::RvCore core = detail::rv_core(f, refs, t, t_max, alpha);

    SelectionOutcome out;
    out.validity.assign(r, 0);
    std::vector<std::size_t> best(r, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = core.assoc[i];
        if (!out.validity[j] || core.apd[i] < core.apd[best[j]]) {
            best[j] = i;
            out.validity[j] = 1;
        }
    }
    for (std::size_t j = 0; j < r; ++j)
        if (out.validity[j]) out.elite_indices.push_back(best[j]);
    if (want_table) {
        out.apd_table = Tensor2D(n, r, inf);
        for (std::size_t i = 0; i < n; ++i)
            out.apd_table(i, core.assoc[i]) = core.apd[i];
    }
    return out;
}

/// Each row's APD against its associated reference vector, n x 1. Used to
/// scalarize fitness for the swarm operators.
inline Tensor2D apd_scores(const Tensor2D& f, const RefVectorSet& refs, std::size_t t,
                           std::size_t t_max, double alpha) {
    const detail::RvCore core = detail::rv_core(f, refs, t, t_max, alpha);
    Tensor2D scores(f.rows, 1);
    for (std::size_t i = 0; i < f.rows; ++i) scores.data[i] = core.apd[i];
    return scores;
}

// ---------------------------------------------------------------------------
// Dominance machinery (minimization).

/// a dominates b: a <= b in every objective and a < b in at least one.
inline bool dominates(std::span<const double> a, std::span<const double> b) {
    bool strict = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) return false;
        if (a[k] < b[k]) strict = true;
    }
    return strict;
}

/// Fast nondominated sort; returns the front rank of each row (rank 0 is the
/// nondominated set).
inline std::vector<std::size_t> nondominated_sort(const Tensor2D& f) {
    const std::size_t n = f.rows;
    std::vector<std::vector<std::uint32_t>> dominated(n);
    std::vector<std::uint32_t> dom_count(n, 0);
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto fi = f.row(i);
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                if (dominates(fi, f.row(j)))
                    dominated[i].push_back(static_cast<std::uint32_t>(j));
                else if (dominates(f.row(j), fi))
                    ++dom_count[i];
            }
        }
    });
    std::vector<std::size_t> rank(n, 0);
    std::vector<std::uint32_t> current;
    for (std::size_t i = 0; i < n; ++i)
        if (dom_count[i] == 0) current.push_back(static_cast<std::uint32_t>(i));
    std::size_t level = 0;
    while (!current.empty()) {
        std::vector<std::uint32_t> next;
        for (const std::uint32_t i : current) {
            rank[i] = level;
            for (const std::uint32_t j : dominated[i])
                if (--dom_count[j] == 0) next.push_back(j);
        }
        ++level;
        std::sort(next.begin(), next.end());
        current = std::move(next);
    }
    return rank;
}

/// NSGA-II crowding distance of one front, k x 1. Boundary points per
/// objective are +inf; interior points sum normalized neighbor gaps; an
/// objective with zero range contributes nothing.
inline Tensor2D crowding_distance(const Tensor2D& front) {
    const std::size_t k = front.rows, m = front.cols;
    detail::require(k >= 1, "crowding_distance: empty front");
    Tensor2D dist(k, 1, 0.0);
    if (k <= 2) {
        for (double& v : dist.data) v = inf;
        return dist;
    }
    std::vector<std::size_t> order(k);
    for (std::size_t obj = 0; obj < m; ++obj) {
        for (std::size_t i = 0; i < k; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (front(a, obj) != front(b, obj)) return front(a, obj) < front(b, obj);
            return a < b;
        });
        const double range = front(order[k - 1], obj) - front(order[0], obj);
        if (range <= 0.0) continue;
        dist.data[order[0]] = inf;
        dist.data[order[k - 1]] = inf;
        for (std::size_t i = 1; i + 1 < k; ++i)
            dist.data[order[i]] += (front(order[i + 1], obj) - front(order[i - 1], obj)) / range;
    }
    return dist;
}

/// NSGA-II environmental selection: fill by ascending rank, split the last
/// front by descending crowding distance (ties -> lowest row index).
inline std::vector<std::size_t> nsga2_select(const Tensor2D& f, std::size_t target) {
    detail::require(target <= f.rows, "nsga2_select: target exceeds population");
    const std::vector<std::size_t> rank = nondominated_sort(f);
    const std::size_t n = f.rows;
    std::vector<std::size_t> selected;
    selected.reserve(target);
    std::size_t level = 0;
    while (selected.size() < target) {
        std::vector<std::size_t> front_rows;
        for (std::size_t i = 0; i < n; ++i)
            if (rank[i] == level) front_rows.push_back(i);
        if (selected.size() + front_rows.size() <= target) {
            selected.insert(selected.end(), front_rows.begin(), front_rows.end());
        } else {
            Tensor2D front(front_rows.size(), f.cols);
            for (std::size_t i = 0; i < front_rows.size(); ++i)
                for (std::size_t j = 0; j < f.cols; ++j) front(i, j) = f(front_rows[i], j);
            const Tensor2D crowd = crowding_distance(front);
            std::vector<std::size_t> by_crowd(front_rows.size());
            for (std::size_t i = 0; i < by_crowd.size(); ++i) by_crowd[i] = i;
            std::sort(by_crowd.begin(), by_crowd.end(), [&](std::size_t a, std::size_t b) {
                if (crowd.data[a] != crowd.data[b]) return crowd.data[a] > crowd.data[b];
                return front_rows[a] < front_rows[b];
            });
            for (std::size_t i = 0; selected.size() < target; ++i)
                selected.push_back(front_rows[by_crowd[i]]);
        }
        ++level;
    }
    return selected;
}

} // namespace temo
