#pragma once

// Scalar, loop-based reference implementations of every batched kernel:
// selection, the reproduction operators, dominance sorting, and the metric
// definitions, plus a whole-pipeline scalar run used as the performance
// baseline. Everything here is written with explicit per-individual,
// per-gene loops and set-style partitions, deliberately unoptimized and
// sharing no kernel code with the batched implementations. Oracles consume
// the same frozen random blocks as their batched counterparts.

#include <string>
#include <vector>

#include "temo/algorithms.hpp"

namespace temo::oracle {

using Row = std::vector<double>;
using Matrix = std::vector<Row>; // set-style population carrier

inline Matrix to_matrix(const Tensor2D& t) {
    Matrix m(t.rows, Row(t.cols));
    for (std::size_t i = 0; i < t.rows; ++i)
        for (std::size_t j = 0; j < t.cols; ++j) m[i][j] = t(i, j);
    return m;
}

inline Tensor2D to_tensor(const Matrix& m) {
    if (m.empty()) return {};
    Tensor2D t(m.size(), m[0].size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) t(i, j) = m[i][j];
    return t;
}

namespace detail {

inline double step(double x) { return x >= 0.0 ? 1.0 : 0.0; }
inline double sign(double x) { return x >= 0.0 ? 1.0 : -1.0; }
inline double arc_cos(double c) {
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return std::acos(c);
}
inline double clip(double x, double lo, double hi) {
    return x < lo ? lo : (x > hi ? hi : x);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Selection.

/// Set-style reference-vector selection: per-individual angle loops, explicit
/// subpopulation lists, per-member APD. Same tie conventions as the batched
/// version (lowest index).
inline SelectionOutcome oracle_rv_select(const Tensor2D& f_in, const RefVectorSet& refs,
                                         std::size_t t, std::size_t t_max, double alpha) {
    const Matrix f = to_matrix(f_in);
    const Matrix v = to_matrix(refs.v);
    const std::size_t n = f.size(), r = v.size(), m = f.empty() ? 0 : f[0].size();

    Row z(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        z[j] = f[0][j];
        for (std::size_t i = 1; i < n; ++i)
            if (f[i][j] < z[j]) z[j] = f[i][j];
    }
    Matrix fp(n, Row(m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) fp[i][j] = f[i][j] - z[j];

    Row fp_norm(n), v_norm(r);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += fp[i][j] * fp[i][j];
        fp_norm[i] = std::sqrt(s);
    }
    for (std::size_t j = 0; j < r; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += v[j][k] * v[j][k];
        v_norm[j] = std::sqrt(s);
    }

    // Angle of every individual to every vector; nearest-vector association.
    Matrix theta(n, Row(r));
    std::vector<std::size_t> assoc(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            if (fp_norm[i] == 0.0) {
                theta[i][j] = 0.0;
            } else {
                double dot = 0.0;
                for (std::size_t k = 0; k < m; ++k) dot += fp[i][k] * v[j][k];
                theta[i][j] = detail::arc_cos(dot / (fp_norm[i] * v_norm[j]));
            }
        }
        std::size_t arg = 0;
        for (std::size_t j = 1; j < r; ++j)
            if (theta[i][j] < theta[i][arg]) arg = j;
        assoc[i] = arg;
    }

    std::vector<std::vector<std::size_t>> subpop(r);
    for (std::size_t i = 0; i < n; ++i) subpop[assoc[i]].push_back(i);

    const double penalty =
        static_cast<double>(m) *
        std::pow(static_cast<double>(t) / static_cast<double>(t_max), alpha);

    SelectionOutcome out;
    out.validity.assign(r, 0);
    out.apd_table = Tensor2D(n, r, inf);
    for (std::size_t j = 0; j < r; ++j) {
        double best_apd = inf;
        std::size_t best_row = 0;
        for (const std::size_t i : subpop[j]) {
            const double apd =
                (1.0 + penalty * (theta[i][j] / refs.gamma.data[j])) * fp_norm[i];
            out.apd_table(i, j) = apd;
            if (!out.validity[j] || apd < best_apd) {
                best_apd = apd;
                best_row = i;
                out.validity[j] = 1;
            }
        }
        if (out.validity[j]) out.elite_indices.push_back(best_row);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reproduction operators, one gene at a time.

inline Matrix oracle_sbx(const Matrix& x, RngStream& stream, const GaParams& p,
                         const Row& lower, const Row& upper) {
    const std::size_t n = x.size(), d = x[0].size(), half = n / 2;
    const Tensor2D mc = uniform_tensor(stream, half, d);
    const Tensor2D r1 = uniform_tensor(stream, half, d);
    const Tensor2D r2 = uniform_tensor(stream, half, d);
    const Tensor2D r3 = uniform_tensor(stream, half, 1);
    Matrix out(n, Row(d));
    for (std::size_t pair = 0; pair < half; ++pair) {
        const Row& x1 = x[pair];
        const Row& x2 = x[half + pair];
        const double hc = detail::step(r3(pair, 0) - p.pc);
        for (std::size_t j = 0; j < d; ++j) {
            const double m = mc(pair, j);
            const double spread_low = std::pow(2.0 * m, 1.0 / (p.eta + 1.0));
            const double spread_high = std::pow(2.0 - 2.0 * m, -1.0 / (p.eta + 1.0));
            const double hm = detail::step(0.5 - m);
            double b = detail::sign(r1(pair, j) - 0.5) *
                       (hm * spread_low + (1.0 - hm) * spread_high);
            const double hr = detail::step(r2(pair, j) - 0.5);
            b = (1.0 - hc) * ((1.0 - hr) * b + hr) + hc;
            out[pair][j] =
                detail::clip(((1.0 + b) * x1[j] + (1.0 - b) * x2[j]) / 2.0, lower[j], upper[j]);
            out[half + pair][j] =
                detail::clip(((1.0 - b) * x1[j] + (1.0 + b) * x2[j]) / 2.0, lower[j], upper[j]);
        }
    }
    if (n % 2 != 0) out[n - 1] = x[n - 1];
    return out;
}

inline Matrix oracle_pm(const Matrix& x, RngStream& stream, const GaParams& p,
                        const Row& lower, const Row& upper) {
    const std::size_t n = x.size(), d = x[0].size();
    const Tensor2D r4 = uniform_tensor(stream, n, d);
    const Tensor2D mmut = uniform_tensor(stream, n, d);
    const double rate = p.pm / static_cast<double>(d);
    Matrix out = x;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (detail::step(rate - r4(i, j)) == 0.0) continue;
            const double range = upper[j] - lower[j];
            if (range <= 0.0) continue;
            const double u = mmut(i, j);
            const double dist_low = 1.0 - (x[i][j] - lower[j]) / range;
            const double delta_low =
                range *
                (std::pow(2.0 * u + (1.0 - 2.0 * u) * std::pow(dist_low, p.xi + 1.0),
                          1.0 / (p.xi + 1.0)) -
                 1.0);
            const double dist_high = 1.0 - (upper[j] - x[i][j]) / range;
            const double delta_high =
                range * (1.0 - std::pow(2.0 * (1.0 - u) +
                                            2.0 * (u - 0.5) * std::pow(dist_high, p.xi + 1.0),
                                        1.0 / (p.xi + 1.0)));
            const double delta =
                delta_low * detail::step(0.5 - u) + delta_high * detail::step(u - 0.5);
            out[i][j] = detail::clip(x[i][j] + delta, lower[j], upper[j]);
        }
    }
    return out;
}

inline Matrix oracle_ga(const Matrix& x, RngStream& stream, const GaParams& p,
                        const Row& lower, const Row& upper) {
    const std::vector<std::size_t> perm = shuffle_indices(stream, x.size());
    Matrix shuffled(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) shuffled[i] = x[perm[i]];
    return oracle_pm(oracle_sbx(shuffled, stream, p, lower, upper), stream, p, lower, upper);
}

inline Matrix oracle_de(const Matrix& x, RngStream& stream, const DeParams& p,
                        const Row& lower, const Row& upper) {
    const std::size_t n = x.size(), d = x[0].size();
    const Tensor2D r_sel = uniform_tensor(stream, n, 3);
    const Tensor2D r_j = uniform_tensor(stream, n, 1);
    const Tensor2D r_cr = uniform_tensor(stream, n, d);
    Matrix out(n, Row(d));
    for (std::size_t i = 0; i < n; ++i) {
        const auto nd = static_cast<double>(n);
        std::size_t r1 = (i + 1 + static_cast<std::size_t>(r_sel(i, 0) * (nd - 1.0))) % n;
        const std::size_t ea = std::min(i, r1), eb = std::max(i, r1);
        std::size_t r2 = static_cast<std::size_t>(r_sel(i, 1) * (nd - 2.0));
        if (r2 >= ea) ++r2;
        if (r2 >= eb) ++r2;
        std::size_t e[3] = {i, r1, r2};
        std::sort(e, e + 3);
        std::size_t r3 = static_cast<std::size_t>(r_sel(i, 2) * (nd - 3.0));
        for (std::size_t k = 0; k < 3; ++k)
            if (r3 >= e[k]) ++r3;
        const auto j_rand = static_cast<std::size_t>(r_j(i, 0) * static_cast<double>(d));
        for (std::size_t j = 0; j < d; ++j) {
            if (r_cr(i, j) < p.cr || j == j_rand)
                out[i][j] =
                    detail::clip(x[r1][j] + p.f * (x[r2][j] - x[r3][j]), lower[j], upper[j]);
            else
                out[i][j] = x[i][j];
        }
    }
    return out;
}

inline Matrix oracle_pso(const Matrix& x, SwarmState& state, const Row& scores,
                         RngStream& stream, const PsoParams& p, const Row& lower,
                         const Row& upper) {
    const std::size_t n = x.size(), d = x[0].size();
    for (std::size_t i = 0; i < n; ++i) {
        if (scores[i] < state.personal_best_score.data[i]) {
            state.personal_best_score.data[i] = scores[i];
            for (std::size_t j = 0; j < d; ++j) state.personal_best_x(i, j) = x[i][j];
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (state.personal_best_score.data[i] < state.personal_best_score.data[best]) best = i;
    const Tensor2D r1 = uniform_tensor(stream, n, d);
    const Tensor2D r2 = uniform_tensor(stream, n, d);
    Matrix out(n, Row(d));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double v = p.inertia * state.velocities(i, j) +
                             p.c1 * r1(i, j) * (state.personal_best_x(i, j) - x[i][j]) +
                             p.c2 * r2(i, j) * (state.personal_best_x(best, j) - x[i][j]);
            state.velocities(i, j) = v;
            out[i][j] = detail::clip(x[i][j] + v, lower[j], upper[j]);
        }
    }
    return out;
}

inline Matrix oracle_cso(const Matrix& x, const Row& scores, RngStream& stream,
                         const CsoParams& p, const Row& lower, const Row& upper,
                         SwarmState& state) {
    const std::size_t n = x.size(), d = x[0].size();
    const std::vector<std::size_t> perm = shuffle_indices(stream, n);
    const std::size_t pairs = n / 2;
    const Tensor2D r1 = uniform_tensor(stream, pairs, d);
    const Tensor2D r2 = uniform_tensor(stream, pairs, d);
    const Tensor2D r3 = uniform_tensor(stream, pairs, d);
    Row mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += x[i][j];
    for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
    Matrix out = x;
    for (std::size_t q = 0; q < pairs; ++q) {
        const std::size_t a = perm[2 * q], b = perm[2 * q + 1];
        std::size_t win = a, lose = b;
        if (scores[b] < scores[a] || (scores[b] == scores[a] && b < a)) {
            win = b;
            lose = a;
        }
        for (std::size_t j = 0; j < d; ++j) {
            const double v = r1(q, j) * state.velocities(lose, j) +
                             r2(q, j) * (x[win][j] - x[lose][j]) +
                             p.phi * r3(q, j) * (mean[j] - x[lose][j]);
            state.velocities(lose, j) = v;
            out[lose][j] = detail::clip(x[lose][j] + v, lower[j], upper[j]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Metrics and dominance.

inline double oracle_igd(const Matrix& f, const Matrix& f_ref) {
    double total = 0.0;
    for (const Row& ref : f_ref) {
        double best = inf;
        for (const Row& sol : f) {
            double s = 0.0;
            for (std::size_t k = 0; k < ref.size(); ++k)
                s += (sol[k] - ref[k]) * (sol[k] - ref[k]);
            const double dist = std::sqrt(s);
            if (dist < best) best = dist;
        }
        total += best;
    }
    return total / static_cast<double>(f_ref.size());
}

inline double oracle_eu(const Matrix& f, const Matrix& w) {
    double total = 0.0;
    for (const Row& wi : w) {
        double top = -inf;
        for (const Row& fj : f) {
            double dot = 0.0;
            for (std::size_t k = 0; k < wi.size(); ++k) dot += fj[k] * wi[k];
            if (dot > top) top = dot;
        }
        total += top;
    }
    return total / static_cast<double>(w.size());
}

/// Textbook nondominated sorting: repeatedly extract the nondominated subset
/// of the remaining points.
inline std::vector<std::size_t> oracle_nds(const Matrix& f) {
    const std::size_t n = f.size();
    const std::size_t m = n == 0 ? 0 : f[0].size();
    auto dom = [m](const Row& a, const Row& b) {
        bool strict = false;
        for (std::size_t k = 0; k < m; ++k) {
            if (a[k] > b[k]) return false;
            if (a[k] < b[k]) strict = true;
        }
        return strict;
    };
    std::vector<std::size_t> rank(n, 0);
    std::vector<char> assigned(n, 0);
    std::size_t level = 0, remaining = n;
    while (remaining > 0) {
        std::vector<std::size_t> front;
        for (std::size_t i = 0; i < n; ++i) {
            if (assigned[i]) continue;
            bool dominated = false;
            for (std::size_t j = 0; j < n && !dominated; ++j) {
                if (j == i || assigned[j]) continue;
                dominated = dom(f[j], f[i]);
            }
            if (!dominated) front.push_back(i);
        }
        for (const std::size_t i : front) {
            rank[i] = level;
            assigned[i] = 1;
        }
        remaining -= front.size();
        ++level;
    }
    return rank;
}

// ---------------------------------------------------------------------------
// Whole-pipeline scalar baseline (GA operator, DTLZ problems).

inline Row oracle_dtlz_row(int id, const Row& x, std::size_t m) {
    const std::size_t d = x.size();
    Row f(m);
    double g = 0.0;
    if (id == 1 || id == 3) {
        g = static_cast<double>(d - m + 1);
        for (std::size_t i = m - 1; i < d; ++i) {
            const double t = x[i] - 0.5;
            g += t * t - std::cos(20.0 * std::numbers::pi * t);
        }
        g *= 100.0;
    } else {
        for (std::size_t i = m - 1; i < d; ++i) {
            const double t = x[i] - 0.5;
            g += t * t;
        }
    }
    Row pos(m - 1);
    for (std::size_t j = 0; j + 1 < m; ++j)
        pos[j] = id == 4 ? std::pow(x[j], 100.0) : x[j];
    if (id == 1) {
        for (std::size_t j = 0; j < m; ++j) {
            double v = 0.5 * (1.0 + g);
            for (std::size_t i = 0; i + j + 1 < m; ++i) v *= pos[i];
            if (j > 0) v *= 1.0 - pos[m - 1 - j];
            f[j] = v;
        }
    } else {
        for (std::size_t j = 0; j < m; ++j) {
            double v = 1.0 + g;
            for (std::size_t i = 0; i + j + 1 < m; ++i)
                v *= std::cos(pos[i] * std::numbers::pi / 2.0);
            if (j > 0) v *= std::sin(pos[m - 1 - j] * std::numbers::pi / 2.0);
            f[j] = v;
        }
    }
    return f;
}

/// Set-based selection without the diagnostic table, as the original
/// algorithm performs it; used inside the scalar pipeline.
inline std::vector<std::size_t> oracle_select_indices(const Matrix& f,
                                                      const RefVectorSet& refs,
                                                      std::size_t t, std::size_t t_max,
                                                      double alpha) {
    const Matrix v = to_matrix(refs.v);
    const std::size_t n = f.size(), r = v.size(), m = f[0].size();
    Row z = f[0];
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (f[i][j] < z[j]) z[j] = f[i][j];
    Row v_norm(r);
    for (std::size_t j = 0; j < r; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += v[j][k] * v[j][k];
        v_norm[j] = std::sqrt(s);
    }
    const double penalty =
        static_cast<double>(m) *
        std::pow(static_cast<double>(t) / static_cast<double>(t_max), alpha);

    std::vector<std::vector<std::size_t>> subpop(r);
    Row apd_of(n), theta_of(n), norm_of(n);
    for (std::size_t i = 0; i < n; ++i) {
        Row fp(m);
        for (std::size_t j = 0; j < m; ++j) fp[j] = f[i][j] - z[j];
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += fp[j] * fp[j];
        const double nf = std::sqrt(s);
        std::size_t arg = 0;
        double best_theta = 0.0;
        if (nf != 0.0) {
            Row theta(r);
            for (std::size_t j = 0; j < r; ++j) {
                double dot = 0.0;
                for (std::size_t k = 0; k < m; ++k) dot += fp[k] * v[j][k];
                theta[j] = detail::arc_cos(dot / (nf * v_norm[j]));
            }
            for (std::size_t j = 1; j < r; ++j)
                if (theta[j] < theta[arg]) arg = j;
            best_theta = theta[arg];
        }
        subpop[arg].push_back(i);
        theta_of[i] = best_theta;
        norm_of[i] = nf;
        apd_of[i] = (1.0 + penalty * (best_theta / refs.gamma.data[arg])) * nf;
    }
    std::vector<std::size_t> elite;
    for (std::size_t j = 0; j < r; ++j) {
        if (subpop[j].empty()) continue;
        std::size_t best = subpop[j][0];
        for (const std::size_t i : subpop[j])
            if (apd_of[i] < apd_of[best]) best = i;
        elite.push_back(best);
    }
    return elite;
}

/// Scalar loop-based run mirroring rvea_run draw for draw (GA operator,
/// DTLZ problems only). Serves as the timing denominator and the pinned
/// quality baseline.
inline RunRecord oracle_rvea_run(const ProblemInstance& prob, const RunConfig& cfg,
                                 const MetricContext& mc = {}) {
    if (prob.dtlz_id == 0)
        throw std::invalid_argument("oracle_rvea_run: only DTLZ problems are supported");
    if (cfg.op != "ga")
        throw std::invalid_argument("oracle_rvea_run: only the GA operator is supported");
    RunRecord rec;
    const temo::detail::GenerationTimer timer;
    RngStream stream{cfg.seed, 0};
    const std::size_t n = cfg.pop, d = prob.dim, m = prob.num_obj;
    const std::size_t h =
        cfg.lattice_h ? cfg.lattice_h : lattice_density_for(m, n);
    RefVectorSet refs = make_ref_set(m, h);
    const std::size_t adapt_every =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(
                                     cfg.fr * static_cast<double>(cfg.generations))));
    const Row lower = to_matrix(prob.lower)[0];
    const Row upper = to_matrix(prob.upper)[0];

    const Tensor2D u0 = uniform_tensor(stream, n, d);
    Matrix x(n, Row(d));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            x[i][j] = lower[j] + u0(i, j) * (upper[j] - lower[j]);
    Matrix f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = oracle_dtlz_row(prob.dtlz_id, x[i], m);
    if (cfg.track_archive) rec.archive.insert(to_tensor(x), to_tensor(f), cfg.archive_cap);

    for (std::size_t t = 0; t < cfg.generations; ++t) {
        const std::vector<std::size_t> pool_idx = parent_pool_indices(x.size(), n, stream);
        Matrix pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = x[pool_idx[i]];
        Matrix offspring = oracle_ga(pool, stream, cfg.ga, lower, upper);
        Matrix f_off(n);
        for (std::size_t i = 0; i < n; ++i)
            f_off[i] = oracle_dtlz_row(prob.dtlz_id, offspring[i], m);
        Matrix merged_x = x;
        merged_x.insert(merged_x.end(), offspring.begin(), offspring.end());
        Matrix merged_f = f;
        merged_f.insert(merged_f.end(), f_off.begin(), f_off.end());
        const std::vector<std::size_t> elite =
            oracle_select_indices(merged_f, refs, t, cfg.generations, cfg.alpha);
        Matrix nx(elite.size()), nf(elite.size());
        for (std::size_t i = 0; i < elite.size(); ++i) {
            nx[i] = merged_x[elite[i]];
            nf[i] = merged_f[elite[i]];
        }
        x = std::move(nx);
        f = std::move(nf);

        if ((t + 1) % adapt_every == 0) {
            const Tensor2D ft = to_tensor(f);
            adapt(refs, col_min(ft), col_max(ft));
        }
        if (cfg.track_archive) rec.archive.insert(to_tensor(x), to_tensor(f), cfg.archive_cap);

        GenerationRow row;
        row.t = t;
        row.pop_size = x.size();
        temo::detail::fill_metrics(row, cfg.track_archive ? rec.archive.f : to_tensor(f), mc);
        row.elapsed_ms = timer.elapsed_ms();
        rec.rows.push_back(row);
        if (cfg.time_budget_s > 0.0 && row.elapsed_ms >= cfg.time_budget_s * 1e3) break;
    }
    rec.final_x = to_tensor(x);
    rec.final_f = to_tensor(f);
    return rec;
}

} // namespace temo::oracle
