#pragma once

// Generation loops: the reference-vector EA with pluggable reproduction
// operators, generational NSGA-II, and random search, all sharing one
// logging/archive contract. The loop itself is sequential; everything inside
// a generation is data-parallel through the kernel layer.

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "temo/metrics.hpp"
#include "temo/operators.hpp"
#include "temo/problems.hpp"
#include "temo/selection.hpp"

namespace temo {

struct RunConfig {
    std::string problem = "dtlz2";
    std::string op = "ga"; // ga | de | pso | cso | random
    std::size_t pop = 105;
    std::size_t lattice_h = 0; // 0 -> density with vector count closest to pop
    std::size_t generations = 100;
    double alpha = 2.0; // APD penalty exponent
    double fr = 0.1;    // reference adaptation frequency
    std::uint64_t seed = 42;
    double time_budget_s = 0.0; // 0 -> run all generations
    std::size_t dim = 0;        // 0 -> problem default
    std::size_t obj = 3;        // DTLZ objective count
    std::size_t horizon = 100;  // toy environment episode length
    bool track_archive = true;
    bool archive_history = false; // keep per-generation archive objective snapshots
    std::size_t archive_cap = 0;  // 0 -> unlimited; else truncate by crowding
    GaParams ga;
    DeParams de;
    PsoParams pso;
    CsoParams cso;
};

/// What to measure each generation. Metrics are evaluated on the archive
/// (or the population when the archive is disabled), in the orientation the
/// problem reports.
struct MetricContext {
    Tensor2D pf_ref;     // IGD reference front (empty -> no IGD)
    Tensor2D hv_ref;     // 1 x m reference point (empty -> no HV)
    double hv_scale = 1.0; // objectives divided by this before HV
    std::size_t hv_samples = 2048;
    std::uint64_t hv_seed = 9001;
    Tensor2D eu_weights; // q x m (empty -> no EU)
    bool maximization = false; // hv_ref / eu are in maximization orientation
};

struct GenerationRow {
    std::size_t t = 0;
    double elapsed_ms = 0.0; // cumulative wall time since the run started
    std::size_t pop_size = 0;
    double igd_value = std::numeric_limits<double>::quiet_NaN();
    double hv_value = std::numeric_limits<double>::quiet_NaN();
    double eu_value = std::numeric_limits<double>::quiet_NaN();
};

/// Running set of mutually nondominated solutions. Inserting keeps the
/// earliest copy of exact-duplicate objective rows and evicts anything a new
/// row dominates.
struct Archive {
    Tensor2D x;
    Tensor2D f;

    void insert(const Tensor2D& xn, const Tensor2D& fn, std::size_t cap = 0) {
        const std::size_t n_old = f.rows, n_new = fn.rows;
        std::vector<char> keep_new(n_new, 1);
        for (std::size_t i = 0; i < n_new; ++i) {
            const auto fi = fn.row(i);
            for (std::size_t j = 0; j < n_old && keep_new[i]; ++j) {
                const auto fo = f.row(j);
                if (std::equal(fi.begin(), fi.end(), fo.begin()) || dominates(fo, fi))
                    keep_new[i] = 0;
            }
            for (std::size_t k = 0; k < n_new && keep_new[i]; ++k) {
                if (k == i) continue;
                const auto fk = fn.row(k);
                if (dominates(fk, fi) ||
                    (k < i && std::equal(fi.begin(), fi.end(), fk.begin())))
                    keep_new[i] = 0;
            }
        }
        std::vector<char> keep_old(n_old, 1);
        for (std::size_t j = 0; j < n_old; ++j) {
            const auto fo = f.row(j);
            for (std::size_t i = 0; i < n_new; ++i) {
                if (dominates(fn.row(i), fo)) {
                    keep_old[j] = 0;
                    break;
                }
            }
        }
        Tensor2D nx(0, xn.cols), nf(0, fn.cols);
        std::size_t survivors = 0;
        for (char k : keep_old) survivors += k;
        for (char k : keep_new) survivors += k;
        nx = Tensor2D(survivors, xn.cols);
        nf = Tensor2D(survivors, fn.cols);
        std::size_t row = 0;
        for (std::size_t j = 0; j < n_old; ++j) {
            if (!keep_old[j]) continue;
            std::copy_n(x.row(j).begin(), x.cols, nx.row(row).begin());
            std::copy_n(f.row(j).begin(), f.cols, nf.row(row).begin());
            ++row;
        }
        for (std::size_t i = 0; i < n_new; ++i) {
            if (!keep_new[i]) continue;
            std::copy_n(xn.row(i).begin(), xn.cols, nx.row(row).begin());
            std::copy_n(fn.row(i).begin(), fn.cols, nf.row(row).begin());
            ++row;
        }
        x = std::move(nx);
        f = std::move(nf);
        if (cap > 0 && f.rows > cap) truncate_by_crowding(cap);
    }

    void truncate_by_crowding(std::size_t cap) {
        const Tensor2D crowd = crowding_distance(f);
        std::vector<std::size_t> order(f.rows);
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (crowd.data[a] != crowd.data[b]) return crowd.data[a] > crowd.data[b];
            return a < b;
        });
        order.resize(cap);
        std::sort(order.begin(), order.end()); // keep insertion order
        Tensor2D nx(cap, x.cols), nf(cap, f.cols);
        for (std::size_t i = 0; i < cap; ++i) {
            std::copy_n(x.row(order[i]).begin(), x.cols, nx.row(i).begin());
            std::copy_n(f.row(order[i]).begin(), f.cols, nf.row(i).begin());
        }
        x = std::move(nx);
        f = std::move(nf);
    }
};

struct RunRecord {
    std::vector<GenerationRow> rows;
    Archive archive;
    Tensor2D final_x;
    Tensor2D final_f;
    std::vector<Tensor2D> archive_f_history; // filled if cfg.archive_history
};

namespace detail {

inline Tensor2D take_rows(const Tensor2D& a, const std::vector<std::size_t>& idx) {
    Tensor2D out(idx.size(), a.cols);
    for (std::size_t i = 0; i < idx.size(); ++i)
        std::copy_n(a.row(idx[i]).begin(), a.cols, out.row(i).begin());
    return out;
}

inline void fill_metrics(GenerationRow& row, const Tensor2D& f_min,
                         const MetricContext& mc) {
    if (f_min.rows == 0) return;
    if (mc.pf_ref.rows > 0) row.igd_value = igd(f_min, mc.pf_ref);
    if (mc.hv_ref.rows > 0) {
        Tensor2D f_eval = f_min;
        Tensor2D ref = mc.hv_ref;
        if (mc.maximization) {
            // Reported objectives are -f_min; minimize f_min against -ref.
            for (double& v : ref.data) v = -v;
        } else if (mc.hv_scale != 1.0) {
            for (double& v : f_eval.data) v /= mc.hv_scale;
        }
        if (f_eval.cols == 2)
            row.hv_value = hv_exact_2d(f_eval, ref);
        else
            row.hv_value = hv_mc(f_eval, ref, mc.hv_samples, mc.hv_seed).value;
    }
    if (mc.eu_weights.rows > 0) row.eu_value = eu(negated(f_min), mc.eu_weights);
}

inline Tensor2D evaluate_checked(const ProblemInstance& prob, const Tensor2D& x,
                                 std::size_t generation, std::uint64_t seed) {
    try {
        return prob.evaluate(x);
    } catch (const std::exception& e) {
        throw std::runtime_error("evaluation failed at generation " +
                                 std::to_string(generation) + " (seed " +
                                 std::to_string(seed) + "): " + e.what());
    }
}

class GenerationTimer {
public:
    GenerationTimer() : start_(std::chrono::steady_clock::now()) {}
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace detail

/// Parent pool of exactly n rows. When the population already has n rows it
/// passes through untouched (no draws); otherwise n indices are sampled with
/// replacement, consuming n draws.
inline std::vector<std::size_t> parent_pool_indices(std::size_t current, std::size_t n,
                                                    RngStream& stream) {
    std::vector<std::size_t> idx(n);
    if (current == n) {
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        return idx;
    }
    for (std::size_t i = 0; i < n; ++i)
        idx[i] = static_cast<std::size_t>(stream.next() * static_cast<double>(current));
    return idx;
}

/// Reference-vector guided run. Per generation: produce n offspring from the
/// parent pool, evaluate, merge with the parents, select one elite per valid
/// reference vector, adapt the vectors every ceil(fr * t_max) generations,
/// then record the archive and metrics.
inline RunRecord rvea_run(const ProblemInstance& prob, const RunConfig& cfg,
                          const MetricContext& mc = {}) {
    detail::require(cfg.pop >= 2 && cfg.generations >= 1, "rvea_run: bad config");
    RunRecord rec;
    const detail::GenerationTimer timer;
    RngStream stream{cfg.seed, 0};
    const std::size_t n = cfg.pop, d = prob.dim;
    const std::size_t h =
        cfg.lattice_h ? cfg.lattice_h : lattice_density_for(prob.num_obj, n);
    RefVectorSet refs = make_ref_set(prob.num_obj, h);
    const std::size_t adapt_every =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(
                                     cfg.fr * static_cast<double>(cfg.generations))));

    Tensor2D x = random_reproduce(n, d, stream, prob.lower, prob.upper);
    Tensor2D f = detail::evaluate_checked(prob, x, 0, cfg.seed);
    if (cfg.track_archive) rec.archive.insert(x, f, cfg.archive_cap);

    SwarmState swarm;
    for (std::size_t t = 0; t < cfg.generations; ++t) {
        const std::vector<std::size_t> pool_idx = parent_pool_indices(x.rows, n, stream);
        const Tensor2D pool = detail::take_rows(x, pool_idx);

        Tensor2D offspring;
        if (cfg.op == "ga") {
            offspring = ga_reproduce(pool, stream, cfg.ga, prob.lower, prob.upper);
        } else if (cfg.op == "de") {
            offspring = de_reproduce(pool, stream, cfg.de, prob.lower, prob.upper);
        } else if (cfg.op == "pso") {
            const Tensor2D pool_f = detail::take_rows(f, pool_idx);
            const Tensor2D scores = apd_scores(pool_f, refs, t, cfg.generations, cfg.alpha);
            if (swarm.empty()) swarm = make_swarm_state(pool, scores);
            offspring = pso_reproduce(pool, swarm, scores, stream, cfg.pso, prob.lower,
                                      prob.upper);
        } else if (cfg.op == "cso") {
            const Tensor2D pool_f = detail::take_rows(f, pool_idx);
            const Tensor2D scores = apd_scores(pool_f, refs, t, cfg.generations, cfg.alpha);
            if (swarm.empty()) swarm = make_swarm_state(pool, scores);
            offspring =
                cso_reproduce(pool, scores, stream, cfg.cso, prob.lower, prob.upper, swarm);
        } else if (cfg.op == "random") {
            offspring = random_reproduce(n, d, stream, prob.lower, prob.upper);
        } else {
            throw std::invalid_argument("rvea_run: unknown operator '" + cfg.op + "'");
        }

        const Tensor2D f_off = detail::evaluate_checked(prob, offspring, t, cfg.seed);
        const Tensor2D merged_x = vconcat(x, offspring);
        const Tensor2D merged_f = vconcat(f, f_off);
        const SelectionOutcome sel =
            rv_select(merged_f, refs, t, cfg.generations, cfg.alpha, /*want_table=*/false);
        x = detail::take_rows(merged_x, sel.elite_indices);
        f = detail::take_rows(merged_f, sel.elite_indices);

        if ((t + 1) % adapt_every == 0) adapt(refs, col_min(f), col_max(f));
        if (cfg.track_archive) rec.archive.insert(x, f, cfg.archive_cap);
        if (cfg.archive_history) rec.archive_f_history.push_back(rec.archive.f);

        GenerationRow row;
        row.t = t;
        row.pop_size = x.rows;
        detail::fill_metrics(row, cfg.track_archive ? rec.archive.f : f, mc);
        row.elapsed_ms = timer.elapsed_ms();
        rec.rows.push_back(row);
        if (cfg.time_budget_s > 0.0 && row.elapsed_ms >= cfg.time_budget_s * 1e3) break;
    }
    rec.final_x = std::move(x);
    rec.final_f = std::move(f);
    return rec;
}

/// Generational NSGA-II: binary tournament on (rank, crowding) fills the
/// mating pool, SBX + polynomial mutation produce n offspring, and
/// rank-then-crowding truncation keeps the population at n.
inline RunRecord nsga2_run(const ProblemInstance& prob, const RunConfig& cfg,
                           const MetricContext& mc = {}) {
    detail::require(cfg.pop >= 2 && cfg.generations >= 1, "nsga2_run: bad config");
    RunRecord rec;
    const detail::GenerationTimer timer;
    RngStream stream{cfg.seed, 0};
    const std::size_t n = cfg.pop, d = prob.dim;

    Tensor2D x = random_reproduce(n, d, stream, prob.lower, prob.upper);
    Tensor2D f = detail::evaluate_checked(prob, x, 0, cfg.seed);
    if (cfg.track_archive) rec.archive.insert(x, f, cfg.archive_cap);

    for (std::size_t t = 0; t < cfg.generations; ++t) {
        const std::vector<std::size_t> rank = nondominated_sort(f);
        std::vector<double> crowd(n, 0.0);
        {
            const std::size_t levels = 1 + *std::max_element(rank.begin(), rank.end());
            for (std::size_t level = 0; level < levels; ++level) {
                std::vector<std::size_t> members;
                for (std::size_t i = 0; i < n; ++i)
                    if (rank[i] == level) members.push_back(i);
                if (members.empty()) continue;
                const Tensor2D front = detail::take_rows(f, members);
                const Tensor2D cd = crowding_distance(front);
                for (std::size_t i = 0; i < members.size(); ++i)
                    crowd[members[i]] = cd.data[i];
            }
        }
        // Binary tournament: 2n draws, lower rank wins, then higher crowding,
        // then lower index.
        std::vector<std::size_t> pool_idx(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto a = static_cast<std::size_t>(stream.next() * static_cast<double>(n));
            const auto b = static_cast<std::size_t>(stream.next() * static_cast<double>(n));
            bool a_wins;
            if (rank[a] != rank[b])
                a_wins = rank[a] < rank[b];
            else if (crowd[a] != crowd[b])
                a_wins = crowd[a] > crowd[b];
            else
                a_wins = a <= b;
            pool_idx[i] = a_wins ? a : b;
        }
        const Tensor2D pool = detail::take_rows(x, pool_idx);
        const Tensor2D crossed = sbx(pool, stream, cfg.ga, prob.lower, prob.upper);
        const Tensor2D offspring =
            polynomial_mutation(crossed, stream, cfg.ga, prob.lower, prob.upper);
        const Tensor2D f_off = detail::evaluate_checked(prob, offspring, t, cfg.seed);
        const Tensor2D merged_x = vconcat(x, offspring);
        const Tensor2D merged_f = vconcat(f, f_off);
        const std::vector<std::size_t> sel = nsga2_select(merged_f, n);
        x = detail::take_rows(merged_x, sel);
        f = detail::take_rows(merged_f, sel);

        if (cfg.track_archive) rec.archive.insert(x, f, cfg.archive_cap);
        if (cfg.archive_history) rec.archive_f_history.push_back(rec.archive.f);

        GenerationRow row;
        row.t = t;
        row.pop_size = x.rows;
        detail::fill_metrics(row, cfg.track_archive ? rec.archive.f : f, mc);
        row.elapsed_ms = timer.elapsed_ms();
        rec.rows.push_back(row);
        if (cfg.time_budget_s > 0.0 && row.elapsed_ms >= cfg.time_budget_s * 1e3) break;
    }
    rec.final_x = std::move(x);
    rec.final_f = std::move(f);
    return rec;
}

/// Random search: fresh uniform candidates each generation, merged into the
/// archive; no selection pressure.
inline RunRecord random_search_run(const ProblemInstance& prob, const RunConfig& cfg,
                                   const MetricContext& mc = {}) {
    detail::require(cfg.pop >= 1 && cfg.generations >= 1, "random_search_run: bad config");
    RunRecord rec;
    const detail::GenerationTimer timer;
    RngStream stream{cfg.seed, 0};
    Tensor2D x, f;
    for (std::size_t t = 0; t < cfg.generations; ++t) {
        x = random_reproduce(cfg.pop, prob.dim, stream, prob.lower, prob.upper);
        f = detail::evaluate_checked(prob, x, t, cfg.seed);
        if (cfg.track_archive) rec.archive.insert(x, f, cfg.archive_cap);
        if (cfg.archive_history) rec.archive_f_history.push_back(rec.archive.f);

        GenerationRow row;
        row.t = t;
        row.pop_size = x.rows;
        detail::fill_metrics(row, cfg.track_archive ? rec.archive.f : f, mc);
        row.elapsed_ms = timer.elapsed_ms();
        rec.rows.push_back(row);
        if (cfg.time_budget_s > 0.0 && row.elapsed_ms >= cfg.time_budget_s * 1e3) break;
    }
    rec.final_x = std::move(x);
    rec.final_f = std::move(f);
    return rec;
}

/// Dispatch by algorithm name: rvea | nsga2 | random.
inline RunRecord run_algorithm(const std::string& algorithm, const ProblemInstance& prob,
                               const RunConfig& cfg, const MetricContext& mc = {}) {
    if (algorithm == "rvea") return rvea_run(prob, cfg, mc);
    if (algorithm == "nsga2") return nsga2_run(prob, cfg, mc);
    if (algorithm == "random") return random_search_run(prob, cfg, mc);
    throw std::invalid_argument("run_algorithm: unknown algorithm '" + algorithm + "'");
}

} // namespace temo
