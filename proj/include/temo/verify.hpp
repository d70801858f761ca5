#pragma once

// Equivalence and invariant suites comparing every batched kernel against its
// scalar reference. Each suite reports how many instances it checked and a
// replayable description (master seed + instance number + shape) of anything
// that failed.

#include <cstdio>
#include <string>
#include <vector>

#include "temo/oracle.hpp"

namespace temo::verify {

struct SuiteResult {
    std::string name;
    std::size_t checked = 0;
    std::size_t failed = 0;
    std::vector<std::string> failures;

    bool ok() const { return failed == 0; }

    void fail(const std::string& what) {
        ++failed;
        if (failures.size() < 20) failures.push_back(what);
    }
};

namespace detail {

inline std::size_t pick(RngStream& g, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(g.next() * static_cast<double>(hi - lo + 1));
}

inline bool close(double a, double b, double tol) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= tol;
}

inline std::string describe(std::uint64_t seed, std::size_t instance, std::size_t n,
                            std::size_t d_or_r) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "seed=%llu instance=%zu n=%zu k=%zu",
                  static_cast<unsigned long long>(seed), instance, n, d_or_r);
    return buf;
}

} // namespace detail

/// Batched vs scalar reference-vector selection on random instances:
/// identical elite index sets and validity, APD tables within apd_tol.
inline SuiteResult rv_select_suite(std::size_t instances = 200, double apd_tol = 1e-9,
                                   std::uint64_t master_seed = 7001) {
    SuiteResult res{"rv_select equivalence"};
    for (std::size_t k = 0; k < instances; ++k) {
        RngStream g{master_seed + k, 0};
        const std::size_t n = detail::pick(g, 1, 64);
        const std::size_t m = detail::pick(g, 2, 3);
        const std::size_t h = m == 2 ? detail::pick(g, 1, 14) : detail::pick(g, 1, 4);
        const std::size_t t_max = detail::pick(g, 1, 200);
        const std::size_t t = detail::pick(g, 0, t_max);
        const RefVectorSet refs = make_ref_set(m, h);
        Tensor2D f = uniform_tensor(g, n, m);
        for (double& v : f.data) v *= 10.0;

        const SelectionOutcome a = rv_select(f, refs, t, t_max, 2.0, true);
        const SelectionOutcome b = oracle::oracle_rv_select(f, refs, t, t_max, 2.0);
        ++res.checked;
        bool ok = a.elite_indices == b.elite_indices && a.validity == b.validity;
        for (std::size_t i = 0; ok && i < a.apd_table.size(); ++i)
            ok = detail::close(a.apd_table.data[i], b.apd_table.data[i], apd_tol);
        if (!ok) res.fail(detail::describe(master_seed + k, k, n, refs.v.rows));
    }
    return res;
}

namespace detail {

struct OperatorInstance {
    Tensor2D x;
    Tensor2D lower, upper;
    Tensor2D scores; // n x 1, for the swarm operators
    std::size_t n, d;
};

inline OperatorInstance random_operator_instance(RngStream& g, std::size_t n_min,
                                                 std::size_t n_max, std::size_t d_max) {
    OperatorInstance inst;
    inst.n = pick(g, n_min, n_max);
    inst.d = pick(g, 1, d_max);
    inst.lower = Tensor2D(1, inst.d);
    inst.upper = Tensor2D(1, inst.d);
    for (std::size_t j = 0; j < inst.d; ++j) {
        inst.lower.data[j] = -1.0 - g.next();
        inst.upper.data[j] = inst.lower.data[j] + 0.5 + 2.0 * g.next();
    }
    inst.x = uniform_tensor(g, inst.n, inst.d);
    for (std::size_t i = 0; i < inst.n; ++i)
        for (std::size_t j = 0; j < inst.d; ++j)
            inst.x(i, j) = inst.lower.data[j] +
                           inst.x(i, j) * (inst.upper.data[j] - inst.lower.data[j]);
    inst.scores = uniform_tensor(g, inst.n, 1);
    return inst;
}

inline bool tensors_close(const Tensor2D& a, const Tensor2D& b, double tol) {
    if (!a.same_shape(b)) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!close(a.data[i], b.data[i], tol)) return false;
    return true;
}

} // namespace detail

/// Batched vs scalar reproduction operators on shared random blocks.
inline SuiteResult operator_suite(std::size_t per_op = 100, double tol = 1e-12,
                                  std::uint64_t master_seed = 7002) {
    SuiteResult res{"operator equivalence"};
    const char* names[] = {"sbx", "pm", "de", "pso", "cso"};
    for (std::size_t op = 0; op < 5; ++op) {
        for (std::size_t k = 0; k < per_op; ++k) {
            const std::uint64_t inst_seed = master_seed + op * 1000003 + k;
            RngStream g{inst_seed, 0};
            const std::size_t n_min = op == 2 ? 4 : 2;
            auto inst = detail::random_operator_instance(g, n_min, 16, 8);
            const oracle::Matrix xm = oracle::to_matrix(inst.x);
            const oracle::Row lo = oracle::to_matrix(inst.lower)[0];
            const oracle::Row hi = oracle::to_matrix(inst.upper)[0];
            RngStream sa{inst_seed ^ 0xabcdef, 0};
            RngStream sb = sa;
            ++res.checked;
            bool ok = true;
            std::string extra;
            if (op == 0) {
                const GaParams p;
                ok = detail::tensors_close(sbx(inst.x, sa, p, inst.lower, inst.upper),
                                           oracle::to_tensor(oracle::oracle_sbx(xm, sb, p, lo, hi)),
                                           tol);
            } else if (op == 1) {
                const GaParams p;
                ok = detail::tensors_close(
                    polynomial_mutation(inst.x, sa, p, inst.lower, inst.upper),
                    oracle::to_tensor(oracle::oracle_pm(xm, sb, p, lo, hi)), tol);
            } else if (op == 2) {
                const DeParams p;
                ok = detail::tensors_close(de_reproduce(inst.x, sa, p, inst.lower, inst.upper),
                                           oracle::to_tensor(oracle::oracle_de(xm, sb, p, lo, hi)),
                                           tol);
            } else if (op == 3) {
                const PsoParams p;
                // Seed the state with a shifted personal best so the pull
                // terms are nonzero on the compared step.
                SwarmState st_a = make_swarm_state(inst.x, inst.scores);
                for (double& v : st_a.personal_best_x.data) v *= 0.5;
                for (double& v : st_a.personal_best_score.data) v += 0.25;
                SwarmState st_b = st_a;
                Tensor2D x2 = pso_reproduce(inst.x, st_a, inst.scores, sa, p, inst.lower,
                                            inst.upper);
                oracle::Matrix x2m =
                    oracle::oracle_pso(xm, st_b, inst.scores.data, sb, p, lo, hi);
                ok = detail::tensors_close(x2, oracle::to_tensor(x2m), tol) &&
                     detail::tensors_close(st_a.velocities, st_b.velocities, tol) &&
                     detail::tensors_close(st_a.personal_best_x, st_b.personal_best_x, tol);
            } else {
                const CsoParams p;
                SwarmState st_a = make_swarm_state(inst.x, inst.scores);
                SwarmState st_b = st_a;
                Tensor2D x2 =
                    cso_reproduce(inst.x, inst.scores, sa, p, inst.lower, inst.upper, st_a);
                oracle::Matrix x2m =
                    oracle::oracle_cso(xm, inst.scores.data, sb, p, lo, hi, st_b);
                ok = detail::tensors_close(x2, oracle::to_tensor(x2m), tol) &&
                     detail::tensors_close(st_a.velocities, st_b.velocities, tol);
            }
            if (!ok)
                res.fail(std::string(names[op]) + ": " +
                         detail::describe(inst_seed, k, inst.n, inst.d));
        }
    }
    return res;
}

/// Property suite over random operator instances: bound containment for
/// every operator, the SBX pair-mean identity pre-clamp (verified to within
/// rounding), bitwise identity of unmutated genes, and the empirical
/// mutation rate against its 3-sigma band.
inline SuiteResult operator_invariant_suite(std::size_t instances = 10000,
                                            std::uint64_t master_seed = 7003) {
    SuiteResult res{"operator invariants"};
    double mutated = 0.0, mut_expected = 0.0, mut_variance = 0.0;
    for (std::size_t k = 0; k < instances; ++k) {
        const std::uint64_t inst_seed = master_seed + k;
        RngStream g{inst_seed, 0};
        const std::size_t op = k % 5;
        const std::size_t n_min = op == 2 ? 4 : 2;
        auto inst = detail::random_operator_instance(g, n_min, 12, 6);
        RngStream s{inst_seed ^ 0x5eed, 0};
        ++res.checked;

        Tensor2D out;
        if (op == 0) {
            const GaParams p;
            RngStream s_wide = s;
            out = sbx(inst.x, s, p, inst.lower, inst.upper);
            // Pair-mean identity, checked pre-clamp via unbounded limits.
            const Tensor2D wide_lo(1, inst.d, -1e18), wide_hi(1, inst.d, 1e18);
            const Tensor2D raw = sbx(inst.x, s_wide, p, wide_lo, wide_hi);
            const std::size_t half = inst.n / 2;
            for (std::size_t pair = 0; pair < half; ++pair) {
                for (std::size_t j = 0; j < inst.d; ++j) {
                    const double child_mean =
                        (raw(pair, j) + raw(half + pair, j)) / 2.0;
                    const double parent_mean =
                        (inst.x(pair, j) + inst.x(half + pair, j)) / 2.0;
                    if (!detail::close(child_mean, parent_mean,
                                       1e-12 * std::max(1.0, std::abs(parent_mean)))) {
                        res.fail("sbx pair-mean: " +
                                 detail::describe(inst_seed, k, inst.n, inst.d));
                        pair = half;
                        break;
                    }
                }
            }
        } else if (op == 1) {
            const GaParams p;
            out = polynomial_mutation(inst.x, s, p, inst.lower, inst.upper);
            // Recreate the mask block (R4 is drawn first) to identify
            // untouched genes.
            RngStream mask_stream{inst_seed ^ 0x5eed, 0};
            const Tensor2D r4 = uniform_tensor(mask_stream, inst.n, inst.d);
            const double rate = p.pm / static_cast<double>(inst.d);
            bool untouched_ok = true;
            for (std::size_t i = 0; i < out.size(); ++i) {
                const bool masked = heaviside(rate - r4.data[i]) == 0.0;
                if (masked && out.data[i] != inst.x.data[i]) untouched_ok = false;
                if (!masked) mutated += 1.0;
            }
            mut_expected += rate * static_cast<double>(inst.n * inst.d);
            mut_variance += rate * (1.0 - rate) * static_cast<double>(inst.n * inst.d);
            if (!untouched_ok)
                res.fail("pm untouched gene: " +
                         detail::describe(inst_seed, k, inst.n, inst.d));
        } else if (op == 2) {
            out = de_reproduce(inst.x, s, DeParams{}, inst.lower, inst.upper);
        } else if (op == 3) {
            SwarmState st = make_swarm_state(inst.x, inst.scores);
            for (double& v : st.personal_best_x.data) v *= 0.5;
            out = pso_reproduce(inst.x, st, inst.scores, s, PsoParams{}, inst.lower,
                                inst.upper);
        } else {
            SwarmState st = make_swarm_state(inst.x, inst.scores);
            out = cso_reproduce(inst.x, inst.scores, s, CsoParams{}, inst.lower,
                                inst.upper, st);
        }
        for (std::size_t i = 0; i < out.rows; ++i) {
            for (std::size_t j = 0; j < out.cols; ++j) {
                if (out(i, j) < inst.lower.data[j] || out(i, j) > inst.upper.data[j]) {
                    res.fail("bounds: " + detail::describe(inst_seed, k, inst.n, inst.d));
                    i = out.rows;
                    break;
                }
            }
        }
    }
    const double sigma = std::sqrt(mut_variance);
    if (std::abs(mutated - mut_expected) > 3.0 * sigma)
        res.fail("pm mutation rate outside 3 sigma: observed " + std::to_string(mutated) +
                 " expected " + std::to_string(mut_expected));
    return res;
}

/// Batched kernels vs scalar loops on random shapes, plus the identity and
/// sentinel-gather contracts.
inline SuiteResult tensor_kernel_suite(std::size_t instances = 100, double tol = 1e-12,
                                       std::uint64_t master_seed = 7004) {
    SuiteResult res{"tensor kernels"};
    for (std::size_t k = 0; k < instances; ++k) {
        const std::uint64_t inst_seed = master_seed + k;
        RngStream g{inst_seed, 0};
        const std::size_t n = detail::pick(g, 1, 64);
        const std::size_t kk = detail::pick(g, 1, 64);
        const std::size_t p = detail::pick(g, 1, 64);
        Tensor2D a = uniform_tensor(g, n, kk);
        Tensor2D b = uniform_tensor(g, kk, p);
        for (double& v : a.data) v = v * 4.0 - 2.0;
        for (double& v : b.data) v = v * 4.0 - 2.0;
        ++res.checked;
        bool ok = true;

        const Tensor2D c = matmul(a, b);
        for (std::size_t i = 0; i < n && ok; ++i) {
            for (std::size_t j = 0; j < p && ok; ++j) {
                double s = 0.0;
                for (std::size_t q = 0; q < kk; ++q) s += a(i, q) * b(q, j);
                ok = detail::close(c(i, j), s, tol);
            }
        }
        const Tensor2D ia = matmul(a, Tensor2D::identity(kk));
        for (std::size_t i = 0; i < a.size() && ok; ++i) ok = ia.data[i] == a.data[i];

        const Tensor2D norms = row_norms(a);
        for (std::size_t i = 0; i < n && ok; ++i) {
            double s = 0.0;
            for (std::size_t q = 0; q < kk; ++q) s += a(i, q) * a(i, q);
            ok = detail::close(norms.data[i], std::sqrt(s), tol);
        }
        const RowMinResult rm = row_min_argmin(a);
        for (std::size_t i = 0; i < n && ok; ++i) {
            double best = a(i, 0);
            std::size_t arg = 0;
            for (std::size_t q = 1; q < kk; ++q)
                if (a(i, q) < best) {
                    best = a(i, q);
                    arg = q;
                }
            ok = rm.indices[i] == arg && rm.values.data[i] == best;
        }
        const Tensor2D cm = col_min(a);
        for (std::size_t q = 0; q < kk && ok; ++q) {
            double best = a(0, q);
            for (std::size_t i = 1; i < n; ++i) best = std::min(best, a(i, q));
            ok = cm.data[q] == best;
        }
        // Sentinel gather + mask equals an explicit partition walk.
        std::vector<std::ptrdiff_t> idx(n);
        for (std::size_t i = 0; i < n; ++i)
            idx[i] = g.next() < 0.3 ? -1
                                    : static_cast<std::ptrdiff_t>(detail::pick(g, 0, n - 1));
        const Tensor2D gathered = gather_rows(norms, idx);
        for (std::size_t i = 0; i < n && ok; ++i) {
            if (idx[i] < 0) {
                ok = gathered.data[i] == norms.data[0]; // placeholder rule
            } else {
                ok = gathered.data[i] == norms.data[static_cast<std::size_t>(idx[i])];
            }
        }
        if (!ok) res.fail(detail::describe(inst_seed, k, n, kk));
    }
    return res;
}

/// Metric definitions against their independent references.
inline SuiteResult metric_suite(std::size_t fronts = 20, std::size_t mc_samples = 100000,
                                std::uint64_t master_seed = 7005) {
    SuiteResult res{"metrics"};
    {
        ++res.checked;
        const Tensor2D f = Tensor2D::from_rows({{0.5, 0.5}});
        const Tensor2D ref = Tensor2D::from_rows({{1.0, 1.0}});
        if (hv_exact_2d(f, ref) != 0.25) res.fail("unit rectangle hypervolume");
    }
    for (std::size_t k = 0; k < fronts; ++k) {
        const std::uint64_t inst_seed = master_seed + k;
        RngStream g{inst_seed, 0};
        const std::size_t n = detail::pick(g, 1, 24);
        Tensor2D f = uniform_tensor(g, n, 2);
        const Tensor2D ref = Tensor2D::from_rows({{1.0, 1.0}});
        ++res.checked;
        const double exact = hv_exact_2d(f, ref);
        const HvEstimate est = hv_mc(f, ref, mc_samples, inst_seed ^ 0xbeef);
        const double band = 3.0 * std::max(est.std_error, 1e-9);
        if (std::abs(exact - est.value) > band)
            res.fail("hv mc vs exact: " + detail::describe(inst_seed, k, n, 2));

        const std::size_t m = detail::pick(g, 2, 4);
        const Tensor2D fa = uniform_tensor(g, detail::pick(g, 1, 20), m);
        const Tensor2D fb = uniform_tensor(g, detail::pick(g, 1, 20), m);
        ++res.checked;
        if (!detail::close(igd(fa, fb), oracle::oracle_igd(oracle::to_matrix(fa),
                                                           oracle::to_matrix(fb)),
                           1e-12))
            res.fail("igd vs oracle: " + detail::describe(inst_seed, k, fa.rows, m));
        const Tensor2D w = utility_weights(m, 5);
        ++res.checked;
        if (!detail::close(eu(fa, w),
                           oracle::oracle_eu(oracle::to_matrix(fa), oracle::to_matrix(w)),
                           1e-12))
            res.fail("eu vs oracle: " + detail::describe(inst_seed, k, fa.rows, m));
    }
    return res;
}

inline std::vector<SuiteResult> all_suites() {
    return {tensor_kernel_suite(), rv_select_suite(), operator_suite(),
            operator_invariant_suite(), metric_suite()};
}

} // namespace temo::verify
