#pragma once

// Batched reproduction operators. Every operator consumes randomness in a
// frozen block order so a scalar reference loop fed the same stream produces
// identical output:
//   ga:     shuffle (n-1 draws), then sbx, then polynomial_mutation
//   sbx:    M_c (n/2 x d), R1 (n/2 x d), R2 (n/2 x d), R3 (n/2 x 1)
//   pm:     R4 (n x d), M_mut (n x d)
//   de:     R_sel (n x 3), R_j (n x 1), R_cr (n x d)
//   pso:    R1 (n x d), R2 (n x d)
//   cso:    shuffle (n-1 draws), R1, R2, R3 (each n/2 x d)
//   random: R (n x d)
// All outputs are clamped to the decision bounds.

#include <cstddef>

#include "temo/rng.hpp"
#include "temo/tensor.hpp"

namespace temo {

struct GaParams {
    double pc = 1.0;  // crossover probability per pair
    double eta = 20.0; // SBX distribution index
    double pm = 1.0;  // mutation probability numerator; per-gene rate is pm/d
    double xi = 20.0; // mutation distribution index
};

struct DeParams {
    double f = 0.5;  // difference scale
    double cr = 0.9; // crossover rate
};

struct PsoParams {
    double inertia = 0.4;
    double c1 = 1.5;
    double c2 = 1.5;
};

struct CsoParams {
    double phi = 0.1; // social factor pulling losers toward the swarm mean
};

/// Per-lane velocity and personal-best memory carried across generations by
/// the swarm operators.
struct SwarmState {
    Tensor2D velocities;          // n x d
    Tensor2D personal_best_x;     // n x d
    Tensor2D personal_best_score; // n x 1

    bool empty() const { return velocities.rows == 0; }
};

inline SwarmState make_swarm_state(const Tensor2D& x, const Tensor2D& scores) {
    return SwarmState{Tensor2D(x.rows, x.cols, 0.0), x, scores};
}

// ---------------------------------------------------------------------------

/// Simulated binary crossover. Rows split into two parent blocks of floor(n/2)
/// rows; with odd n the unpaired final row bypasses crossover and is appended
/// unmodified. Offspring are the vertical concatenation of the two child
/// blocks, clamped to [L, U]. For every gene the two children average to the
/// parents' average exactly (pre-clamp).
inline Tensor2D sbx(const Tensor2D& x, RngStream& stream, const GaParams& p,
                    const Tensor2D& lower, const Tensor2D& upper) {
    detail::require(x.rows >= 2, "sbx: needs at least two rows");
    const std::size_t half = x.rows / 2;
    const std::size_t d = x.cols;
    const Tensor2D mc = uniform_tensor(stream, half, d);
    const Tensor2D r1 = uniform_tensor(stream, half, d);
    const Tensor2D r2 = uniform_tensor(stream, half, d);
    const Tensor2D r3 = uniform_tensor(stream, half, 1);
    Tensor2D out(x.rows, d);
    const double exp_inv = 1.0 / (p.eta + 1.0);
    parallel_for(half, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t pair = lo; pair < hi; ++pair) {
            const double* x1 = x.data.data() + pair * d;
            const double* x2 = x.data.data() + (half + pair) * d;
            double* c1 = out.data.data() + pair * d;
            double* c2 = out.data.data() + (half + pair) * d;
            const double hc = heaviside(r3(pair, 0) - p.pc);
            for (std::size_t j = 0; j < d; ++j) {
                const double m = mc(pair, j);
                const double spread_low = std::pow(2.0 * m, exp_inv);
                const double spread_high = std::pow(2.0 - 2.0 * m, -exp_inv);
                const double hm = heaviside(0.5 - m);
                double b = sgn(r1(pair, j) - 0.5) *
                           (hm * spread_low + (1.0 - hm) * spread_high);
                const double hr = heaviside(r2(pair, j) - 0.5);
                b = (1.0 - hc) * ((1.0 - hr) * b + hr) + hc;
                const double lo_j = lower.data[j], hi_j = upper.data[j];
                c1[j] = clamp(((1.0 + b) * x1[j] + (1.0 - b) * x2[j]) / 2.0, lo_j, hi_j);
                c2[j] = clamp(((1.0 - b) * x1[j] + (1.0 + b) * x2[j]) / 2.0, lo_j, hi_j);
            }
        }
    });
    if (x.rows % 2 != 0) {
        for (std::size_t j = 0; j < d; ++j) out(x.rows - 1, j) = x(x.rows - 1, j);
    }
    return out;
}

/// Two-branch polynomial-mutation step for one gene. Vanishes at u = 0.5 and
/// drives the gene to its lower/upper bound as u approaches 0/1.
inline double polynomial_delta(double u, double x, double lo, double hi, double xi) {
    const double range = hi - lo;
    const double exp_pow = xi + 1.0;
    const double exp_inv = 1.0 / exp_pow;
    const double h_low = heaviside(0.5 - u);
    const double h_high = heaviside(u - 0.5);
    const double dist_low = 1.0 - (x - lo) / range;
    const double delta_low =
        range *
        (std::pow(2.0 * u + (1.0 - 2.0 * u) * std::pow(dist_low, exp_pow), exp_inv) - 1.0);
    const double dist_high = 1.0 - (hi - x) / range;
    const double delta_high =
        range * (1.0 - std::pow(2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(dist_high, exp_pow),
                                exp_inv));
    return delta_low * h_low + delta_high * h_high;
}

/// Polynomial mutation. Genes whose mask draw exceeds pm/d are copied
/// bit-identically; mutated genes stay inside [L, U] by construction of the
/// two delta branches.
inline Tensor2D polynomial_mutation(const Tensor2D& x, RngStream& stream,
                                    const GaParams& p, const Tensor2D& lower,
                                    const Tensor2D& upper) {
    const std::size_t d = x.cols;
    const Tensor2D r4 = uniform_tensor(stream, x.rows, d);
    const Tensor2D mmut = uniform_tensor(stream, x.rows, d);
    Tensor2D out(x.rows, d);
    const double rate = p.pm / static_cast<double>(d);
    parallel_for(x.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                const double xv = x(i, j);
                const double lo_j = lower.data[j], hi_j = upper.data[j];
                if (heaviside(rate - r4(i, j)) == 0.0 || hi_j - lo_j <= 0.0) {
                    out(i, j) = xv;
                    continue;
                }
                const double delta = polynomial_delta(mmut(i, j), xv, lo_j, hi_j, p.xi);
                out(i, j) = clamp(xv + delta, lo_j, hi_j);
            }
        }
    });
    return out;
}

/// Default GA reproduction: shuffle the mating order, SBX, then polynomial
/// mutation. Produces exactly as many offspring as input rows.
inline Tensor2D ga_reproduce(const Tensor2D& x, RngStream& stream, const GaParams& p,
                             const Tensor2D& lower, const Tensor2D& upper) {
    const std::vector<std::size_t> perm = shuffle_indices(stream, x.rows);
    Tensor2D shuffled(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j) shuffled(i, j) = x(perm[i], j);
    const Tensor2D crossed = sbx(shuffled, stream, p, lower, upper);
    return polynomial_mutation(crossed, stream, p, lower, upper);
}

/// DE/rand/1/bin. Per row, three mutually distinct donor rows (all != i) are
/// picked by fixed-consumption index draws; one guaranteed crossover gene per
/// row.
inline Tensor2D de_reproduce(const Tensor2D& x, RngStream& stream, const DeParams& p,
                             const Tensor2D& lower, const Tensor2D& upper) {
    const std::size_t n = x.rows, d = x.cols;
    detail::require(n >= 4, "de_reproduce: needs at least four rows");
    const Tensor2D r_sel = uniform_tensor(stream, n, 3);
    const Tensor2D r_j = uniform_tensor(stream, n, 1);
    const Tensor2D r_cr = uniform_tensor(stream, n, d);
    Tensor2D out(n, d);
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto nd = static_cast<double>(n);
            std::size_t r1 =
                (i + 1 + static_cast<std::size_t>(r_sel(i, 0) * (nd - 1.0))) % n;
            std::size_t excl_a = std::min(i, r1), excl_b = std::max(i, r1);
            std::size_t r2 = static_cast<std::size_t>(r_sel(i, 1) * (nd - 2.0));
            if (r2 >= excl_a) ++r2;
            if (r2 >= excl_b) ++r2;
            std::size_t e[3] = {i, r1, r2};
            std::sort(e, e + 3);
            std::size_t r3 = static_cast<std::size_t>(r_sel(i, 2) * (nd - 3.0));
            for (std::size_t k = 0; k < 3; ++k)
                if (r3 >= e[k]) ++r3;
            const auto j_rand = static_cast<std::size_t>(r_j(i, 0) * static_cast<double>(d));
            for (std::size_t j = 0; j < d; ++j) {
                if (r_cr(i, j) < p.cr || j == j_rand) {
                    const double trial = x(r1, j) + p.f * (x(r2, j) - x(r3, j));
                    out(i, j) = clamp(trial, lower.data[j], upper.data[j]);
                } else {
                    out(i, j) = x(i, j);
                }
            }
        }
    });
    return out;
}

/// Particle swarm update. Scores are the caller's scalarized fitness (lower is
/// better); personal bests refresh where the score improved, the global best
/// is the best personal best (ties -> lowest row).
inline Tensor2D pso_reproduce(const Tensor2D& x, SwarmState& state, const Tensor2D& scores,
                              RngStream& stream, const PsoParams& p,
                              const Tensor2D& lower, const Tensor2D& upper) {
    const std::size_t n = x.rows, d = x.cols;
    detail::require(state.velocities.rows == n && state.velocities.cols == d &&
                        state.personal_best_x.rows == n && scores.rows == n,
                    "pso_reproduce: state shape mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (scores.data[i] < state.personal_best_score.data[i]) {
            state.personal_best_score.data[i] = scores.data[i];
            for (std::size_t j = 0; j < d; ++j)
                state.personal_best_x(i, j) = x(i, j);
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (state.personal_best_score.data[i] < state.personal_best_score.data[best]) best = i;
    const Tensor2D r1 = uniform_tensor(stream, n, d);
    const Tensor2D r2 = uniform_tensor(stream, n, d);
    Tensor2D out(n, d);
    const double* gbest = state.personal_best_x.data.data() + best * d;
    Tensor2D new_vel(n, d);
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                const double v = p.inertia * state.velocities(i, j) +
                                 p.c1 * r1(i, j) * (state.personal_best_x(i, j) - x(i, j)) +
                                 p.c2 * r2(i, j) * (gbest[j] - x(i, j));
                new_vel(i, j) = v;
                out(i, j) = clamp(x(i, j) + v, lower.data[j], upper.data[j]);
            }
        }
    });
    state.velocities = std::move(new_vel);
    return out;
}

/// Competitive swarm update. Rows are randomly paired; the lower-score row of
/// each pair wins (ties -> lower original row index) and passes through
/// bit-identically, the loser moves by a velocity pulled toward the winner
/// and the population mean. Odd n: the unpaired row passes through.
inline Tensor2D cso_reproduce(const Tensor2D& x, const Tensor2D& scores, RngStream& stream,
                              const CsoParams& p, const Tensor2D& lower,
                              const Tensor2D& upper, SwarmState& state) {
    const std::size_t n = x.rows, d = x.cols;
    detail::require(state.velocities.rows == n && state.velocities.cols == d &&
                        scores.rows == n,
                    "cso_reproduce: state shape mismatch");
    const std::vector<std::size_t> perm = shuffle_indices(stream, n);
    const std::size_t pairs = n / 2;
    const Tensor2D r1 = uniform_tensor(stream, pairs, d);
    const Tensor2D r2 = uniform_tensor(stream, pairs, d);
    const Tensor2D r3 = uniform_tensor(stream, pairs, d);
    Tensor2D mean(1, d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean.data[j] += x(i, j);
    for (std::size_t j = 0; j < d; ++j) mean.data[j] /= static_cast<double>(n);
    Tensor2D out = x;
    Tensor2D new_vel = state.velocities;
    parallel_for(pairs, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t q = lo; q < hi; ++q) {
            const std::size_t a = perm[2 * q], b = perm[2 * q + 1];
            std::size_t win = a, lose = b;
            if (scores.data[b] < scores.data[a] ||
                (scores.data[b] == scores.data[a] && b < a)) {
                win = b;
                lose = a;
            }
            for (std::size_t j = 0; j < d; ++j) {
                const double v = r1(q, j) * state.velocities(lose, j) +
                                 r2(q, j) * (x(win, j) - x(lose, j)) +
                                 p.phi * r3(q, j) * (mean.data[j] - x(lose, j));
                new_vel(lose, j) = v;
                out(lose, j) = clamp(x(lose, j) + v, lower.data[j], upper.data[j]);
            }
        }
    });
    state.velocities = std::move(new_vel);
    return out;
}

/// Baseline reproduction: fresh uniform samples in [L, U].
inline Tensor2D random_reproduce(std::size_t n, std::size_t d, RngStream& stream,
                                 const Tensor2D& lower, const Tensor2D& upper) {
    Tensor2D u = uniform_tensor(stream, n, d);
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            for (std::size_t j = 0; j < d; ++j)
                u(i, j) = lower.data[j] + u(i, j) * (upper.data[j] - lower.data[j]);
    });
    return u;
}

} // namespace temo
