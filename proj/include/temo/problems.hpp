#pragma once

// Batch objective evaluators: the DTLZ1-4 numerical benchmarks with their
// analytic Pareto-front reference sets, and deterministic toy control
// environments driven by a flat-encoded MLP policy for neuroevolution.
// Every evaluator is pure; rows of a batch are independent, so batch
// evaluation equals row-by-row evaluation exactly.

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "temo/refvec.hpp"
#include "temo/tensor.hpp"

namespace temo {

// ---------------------------------------------------------------------------
// DTLZ suite. Decision space [0,1]^d, k = d - m + 1 tail variables.

namespace detail {

inline double dtlz_g1(std::span<const double> x, std::size_t m) {
    const std::size_t d = x.size();
    double g = static_cast<double>(d - m + 1);
    for (std::size_t i = m - 1; i < d; ++i) {
        const double t = x[i] - 0.5;
        g += t * t - std::cos(20.0 * std::numbers::pi * t);
    }
    return 100.0 * g;
}

inline double dtlz_g2(std::span<const double> x, std::size_t m) {
    double g = 0.0;
    for (std::size_t i = m - 1; i < x.size(); ++i) {
        const double t = x[i] - 0.5;
        g += t * t;
    }
    return g;
}

// Linear shape: f_j = 0.5 (1+g) x_0 ... x_{m-2-j} (1 - x_{m-1-j}).
inline void dtlz_shape_linear(std::span<const double> pos, double g, std::span<double> f) {
    const std::size_t m = f.size();
    for (std::size_t j = 0; j < m; ++j) {
        double v = 0.5 * (1.0 + g);
        for (std::size_t i = 0; i + j + 1 < m; ++i) v *= pos[i];
        if (j > 0) v *= 1.0 - pos[m - 1 - j];
        f[j] = v;
    }
}

// Spherical shape: f_j = (1+g) cos(pi/2 x_0) ... sin(pi/2 x_{m-1-j}).
inline void dtlz_shape_sphere(std::span<const double> pos, double g, std::span<double> f) {
    const std::size_t m = f.size();
    const double half_pi = std::numbers::pi / 2.0;
    for (std::size_t j = 0; j < m; ++j) {
        double v = 1.0 + g;
        for (std::size_t i = 0; i + j + 1 < m; ++i) v *= std::cos(pos[i] * half_pi);
        if (j > 0) v *= std::sin(pos[m - 1 - j] * half_pi);
        f[j] = v;
    }
}

} // namespace detail

/// Evaluate DTLZ1-4 on a batch, n x d -> n x m.
inline Tensor2D dtlz_eval(int id, const Tensor2D& x, std::size_t m) {
    detail::require(id >= 1 && id <= 4, "dtlz_eval: id must be in 1..4");
    detail::require(m >= 2, "dtlz_eval: m must be at least 2");
    detail::require(x.cols >= m, "dtlz_eval: d must be at least m");
    Tensor2D f(x.rows, m);
    parallel_for(x.rows, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> pos(m - 1);
        for (std::size_t i = lo; i < hi; ++i) {
            const auto row = x.row(i);
            for (std::size_t j = 0; j + 1 < m; ++j)
                pos[j] = id == 4 ? std::pow(row[j], 100.0) : row[j];
            double g;
            if (id == 1 || id == 3)
                g = detail::dtlz_g1(row, m);
            else
                g = detail::dtlz_g2(row, m);
            if (id == 1)
                detail::dtlz_shape_linear(pos, g, f.row(i));
            else
                detail::dtlz_shape_sphere(pos, g, f.row(i));
        }
    });
    return f;
}

/// Analytic Pareto-front sample: the simplex lattice mapped onto the true
/// front (the plane sum f = 0.5 for DTLZ1, the unit sphere for DTLZ2-4).
inline Tensor2D dtlz_pf_reference(int id, std::size_t m, std::size_t H) {
    detail::require(id >= 1 && id <= 4, "dtlz_pf_reference: id must be in 1..4");
    Tensor2D lattice = simplex_lattice(m, H);
    if (id == 1) {
        for (double& v : lattice.data) v *= 0.5;
        return lattice;
    }
    return normalize_to_unit(lattice);
}

// ---------------------------------------------------------------------------
// MLP policy: one hidden layer, tanh on hidden and output.

struct MlpArch {
    std::size_t obs_dim = 4;
    std::size_t hidden = 16;
    std::size_t act_dim = 2;

    std::size_t param_count() const {
        return obs_dim * hidden + hidden + hidden * act_dim + act_dim;
    }
};

struct MlpWeights {
    Tensor2D w1; // hidden x obs_dim
    Tensor2D b1; // hidden x 1
    Tensor2D w2; // act_dim x hidden
    Tensor2D b2; // act_dim x 1
};

/// Split a flat parameter vector into layers, in the fixed order
/// W1 (row-major), b1, W2 (row-major), b2.
inline MlpWeights mlp_decode(std::span<const double> flat, const MlpArch& arch) {
    detail::require(flat.size() == arch.param_count(), "mlp_decode: length mismatch");
    MlpWeights w{Tensor2D(arch.hidden, arch.obs_dim), Tensor2D(arch.hidden, 1),
                 Tensor2D(arch.act_dim, arch.hidden), Tensor2D(arch.act_dim, 1)};
    std::size_t k = 0;
    for (double& v : w.w1.data) v = flat[k++];
    for (double& v : w.b1.data) v = flat[k++];
    for (double& v : w.w2.data) v = flat[k++];
    for (double& v : w.b2.data) v = flat[k++];
    return w;
}

inline void mlp_encode(const MlpWeights& w, std::span<double> flat) {
    std::size_t k = 0;
    for (double v : w.w1.data) flat[k++] = v;
    for (double v : w.b1.data) flat[k++] = v;
    for (double v : w.w2.data) flat[k++] = v;
    for (double v : w.b2.data) flat[k++] = v;
}

/// action = tanh(W2 tanh(W1 obs + b1) + b2); every output is in (-1, 1).
inline void mlp_forward(const MlpWeights& w, std::span<const double> obs,
                        std::span<double> action) {
    const std::size_t h = w.w1.rows;
    double hidden[64];
    for (std::size_t i = 0; i < h; ++i) {
        double s = w.b1.data[i];
        for (std::size_t j = 0; j < w.w1.cols; ++j) s += w.w1(i, j) * obs[j];
        hidden[i] = std::tanh(s);
    }
    for (std::size_t i = 0; i < w.w2.rows; ++i) {
        double s = w.b2.data[i];
        for (std::size_t j = 0; j < h; ++j) s += w.w2(i, j) * hidden[j];
        action[i] = std::tanh(s);
    }
}

// ---------------------------------------------------------------------------
// Toy control environment. Deterministic point-mass dynamics with the same
// objective structure as locomotion tasks: forward progress, height keeping,
// and a quadratic control cost that directly conflicts with both.
//
// State (x, v, h), initial (0, 0, 1). With action (a1, a2) per step:
//   v <- 0.9 v + 0.1 a1,  x <- x + v,  h <- clamp(0.95 h + 0.1 a2, 0, 2)
// Observation: (v, h, sin(2 pi t / T), cos(2 pi t / T)).
// Step rewards: forward r1 = v, control r2 = -(a1^2 + a2^2),
// height r3 = 10 (h - h0).

struct ToyEnvSpec {
    std::size_t horizon = 100;
    std::size_t num_obj = 2; // 2: (forward, control); 3: (forward, height, control)
};

inline constexpr std::size_t toy_obs_dim = 4;
inline constexpr std::size_t toy_act_dim = 2;

/// Run the dynamics with an arbitrary policy(obs[4], action_out[2]); returns
/// the cumulative objective vector (maximization orientation).
template <class Policy>
std::vector<double> toy_rollout(Policy&& policy, const ToyEnvSpec& spec) {
    const double h0 = 1.0;
    double v = 0.0, h = h0;
    double fwd = 0.0, ctrl = 0.0, height = 0.0;
    const double two_pi = 2.0 * std::numbers::pi;
    double obs[toy_obs_dim];
    double act[toy_act_dim];
    for (std::size_t t = 0; t < spec.horizon; ++t) {
        const double phase = two_pi * static_cast<double>(t) / static_cast<double>(spec.horizon);
        obs[0] = v;
        obs[1] = h;
        obs[2] = std::sin(phase);
        obs[3] = std::cos(phase);
        policy(obs, act);
        v = 0.9 * v + 0.1 * act[0];
        h = clamp(0.95 * h + 0.1 * act[1], 0.0, 2.0);
        fwd += v;
        ctrl -= act[0] * act[0] + act[1] * act[1];
        height += 10.0 * (h - h0);
    }
    if (spec.num_obj == 2) return {fwd, ctrl};
    return {fwd, height, ctrl};
}

/// Batch rollout of flat MLP parameters, n x d -> n x m returns
/// (maximization orientation). Rows with non-finite parameters score a
/// -1e9 penalty in every objective.
inline Tensor2D env_rollout(const Tensor2D& params, const ToyEnvSpec& spec,
                            const MlpArch& arch) {
    detail::require(params.cols == arch.param_count(), "env_rollout: parameter length mismatch");
    detail::require(arch.obs_dim == toy_obs_dim && arch.act_dim == toy_act_dim,
                    "env_rollout: arch does not match the environment");
    detail::require(arch.hidden <= 64, "env_rollout: hidden layer too wide");
    Tensor2D f(params.rows, spec.num_obj);
    parallel_for(params.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto row = params.row(i);
            bool finite = true;
            for (double p : row)
                if (!std::isfinite(p)) finite = false;
            if (!finite) {
                for (std::size_t j = 0; j < spec.num_obj; ++j) f(i, j) = -1e9;
                continue;
            }
            const MlpWeights w = mlp_decode(row, arch);
            const auto ret = toy_rollout(
                [&](const double* obs, double* act) {
                    mlp_forward(w, {obs, toy_obs_dim}, {act, toy_act_dim});
                },
                spec);
            for (std::size_t j = 0; j < spec.num_obj; ++j) f(i, j) = ret[j];
        }
    });
    return f;
}

// ---------------------------------------------------------------------------
// Problem registry.

struct ProblemInstance {
    std::string name;
    std::size_t dim = 0;
    std::size_t num_obj = 0;
    Tensor2D lower; // 1 x d
    Tensor2D upper; // 1 x d
    std::function<Tensor2D(const Tensor2D&)> evaluate; // batch, minimization

    int dtlz_id = 0;        // 0 for non-DTLZ problems
    double pf_extent = 1.0; // known front extent, used to normalize HV
    bool maximization = false; // true: evaluate() returns negated raw returns
};

/// Build a problem by name: dtlz1..dtlz4, toy2, toy3. dim = 0 picks the
/// problem default (DTLZ1: 7, DTLZ2-4: 12, toy: the MLP parameter count).
inline ProblemInstance make_problem(const std::string& name, std::size_t dim = 0,
                                    std::size_t m = 3,
                                    std::size_t toy_horizon = 100) {
    ProblemInstance p;
    p.name = name;
    if (name == "dtlz1" || name == "dtlz2" || name == "dtlz3" || name == "dtlz4") {
        const int id = name[4] - '0';
        p.dtlz_id = id;
        p.num_obj = m;
        p.dim = dim ? dim : (id == 1 ? 7 : 12);
        detail::require(p.dim >= m, "make_problem: DTLZ needs d >= m");
        p.lower = Tensor2D(1, p.dim, 0.0);
        p.upper = Tensor2D(1, p.dim, 1.0);
        p.pf_extent = id == 1 ? 0.5 : 1.0;
        const std::size_t mm = p.num_obj;
        p.evaluate = [id, mm](const Tensor2D& x) { return dtlz_eval(id, x, mm); };
        return p;
    }
    if (name == "toy2" || name == "toy3") {
        const MlpArch arch{toy_obs_dim, 16, toy_act_dim};
        const ToyEnvSpec spec{toy_horizon, name == "toy2" ? std::size_t{2} : std::size_t{3}};
        p.num_obj = spec.num_obj;
        p.dim = arch.param_count();
        detail::require(dim == 0 || dim == p.dim, "make_problem: toy env dimension is fixed");
        p.lower = Tensor2D(1, p.dim, -1.0);
        p.upper = Tensor2D(1, p.dim, 1.0);
        p.maximization = true;
        p.evaluate = [spec, arch](const Tensor2D& x) {
            Tensor2D f = env_rollout(x, spec, arch);
            for (double& v : f.data) v = -v;
            return f;
        };
        return p;
    }
    throw std::invalid_argument("make_problem: unknown problem '" + name + "'");
}

} // namespace temo
