// Experiment harness: benchmark, scaling, neuroevolution, and operator
// comparison runs with structured CSV/JSON output, plus the verification
// suite runner.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <new>
#include <string>
#include <vector>

#include "temo/algorithms.hpp"
#include "temo/io.hpp"
#include "temo/oracle.hpp"
#include "temo/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::uint64_t seed = 42;
    std::string out = "out";
    std::size_t reps = 5;
    std::size_t pop = 0;  // 0 -> family default
    std::size_t dim = 0;  // 0 -> problem default
    std::size_t gens = 0; // 0 -> family default
    std::size_t obj = 3;
    std::string op = "ga";
    std::string problem; // empty -> family default set
    double alpha = 2.0;
    double fr = 0.1;
    std::size_t lattice_h = 0;
    std::size_t threads = 0;
    std::string timing = "on";
    std::size_t hv_samples = 2048;
    std::uint64_t hv_seed = 9001;
    std::size_t pf_points = 300;
    std::size_t eu_points = 100;
    std::size_t horizon = 100;
    std::size_t archive_cap = 0;
    double budget_s = 0.0;
    std::string pops = "32,64,128,256,512,1024,2048,4096";
    std::string dims = "512,1024,2048,4096,8192,16384";

    bool timing_on() const { return timing == "on"; }
    double clock(double ms) const { return timing_on() ? ms : 0.0; }
};

void add_common(CLI::App* sub, Options& o) {
    sub->fallthrough(true); // lets --config after the subcommand reach the app
    sub->add_option("--seed", o.seed, "base random seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--reps", o.reps, "independent repetitions");
    sub->add_option("--pop", o.pop, "population size");
    sub->add_option("--dim", o.dim, "decision dimension (0 = problem default)");
    sub->add_option("--gens", o.gens, "generations");
    sub->add_option("--obj", o.obj, "objective count for DTLZ problems");
    sub->add_option("--operator", o.op, "reproduction operator: ga|de|pso|cso|random");
    sub->add_option("--problem", o.problem, "restrict to one problem/environment");
    sub->add_option("--alpha", o.alpha, "APD penalty exponent");
    sub->add_option("--fr", o.fr, "reference adaptation frequency");
    sub->add_option("--lattice-h", o.lattice_h, "reference lattice density (0 = auto)");
    sub->add_option("--threads", o.threads, "worker lanes (0 = hardware)");
    sub->add_option("--timing", o.timing, "on|off: wall-clock fields in outputs")
        ->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--hv-samples", o.hv_samples, "Monte Carlo samples for HV (m >= 3)");
    sub->add_option("--hv-seed", o.hv_seed, "Monte Carlo seed for HV");
    sub->add_option("--pf-points", o.pf_points, "minimum IGD reference front size");
    sub->add_option("--eu-points", o.eu_points, "minimum EU weight count");
    sub->add_option("--horizon", o.horizon, "toy environment episode length");
    sub->add_option("--archive-cap", o.archive_cap, "archive size cap (0 = unlimited)");
    sub->add_option("--budget-s", o.budget_s, "wall-clock budget per run, seconds (0 = off)");
    sub->add_option("--pops", o.pops, "scale: comma list of population sizes");
    sub->add_option("--dims", o.dims, "scale: comma list of decision dimensions");
}

std::vector<std::size_t> parse_list(const std::string& s) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const std::size_t comma = s.find(',', pos);
        const std::string tok = s.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!tok.empty()) out.push_back(std::stoull(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

temo::io::ConfigEcho echo_common(const Options& o, const std::string& family) {
    temo::io::ConfigEcho e;
    e["family"] = family;
    e["seed"] = std::to_string(o.seed);
    e["reps"] = std::to_string(o.reps);
    e["pop"] = std::to_string(o.pop);
    e["dim"] = std::to_string(o.dim);
    e["gens"] = std::to_string(o.gens);
    e["obj"] = std::to_string(o.obj);
    e["operator"] = o.op;
    e["problem"] = o.problem.empty() ? "all" : o.problem;
    e["alpha"] = temo::io::fmt(o.alpha);
    e["fr"] = temo::io::fmt(o.fr);
    e["lattice_h"] = std::to_string(o.lattice_h);
    e["hv_samples"] = std::to_string(o.hv_samples);
    e["hv_seed"] = std::to_string(o.hv_seed);
    e["pf_points"] = std::to_string(o.pf_points);
    e["eu_points"] = std::to_string(o.eu_points);
    e["horizon"] = std::to_string(o.horizon);
    e["archive_cap"] = std::to_string(o.archive_cap);
    e["budget_s"] = temo::io::fmt(o.budget_s);
    e["version"] = temo::version;
    return e;
}

json echo_json(const temo::io::ConfigEcho& e) {
    json j;
    for (const auto& [k, v] : e) j[k] = v;
    return j;
}

temo::RunConfig base_run_config(const Options& o, const std::string& problem) {
    temo::RunConfig cfg;
    cfg.problem = problem;
    cfg.op = o.op;
    cfg.alpha = o.alpha;
    cfg.fr = o.fr;
    cfg.lattice_h = o.lattice_h;
    cfg.dim = o.dim;
    cfg.obj = o.obj;
    cfg.horizon = o.horizon;
    cfg.time_budget_s = o.budget_s;
    cfg.archive_cap = o.archive_cap;
    return cfg;
}

std::size_t pf_density(std::size_t m, std::size_t target) {
    std::size_t h = 1;
    while (temo::lattice_count(m, h) < target) ++h;
    return h;
}

std::vector<std::string> pick_problems(const Options& o,
                                       const std::vector<std::string>& family_default) {
    if (o.problem.empty()) return family_default;
    for (const auto& p : family_default)
        if (p == o.problem) return {o.problem};
    throw CLI::ValidationError("--problem", "'" + o.problem + "' is not part of this family");
}

// ---------------------------------------------------------------------------

int cmd_bench(Options o) {
    if (o.pop == 0) o.pop = 105;
    if (o.gens == 0) o.gens = 200;
    if (o.lattice_h == 0 && o.obj == 3) o.lattice_h = 13;
    temo::set_num_threads(o.threads);
    fs::create_directories(o.out);
    const auto problems = pick_problems(o, {"dtlz1", "dtlz2", "dtlz3", "dtlz4"});
    const std::vector<std::string> algorithms = {"rvea", "nsga2", "random"};
    const temo::io::ConfigEcho echo = echo_common(o, "bench");
    temo::io::CsvWriter csv(fs::path(o.out) / "bench_runs.csv", echo,
                            {"run", "algorithm", "problem", "generation", "elapsed_ms",
                             "pop_size", "igd", "hv"});
    std::ofstream summary_out(fs::path(o.out) / "bench_summary.json");
    if (!summary_out) throw std::runtime_error("cannot open bench_summary.json");

    json results = json::array();
    for (const auto& problem : problems) {
        const temo::ProblemInstance prob = temo::make_problem(problem, o.dim, o.obj);
        temo::MetricContext mc;
        mc.pf_ref = temo::dtlz_pf_reference(prob.dtlz_id, prob.num_obj,
                                            pf_density(prob.num_obj, o.pf_points));
        mc.hv_ref = temo::Tensor2D(1, prob.num_obj, 1.0);
        mc.hv_scale = prob.pf_extent;
        mc.hv_samples = o.hv_samples;
        mc.hv_seed = o.hv_seed;
        for (const auto& algorithm : algorithms) {
            std::vector<double> final_igd, final_hv;
            for (std::size_t rep = 0; rep < o.reps; ++rep) {
                temo::RunConfig cfg = base_run_config(o, problem);
                cfg.pop = o.pop;
                cfg.generations = o.gens;
                cfg.seed = o.seed + rep;
                // Metric cost on DTLZ grows with the archive; cap it unless
                // the user asked otherwise.
                cfg.archive_cap = o.archive_cap ? o.archive_cap : 1000;
                const temo::RunRecord rec = temo::run_algorithm(algorithm, prob, cfg, mc);
                for (const auto& row : rec.rows)
                    csv.row({temo::io::fmt(rep), algorithm, problem, temo::io::fmt(row.t),
                             temo::io::fmt(o.clock(row.elapsed_ms)),
                             temo::io::fmt(row.pop_size), temo::io::fmt(row.igd_value),
                             temo::io::fmt(row.hv_value)});
                final_igd.push_back(rec.rows.back().igd_value);
                final_hv.push_back(rec.rows.back().hv_value);
            }
            results.push_back({{"algorithm", algorithm},
                               {"problem", problem},
                               {"reps", o.reps},
                               {"final_igd_median", temo::io::median(final_igd)},
                               {"final_igd_iqr", temo::io::iqr(final_igd)},
                               {"final_hv_median", temo::io::median(final_hv)},
                               {"final_hv_iqr", temo::io::iqr(final_hv)}});
        }
    }
    json summary = {{"version", temo::version},
                    {"seed", o.seed},
                    {"config", echo_json(echo)},
                    {"results", results}};
    summary_out << summary.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct ScalePoint {
    std::string series;
    std::size_t n, d;
    double tensor_ms = 0.0, oracle_ms = 0.0;
    bool skipped = false;
};

double median_generation_ms(const temo::RunRecord& rec) {
    std::vector<double> durations;
    double prev = 0.0;
    for (const auto& row : rec.rows) {
        durations.push_back(row.elapsed_ms - prev);
        prev = row.elapsed_ms;
    }
    return temo::io::median(durations);
}

int cmd_scale(Options o) {
    if (o.gens == 0) o.gens = 20;
    temo::set_num_threads(o.threads);
    fs::create_directories(o.out);
    const temo::io::ConfigEcho echo = echo_common(o, "scale");
    temo::io::CsvWriter csv(fs::path(o.out) / "scale.csv", echo,
                            {"series", "n", "d", "m", "generations", "tensor_ms",
                             "oracle_ms", "speedup", "status"});

    std::vector<ScalePoint> points;
    for (const std::size_t n : parse_list(o.pops))
        points.push_back({"population", n, o.dim ? o.dim : 100});
    for (const std::size_t d : parse_list(o.dims))
        points.push_back({"dimension", o.pop ? o.pop : 100, d});

    for (ScalePoint& pt : points) {
        temo::RunConfig cfg = base_run_config(o, "dtlz1");
        cfg.pop = pt.n;
        cfg.generations = o.gens;
        cfg.seed = o.seed;
        cfg.op = "ga";
        cfg.track_archive = false;
        cfg.dim = pt.d;
        try {
            const temo::ProblemInstance prob = temo::make_problem("dtlz1", pt.d, o.obj);
            const temo::RunRecord tensor_rec = temo::rvea_run(prob, cfg);
            const temo::RunRecord oracle_rec = temo::oracle::oracle_rvea_run(prob, cfg);
            pt.tensor_ms = median_generation_ms(tensor_rec);
            pt.oracle_ms = median_generation_ms(oracle_rec);
        } catch (const std::bad_alloc&) {
            pt.skipped = true;
        }
        const double tensor_ms = o.clock(pt.tensor_ms);
        const double oracle_ms = o.clock(pt.oracle_ms);
        const double speedup = tensor_ms > 0.0 ? oracle_ms / tensor_ms : 0.0;
        csv.row({pt.series, temo::io::fmt(pt.n), temo::io::fmt(pt.d), temo::io::fmt(o.obj),
                 temo::io::fmt(o.gens), temo::io::fmt(tensor_ms), temo::io::fmt(oracle_ms),
                 temo::io::fmt(speedup), pt.skipped ? "skipped" : "ok"});
        std::fprintf(stderr, "scale %s n=%zu d=%zu: tensor %.3f ms, oracle %.3f ms%s\n",
                     pt.series.c_str(), pt.n, pt.d, pt.tensor_ms, pt.oracle_ms,
                     pt.skipped ? " (skipped)" : "");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Shared by neuro and ops: run, pool the reference point, post-hoc HV/EU.

struct NeuroRun {
    std::string label; // algorithm or operator name
    std::size_t rep;
    temo::RunRecord rec;
};

temo::Tensor2D pooled_reference(const std::vector<NeuroRun>& runs, std::size_t m,
                                std::size_t floored_dims) {
    temo::Tensor2D ref(1, m, temo::inf);
    for (const auto& run : runs) {
        const temo::Tensor2D raw = temo::negated(run.rec.archive.f);
        for (std::size_t i = 0; i < raw.rows; ++i)
            for (std::size_t j = 0; j < m; ++j)
                ref.data[j] = std::min(ref.data[j], raw(i, j));
    }
    for (std::size_t j = 0; j < floored_dims; ++j)
        ref.data[j] = std::max(ref.data[j], 0.0);
    return ref;
}

struct PostHoc {
    std::vector<double> hv, eu;
};

PostHoc posthoc_metrics(const temo::RunRecord& rec, const temo::Tensor2D& ref_max,
                        const temo::Tensor2D& weights, const Options& o) {
    PostHoc ph;
    const temo::Tensor2D ref_min = temo::negated(ref_max);
    // Fixed sampling box across the whole run: the final archive bounds every
    // earlier generation's dominated region, so the per-generation Monte
    // Carlo estimates stay monotone under one seed.
    const temo::Tensor2D box_lo = temo::col_min(rec.archive.f);
    for (const temo::Tensor2D& f_min : rec.archive_f_history) {
        double hv;
        if (f_min.cols == 2)
            hv = temo::hv_exact_2d(f_min, ref_min);
        else
            hv = temo::hv_mc_box(f_min, box_lo, ref_min, o.hv_samples, o.hv_seed).value;
        ph.hv.push_back(hv);
        ph.eu.push_back(temo::eu(temo::negated(f_min), weights));
    }
    return ph;
}

int run_env_family(Options o, const std::string& family,
                   const std::vector<std::string>& labels, bool labels_are_operators) {
    temo::set_num_threads(o.threads);
    fs::create_directories(o.out);
    const auto envs = pick_problems(o, {"toy2", "toy3"});
    const temo::io::ConfigEcho echo = echo_common(o, family);
    const std::string label_col = labels_are_operators ? "operator" : "algorithm";
    temo::io::CsvWriter csv(fs::path(o.out) / (family + "_runs.csv"), echo,
                            {"run", label_col, "env", "generation", "elapsed_ms",
                             "pop_size", "hv", "eu"});
    std::ofstream summary_out(fs::path(o.out) / (family + "_summary.json"));
    if (!summary_out) throw std::runtime_error("cannot open summary json");

    json results = json::array();
    json refs_json;
    for (const auto& env : envs) {
        const temo::ProblemInstance prob = temo::make_problem(env, 0, 3, o.horizon);
        const std::size_t m = prob.num_obj;
        temo::io::CsvWriter archive_csv(
            fs::path(o.out) / (family + "_archive_" + env + ".csv"), echo,
            [&] {
                std::vector<std::string> cols = {"run", label_col};
                for (std::size_t j = 0; j < m; ++j) cols.push_back("f" + std::to_string(j + 1));
                return cols;
            }());

        std::vector<NeuroRun> runs;
        for (const auto& label : labels) {
            for (std::size_t rep = 0; rep < o.reps; ++rep) {
                temo::RunConfig cfg = base_run_config(o, env);
                cfg.pop = o.pop;
                cfg.generations = o.gens;
                cfg.seed = o.seed + rep;
                cfg.archive_history = true;
                temo::RunRecord rec;
                if (labels_are_operators) {
                    cfg.op = label;
                    rec = temo::rvea_run(prob, cfg);
                } else {
                    rec = temo::run_algorithm(label, prob, cfg);
                }
                runs.push_back({label, rep, std::move(rec)});
            }
        }

        // Reference point: pooled componentwise minimum of all recorded
        // nondominated solutions, floored at zero for the forward/height
        // objectives (the control-cost dimension stays unfloored).
        const std::size_t floored = m == 2 ? 1 : 2;
        const temo::Tensor2D ref_max = pooled_reference(runs, m, floored);
        refs_json[env] = std::vector<double>(ref_max.data.begin(), ref_max.data.end());
        const temo::Tensor2D weights =
            temo::utility_weights(m, temo::utility_weight_density(m, o.eu_points));

        std::map<std::string, std::vector<double>> final_hv, final_eu;
        for (const NeuroRun& run : runs) {
            const PostHoc ph = posthoc_metrics(run.rec, ref_max, weights, o);
            for (std::size_t t = 0; t < run.rec.rows.size(); ++t) {
                const auto& row = run.rec.rows[t];
                csv.row({temo::io::fmt(run.rep), run.label, env, temo::io::fmt(row.t),
                         temo::io::fmt(o.clock(row.elapsed_ms)),
                         temo::io::fmt(row.pop_size), temo::io::fmt(ph.hv[t]),
                         temo::io::fmt(ph.eu[t])});
            }
            final_hv[run.label].push_back(ph.hv.back());
            final_eu[run.label].push_back(ph.eu.back());
            const temo::Tensor2D raw = temo::negated(run.rec.archive.f);
            for (std::size_t i = 0; i < raw.rows; ++i) {
                std::vector<std::string> cells = {temo::io::fmt(run.rep), run.label};
                for (std::size_t j = 0; j < m; ++j) cells.push_back(temo::io::fmt(raw(i, j)));
                archive_csv.row(cells);
            }
        }
        for (const auto& label : labels) {
            results.push_back({{label_col, label},
                               {"env", env},
                               {"reps", o.reps},
                               {"final_hv_median", temo::io::median(final_hv[label])},
                               {"final_hv_iqr", temo::io::iqr(final_hv[label])},
                               {"final_eu_median", temo::io::median(final_eu[label])},
                               {"final_eu_iqr", temo::io::iqr(final_eu[label])}});
        }
    }
    json summary = {{"version", temo::version},
                    {"seed", o.seed},
                    {"config", echo_json(echo)},
                    {"reference_points", refs_json},
                    {"results", results}};
    summary_out << summary.dump(2) << "\n";
    return 0;
}

int cmd_neuro(Options o) {
    if (o.pop == 0) o.pop = 512;
    if (o.gens == 0) o.gens = 50;
    return run_env_family(std::move(o), "neuro", {"rvea", "nsga2", "random"}, false);
}

int cmd_ops(Options o) {
    if (o.pop == 0) o.pop = 512;
    if (o.gens == 0) o.gens = 100;
    std::vector<std::string> operators = {"ga", "de", "pso", "cso", "random"};
    if (o.op != "ga") operators = {o.op}; // --operator restricts the sweep
    return run_env_family(std::move(o), "ops", operators, true);
}

// ---------------------------------------------------------------------------

int cmd_verify(const Options& o) {
    temo::set_num_threads(o.threads);
    const std::vector<temo::verify::SuiteResult> suites = temo::verify::all_suites();
    bool ok = true;
    for (const auto& s : suites) {
        std::printf("%-24s checked=%zu failed=%zu\n", s.name.c_str(), s.checked, s.failed);
        for (const auto& f : s.failures) std::printf("    %s\n", f.c_str());
        ok = ok && s.ok();
    }
    std::printf("%s\n", ok ? "verify: all suites passed" : "verify: FAILURES");
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batched evolutionary multiobjective optimization harness"};
    app.require_subcommand(1);
    app.set_config("--config", "", "config file (INI; options under a [subcommand] section)");
    app.allow_config_extras(false);
    Options opts;
    add_common(app.add_subcommand("bench", "DTLZ benchmark runs"), opts);
    add_common(app.add_subcommand("scale", "batched-vs-scalar timing sweeps"), opts);
    add_common(app.add_subcommand("neuro", "toy-environment neuroevolution runs"), opts);
    add_common(app.add_subcommand("ops", "reproduction-operator comparison"), opts);
    add_common(app.add_subcommand("verify", "oracle equivalence and invariant suites"), opts);

    CLI11_PARSE(app, argc, argv);
    try {
        if (app.got_subcommand("bench")) return cmd_bench(opts);
        if (app.got_subcommand("scale")) return cmd_scale(opts);
        if (app.got_subcommand("neuro")) return cmd_neuro(opts);
        if (app.got_subcommand("ops")) return cmd_ops(opts);
        if (app.got_subcommand("verify")) return cmd_verify(opts);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
