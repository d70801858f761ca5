// Acceptance suite: runs every release criterion at its pinned tolerance and
// prints one pass/fail line per criterion. Exit code 0 only if all pass.
//
// `acceptance --print-baseline` recomputes the pinned scalar-pipeline IGD
// baseline used by criterion 5.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "temo/algorithms.hpp"
#include "temo/io.hpp"
#include "temo/oracle.hpp"
#include "temo/verify.hpp"

namespace fs = std::filesystem;
using namespace temo;

namespace {

struct Outcome {
    int id;
    std::string name;
    bool pass;
    double seconds;
    std::string detail;
};

std::vector<Outcome> outcomes;

template <class Fn>
void criterion(int id, const std::string& name, double budget_s, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        detail = fn();
        pass = true;
    } catch (const std::exception& e) {
        detail = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_s > 0.0 && secs >= budget_s) {
        pass = false;
        detail += detail.empty() ? "" : "; ";
        detail += "runtime " + std::to_string(secs) + " s exceeded " +
                  std::to_string(budget_s) + " s";
    }
    outcomes.push_back({id, name, pass, secs, detail});
    std::printf("[%s] criterion %d: %s (%.1f s)%s%s\n", pass ? "PASS" : "FAIL", id,
                name.c_str(), secs, detail.empty() ? "" : " - ", detail.c_str());
    std::fflush(stdout);
}

void fail(const std::string& msg) { throw std::runtime_error(msg); }

// --------------------------------------------------------------------------
// Criterion 5 setup. The pinned baseline is the final archive IGD of the
// scalar loop-based pipeline on DTLZ2 (m=3, H=13, n=105, GA, 200
// generations, seed 4242), measured once with `--print-baseline` and frozen
// here.
constexpr double pinned_baseline_igd = 0.037367406771666209;

RunConfig convergence_config(std::uint64_t seed) {
    RunConfig cfg;
    cfg.problem = "dtlz2";
    cfg.op = "ga";
    cfg.pop = 105;
    cfg.lattice_h = 13;
    cfg.generations = 200;
    cfg.alpha = 2.0;
    cfg.fr = 0.1;
    cfg.seed = seed;
    return cfg;
}

MetricContext convergence_metrics(const ProblemInstance& prob) {
    MetricContext mc;
    std::size_t h = 1;
    while (lattice_count(prob.num_obj, h) < 300) ++h;
    mc.pf_ref = dtlz_pf_reference(prob.dtlz_id, prob.num_obj, h);
    return mc;
}

double oracle_baseline_igd() {
    const ProblemInstance prob = make_problem("dtlz2");
    const MetricContext mc = convergence_metrics(prob);
    const RunRecord rec = oracle::oracle_rvea_run(prob, convergence_config(4242), mc);
    return rec.rows.back().igd_value;
}

// --------------------------------------------------------------------------
// CLI plumbing for criteria that consume harness output files.

std::string cli_path() { return TEMO_CLI_PATH; }

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "temo_acceptance";
    fs::create_directories(dir);
    return dir;
}

void run_cli(const std::string& args) {
    const fs::path log = work_dir() / "cli.log";
    const std::string cmd = cli_path() + " " + args + " >> " + log.string() + " 2>&1";
    if (std::system(cmd.c_str()) != 0) fail("CLI command failed: " + args);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

struct Csv {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw std::runtime_error("missing CSV column " + name);
    }
};

Csv read_csv(const fs::path& p) {
    std::ifstream in(p);
    if (!in) fail("cannot read " + p.string());
    Csv csv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("#", 0) == 0) continue;
        if (csv.columns.empty())
            csv.columns = split(line, ',');
        else
            csv.rows.push_back(split(line, ','));
    }
    return csv;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) fail("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --------------------------------------------------------------------------

std::string c1_rv_select_equivalence() {
    const auto s = verify::rv_select_suite(200, 1e-9);
    if (!s.ok()) fail(s.failures.front());
    return std::to_string(s.checked) + " instances, elite sets identical, APD within 1e-9";
}

std::string c2_operator_equivalence() {
    const auto s = verify::operator_suite(100, 1e-12);
    if (!s.ok()) fail(s.failures.front());
    return std::to_string(s.checked) + " instances across sbx/pm/de/pso/cso within 1e-12";
}

std::string c3_operator_invariants() {
    const auto s = verify::operator_invariant_suite(10000);
    if (!s.ok()) fail(s.failures.front());
    return std::to_string(s.checked) + " instances: bounds, pair-mean, mask, 3-sigma rate";
}

std::string c4_dtlz_correctness() {
    RngStream g{4004, 0};
    for (int id = 1; id <= 4; ++id) {
        const Tensor2D pf = dtlz_pf_reference(id, 3, 13);
        for (std::size_t i = 0; i < pf.rows; ++i) {
            double s = 0.0, sq = 0.0;
            for (std::size_t j = 0; j < 3; ++j) {
                s += pf(i, j);
                sq += pf(i, j) * pf(i, j);
            }
            if (id == 1 && std::abs(s - 0.5) > 1e-12) fail("dtlz1 front sum off");
            if (id != 1 && std::abs(sq - 1.0) > 1e-12) fail("dtlz front norm off");
        }
        const std::size_t d = id == 1 ? 7 : 12;
        const Tensor2D x = uniform_tensor(g, 16, d);
        const Tensor2D batch = dtlz_eval(id, x, 3);
        for (std::size_t i = 0; i < x.rows; ++i) {
            Tensor2D row(1, d);
            for (std::size_t j = 0; j < d; ++j) row(0, j) = x(i, j);
            const Tensor2D single = dtlz_eval(id, row, 3);
            for (std::size_t j = 0; j < 3; ++j)
                if (single(0, j) != batch(i, j)) fail("batch/scalar mismatch");
        }
    }
    return "front equations within 1e-12; batch equals scalar exactly";
}

std::string c5_convergence() {
    const ProblemInstance prob = make_problem("dtlz2");
    const MetricContext mc = convergence_metrics(prob);
    std::vector<double> initial, final_v;
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
        const RunRecord rec = rvea_run(prob, convergence_config(101 + rep), mc);
        initial.push_back(rec.rows.front().igd_value);
        final_v.push_back(rec.rows.back().igd_value);
    }
    const double med_initial = io::median(initial);
    const double med_final = io::median(final_v);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "median IGD %.4f -> %.4f (ratio %.3f); pinned baseline %.4f",
                  med_initial, med_final, med_final / med_initial, pinned_baseline_igd);
    if (!(med_final < 0.1 * med_initial)) fail(std::string(buf) + "; ratio bound violated");
    if (pinned_baseline_igd <= 0.0) fail("baseline not pinned; run --print-baseline");
    if (!(med_final <= 1.1 * pinned_baseline_igd))
        fail(std::string(buf) + "; baseline bound violated");
    return buf;
}

std::string c6_metric_correctness() {
    RngStream g{6006, 0};
    const Tensor2D unit_ref = Tensor2D::from_rows({{1.0, 1.0}});
    if (hv_exact_2d(Tensor2D::from_rows({{0.5, 0.5}}), unit_ref) != 0.25)
        fail("unit rectangle hypervolume not exact");
    for (int k = 0; k < 20; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(g.next() * 24);
        const Tensor2D f = uniform_tensor(g, n, 2);
        const double exact = hv_exact_2d(f, unit_ref);
        const HvEstimate est = hv_mc(f, unit_ref, 1000000, 6100 + k);
        if (std::abs(est.value - exact) > 3.0 * std::max(est.std_error, 1e-9))
            fail("hv exact vs Monte Carlo outside 3 standard errors");
    }
    for (int k = 0; k < 20; ++k) {
        const std::size_t m = 2 + static_cast<std::size_t>(g.next() * 3);
        const Tensor2D fa = uniform_tensor(g, 1 + std::size_t(g.next() * 20), m);
        const Tensor2D fb = uniform_tensor(g, 1 + std::size_t(g.next() * 20), m);
        if (std::abs(igd(fa, fb) -
                     oracle::oracle_igd(oracle::to_matrix(fa), oracle::to_matrix(fb))) > 1e-12)
            fail("igd vs double-loop oracle");
        const Tensor2D w = utility_weights(m, 6);
        if (std::abs(eu(fa, w) -
                     oracle::oracle_eu(oracle::to_matrix(fa), oracle::to_matrix(w))) > 1e-12)
            fail("eu vs double-loop oracle");
    }
    return "hv exact/mc within 3 SE at 1e6 samples; igd/eu within 1e-12";
}

std::string c7_performance() {
    const fs::path dir = work_dir() / "scale";
    fs::remove_all(dir);
    run_cli("scale --out " + dir.string() +
            " --pops 32,64,128,256,512,1024,2048,4096 --dims \"\" --gens 20 --seed 7");
    const Csv csv = read_csv(dir / "scale.csv");
    const std::size_t c_n = csv.col("n"), c_speed = csv.col("speedup"),
                      c_status = csv.col("status");
    std::vector<std::pair<std::size_t, double>> speedups;
    for (const auto& row : csv.rows) {
        if (row[c_status] != "ok") fail("scale point skipped at n=" + row[c_n]);
        speedups.emplace_back(std::stoull(row[c_n]), std::stod(row[c_speed]));
    }
    std::sort(speedups.begin(), speedups.end());
    if (speedups.size() != 8) fail("expected 8 population sweep points");
    std::size_t inversions = 0;
    for (std::size_t i = 0; i + 1 < speedups.size(); ++i)
        if (speedups[i + 1].second < speedups[i].second) ++inversions;
    const double at_4096 = speedups.back().second;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "speedup at n=4096: %.2fx; inversions: %zu", at_4096,
                  inversions);
    if (!(at_4096 >= 5.0)) fail(std::string(buf) + "; below the 5x floor");
    if (inversions > 1) fail(std::string(buf) + "; speedup not monotone");
    return buf;
}

struct EnvFamilyStats {
    // label -> final hv per rep, keyed per env
    std::map<std::string, std::map<std::string, std::vector<double>>> final_hv;
};

EnvFamilyStats check_env_runs(const Csv& csv, const std::string& label_col) {
    const std::size_t c_run = csv.col("run"), c_label = csv.col(label_col),
                      c_env = csv.col("env"), c_gen = csv.col("generation"),
                      c_hv = csv.col("hv"), c_eu = csv.col("eu");
    std::map<std::string, double> last_hv; // rows arrive in generation order
    for (const auto& row : csv.rows) {
        const std::string key = row[c_env] + "/" + row[c_label] + "/" + row[c_run];
        const double hv = std::stod(row[c_hv]);
        const double eu_v = std::stod(row[c_eu]);
        if (!std::isfinite(hv) || !std::isfinite(eu_v))
            fail("non-finite hv/eu in row for " + key);
        const auto it = last_hv.find(key);
        if (it != last_hv.end() && hv < it->second - 1e-9 * std::max(1.0, it->second))
            fail("archive hv decreased for " + key + " at generation " + row[c_gen]);
        last_hv[key] = hv;
    }
    EnvFamilyStats stats;
    for (const auto& [key, hv] : last_hv) {
        const auto parts = split(key, '/');
        stats.final_hv[parts[0]][parts[1]].push_back(hv);
    }
    return stats;
}

std::string c8_neuroevolution() {
    const fs::path dir = work_dir() / "neuro";
    fs::remove_all(dir);
    run_cli("neuro --out " + dir.string() + " --pop 512 --gens 50 --reps 5 --seed 900");
    const Csv csv = read_csv(dir / "neuro_runs.csv");
    const EnvFamilyStats stats = check_env_runs(csv, "algorithm");
    std::string detail;
    for (const auto& env : {"toy2", "toy3"}) {
        auto it = stats.final_hv.find(env);
        if (it == stats.final_hv.end()) fail(std::string("missing env ") + env);
        const double rvea_med = io::median(it->second.at("rvea"));
        const double random_med = io::median(it->second.at("random"));
        char buf[120];
        std::snprintf(buf, sizeof(buf), "%s rvea %.4g vs random %.4g; ", env, rvea_med,
                      random_med);
        detail += buf;
        if (!(rvea_med >= random_med))
            fail(detail + "rvea median final HV below random search");
    }
    return detail + "hv nondecreasing everywhere";
}

std::string c9_extensibility() {
    const fs::path dir = work_dir() / "ops";
    fs::remove_all(dir);
    run_cli("ops --out " + dir.string() + " --pop 512 --gens 100 --reps 5 --seed 901");
    const Csv csv = read_csv(dir / "ops_runs.csv");
    const EnvFamilyStats stats = check_env_runs(csv, "operator");
    std::string detail;
    for (const auto& env : {"toy2", "toy3"}) {
        const auto& by_op = stats.final_hv.at(env);
        // all five operators completed all generations
        for (const auto& op : {"ga", "de", "pso", "cso", "random"})
            if (by_op.find(op) == by_op.end() || by_op.at(op).size() != 5)
                fail(std::string(env) + ": operator " + op + " missing runs");
        const double random_med = io::median(by_op.at("random"));
        double best_evo = -inf;
        std::string best_name;
        for (const auto& op : {"ga", "de", "pso", "cso"}) {
            const double med = io::median(by_op.at(op));
            if (med > best_evo) {
                best_evo = med;
                best_name = op;
            }
        }
        char buf[140];
        std::snprintf(buf, sizeof(buf), "%s best %s %.4g vs random %.4g; ", env,
                      best_name.c_str(), best_evo, random_med);
        detail += buf;
        if (!(random_med <= best_evo)) fail(detail + "random beat every operator");
    }
    return detail + "all operators finished with finite HV";
}

std::string c10_determinism() {
    const std::string tails[] = {
        "bench --reps 2 --gens 3 --pop 12 --lattice-h 3 --problem dtlz1 --hv-samples 256",
        "neuro --reps 1 --gens 4 --pop 16 --hv-samples 256",
        "ops --reps 1 --gens 3 --pop 16 --hv-samples 256",
    };
    for (const std::string& tail : tails) {
        const fs::path d1 = work_dir() / "det1";
        const fs::path d2 = work_dir() / "det2";
        fs::remove_all(d1);
        fs::remove_all(d2);
        run_cli(tail + " --timing off --seed 33 --threads 1 --out " + d1.string());
        run_cli(tail + " --timing off --seed 33 --threads 4 --out " + d2.string());
        for (const auto& entry : fs::directory_iterator(d1)) {
            const fs::path other = d2 / entry.path().filename();
            if (read_file(entry.path()) != read_file(other))
                fail("outputs differ for '" + tail + "': " +
                     entry.path().filename().string());
        }
    }
    // scale: wall-clock columns aside, the sweep grid must be byte-stable.
    const fs::path s1 = work_dir() / "dets1";
    const fs::path s2 = work_dir() / "dets2";
    fs::remove_all(s1);
    fs::remove_all(s2);
    const std::string scale_tail =
        "scale --pops 32,64 --dims 512 --gens 3 --seed 33 --out ";
    run_cli(scale_tail + s1.string() + " --threads 1");
    run_cli(scale_tail + s2.string() + " --threads 4");
    const Csv a = read_csv(s1 / "scale.csv");
    const Csv b = read_csv(s2 / "scale.csv");
    if (a.rows.size() != b.rows.size()) fail("scale row count differs");
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        for (const char* col : {"series", "n", "d", "m", "generations", "status"}) {
            if (a.rows[i][a.col(col)] != b.rows[i][b.col(col)])
                fail(std::string("scale column ") + col + " differs");
        }
    }
    return "bench/neuro/ops byte-identical across reruns and lane counts";
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1 && std::string(argv[1]) == "--print-baseline") {
        std::printf("baseline igd = %.17g\n", oracle_baseline_igd());
        return 0;
    }
    set_num_threads(0);
    criterion(1, "selection oracle equivalence", 30.0, c1_rv_select_equivalence);
    criterion(2, "operator oracle equivalence", 30.0, c2_operator_equivalence);
    criterion(3, "operator invariants", 60.0, c3_operator_invariants);
    criterion(4, "DTLZ correctness", 0.0, c4_dtlz_correctness);
    criterion(5, "convergence on DTLZ2", 300.0, c5_convergence);
    criterion(6, "metric correctness", 0.0, c6_metric_correctness);
    criterion(7, "batched-vs-scalar performance", 600.0, c7_performance);
    criterion(8, "toy-environment neuroevolution", 600.0, c8_neuroevolution);
    criterion(9, "operator extensibility", 900.0, c9_extensibility);
    criterion(10, "byte-identical reruns", 0.0, c10_determinism);

    std::size_t failed = 0;
    for (const auto& o : outcomes) failed += o.pass ? 0 : 1;
    std::printf("%zu/%zu criteria passed\n", outcomes.size() - failed, outcomes.size());
    return failed == 0 ? 0 : 1;
}
