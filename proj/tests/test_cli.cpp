#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "temo/io.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(TEMO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

} // namespace

TEST_CASE("median and iqr helpers") {
    CHECK(temo::io::median({3, 1, 2}) == 2.0);
    CHECK(temo::io::median({4, 1, 2, 3}) == 2.5);
    CHECK(temo::io::iqr({1, 2, 3, 4}) == 2.0);
    CHECK(temo::io::iqr({5}) == 0.0);
    CHECK(temo::io::fmt(0.1) == "0.10000000000000001");
}

TEST_CASE("bench outputs embed metadata and consistent summaries") {
    const fs::path dir = fs::temp_directory_path() / "temo_cli_bench";
    fs::remove_all(dir);
    const std::string args = "bench --out " + dir.string() +
                             " --reps 3 --gens 3 --pop 12 --lattice-h 3 --problem dtlz2 "
                             "--timing off --hv-samples 256 --seed 5";
    REQUIRE(run_cli(args) == 0);

    const auto lines = read_lines(dir / "bench_runs.csv");
    REQUIRE(lines.size() >= 3);
    CHECK(lines[0].rfind("# version=", 0) == 0);
    CHECK(lines[1].rfind("# config: ", 0) == 0);
    CHECK(lines[1].find("seed=5") != std::string::npos);
    CHECK(lines[2] == "run,algorithm,problem,generation,elapsed_ms,pop_size,igd,hv");
    // 3 algorithms x 3 reps x 3 generations
    CHECK(lines.size() - 3 == 27);

    // medians in the summary match an independent recomputation from the CSV
    std::map<std::string, std::vector<double>> final_igd;
    for (std::size_t i = 3; i < lines.size(); ++i) {
        const auto cells = split(lines[i], ',');
        REQUIRE(cells.size() == 8);
        if (cells[3] == "2") final_igd[cells[1]].push_back(std::stod(cells[6]));
    }
    std::ifstream jin(dir / "bench_summary.json");
    REQUIRE(jin.good());
    nlohmann::json summary;
    jin >> summary;
    CHECK(summary["version"] == temo::version);
    for (const auto& entry : summary["results"]) {
        const std::string algo = entry["algorithm"];
        REQUIRE(final_igd.count(algo) == 1);
        CHECK(entry["final_igd_median"].get<double>() ==
              Catch::Approx(temo::io::median(final_igd[algo])).epsilon(1e-12));
    }
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    const fs::path d1 = fs::temp_directory_path() / "temo_cli_det1";
    const fs::path d2 = fs::temp_directory_path() / "temo_cli_det2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    const std::string tail = " --reps 2 --gens 2 --pop 10 --lattice-h 3 --problem dtlz1 "
                             "--timing off --hv-samples 128 --seed 8";
    REQUIRE(run_cli("bench --out " + d1.string() + tail) == 0);
    REQUIRE(run_cli("bench --out " + d2.string() + tail) == 0);
    const auto a = read_lines(d1 / "bench_runs.csv");
    const auto b = read_lines(d2 / "bench_runs.csv");
    CHECK(a == b);
}

TEST_CASE("config files work and unknown keys are rejected") {
    const fs::path dir = fs::temp_directory_path() / "temo_cli_cfg";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "good.ini");
        cfg << "[bench]\npop = 10\ngens = 2\nreps = 1\nlattice-h = 3\nproblem = dtlz2\n"
            << "timing = off\nhv-samples = 128\nout = " << (dir / "out").string() << "\n";
    }
    REQUIRE(run_cli("bench --config " + (dir / "good.ini").string()) == 0);
    CHECK(fs::exists(dir / "out" / "bench_runs.csv"));
    {
        std::ofstream cfg(dir / "bad.ini");
        cfg << "[bench]\npop = 10\nnot_a_real_key = 1\n";
    }
    CHECK(run_cli("bench --config " + (dir / "bad.ini").string()) != 0);
}

TEST_CASE("verify subcommand reports suite counts") {
    // smoke only: full suites run in the acceptance binary; here we check the
    // wiring with a tiny budget by calling the command as-is would be slow,
    // so only assert the executable exists and is runnable with --help.
    CHECK(run_cli("--help") == 0);
}
