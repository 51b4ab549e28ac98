// Subprocess tests of the xfpt command line: exit codes, file formats,
// provenance headers, determinism, and the statistical comparison gate.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kCli = XFPT_CLI_PATH;
const fs::path kTmp = "cli_test_tmp";

int run(const std::string& args, const std::string& env = "") {
    fs::create_directories(kTmp);
    std::string cmd = env + (env.empty() ? "" : " ") + "\"" + kCli + "\" " + args + " 2>" +
                      (kTmp / "stderr.txt").string();
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path write_config(const std::string& name, const json& config) {
    fs::create_directories(kTmp);
    fs::path path = kTmp / name;
    std::ofstream out(path);
    out << config.dump(2);
    return path;
}

// parses a headered CSV into rows of doubles
std::vector<std::vector<double>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::vector<double>> rows;
    std::string line;
    bool seen_columns = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!seen_columns) {
            seen_columns = true;  // column header
            continue;
        }
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

json reference_config(int64_t trials = 50000) {
    return json{{"model", {{"model", "leaky-loop"}, {"s", 0.5}, {"mu", 0.9}, {"d", 50}}},
                {"statistics", {{"lambda", 1.0}, {"k_max", 15}}},
                {"mc", {{"trials", trials}, {"seed", 1}}}};
}

} // namespace

TEST_CASE("exact: asymptotic tail column follows the closed-form profile") {
    fs::path config = write_config("exact_reference.json", reference_config());
    fs::path out = kTmp / "exact_reference";
    REQUIRE(run("exact --config " + config.string() + " --out " + out.string()) == 0);

    json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary["n_walkers"] == 349);
    double lambda = summary["lambda"].get<double>();
    CHECK(lambda == doctest::Approx(349 * 0.5 * std::pow(0.9, 49)).epsilon(1e-12));

    auto tail = read_csv(out / "tail.csv");
    REQUIRE(tail.size() == 16);
    for (const auto& row : tail) {
        double k = row[0];
        double f = (1.0 - std::pow(0.5, k + 1.0)) / 0.5;
        CHECK(row[2] == doctest::Approx(std::exp(-lambda * f)).epsilon(1e-12));
    }

    // provenance header on every file
    for (const char* name : {"distribution.csv", "tail.csv"}) {
        std::string body = slurp(out / name);
        CHECK(body.rfind("# xfpt ", 0) == 0);
        CHECK(body.find("# config {") != std::string::npos);
    }
    CHECK(json::parse(slurp(out / "summary.json")).contains("config"));
}

TEST_CASE("exact: a single walker's tail is the survival function") {
    json config = reference_config();
    config["statistics"] = json{{"n", 1}, {"k_max", 12}};
    fs::path path = write_config("exact_n1.json", config);
    fs::path out = kTmp / "exact_n1";
    REQUIRE(run("exact --config " + path.string() + " --out " + out.string()) == 0);
    auto dist = read_csv(out / "distribution.csv");  // t, p, S
    auto tail = read_csv(out / "tail.csv");          // k, exact, asym
    REQUIRE(dist.size() == 13);
    for (size_t i = 0; i < dist.size(); ++i)
        CHECK(std::abs(tail[i][1] - dist[i][2]) <= 1e-15);
}

TEST_CASE("exact: bethe summary carries the shortest-path mass") {
    json config{{"model", {{"model", "bethe"}, {"z", 3}, {"d", 4}}},
                {"statistics", {{"lambda", 1.0}, {"k_max", 8}}}};
    fs::path path = write_config("exact_bethe.json", config);
    fs::path out = kTmp / "exact_bethe";
    REQUIRE(run("exact --config " + path.string() + " --out " + out.string()) == 0);
    json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary["p_d"].get<double>() == doctest::Approx(1.0 / 81.0).epsilon(1e-15));
    CHECK(summary["n_walkers"] == 81);
}

TEST_CASE("exact: reruns are byte-identical") {
    fs::path config = write_config("exact_rerun.json", reference_config());
    fs::path out1 = kTmp / "rerun1";
    fs::path out2 = kTmp / "rerun2";
    REQUIRE(run("exact --config " + config.string() + " --out " + out1.string()) == 0);
    REQUIRE(run("exact --config " + config.string() + " --out " + out2.string()) == 0);
    for (const char* name : {"distribution.csv", "tail.csv", "summary.json"})
        CHECK(slurp(out1 / name) == slurp(out2 / name));
}

TEST_CASE("simulate: smoke run finishes fast and deterministically") {
    json config = reference_config(100);
    fs::path path = write_config("simulate_smoke.json", config);
    fs::path out1 = kTmp / "sim_smoke1";
    fs::path out2 = kTmp / "sim_smoke2";

    auto t0 = std::chrono::steady_clock::now();
    REQUIRE(run("simulate --config " + path.string() + " --out " + out1.string()) == 0);
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(elapsed < 1.0);

    REQUIRE(run("simulate --config " + path.string() + " --out " + out2.string()) == 0);
    CHECK(slurp(out1 / "mc_result.json") == slurp(out2 / "mc_result.json"));
    CHECK(slurp(out1 / "mc_tail.csv") == slurp(out2 / "mc_tail.csv"));

    json result = json::parse(slurp(out1 / "mc_result.json"));
    CHECK(result["result"]["trials"] == 100);
    CHECK(result["result"].contains("no_arrival_count"));
    // timing is runtime metadata, never part of the artifact
    CHECK(slurp(out1 / "mc_result.json").find("wall") == std::string::npos);
}

TEST_CASE("simulate: thread count does not change a single byte") {
    fs::path config = write_config("simulate_threads.json", reference_config(20000));
    fs::path out1 = kTmp / "sim_t1";
    fs::path out8 = kTmp / "sim_t8";
    REQUIRE(run("simulate --config " + config.string() + " --out " + out1.string(),
                "XFPT_THREADS=1") == 0);
    REQUIRE(run("simulate --config " + config.string() + " --out " + out8.string(),
                "XFPT_THREADS=8") == 0);
    CHECK(slurp(out1 / "mc_result.json") == slurp(out8 / "mc_result.json"));
    CHECK(slurp(out1 / "mc_tail.csv") == slurp(out8 / "mc_tail.csv"));
}

TEST_CASE("compare: theory and simulation agree on the reference model") {
    fs::path config = write_config("compare_ok.json", reference_config());
    fs::path out = kTmp / "compare_ok";
    CHECK(run("compare --config " + config.string() + " --out " + out.string()) == 0);
    json report = json::parse(slurp(out / "compare_report.json"));
    CHECK(report["pass"] == true);
    CHECK(report["max_abs_z"].get<double>() <= 3.0);
}

TEST_CASE("compare: a mismatched simulation model trips the detector") {
    json config = reference_config(20000);
    config["mc"]["model"] = json{{"model", "leaky-loop"}, {"s", 0.7}, {"mu", 0.9}, {"d", 50}};
    fs::path path = write_config("compare_bad.json", config);
    fs::path out = kTmp / "compare_bad";
    CHECK(run("compare --config " + path.string() + " --out " + out.string()) == 2);
    json report = json::parse(slurp(out / "compare_report.json"));
    CHECK(report["pass"] == false);
}

TEST_CASE("compare: small N flags the asymptotics while the exact law still passes") {
    json config = reference_config(50000);
    config["statistics"] = json{{"n", 5}, {"k_max", 10}, {"mean_mode", "truncated"}};
    config["mc"]["t_max"] = 1000;
    fs::path path = write_config("compare_small_n.json", config);
    fs::path out = kTmp / "compare_small_n";
    CHECK(run("compare --config " + path.string() + " --out " + out.string()) == 0);
    json report = json::parse(slurp(out / "compare_report.json"));
    CHECK(report["pass"] == true);
    CHECK(report["asym_within_tolerance"] == false);
    CHECK(std::abs(report["mean_mc"].get<double>() - report["mean_asymptotic"].get<double>()) >
          0.5);
}

TEST_CASE("diagnose: comet and bethe families classify as in the reference sweeps") {
    fs::path comet = fs::path(XFPT_CONFIG_DIR) / "comet_diagnose.json";
    fs::path bethe = fs::path(XFPT_CONFIG_DIR) / "bethe_diagnose.json";
    fs::path out_c = kTmp / "diag_comet";
    fs::path out_b = kTmp / "diag_bethe";
    REQUIRE(run("diagnose --config " + comet.string() + " --out " + out_c.string()) == 0);
    REQUIRE(run("diagnose --config " + bethe.string() + " --out " + out_b.string()) == 0);
    CHECK(json::parse(slurp(out_c / "regime_report.json"))["report"]["classification"] ==
          "injection-limited");
    CHECK(json::parse(slurp(out_b / "regime_report.json"))["report"]["classification"] ==
          "bulk-limited");

    // f_matrix carries one column per d
    std::ifstream in(out_b / "f_matrix.csv");
    std::string header;
    while (std::getline(in, header) && !header.empty() && header[0] == '#') {}
    CHECK(header == "k,d=2,d=4,d=8");
}

TEST_CASE("diagnose: two distances are not enough") {
    json config{{"model", {{"model", "bethe"}, {"z", 3}, {"d", 4}}},
                {"diagnose", {{"d_list", {2, 4}}}}};
    fs::path path = write_config("diag_two.json", config);
    CHECK(run("diagnose --config " + path.string() + " --out " + (kTmp / "diag_two").string()) ==
          1);
    std::string err = slurp(kTmp / "stderr.txt");
    CHECK(json::parse(err)["error"]["status"] == 1);
}

TEST_CASE("sweep: exact variance decays once lambda passes one") {
    json config{{"model", {{"model", "leaky-loop"}, {"s", 0.5}, {"mu", 0.9}, {"d", 50}}},
                {"statistics", {{"k_max", 15}}},
                {"sweep", {{"lambda_grid", {0.25, 0.5, 1.0, 2.0, 3.0, 5.0}}}},
                {"mc", {{"trials", 2000}, {"seed", 5}}}};
    fs::path path = write_config("sweep_lambda.json", config);
    fs::path out = kTmp / "sweep_lambda";
    REQUIRE(run("sweep --config " + path.string() + " --out " + out.string()) == 0);
    auto rows = read_csv(out / "sweep.csv");
    REQUIRE(rows.size() == 6);
    // var_exact is column 4; strictly decreasing from lambda = 1 on
    for (size_t i = 3; i < rows.size(); ++i) CHECK(rows[i][4] < rows[i - 1][4]);
    // and the mc variance echoes the collapse at large lambda
    CHECK(rows.back()[8] < rows[2][8]);
}

TEST_CASE("sweep: a single grid point reproduces exact and simulate outputs") {
    json config = reference_config(5000);
    config["sweep"] = json{{"lambda_grid", {1.0}}};
    fs::path path = write_config("sweep_single.json", config);
    fs::path out = kTmp / "sweep_single";
    REQUIRE(run("sweep --config " + path.string() + " --out " + out.string()) == 0);
    json sweep = json::parse(slurp(out / "sweep.json"));
    REQUIRE(sweep["points"].size() == 1);

    fs::path exact_out = kTmp / "sweep_single_exact";
    REQUIRE(run("exact --config " + path.string() + " --out " + exact_out.string()) == 0);
    json summary = json::parse(slurp(exact_out / "summary.json"));
    CHECK(sweep["points"][0]["mean_exact"] == summary["mean_exact"]);
    CHECK(sweep["points"][0]["var_exact"] == summary["var_exact"]);

    fs::path sim_out = kTmp / "sweep_single_sim";
    REQUIRE(run("simulate --config " + path.string() + " --out " + sim_out.string()) == 0);
    json sim = json::parse(slurp(sim_out / "mc_result.json"));
    CHECK(sweep["points"][0]["mean_mc"] == sim["result"]["conditional_mean"]);
}

TEST_CASE("sweep: mc-vs-asymptotic gap shrinks with N on the reference grid") {
    fs::path config = fs::path(XFPT_CONFIG_DIR) / "leaky_loop_n_sweep.json";
    fs::path out = kTmp / "sweep_n";
    REQUIRE(run("sweep --config " + config.string() + " --out " + out.string()) == 0);
    json sweep = json::parse(slurp(out / "sweep.json"));
    REQUIRE(sweep["points"].size() == 3);
    double prev = 1e300;
    for (const auto& point : sweep["points"]) {
        double gap =
            std::abs(point["mean_mc"].get<double>() - point["mean_asymptotic"].get<double>());
        CHECK(gap < prev);
        prev = gap;
    }
}

TEST_CASE("usage errors exit with code one and machine-readable JSON") {
    CHECK(run("exact --config does_not_exist.json --out " + (kTmp / "x").string()) == 1);
    CHECK(json::parse(slurp(kTmp / "stderr.txt")).contains("error"));

    json config{{"model", {{"model", "bethe"}, {"z", 2}, {"d", 4}}},
                {"statistics", {{"lambda", 1.0}}}};
    fs::path bad_model = write_config("bad_model.json", config);
    CHECK(run("exact --config " + bad_model.string() + " --out " + (kTmp / "x").string()) == 1);

    json both{{"model", {{"model", "bethe"}, {"z", 3}, {"d", 4}}},
              {"statistics", {{"lambda", 1.0}, {"n", 5}}}};
    fs::path bad_stats = write_config("bad_stats.json", both);
    CHECK(run("exact --config " + bad_stats.string() + " --out " + (kTmp / "x").string()) == 1);
}

TEST_CASE("output.formats restricts what gets written") {
    json config = reference_config();
    config["output"] = json{{"formats", {"json"}}};
    fs::path path = write_config("formats.json", config);
    fs::path out = kTmp / "formats_out";
    REQUIRE(run("exact --config " + path.string() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "summary.json"));
    CHECK(!fs::exists(out / "distribution.csv"));
    CHECK(!fs::exists(out / "tail.csv"));
}

TEST_CASE("config overrides reach the run") {
    fs::path config = write_config("override.json", reference_config());
    fs::path out = kTmp / "override_out";
    REQUIRE(run("exact --config " + config.string() + " --out " + out.string() +
                " --statistics.lambda=2.0") == 0);
    json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary["n_walkers"] == 699);  // round(2 / p_d), p_d = 0.5 * 0.9^49
    CHECK(summary["config"]["statistics"]["lambda"] == 2.0);
}
