#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "fts/csv.hpp"
#include "fts/simulate.hpp"
#include "fts/stationarity.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int status = 0;
    std::string out;
    std::string err;
};

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path p = fs::path(FTS_TEST_TMP) / "cli";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Result run(const std::string& args) {
    const auto err_path = scratch() / "stderr.txt";
    const std::string cmd = std::string("FTS_WORKERS=2 \"") + FTS_CLI_PATH + "\" " + args + " 2>\"" +
                            err_path.string() + "\"";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err_path);
    return r;
}

fs::path write_csv(const std::string& name, const fts::FunctionalTimeSeries& x) {
    const auto p = scratch() / name;
    std::ofstream out(p);
    fts::csv::write_series(out, x);
    return p;
}

fts::FunctionalTimeSeries model_one(std::size_t length) {
    fts::CounterRng rng(123);
    return fts::sim::simulate(fts::sim::preset("I", {.grid_size = 20}), length, rng);
}

void check_error_line(const Result& r, const std::string& code) {
    CHECK(r.status != 0);
    CHECK(r.out.empty());
    REQUIRE(!r.err.empty());
    CHECK(r.err.find('\n') == r.err.size() - 1);
    const auto j = json::parse(r.err);
    CHECK(j["error"] == code);
    CHECK(j.contains("message"));
}

}  // namespace

TEST_CASE("cli test produces a JSON report", "[cli]") {
    const auto x = model_one(128);
    const auto csv = write_csv("model1.csv", x);
    const auto r = run("test --input " + csv.string() + " --blocks 8");
    REQUIRE(r.status == 0);
    const auto j = json::parse(r.out);
    CHECK(j["schema"] == "fts.report/1");
    CHECK(j["T"] == 128);
    CHECK(j["M"] == 8);
    CHECK(j["N"] == 16);
    CHECK(j["truncated_rows"] == 0);
    CHECK(j["bias_mode"] == "scaled");
    for (const char* key : {"f1", "f2", "bias", "m_hat", "var_h0", "statistic", "p_value", "alpha", "reject"}) {
        CHECK(j.contains(key));
    }
    const auto direct = fts::run_test(x, fts::make_design(128, 8), 0.05);
    CHECK(j["statistic"].get<double>() == Catch::Approx(direct.statistic).epsilon(1e-12));
}

TEST_CASE("cli test statistic is unchanged by rescaling the data", "[cli]") {
    const auto x = model_one(96);
    const auto a = run("test --input " + write_csv("a.csv", x).string() + " --blocks 4");
    const auto b = run("test --input " + write_csv("b.csv", x.scaled(10.0)).string() + " --blocks 4");
    REQUIRE(a.status == 0);
    REQUIRE(b.status == 0);
    CHECK(json::parse(a.out)["statistic"].get<double>() ==
          Catch::Approx(json::parse(b.out)["statistic"].get<double>()).epsilon(1e-12));
}

TEST_CASE("cli test truncates the head of the series", "[cli]") {
    const auto x = model_one(130);
    const auto out = scratch() / "trunc.json";
    const auto r = run("test --input " + write_csv("trunc.csv", x).string() + " --blocks 8 --out " + out.string());
    REQUIRE(r.status == 0);
    const auto j = json::parse(slurp(out));
    CHECK(j["T"] == 128);
    CHECK(j["truncated_rows"] == 2);
    CHECK(j["input_rows"] == 130);
    const auto direct = fts::run_test(x.tail(128), fts::make_design(128, 8), 0.05);
    CHECK(j["statistic"].get<double>() == Catch::Approx(direct.statistic).epsilon(1e-12));
    const auto manifest = json::parse(slurp(out.string() + ".manifest.json"));
    CHECK(manifest["truncated_rows"] == 2);
    CHECK(manifest["command"] == "test");

    const auto autob = run("test --input " + write_csv("auto.csv", model_one(149)).string() + " --blocks auto");
    REQUIRE(autob.status == 0);
    const auto ja = json::parse(autob.out);
    CHECK(ja["M"] == 6);
    CHECK(ja["T"] == 144);
    CHECK(ja["truncated_rows"] == 5);
}

TEST_CASE("cli test errors", "[cli]") {
    check_error_line(run("test --input " + write_csv("zero.csv", fts::testing::constant_series(64, 5, 0.0)).string() +
                         " --blocks 4"),
                     "degenerate_input");
    check_error_line(run("test --input " + write_csv("short.csv", model_one(6)).string()), "invalid_argument");
    {
        std::ofstream out(scratch() / "ragged.csv");
        out << "1,2,3\n4,5\n";
    }
    check_error_line(run("test --input " + (scratch() / "ragged.csv").string()), "parse");
    check_error_line(run("test --input " + (scratch() / "missing.csv").string()), "parse");
    const auto usage = run("test --blocks 4");
    check_error_line(usage, "usage");
    CHECK(usage.status == 2);
    check_error_line(run("frobnicate"), "usage");
}

TEST_CASE("cli simulate writes a reproducible table and manifest", "[cli]") {
    const auto out1 = scratch() / "sim1.csv";
    const auto out2 = scratch() / "sim2.csv";
    const std::string args = "simulate --model I --T 64 --M 4 --reps 40 --seed 9 --alphas 0.1 0.05 --out ";
    REQUIRE(run(args + out1.string()).status == 0);
    REQUIRE(run(args + out2.string() + " --workers 1").status == 0);
    const auto table = slurp(out1);
    CHECK(table == slurp(out2));
    CHECK(table.rfind("model,T,N,M,alpha,rejection_pct,mc_se_pct\n", 0) == 0);
    CHECK(table.find("I,64,16,4,0.1,") != std::string::npos);

    const auto manifest_path = out1.string() + ".manifest.json";
    const auto manifest = json::parse(slurp(manifest_path));
    CHECK(manifest["schema"] == "fts.manifest/1");
    CHECK(manifest["seed"] == 9);
    CHECK(manifest["T"] == 64);
    CHECK(manifest["N"] == 16);
    CHECK(manifest["outputs"][0] == out1.string());
    CHECK(manifest.contains("wall_clock_seconds"));
    CHECK(manifest.contains("version"));

    const auto replayed = scratch() / "sim_replay.csv";
    REQUIRE(run("replay --manifest " + manifest_path + " --out " + replayed.string()).status == 0);
    CHECK(slurp(replayed) == table);

    const auto single = run("simulate --model II --T 64 --M 4 --reps 1 --seed 3");
    REQUIRE(single.status == 0);
    std::istringstream lines(single.out);
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        std::vector<std::string> fields;
        std::istringstream row(line);
        for (std::string f; std::getline(row, f, ',');) fields.push_back(f);
        REQUIRE(fields.size() == 7);
        CHECK((fields[5] == "0.0" || fields[5] == "100.0"));
    }
    CHECK(rows == 3);

    const auto spaced = run("simulate --model I --T 64 128 --M 4 8 --reps 5 --seed 2 --alphas 0.1 0.05");
    const auto commas = run("simulate --model I --T 64,128 --M 4,8 --reps 5 --seed 2 --alphas 0.1,0.05");
    REQUIRE(commas.status == 0);
    CHECK(commas.out == spaced.out);
    CHECK(std::count(commas.out.begin(), commas.out.end(), '\n') == 9);
}

TEST_CASE("cli simulate accepts a JSON model", "[cli]") {
    const auto cfg = scratch() / "model.json";
    {
        std::ofstream out(cfg);
        out << R"({"name": "tiny", "basis_dimension": 3, "grid_size": 8,
                   "regime": {"lags": [{"variances": "exp_sum", "norm": 0.5}],
                              "innovation_variances": [1, 0.5, 0.25],
                              "innovation_scale": {"kind": "raised_cosine", "level": 1, "amplitude": 0.5}},
                   "break": {"fraction": 0.5, "regime": {"innovation_variances": {"kind": "exp_ramp", "scale": 2}}}})";
    }
    const auto r = run("simulate --config " + cfg.string() + " --T 64 --M 4 --reps 10 --seed 1");
    REQUIRE(r.status == 0);
    CHECK(r.out.find("tiny,64,16,4,") != std::string::npos);

    {
        std::ofstream out(scratch() / "broken.json");
        out << R"({"regime": {"lags": [{"variances": "nope", "norm": 1}]}})";
    }
    check_error_line(run("simulate --config " + (scratch() / "broken.json").string() + " --T 64 --M 4 --reps 2"),
                     "parse");
    check_error_line(run("simulate --model I --T 64 --M 5 --reps 2"), "invalid_design");
}

TEST_CASE("cli density writes one column per M", "[cli]") {
    const auto out = scratch() / "density.csv";
    REQUIRE(run("density --model I --T 256 --M 16 32 --reps 20 --seed 4 --out " + out.string()).status == 0);
    std::istringstream in(slurp(out));
    std::string line;
    std::getline(in, line);
    CHECK(line == "M=16,M=32");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 1);
    }
    CHECK(rows == 20);
    CHECK(fs::exists(out.string() + ".manifest.json"));
}

TEST_CASE("cli suggest", "[cli]") {
    const auto a = run("suggest --T 4096");
    REQUIRE(a.status == 0);
    CHECK(a.out == "divisor: M=16 N=256; ceil: M=16 N=256\n");
    const auto b = run("suggest --T 149");
    REQUIRE(b.status == 0);
    CHECK(b.out.find("divisor: none") != std::string::npos);
    CHECK(b.out.find("ceil: M=6 N=24") != std::string::npos);
    CHECK(b.out.find("drop the first 5 rows") != std::string::npos);
    const auto c = run("suggest --T 8 --json");
    REQUIRE(c.status == 0);
    CHECK(json::parse(c.out)["divisor"]["M"] == 2);
}
