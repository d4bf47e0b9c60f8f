// fts: command-line front end for the functional stationarity test.
//
//   fts test      --input data.csv --blocks 8|auto --alpha 0.05 [--out report.json]
//   fts simulate  --model I --T 128 --M 8 --reps 1000 --seed 1 [--out table.csv]
//   fts density   --model I --T 4096 --M 16 32 64 --reps 500 --seed 1 [--out samples.csv]
//   fts suggest   --T 4096
//   fts replay    --manifest table.csv.manifest.json
//
// Every file written with --out gets a sibling <out>.manifest.json from which
// `fts replay` regenerates it byte for byte.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fts/config.hpp"
#include "fts/fts.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";
constexpr const char* kReportSchema = "fts.report/1";
constexpr const char* kManifestSchema = "fts.manifest/1";

struct UsageError : fts::Error {
    using fts::Error::Error;
    [[nodiscard]] const char* code() const noexcept override { return "usage"; }
};

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fts::InvalidArgument("cannot write '" + path + "'");
    out << text;
    if (!out) throw fts::InvalidArgument("write to '" + path + "' failed");
}

void emit(const std::optional<std::string>& out, const std::string& text) {
    if (out) write_text(*out, text);
    else std::cout << text;
}

/// Everything a command reports about its run, written next to its output.
struct RunManifest {
    json data = json::object();

    void finish(const std::vector<std::string>& argv, const std::string& command, const std::string& out,
                std::chrono::steady_clock::time_point start) {
        data["schema"] = kManifestSchema;
        data["command"] = command;
        data["argv"] = argv;
        data["version"] = kVersion;
        data["finished_at"] = utc_now();
        data["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        data["outputs"] = json::array({out});
        write_text(out + ".manifest.json", data.dump(2) + "\n");
    }
};

fts::sim::TvFarSpec resolve_model(const std::string& model, const std::string& config_path,
                                  const std::string& operator_norm, bool decreasing, std::size_t period,
                                  json& manifest) {
    if (!config_path.empty()) {
        manifest["config"] = config_path;
        return fts::config::load_model(config_path);
    }
    if (model.empty()) throw UsageError("either --model or --config is required");
    fts::sim::PresetOptions o;
    o.operator_norm = fts::sim::parse_operator_norm(operator_norm);
    o.decreasing_innovations = decreasing;
    o.model4_period = period;
    manifest["preset"] = model;
    manifest["operator_norm"] = operator_norm;
    return fts::sim::preset(model, o);
}

json report_json(const fts::TestReport& r, std::size_t input_rows, std::size_t truncated) {
    const auto& p = r.parts;
    return json{{"schema", kReportSchema},
                {"T", p.design.length()},
                {"M", p.design.blocks()},
                {"N", p.design.block_length()},
                {"f1", p.f1_hat},
                {"f2", p.f2_hat},
                {"bias", p.bias_hat},
                {"bias_mode", std::string(fts::to_string(p.bias_mode))},
                {"m_hat", p.m_hat},
                {"var_h0", r.var_h0_hat},
                {"statistic", r.statistic},
                {"p_value", r.p_value},
                {"alpha", r.alpha},
                {"critical_value", r.critical_value},
                {"reject", r.reject},
                {"input_rows", input_rows},
                {"truncated_rows", truncated}};
}

struct TestArgs {
    std::string input;
    std::string blocks = "auto";
    double alpha = 0.05;
    std::string bias_mode = "scaled";
    std::optional<std::string> out;
};

struct SimArgs {
    std::string model;
    std::string config;
    std::vector<std::size_t> lengths;
    std::vector<std::size_t> blocks;
    std::size_t reps = 1000;
    std::vector<double> alphas{0.10, 0.05, 0.01};
    std::uint64_t seed = 1;
    std::size_t workers = 0;
    std::string bias_mode = "scaled";
    std::string operator_norm = "max_column_sum";
    bool decreasing = false;
    std::size_t period = 1024;
    std::optional<std::string> out;
};

struct SuggestArgs {
    std::size_t length = 0;
    bool as_json = false;
};

int cmd_test(const TestArgs& a, const std::vector<std::string>& argv) {
    const auto start = std::chrono::steady_clock::now();
    const auto series = fts::csv::read_series(a.input);
    const std::size_t rows = series.length();
    if (rows < 8) throw fts::InvalidArgument("need at least 8 observations, got " + std::to_string(rows));

    std::size_t m = 0, n = 0;
    if (a.blocks == "auto") {
        try {
            const auto s = fts::suggest_blocks(rows, fts::BlockRule::divisor);
            m = s.blocks;
            n = s.block_length;
        } catch (const fts::DesignError&) {
            const auto s = fts::suggest_blocks(rows, fts::BlockRule::ceil);
            m = s.blocks;
            n = s.block_length;
        }
    } else {
        try {
            m = std::stoul(a.blocks);
        } catch (const std::exception&) {
            throw UsageError("--blocks must be a positive integer or 'auto'");
        }
        if (m == 0) throw UsageError("--blocks must be positive");
        n = 2 * (rows / (2 * m));
        if (n == 0) throw fts::DesignError("M=" + std::to_string(m) + " leaves no even block length for T=" +
                                               std::to_string(rows), fts::largest_admissible_blocks(rows, m));
    }
    const std::size_t usable = m * n;
    const std::size_t truncated = rows - usable;
    const auto used = truncated > 0 ? series.tail(usable) : series;
    const auto design = fts::make_design(usable, m);
    const auto report = fts::run_test(used, design, a.alpha, fts::parse_bias_mode(a.bias_mode));
    emit(a.out, report_json(report, rows, truncated).dump(2) + "\n");

    if (a.out) {
        RunManifest manifest;
        manifest.data["input"] = a.input;
        manifest.data["T"] = usable;
        manifest.data["M"] = m;
        manifest.data["N"] = n;
        manifest.data["alphas"] = json::array({a.alpha});
        manifest.data["seed"] = nullptr;
        manifest.data["truncated_rows"] = truncated;
        if (truncated > 0) {
            manifest.data["truncation"] = "dropped the first " + std::to_string(truncated) + " of " +
                                          std::to_string(rows) + " rows";
        }
        manifest.finish(argv, "test", *a.out, start);
    }
    return 0;
}

int cmd_simulate(const SimArgs& a, const std::vector<std::string>& argv) {
    const auto start = std::chrono::steady_clock::now();
    RunManifest manifest;
    const auto model = resolve_model(a.model, a.config, a.operator_norm, a.decreasing, a.period, manifest.data);
    const auto mode = fts::parse_bias_mode(a.bias_mode);

    std::ostringstream csv;
    csv << "model,T,N,M,alpha,rejection_pct,mc_se_pct\n";
    json designs = json::array();
    for (std::size_t t : a.lengths) {
        for (std::size_t m : a.blocks) {
            const auto design = fts::make_design(t, m);
            fts::sim::McConfig cfg{model, t, m, a.reps, a.alphas, a.seed, a.workers, mode};
            const auto table = fts::sim::monte_carlo(cfg);
            for (const auto& row : table.rows) {
                csv << model.name << ',' << t << ',' << design.block_length() << ',' << m << ','
                    << fts::csv::format_double(row.alpha) << ',' << fts::csv::format_fixed(100.0 * row.rate, 1) << ','
                    << fts::csv::format_fixed(100.0 * row.std_error, 2) << '\n';
            }
            designs.push_back({{"T", t}, {"M", m}, {"N", design.block_length()}, {"failed", table.failed}});
        }
    }
    emit(a.out, csv.str());
    if (a.out) {
        manifest.data["designs"] = designs;
        if (a.lengths.size() == 1 && a.blocks.size() == 1) {
            manifest.data["T"] = designs[0]["T"];
            manifest.data["M"] = designs[0]["M"];
            manifest.data["N"] = designs[0]["N"];
        }
        manifest.data["replications"] = a.reps;
        manifest.data["alphas"] = a.alphas;
        manifest.data["seed"] = a.seed;
        manifest.data["bias_mode"] = a.bias_mode;
        manifest.finish(argv, "simulate", *a.out, start);
    }
    return 0;
}

int cmd_density(const SimArgs& a, const std::vector<std::string>& argv) {
    const auto start = std::chrono::steady_clock::now();
    if (a.lengths.size() != 1) throw UsageError("density takes a single --T");
    RunManifest manifest;
    const auto model = resolve_model(a.model, a.config, a.operator_norm, a.decreasing, a.period, manifest.data);
    const auto mode = fts::parse_bias_mode(a.bias_mode);
    const std::size_t t = a.lengths.front();

    std::vector<std::vector<double>> columns;
    for (std::size_t m : a.blocks) {
        fts::sim::McConfig cfg{model, t, m, a.reps, a.alphas, a.seed, a.workers, mode};
        columns.push_back(fts::sim::density_samples(cfg));
    }
    std::ostringstream csv;
    std::size_t rows = 0;
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        csv << (i ? "," : "") << "M=" << a.blocks[i];
        rows = std::max(rows, columns[i].size());
    }
    csv << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) csv << ',';
            if (r < columns[i].size()) csv << fts::csv::format_double(columns[i][r]);
        }
        csv << '\n';
    }
    emit(a.out, csv.str());
    if (a.out) {
        manifest.data["T"] = t;
        manifest.data["M"] = a.blocks;
        json ns = json::array();
        for (std::size_t m : a.blocks) ns.push_back(t / m);
        manifest.data["N"] = ns;
        manifest.data["replications"] = a.reps;
        manifest.data["alphas"] = json::array();
        manifest.data["seed"] = a.seed;
        manifest.finish(argv, "density", *a.out, start);
    }
    return 0;
}

int cmd_suggest(const SuggestArgs& a) {
    std::optional<fts::BlockSuggestion> divisor;
    try {
        divisor = fts::suggest_blocks(a.length, fts::BlockRule::divisor);
    } catch (const fts::DesignError&) {
    }
    const auto ceil = fts::suggest_blocks(a.length, fts::BlockRule::ceil);
    const std::size_t dropped = a.length - ceil.usable_length;
    if (a.as_json) {
        json j{{"T", a.length},
               {"ceil", {{"M", ceil.blocks}, {"N", ceil.block_length}, {"truncated_rows", dropped}}}};
        j["divisor"] = divisor ? json{{"M", divisor->blocks}, {"N", divisor->block_length}} : json(nullptr);
        std::cout << j.dump() << '\n';
        return 0;
    }
    std::cout << "divisor: ";
    if (divisor) std::cout << "M=" << divisor->blocks << " N=" << divisor->block_length;
    else std::cout << "none";
    std::cout << "; ceil: M=" << ceil.blocks << " N=" << ceil.block_length;
    if (dropped > 0) {
        std::cout << " (truncate: drop the first " << dropped << " rows, T=" << a.length << " -> "
                  << ceil.usable_length << ")";
    }
    std::cout << '\n';
    return 0;
}

int run(std::vector<std::string> argv);

int cmd_replay(const std::string& manifest_path, const std::optional<std::string>& out) {
    std::ifstream in(manifest_path);
    if (!in) throw fts::ParseError("cannot open manifest '" + manifest_path + "'");
    json m;
    try {
        m = json::parse(in);
    } catch (const json::parse_error& e) {
        throw fts::ParseError("manifest '" + manifest_path + "': " + e.what());
    }
    if (m.value("schema", "") != kManifestSchema || !m.contains("argv")) {
        throw fts::ParseError("'" + manifest_path + "' is not a run manifest");
    }
    auto argv = m["argv"].get<std::vector<std::string>>();
    if (out) {
        bool replaced = false;
        for (std::size_t i = 0; i + 1 < argv.size(); ++i) {
            if (argv[i] == "--out") {
                argv[i + 1] = *out;
                replaced = true;
            }
        }
        if (!replaced) {
            argv.push_back("--out");
            argv.push_back(*out);
        }
    }
    return run(argv);
}

void add_model_options(CLI::App* cmd, SimArgs& a) {
    cmd->add_option("--model", a.model, "preset I..VI");
    cmd->add_option("--config", a.config, "JSON model description (see docs/config.md)");
    cmd->add_option("--T", a.lengths, "series length(s)")->delimiter(',')->required();
    cmd->add_option("--M", a.blocks, "number(s) of blocks")->delimiter(',')->required();
    cmd->add_option("--reps", a.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", a.seed, "64-bit seed");
    cmd->add_option("--workers", a.workers, "worker threads (default: $FTS_WORKERS or all cores)");
    cmd->add_option("--bias-mode", a.bias_mode, "scaled|literal");
    cmd->add_option("--operator-norm", a.operator_norm, "spectral|hilbert_schmidt|max_column_sum (presets)");
    cmd->add_flag("--decreasing-innovations", a.decreasing, "use exp(-(l-1)/10) innovation variances (presets)");
    cmd->add_option("--model4-period", a.period, "period P of model IV's variance profile, 0 for T");
    cmd->add_option("--out", a.out, "output path (default: stdout)");
}

int run(std::vector<std::string> argv) {
    CLI::App app{"Stationarity test for functional time series"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    TestArgs test_args;
    auto* test = app.add_subcommand("test", "run the test on a CSV series (row t = curve at time t)");
    test->add_option("--input", test_args.input, "CSV file")->required();
    test->add_option("--blocks", test_args.blocks, "number of blocks M, or 'auto'");
    test->add_option("--alpha", test_args.alpha, "level");
    test->add_option("--bias-mode", test_args.bias_mode, "scaled|literal");
    test->add_option("--out", test_args.out, "JSON report path (default: stdout)");

    SimArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "empirical rejection rates of a model");
    add_model_options(simulate, sim_args);
    simulate->add_option("--alphas", sim_args.alphas, "levels")->delimiter(',');

    SimArgs density_args;
    density_args.reps = 500;
    auto* density = app.add_subcommand("density", "standardized statistics, one column per M");
    add_model_options(density, density_args);

    SuggestArgs suggest_args;
    auto* suggest = app.add_subcommand("suggest", "block counts near T^(1/3)");
    suggest->add_option("--T", suggest_args.length, "series length")->required();
    suggest->add_flag("--json", suggest_args.as_json, "print JSON");

    std::string manifest_path;
    std::optional<std::string> replay_out;
    auto* replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
    replay->add_option("--manifest", manifest_path, "manifest JSON")->required();
    replay->add_option("--out", replay_out, "write to this path instead of the recorded one");

    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        std::cout << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    if (test->parsed()) return cmd_test(test_args, argv);
    if (simulate->parsed()) return cmd_simulate(sim_args, argv);
    if (density->parsed()) return cmd_density(density_args, argv);
    if (suggest->parsed()) return cmd_suggest(suggest_args);
    return cmd_replay(manifest_path, replay_out);
}

void report_error(const char* code, const std::string& message) {
    std::cerr << json{{"error", code}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run(args);
    } catch (const UsageError& e) {
        report_error(e.code(), e.what());
        return 2;
    } catch (const fts::Error& e) {
        report_error(e.code(), e.what());
        return 1;
    } catch (const std::exception& e) {
        report_error("internal", e.what());
        return 1;
    }
}
