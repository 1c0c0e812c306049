// SPDX-License-Identifier: Apache-2.0
//
// pathbin: multipath path-bin tracking and blockage forecasting for UAV links
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command-line front end: simulate, bin, forecast, deaths, evaluate, pipeline, bench.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "pathbin/pathbin.hpp"

namespace fs = std::filesystem;
using namespace pathbin;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct Options {
    std::string config_path;
    std::string input_path;
    std::string events_path;
    std::string out_dir = ".";
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::uint64_t seed = 0;
    int reference_bin = 0; // 0 = strongest mean gain
    std::string sweep;
};

// Thrown from a pipeline stage so the top level can name it.
struct StageFailure : std::runtime_error {
    StageFailure(const std::string &stage, const std::string &what, bool validation)
        : std::runtime_error("stage '" + stage + "' failed: " + what), validation(validation) {}
    bool validation;
};

class Run {
  public:
    Run(std::string command, const Options &opt) : opt_(opt) {
        manifest_.command = std::move(command);
        fs::create_directories(opt_.out_dir);
    }

    ScenarioConfig load_config() {
        if (opt_.config_path.empty())
            return ScenarioConfig{};
        add_input(opt_.config_path);
        return io::load_config(opt_.config_path);
    }

    void add_input(const std::string &path) { manifest_.inputs.push_back({path, sha256_hex(io::read_file(path))}); }

    void emit(const std::string &name, const std::string &content) {
        io::write_file((fs::path(opt_.out_dir) / name).string(), content);
        manifest_.outputs.push_back({name, sha256_hex(content)});
    }

    template <typename F> auto stage(const std::string &name, F &&f) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(f())>) {
                f();
                record(name, t0);
            } else {
                auto r = f();
                record(name, t0);
                return r;
            }
        } catch (const ValidationError &e) {
            throw StageFailure(name, e.what(), true);
        } catch (const std::exception &e) {
            throw StageFailure(name, e.what(), false);
        }
    }

    void finish(const ScenarioConfig &config) {
        manifest_.config = config;
        io::write_file((fs::path(opt_.out_dir) / (manifest_.command + ".manifest.json")).string(),
                       manifest_.to_json().dump(2) + "\n");
    }

  private:
    void record(const std::string &name, std::chrono::steady_clock::time_point t0) {
        const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;
        manifest_.timings_ms.emplace_back(name, dt.count());
    }

    const Options &opt_;
    RunManifest manifest_;
};

Trajectory obtain_trajectory(Run &run, const Options &opt, const ScenarioConfig &config) {
    if (!opt.input_path.empty()) {
        run.add_input(opt.input_path);
        return run.stage("load", [&] { return io::load_trajectory(opt.input_path, config); });
    }
    return run.stage("simulate", [&] { return generate_trajectory(config, opt.threads); });
}

BinningResult load_binning(Run &run, const Options &opt) {
    if (opt.input_path.empty())
        throw ValidationError("--input <bins.csv> is required");
    const std::string events = opt.events_path.empty()
                                   ? (fs::path(opt.input_path).parent_path() / "events.csv").string()
                                   : opt.events_path;
    run.add_input(opt.input_path);
    run.add_input(events);
    return io::parse_binning_csv(io::read_file(opt.input_path), io::read_file(events));
}

DeathReport deaths_for(const BinningResult &binning, const ScenarioConfig &config, int reference_bin) {
    const int ref = reference_bin > 0 ? reference_bin : strongest_bin(binning);
    return predict_deaths(binning, config.death_threshold, config.gamma, ref);
}

int cmd_simulate(const Options &opt) {
    Run run("simulate", opt);
    const auto config = run.stage("config", [&] { return run.load_config(); });
    const auto t = run.stage("simulate", [&] { return generate_trajectory(config, opt.threads); });
    run.emit("trajectory.csv", io::format_trajectory_csv(t));
    run.finish(config);
    return 0;
}

int cmd_bin(const Options &opt) {
    Run run("bin", opt);
    const auto config = run.stage("config", [&] { return run.load_config(); });
    if (opt.input_path.empty())
        throw ValidationError("--input <trajectory> is required");
    const auto t = obtain_trajectory(run, opt, config);
    const auto r = run.stage("bin", [&] { return run_binning(t, BinningParams::from_config(config)); });
    run.emit("bins.csv", io::format_bins_csv(r));
    run.emit("events.csv", io::format_events_csv(r));
    run.emit("markov.csv", io::format_markov_csv(export_markov_trace(r)));
    run.finish(config);
    return 0;
}

int cmd_forecast(const Options &opt) {
    Run run("forecast", opt);
    const auto config = run.stage("config", [&] { return run.load_config(); });
    const auto binning = run.stage("load", [&] { return load_binning(run, opt); });
    const auto fc = run.stage("forecast", [&] {
        return forecast_bins(binning, config.blockage_start_index, config.effective_horizon(), config.ar_order,
                             config.stale_gap, opt.threads);
    });
    for (const auto &f : fc.failures)
        std::cerr << "warning: bin " << f.bin_id << " not forecast: " << f.message << "\n";
    run.emit("forecast.csv", io::format_forecast_csv(binning, fc.forecasts));
    run.finish(config);
    return 0;
}

int cmd_deaths(const Options &opt) {
    Run run("deaths", opt);
    const auto config = run.stage("config", [&] { return run.load_config(); });
    const auto binning = run.stage("load", [&] { return load_binning(run, opt); });
    const auto report = run.stage("deaths", [&] { return deaths_for(binning, config, opt.reference_bin); });
    run.emit("deaths.csv", io::format_deaths_csv(report));
    run.finish(config);
    return 0;
}

void emit_evaluation(Run &run, const Experiment &ex) {
    run.emit("evaluation.json", io::report_to_json(ex.report).dump(2) + "\n");
    run.emit("position_errors.csv", io::format_position_errors_csv(ex));
}

int cmd_evaluate(const Options &opt) {
    Run run("evaluate", opt);
    const auto config = run.stage("config", [&] { return run.load_config(); });
    const auto t = obtain_trajectory(run, opt, config);
    const auto ex = run.stage("evaluate", [&] { return run_blockage_experiment(t, opt.threads); });
    emit_evaluation(run, ex);
    run.finish(config);
    return 0;
}

int cmd_pipeline(const Options &opt) {
    Run run("pipeline", opt);
    const auto config = run.stage("config", [&] { return run.load_config(); });
    auto t = obtain_trajectory(run, opt, config);
    t.config = config;
    const auto params = BinningParams::from_config(config);
    const auto full = run.stage("bin", [&] { return run_binning(t, params); });
    const auto ex = run.stage("evaluate", [&] { return run_blockage_experiment(t, opt.threads); });
    const auto deaths = run.stage("deaths", [&] { return deaths_for(full, config, opt.reference_bin); });

    run.emit("trajectory.csv", io::format_trajectory_csv(t));
    run.emit("bins.csv", io::format_bins_csv(full));
    run.emit("events.csv", io::format_events_csv(full));
    run.emit("markov.csv", io::format_markov_csv(export_markov_trace(full)));
    run.emit("forecast.csv", io::format_forecast_csv(ex.binning, ex.forecasts.forecasts));
    run.emit("deaths.csv", io::format_deaths_csv(deaths));
    emit_evaluation(run, ex);
    run.finish(config);
    return 0;
}

std::vector<std::pair<int, int>> parse_sweep(const std::string &text) {
    std::vector<std::pair<int, int>> out;
    for (const auto &item : io::split(text, ',')) {
        if (item.empty())
            continue;
        const auto nm = io::split(item, 'x');
        if (nm.size() != 2)
            throw ValidationError("sweep entries look like NxM, got '" + item + "'");
        const int n = io::parse_int(nm[0]);
        const int m = io::parse_int(nm[1]);
        if (n < 1 || m < 1)
            throw ValidationError("sweep entries need N >= 1 and M >= 1");
        out.emplace_back(n, m);
    }
    if (out.empty())
        throw ValidationError("--sweep needs at least one NxM entry");
    return out;
}

int cmd_bench(const Options &opt) {
    Run run("bench", opt);
    const auto config = run.stage("config", [&] { return run.load_config(); });
    const auto sweep = parse_sweep(opt.sweep);
    const auto params = BinningParams::from_config(config);
    std::string csv = "n_positions,n_mpcs,binning_ms,forecasting_ms\n";
    for (const auto &[n, m] : sweep) {
        const auto t = synthetic_tracks(n, m, opt.seed);
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = run_binning(t, params);
        const auto t1 = std::chrono::steady_clock::now();
        const auto fc = forecast_bins(r, n + 1, 10, config.ar_order, config.stale_gap, opt.threads);
        const auto t2 = std::chrono::steady_clock::now();
        (void)fc;
        const std::chrono::duration<double, std::milli> bin_ms = t1 - t0;
        const std::chrono::duration<double, std::milli> fc_ms = t2 - t1;
        csv += std::to_string(n) + "," + std::to_string(m) + "," + io::fmt_real(bin_ms.count()) + "," +
               io::fmt_real(fc_ms.count()) + "\n";
    }
    run.emit("bench.csv", csv);
    run.finish(config);
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Path-bin tracking and blockage forecasting for ground-to-air mmWave channels"};
    app.require_subcommand(1);
    Options opt;

    auto common = [&](CLI::App *sub, bool input) {
        sub->add_option("--config", opt.config_path, "Scenario file (key = value)")->check(CLI::ExistingFile);
        if (input)
            sub->add_option("--input", opt.input_path, "Input dataset")->check(CLI::ExistingFile);
        sub->add_option("--out-dir", opt.out_dir, "Output directory");
        sub->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", opt.seed, "Seed for randomized inputs (bench only)");
    };

    std::vector<std::pair<CLI::App *, std::function<int(const Options &)>>> commands;
    auto *simulate = app.add_subcommand("simulate", "Generate a synthetic trajectory dataset");
    common(simulate, false);
    commands.emplace_back(simulate, cmd_simulate);

    auto *bin = app.add_subcommand("bin", "Arrange the MPCs of a dataset into path bins");
    common(bin, true);
    commands.emplace_back(bin, cmd_bin);

    auto *fc = app.add_subcommand("forecast", "Forecast every path bin through the blockage");
    common(fc, true);
    fc->add_option("--events", opt.events_path, "Events CSV (default: events.csv next to --input)");
    commands.emplace_back(fc, cmd_forecast);

    auto *deaths = app.add_subcommand("deaths", "Predict path-bin deaths from distance to the LOS bin");
    common(deaths, true);
    deaths->add_option("--events", opt.events_path, "Events CSV (default: events.csv next to --input)");
    deaths->add_option("--reference-bin", opt.reference_bin, "LOS reference bin (default: strongest mean gain)");
    commands.emplace_back(deaths, cmd_deaths);

    auto *evaluate = app.add_subcommand("evaluate", "Run the blockage experiment and score it");
    common(evaluate, true);
    commands.emplace_back(evaluate, cmd_evaluate);

    auto *pipeline = app.add_subcommand("pipeline", "simulate, bin, forecast, deaths and evaluate in one go");
    common(pipeline, true);
    pipeline->add_option("--reference-bin", opt.reference_bin, "LOS reference bin (default: strongest mean gain)");
    commands.emplace_back(pipeline, cmd_pipeline);

    auto *bench = app.add_subcommand("bench", "Time binning and forecasting over an (N, M) sweep");
    common(bench, false);
    bench->add_option("--sweep", opt.sweep, "Comma-separated NxM points, e.g. 50x4,100x8")->required();
    commands.emplace_back(bench, cmd_bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try {
        for (const auto &[sub, fn] : commands)
            if (sub->parsed())
                return fn(opt);
    } catch (const StageFailure &e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.validation ? kExitValidation : kExitRuntime;
    } catch (const ValidationError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
