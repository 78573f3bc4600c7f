#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>

#include "jumpdet/detector.hpp"
#include "jumpdet/grid.hpp"
#include "jumpdet/serialize.hpp"
#include "jumpdet/simulator.hpp"
#include "jumpdet/spotvol.hpp"
#include "jumpdet/tod.hpp"

namespace fs = std::filesystem;
using namespace jumpdet;

namespace {

struct CommonArgs {
    std::string input;
    int m = 77;
    double delta = 0.0;  // 0 -> 1/(252*m)
    bool prices = false;
    std::string out_dir;
    std::string format = "both";
};

struct TodArgs : CommonArgs {
    double exponent = 0.49;
    double cap = 1.5;
    bool has_cap = false;
};

struct DetectArgs : CommonArgs {
    double raw_mult = 6.0;
    double round_mult = 2.0;
    double cap = 1.5;
    double exponent = 0.49;
    int max_rounds = 20;
    std::string size_mode = "det";
    std::uint64_t seed = 0;
};

struct SimulateArgs {
    int m = 77;
    int days = 252;
    double delta = 0.0;
    std::uint64_t seed = 1;
    SvParams sv;
    DiurnalParams diurnal;
    bool has_level = false;
    double level = 0.0;
    HawkesParams hawkes;
    JumpSizeParams jump_size;
    double drift = 0.0;
    std::string out_dir;
};

struct ValidateArgs {
    std::string sim_dir;
    std::string detect_dir;
    int tolerance = 0;
    std::string out_dir;
};

double effective_delta(double delta, int m) {
    return delta > 0.0 ? delta : 1.0 / (252.0 * m);
}

InputLayout layout_of(bool prices) {
    return prices ? InputLayout::prices : InputLayout::returns;
}

void write_output(const fs::path& dir, const std::string& name, const std::string& content,
                  RunManifest& manifest) {
    write_text((dir / name).string(), content);
    manifest.outputs.push_back(name);
}

void finish_manifest(const fs::path& dir, RunManifest& manifest) {
    manifest.outputs.push_back("manifest.json");
    write_text((dir / "manifest.json").string(), manifest_json(manifest));
}

int run_tod(const TodArgs& args) {
    const double delta = effective_delta(args.delta, args.m);
    ReturnGrid grid = load_returns(args.input, args.m, delta, layout_of(args.prices));
    TodProfile profile = tod_profile(grid, args.exponent);

    std::cout << "estimated TOD profile: m=" << profile.m()
              << " slots, bar_alpha=" << format_double(profile.bar_alpha) << "\n";
    const auto undefined = profile.undefined_slots();
    if (!undefined.empty())
        std::cout << "warning: " << undefined.size()
                  << " slot(s) undefined (every day truncated there)\n";

    fs::create_directories(args.out_dir);
    RunManifest manifest;
    manifest.command = "tod";
    manifest.parameters = {{"input", args.input},
                           {"m", std::to_string(args.m)},
                           {"delta", format_double(delta)},
                           {"exponent", format_double(args.exponent)},
                           {"prices", args.prices ? "true" : "false"},
                           {"format", args.format}};
    if (args.has_cap) manifest.parameters["cap"] = format_double(args.cap);
    manifest.inputs[args.input] = fnv1a_digest(args.input);

    const bool want_json = args.format != "csv";
    const bool want_csv = args.format != "json";
    if (want_json) write_output(args.out_dir, "tod.json", tod_json(profile), manifest);
    if (want_csv) {
        write_output(args.out_dir, "tod.csv", tod_csv(profile), manifest);
        write_output(args.out_dir, "tod_plot.csv", tod_plot_csv(profile), manifest);
    }
    if (args.has_cap) {
        TodProfile capped = cap_tod(profile, args.cap);
        if (want_json)
            write_output(args.out_dir, "tod_capped.json", tod_json(capped), manifest);
        if (want_csv)
            write_output(args.out_dir, "tod_capped.csv", tod_csv(capped), manifest);
    }
    finish_manifest(args.out_dir, manifest);
    return 0;
}

int run_detect(const DetectArgs& args) {
    const double delta = effective_delta(args.delta, args.m);
    ReturnGrid grid = load_returns(args.input, args.m, delta, layout_of(args.prices));
    DetectorConfig config{args.raw_mult, args.round_mult, args.cap, args.max_rounds,
                          args.exponent};
    JumpReport report = detect_jumps(grid, config);
    if (args.size_mode == "rand")
        report.sizes_randomized =
            jump_sizes(grid, expand_daily({report.final_sigmaq_daily, grid.m}, grid),
                       report.jump_indices, SizeMode::randomized, args.seed);

    if (report.degenerate)
        std::cout << "warning: all returns are zero; nothing to estimate\n";
    for (const RoundRecord& record : report.rounds)
        std::cout << "round " << record.round << ": " << record.new_indices.size()
                  << " new jumps\n";
    std::cout << "total: " << report.total_jumps() << " jumps in " << grid.n()
              << " returns\n";
    if (!report.converged)
        std::cout << "warning: max rounds (" << config.max_rounds
                  << ") reached before convergence\n";

    fs::create_directories(args.out_dir);
    RunManifest manifest;
    manifest.command = "detect";
    manifest.parameters = {{"input", args.input},
                           {"m", std::to_string(args.m)},
                           {"delta", format_double(delta)},
                           {"raw-mult", format_double(args.raw_mult)},
                           {"round-mult", format_double(args.round_mult)},
                           {"cap", format_double(args.cap)},
                           {"exponent", format_double(args.exponent)},
                           {"max-rounds", std::to_string(args.max_rounds)},
                           {"size-mode", args.size_mode},
                           {"prices", args.prices ? "true" : "false"},
                           {"format", args.format}};
    if (args.size_mode == "rand") {
        manifest.parameters["seed"] = std::to_string(args.seed);
        manifest.seed = args.seed;
    }
    manifest.inputs[args.input] = fnv1a_digest(args.input);

    const bool want_json = args.format != "csv";
    const bool want_csv = args.format != "json";
    if (want_json)
        write_output(args.out_dir, "jumps.json", jump_report_json(report), manifest);
    if (want_csv) {
        write_output(args.out_dir, "jumps.csv", jump_csv(grid, report), manifest);
        write_output(args.out_dir, "detect_plot.csv", detect_plot_csv(grid, report),
                     manifest);
        write_output(args.out_dir, "spotvol.csv",
                     spotvol_csv({report.final_sigmaq_daily, grid.m}), manifest);
    }
    finish_manifest(args.out_dir, manifest);
    return 0;
}

int run_simulate(const SimulateArgs& args) {
    SimConfig config;
    config.m = args.m;
    config.N = args.days;
    config.delta = effective_delta(args.delta, args.m);
    config.seed = args.seed;
    config.sv = args.sv;
    config.diurnal = args.diurnal;
    if (args.has_level) config.diurnal.level = args.level;
    config.hawkes = args.hawkes;
    config.jump_size = args.jump_size;
    config.drift = args.drift;

    SimPath path = simulate_path(config);
    const double resolved_level = make_diurnal_curve(config.diurnal).C;

    std::cout << "simulated " << config.N << " days x " << config.m << " slots, "
              << path.true_jump_indices.size() << " jump events\n";
    if (!path.feller_satisfied)
        std::cout << "warning: 2*kappa*theta < xi^2 (variance can hit zero often)\n";

    fs::create_directories(args.out_dir);
    RunManifest manifest;
    manifest.command = "simulate";
    manifest.seed = args.seed;
    manifest.parameters = {{"m", std::to_string(config.m)},
                           {"days", std::to_string(config.N)},
                           {"delta", format_double(config.delta)},
                           {"seed", std::to_string(config.seed)},
                           {"theta", format_double(config.sv.theta)},
                           {"kappa", format_double(config.sv.kappa)},
                           {"xi", format_double(config.sv.xi)},
                           {"rho", format_double(config.sv.rho)},
                           {"v0", format_double(config.sv.v0)},
                           {"diurnal-amp-open", format_double(config.diurnal.amp_open)},
                           {"diurnal-rate-open", format_double(config.diurnal.rate_open)},
                           {"diurnal-amp-close", format_double(config.diurnal.amp_close)},
                           {"diurnal-rate-close", format_double(config.diurnal.rate_close)},
                           {"hawkes-mu", format_double(config.hawkes.mu)},
                           {"hawkes-alpha", format_double(config.hawkes.alpha)},
                           {"hawkes-beta", format_double(config.hawkes.beta)},
                           {"jump-mean", format_double(config.jump_size.mean)},
                           {"jump-sd", format_double(config.jump_size.stddev)},
                           {"drift", format_double(config.drift)}};
    if (args.has_level) manifest.parameters["diurnal-level"] = format_double(args.level);

    save_returns((fs::path(args.out_dir) / "returns.txt").string(), path.grid);
    manifest.outputs.push_back("returns.txt");
    write_output(args.out_dir, "truth.csv", truth_csv(path), manifest);
    write_output(args.out_dir, "config.json", sim_config_json(config, resolved_level),
                 manifest);
    finish_manifest(args.out_dir, manifest);
    return 0;
}

int run_validate(const ValidateArgs& args) {
    const std::string config_path = (fs::path(args.sim_dir) / "config.json").string();
    const std::string truth_path = (fs::path(args.sim_dir) / "truth.csv").string();
    const std::string jumps_path = (fs::path(args.detect_dir) / "jumps.json").string();

    GridDims sim_dims = read_sim_config_dims(config_path);
    DetectArtifacts detect = read_jump_report(jumps_path);
    if (sim_dims.m != detect.dims.m || sim_dims.N != detect.dims.N ||
        sim_dims.delta != detect.dims.delta)
        throw DataError("grid mismatch: simulated " + std::to_string(sim_dims.m) + "x" +
                        std::to_string(sim_dims.N) + ", detected " +
                        std::to_string(detect.dims.m) + "x" +
                        std::to_string(detect.dims.N));

    const Eigen::Index n = static_cast<Eigen::Index>(sim_dims.m) * sim_dims.N;
    std::vector<Eigen::Index> true_indices;
    std::vector<double> true_sizes;
    for (const TruthRecord& record : read_truth_csv(truth_path)) {
        if (record.index < 0 || record.index >= n)
            throw DataError(truth_path + ": index " + std::to_string(record.index + 1) +
                            " outside grid of " + std::to_string(n) + " returns");
        true_indices.push_back(record.index);
        true_sizes.push_back(record.size);
    }

    ConfusionSummary summary =
        match_detections(true_indices, true_sizes, detect.jump_indices,
                         detect.sizes_deterministic, args.tolerance);

    std::cout << "true positives: " << summary.true_positives
              << ", false positives: " << summary.false_positives
              << ", false negatives: " << summary.false_negatives << "\n";
    std::cout << "precision: "
              << (std::isnan(summary.precision) ? "n/a" : format_double(summary.precision))
              << ", recall: "
              << (std::isnan(summary.recall) ? "n/a" : format_double(summary.recall))
              << "\n";

    fs::create_directories(args.out_dir);
    RunManifest manifest;
    manifest.command = "validate";
    manifest.parameters = {{"sim-dir", args.sim_dir},
                           {"detect-dir", args.detect_dir},
                           {"tolerance", std::to_string(args.tolerance)}};
    manifest.inputs[config_path] = fnv1a_digest(config_path);
    manifest.inputs[truth_path] = fnv1a_digest(truth_path);
    manifest.inputs[jumps_path] = fnv1a_digest(jumps_path);
    write_output(args.out_dir, "metrics.json", metrics_json(summary), manifest);
    finish_manifest(args.out_dir, manifest);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Threshold jump detection for high-frequency log-price series "
                 "with time-of-day volatility correction"};
    app.require_subcommand(1);

    TodArgs tod_args;
    auto* tod_cmd =
        app.add_subcommand("tod", "Estimate the time-of-day volatility profile");
    tod_cmd->add_option("--input", tod_args.input, "Returns (or prices) file")->required();
    tod_cmd->add_option("--m", tod_args.m, "Intraday slots per day");
    tod_cmd->add_option("--delta", tod_args.delta,
                        "Slot length in years (default 1/(252*m))");
    tod_cmd->add_option("--exponent", tod_args.exponent, "Raw truncation exponent");
    auto* tod_cap_opt = tod_cmd->add_option(
        "--cap", tod_args.cap, "Also emit the profile capped at this value");
    tod_cmd->add_flag("--prices", tod_args.prices, "Input is day_id,price lines");
    tod_cmd->add_option("--out-dir", tod_args.out_dir, "Output directory")->required();
    tod_cmd->add_option("--format", tod_args.format, "Output formats")
        ->check(CLI::IsMember({"csv", "json", "both"}));

    DetectArgs detect_args;
    auto* detect_cmd = app.add_subcommand("detect", "Detect jumps in a return series");
    detect_cmd->add_option("--input", detect_args.input, "Returns (or prices) file")
        ->required();
    detect_cmd->add_option("--m", detect_args.m, "Intraday slots per day");
    detect_cmd->add_option("--delta", detect_args.delta,
                           "Slot length in years (default 1/(252*m))");
    detect_cmd->add_option("--raw-mult", detect_args.raw_mult,
                           "Initial raw threshold multiplier");
    detect_cmd->add_option("--round-mult", detect_args.round_mult,
                           "Per-round threshold multiplier");
    detect_cmd->add_option("--cap", detect_args.cap, "TOD factor cap");
    detect_cmd->add_option("--exponent", detect_args.exponent, "Raw truncation exponent");
    detect_cmd->add_option("--max-rounds", detect_args.max_rounds, "Round limit");
    detect_cmd->add_option("--size-mode", detect_args.size_mode,
                           "Jump size estimator: det or rand")
        ->check(CLI::IsMember({"det", "rand"}));
    detect_cmd->add_option("--seed", detect_args.seed, "Seed for rand size mode");
    detect_cmd->add_flag("--prices", detect_args.prices, "Input is day_id,price lines");
    detect_cmd->add_option("--out-dir", detect_args.out_dir, "Output directory")
        ->required();
    detect_cmd->add_option("--format", detect_args.format, "Output formats")
        ->check(CLI::IsMember({"csv", "json", "both"}));

    SimulateArgs sim_args;
    auto* sim_cmd =
        app.add_subcommand("simulate", "Generate a ground-truth path with jumps");
    sim_cmd->add_option("--m", sim_args.m, "Intraday slots per day");
    sim_cmd->add_option("--days", sim_args.days, "Number of days");
    sim_cmd->add_option("--delta", sim_args.delta,
                        "Slot length in years (default 1/(252*m))");
    sim_cmd->add_option("--seed", sim_args.seed, "Path seed");
    sim_cmd->add_option("--theta", sim_args.sv.theta, "Long-run variance");
    sim_cmd->add_option("--kappa", sim_args.sv.kappa, "Mean-reversion speed");
    sim_cmd->add_option("--xi", sim_args.sv.xi, "Vol-of-vol");
    sim_cmd->add_option("--rho", sim_args.sv.rho, "Leverage correlation in [-1,0]");
    sim_cmd->add_option("--v0", sim_args.sv.v0, "Initial variance");
    sim_cmd->add_option("--diurnal-amp-open", sim_args.diurnal.amp_open,
                        "Open-of-day amplitude A");
    sim_cmd->add_option("--diurnal-rate-open", sim_args.diurnal.rate_open,
                        "Open-of-day decay a");
    sim_cmd->add_option("--diurnal-amp-close", sim_args.diurnal.amp_close,
                        "Close-of-day amplitude B");
    sim_cmd->add_option("--diurnal-rate-close", sim_args.diurnal.rate_close,
                        "Close-of-day decay b");
    auto* level_opt = sim_cmd->add_option(
        "--diurnal-level", sim_args.level,
        "Base level C (default: solved for unit mean-square)");
    sim_cmd->add_option("--hawkes-mu", sim_args.hawkes.mu, "Baseline jump intensity");
    sim_cmd->add_option("--hawkes-alpha", sim_args.hawkes.alpha, "Hawkes excitation");
    sim_cmd->add_option("--hawkes-beta", sim_args.hawkes.beta, "Hawkes decay");
    sim_cmd->add_option("--jump-mean", sim_args.jump_size.mean, "Mean jump size");
    sim_cmd->add_option("--jump-sd", sim_args.jump_size.stddev, "Jump size stddev");
    sim_cmd->add_option("--drift", sim_args.drift, "Constant drift per year");
    sim_cmd->add_option("--out-dir", sim_args.out_dir, "Output directory")->required();

    ValidateArgs val_args;
    auto* val_cmd = app.add_subcommand(
        "validate", "Score a detect run against simulated ground truth");
    val_cmd->add_option("--sim-dir", val_args.sim_dir,
                        "Directory with config.json and truth.csv")
        ->required();
    val_cmd->add_option("--detect-dir", val_args.detect_dir,
                        "Directory with jumps.json (detect run with json output)")
        ->required();
    val_cmd->add_option("--tolerance", val_args.tolerance, "Matching tolerance in slots");
    val_cmd->add_option("--out-dir", val_args.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    tod_args.has_cap = tod_cap_opt->count() > 0;
    sim_args.has_level = level_opt->count() > 0;

    try {
        if (app.got_subcommand(tod_cmd)) return run_tod(tod_args);
        if (app.got_subcommand(detect_cmd)) return run_detect(detect_args);
        if (app.got_subcommand(sim_cmd)) return run_simulate(sim_args);
        if (app.got_subcommand(val_cmd)) return run_validate(val_args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 4;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
