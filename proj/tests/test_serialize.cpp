#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include "jumpdet/detector.hpp"
#include "jumpdet/serialize.hpp"
#include "jumpdet/simulator.hpp"
#include "oracles.hpp"

using namespace jumpdet;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() /
                     ("jumpdet_serialize_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

ReturnGrid tiny_grid() {
    Eigen::ArrayXd r(4);
    r << 0.1, 0.1, 0.1, 0.1;
    return make_grid(r, 2, 0.25);
}

}  // namespace

TEST_CASE("format_double is shortest-round-trip") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5) == "-2.5");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    for (double value : {1.0 / 3.0, 0.048564, 1e-17, 123456.789, 2.2250738585072014e-308}) {
        const std::string text = format_double(value);
        CHECK(std::strtod(text.c_str(), nullptr) == value);
    }
}

TEST_CASE("fnv1a_digest matches known vectors") {
    const fs::path empty = temp_dir() / "empty.bin";
    write_text(empty.string(), "");
    CHECK(fnv1a_digest(empty.string()) == "cbf29ce484222325");

    const fs::path hello = temp_dir() / "hello.bin";
    write_text(hello.string(), "hello");
    CHECK(fnv1a_digest(hello.string()) == "a430d84680aabd0b");

    CHECK_THROWS_AS(fnv1a_digest((temp_dir() / "missing.bin").string()), DataError);
}

TEST_CASE("write_text writes bytes verbatim") {
    const fs::path path = temp_dir() / "verbatim.txt";
    write_text(path.string(), "line1\nline2\n");
    CHECK(slurp(path) == "line1\nline2\n");
}

TEST_CASE("tod CSV emitters use the documented columns") {
    TodProfile profile = tod_profile(tiny_grid());
    CHECK(tod_csv(profile) == "slot,tod,den_noi\n1,1,2\n2,1,2\n");
    CHECK(tod_plot_csv(profile) == "slot,tod\n1,1\n2,1\n");
}

TEST_CASE("tod JSON carries undefined slots as null") {
    TodProfile profile = tod_profile(tiny_grid());
    profile.tod(1) = std::numeric_limits<double>::quiet_NaN();
    profile.den_noi(1) = 0;
    json parsed = json::parse(tod_json(profile));
    CHECK(parsed.at("m") == 2);
    CHECK(parsed.at("tod").size() == 2);
    CHECK(parsed.at("tod")[0] == 1.0);
    CHECK(parsed.at("tod")[1].is_null());
    REQUIRE(parsed.at("undefined_slots").size() == 1);
    CHECK(parsed.at("undefined_slots")[0] == 2);  // 1-based
    CHECK(parsed.at("bar_alpha").is_number());
}

TEST_CASE("spotvol CSV rows are day-indexed from 1") {
    Eigen::ArrayXd daily(2);
    daily << 0.04, 0.09;
    SpotVolSeries series{daily, 2};
    CHECK(spotvol_csv(series) == "day,sigma_sq_annualized\n1,0.04\n2,0.09\n");
}

TEST_CASE("jump report JSON structure for a detecting run") {
    auto values = oracle::gaussian_returns(77 * 20, 0.01, 99);
    values[500] = 0.12;
    ReturnGrid grid = make_grid(oracle::to_eigen(values), 77, 1.0 / 19404.0);
    JumpReport report = detect_jumps(grid);
    REQUIRE(report.total_jumps() >= 1);

    json parsed = json::parse(jump_report_json(report));
    CHECK(parsed.at("m") == 77);
    CHECK(parsed.at("N") == 20);
    CHECK(parsed.at("delta").get<double>() == grid.delta);
    CHECK(parsed.at("converged").is_boolean());
    CHECK(parsed.at("degenerate") == false);
    CHECK(parsed.at("config").at("raw_multiplier") == 6.0);
    CHECK(parsed.at("config").at("round_multiplier") == 2.0);
    CHECK(parsed.at("config").at("tod_cap") == 1.5);
    CHECK(parsed.at("total_jumps").get<std::size_t>() == report.total_jumps());
    // indices are 1-based on disk
    CHECK(parsed.at("jump_indices")[0].get<long>() ==
          static_cast<long>(report.jump_indices[0]) + 1);
    CHECK(parsed.at("sizes_randomized").is_null());
    REQUIRE(parsed.at("rounds").is_array());
    const json& round0 = parsed.at("rounds")[0];
    CHECK(round0.at("round") == 1);
    CHECK(round0.at("new_count").get<std::size_t>() ==
          round0.at("new_indices").size());
    CHECK(round0.at("sigmaq_daily").size() == 20);
    CHECK(parsed.at("final_sigmaq_daily").size() == 20);
    CHECK(parsed.at("tod").at("m") == 77);

    report.sizes_randomized =
        jump_sizes(grid, expand_daily({report.final_sigmaq_daily, grid.m}, grid),
                   report.jump_indices, SizeMode::randomized, 7);
    json with_rand = json::parse(jump_report_json(report));
    CHECK(with_rand.at("sizes_randomized").size() == report.total_jumps());
}

TEST_CASE("degenerate report serializes with a null tod block") {
    ReturnGrid grid = make_grid(Eigen::ArrayXd::Zero(8), 2, 0.1);
    JumpReport report = detect_jumps(grid);
    json parsed = json::parse(jump_report_json(report));
    CHECK(parsed.at("degenerate") == true);
    CHECK(parsed.at("tod").is_null());
    CHECK(parsed.at("rounds").empty());
}

TEST_CASE("jump CSV and plot CSV have the documented headers and widths") {
    auto values = oracle::gaussian_returns(77 * 10, 0.01, 17);
    values[200] = 0.15;
    ReturnGrid grid = make_grid(oracle::to_eigen(values), 77, 1.0 / 19404.0);
    JumpReport report = detect_jumps(grid);
    REQUIRE(report.total_jumps() >= 1);

    const std::string csv = jump_csv(grid, report);
    CHECK(csv.rfind("index,time_years,day,slot,return,threshold_at_detection,"
                    "size_deterministic\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') ==
          static_cast<long>(report.total_jumps()) + 1);
    // the planted jump at flat index 200 is day 3, slot 47 (1-based)
    CHECK(csv.find("\n201,") != std::string::npos);
    CHECK(csv.find(",3,47,") != std::string::npos);

    const std::string plot = detect_plot_csv(grid, report);
    CHECK(plot.rfind("time_years,return,flagged\n", 0) == 0);
    CHECK(std::count(plot.begin(), plot.end(), '\n') == grid.n() + 1);
    CHECK(plot.find(",1\n") != std::string::npos);  // at least one flagged row
}

TEST_CASE("truth CSV round-trips through read_truth_csv") {
    SimConfig config;
    config.N = 40;
    config.seed = 3;
    SimPath path = simulate_path(config);
    REQUIRE(!path.true_jump_indices.empty());

    const std::string csv = truth_csv(path);
    CHECK(csv.rfind("index,time_years,size\n", 0) == 0);
    const fs::path file = temp_dir() / "truth.csv";
    write_text(file.string(), csv);
    auto records = read_truth_csv(file.string());
    REQUIRE(records.size() == path.true_jump_indices.size());
    for (std::size_t k = 0; k < records.size(); ++k) {
        CHECK(records[k].index == path.true_jump_indices[k]);
        CHECK(records[k].time_years == path.true_jump_times[k]);
        CHECK(records[k].size == path.true_jump_sizes[k]);
    }
    write_text(file.string(), "wrong,header\n1,2\n");
    CHECK_THROWS_AS(read_truth_csv(file.string()), DataError);
}

TEST_CASE("sim config JSON round-trips its dimensions") {
    SimConfig config;
    config.N = 12;
    config.seed = 9;
    const std::string text = sim_config_json(config, 0.832968);
    json parsed = json::parse(text);
    CHECK(parsed.at("m") == 77);
    CHECK(parsed.at("N") == 12);
    CHECK(parsed.at("seed") == 9);
    CHECK(parsed.at("sv").at("theta") == 0.04);
    CHECK(parsed.at("diurnal").at("level").is_null());
    CHECK(parsed.at("diurnal").at("level_resolved") == 0.832968);
    CHECK(parsed.at("hawkes").at("mu") == 25.0);

    const fs::path file = temp_dir() / "config.json";
    write_text(file.string(), text);
    GridDims dims = read_sim_config_dims(file.string());
    CHECK(dims.m == 77);
    CHECK(dims.N == 12);
    CHECK(dims.delta == config.delta);
}

TEST_CASE("metrics JSON represents undefined ratios as null") {
    ConfusionSummary summary;
    summary.true_positives = 0;
    summary.false_positives = 0;
    summary.false_negatives = 2;
    summary.tolerance_slots = 1;
    summary.recall = 0.0;
    summary.precision = std::numeric_limits<double>::quiet_NaN();
    summary.size_bias = std::numeric_limits<double>::quiet_NaN();
    summary.size_mae = std::numeric_limits<double>::quiet_NaN();
    summary.size_rmse = std::numeric_limits<double>::quiet_NaN();
    json parsed = json::parse(metrics_json(summary));
    CHECK(parsed.at("true_positives") == 0);
    CHECK(parsed.at("false_negatives") == 2);
    CHECK(parsed.at("tolerance_slots") == 1);
    CHECK(parsed.at("recall") == 0.0);
    CHECK(parsed.at("precision").is_null());
    CHECK(parsed.at("size_bias").is_null());
}

TEST_CASE("manifest JSON is a pure function of its inputs") {
    RunManifest manifest;
    manifest.command = "detect";
    manifest.parameters = {{"m", "77"}, {"delta", "0.0001"}};
    manifest.inputs = {{"returns.txt", "cbf29ce484222325"}};
    manifest.outputs = {"jumps.json", "jumps.csv"};
    const std::string a = manifest_json(manifest);
    const std::string b = manifest_json(manifest);
    CHECK(a == b);
    json parsed = json::parse(a);
    CHECK(parsed.at("command") == "detect");
    CHECK(parsed.at("seed").is_null());
    CHECK(parsed.at("outputs")[0] == "jumps.json");
    manifest.seed = 42;
    CHECK(json::parse(manifest_json(manifest)).at("seed") == 42);
}

TEST_CASE("read_jump_report recovers indices and sizes from disk") {
    auto values = oracle::gaussian_returns(77 * 10, 0.01, 23);
    values[100] = 0.17;
    values[400] = -0.21;
    ReturnGrid grid = make_grid(oracle::to_eigen(values), 77, 1.0 / 19404.0);
    JumpReport report = detect_jumps(grid);
    REQUIRE(report.total_jumps() >= 2);

    const fs::path file = temp_dir() / "jumps.json";
    write_text(file.string(), jump_report_json(report));
    DetectArtifacts artifacts = read_jump_report(file.string());
    CHECK(artifacts.dims.m == 77);
    CHECK(artifacts.dims.N == 10);
    CHECK(artifacts.dims.delta == grid.delta);
    CHECK(artifacts.jump_indices == report.jump_indices);  // back to 0-based
    REQUIRE(artifacts.sizes_deterministic.size() == report.sizes_deterministic.size());
    for (Eigen::Index k = 0; k < artifacts.sizes_deterministic.size(); ++k)
        CHECK(artifacts.sizes_deterministic(k) == report.sizes_deterministic(k));

    write_text(file.string(), "{ not json");
    CHECK_THROWS_AS(read_jump_report(file.string()), DataError);
}
