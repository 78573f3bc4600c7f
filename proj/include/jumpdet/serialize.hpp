#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jumpdet/detector.hpp"
#include "jumpdet/simulator.hpp"
#include "jumpdet/spotvol.hpp"
#include "jumpdet/tod.hpp"

namespace jumpdet {

// Shortest decimal form that round-trips to the same double. NaN renders as
// "nan" in CSV; JSON writers emit null instead.
std::string format_double(double value);

// FNV-1a 64-bit digest of a file's bytes as 16 lowercase hex chars.
std::string fnv1a_digest(const std::string& path);

void write_text(const std::string& path, const std::string& content);

// All slot/day/index columns below are 1-based to match the flat-index
// convention of the grid's user-facing output.

std::string tod_json(const TodProfile& profile);
std::string tod_csv(const TodProfile& profile);        // slot,tod,den_noi
std::string tod_plot_csv(const TodProfile& profile);   // slot,tod

std::string spotvol_csv(const SpotVolSeries& series);  // day,sigma_sq_annualized

std::string jump_report_json(const JumpReport& report);
// index,time_years,day,slot,return,threshold_at_detection,size_deterministic
std::string jump_csv(const ReturnGrid& grid, const JumpReport& report);
std::string detect_plot_csv(const ReturnGrid& grid, const JumpReport& report);  // time_years,return,flagged

std::string truth_csv(const SimPath& path);            // index,time_years,size
std::string sim_config_json(const SimConfig& config, double resolved_level);
std::string metrics_json(const ConfusionSummary& summary);

// Every run directory gets exactly one manifest; content is a pure function
// of the invocation (no timestamps), so reruns are byte-identical.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> parameters;  // flag -> rendered value
    std::map<std::string, std::string> inputs;      // path -> digest
    std::vector<std::string> outputs;               // file names within out_dir
    std::optional<std::uint64_t> seed;
};

std::string manifest_json(const RunManifest& manifest);

// Readers for the validate command (it consumes simulate + detect artifacts).
struct TruthRecord {
    Eigen::Index index = 0;  // 0-based after reading
    double time_years = 0.0;
    double size = 0.0;
};

std::vector<TruthRecord> read_truth_csv(const std::string& path);

struct GridDims {
    int m = 0;
    int N = 0;
    double delta = 0.0;
};

GridDims read_sim_config_dims(const std::string& path);

struct DetectArtifacts {
    GridDims dims;
    std::vector<Eigen::Index> jump_indices;  // 0-based after reading
    Eigen::ArrayXd sizes_deterministic;
};

DetectArtifacts read_jump_report(const std::string& path);

}  // namespace jumpdet
