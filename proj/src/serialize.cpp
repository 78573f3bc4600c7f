#include "jumpdet/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>

namespace jumpdet {

namespace {

using nlohmann::json;

json json_or_null(double value) {
    if (std::isnan(value)) return nullptr;
    return value;
}

json array_1based(const std::vector<Eigen::Index>& indices) {
    json out = json::array();
    for (Eigen::Index j : indices) out.push_back(static_cast<long long>(j) + 1);
    return out;
}

json array_of(const Eigen::ArrayXd& values) {
    json out = json::array();
    for (Eigen::Index i = 0; i < values.size(); ++i) out.push_back(values(i));
    return out;
}

json array_of(const std::vector<double>& values) {
    json out = json::array();
    for (double v : values) out.push_back(v);
    return out;
}

json tod_to_json(const TodProfile& profile) {
    json out;
    out["m"] = profile.m();
    out["bar_alpha"] = profile.bar_alpha;
    out["tod"] = array_of(profile.tod);  // NaN slots serialize as null
    json undefined = json::array();
    for (int slot : profile.undefined_slots()) undefined.push_back(slot + 1);
    out["undefined_slots"] = undefined;
    out["num_noi"] = profile.num_noi;
    out["den_tod"] = profile.den_tod;
    return out;
}

double json_number(const json& j, const char* key) {
    if (!j.contains(key)) throw DataError(std::string("missing key: ") + key);
    return j.at(key).get<double>();
}

json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DataError("malformed JSON in " + path);
    return j;
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string fnv1a_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    char chunk[4096];
    while (in.read(chunk, sizeof chunk) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(chunk[i]);
            hash *= 0x100000001B3ULL;
        }
        if (!in) break;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

std::string tod_json(const TodProfile& profile) {
    return tod_to_json(profile).dump(2) + "\n";
}

std::string tod_csv(const TodProfile& profile) {
    std::string out = "slot,tod,den_noi\n";
    for (int i = 0; i < profile.m(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += format_double(profile.tod(i));
        out += ',';
        out += std::to_string(profile.den_noi(i));
        out += '\n';
    }
    return out;
}

std::string tod_plot_csv(const TodProfile& profile) {
    std::string out = "slot,tod\n";
    for (int i = 0; i < profile.m(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += format_double(profile.tod(i));
        out += '\n';
    }
    return out;
}

std::string spotvol_csv(const SpotVolSeries& series) {
    std::string out = "day,sigma_sq_annualized\n";
    for (Eigen::Index j = 0; j < series.sigmaq_daily.size(); ++j) {
        out += std::to_string(j + 1);
        out += ',';
        out += format_double(series.sigmaq_daily(j));
        out += '\n';
    }
    return out;
}

std::string jump_report_json(const JumpReport& report) {
    json out;
    out["m"] = report.m;
    out["N"] = report.N;
    out["delta"] = report.delta;
    out["bar_alpha"] = report.bar_alpha;
    out["modulus_mc"] = report.modulus_mc;
    out["converged"] = report.converged;
    out["degenerate"] = report.degenerate;
    out["config"] = {{"raw_multiplier", report.config.raw_multiplier},
                     {"round_multiplier", report.config.round_multiplier},
                     {"tod_cap", report.config.tod_cap},
                     {"max_rounds", report.config.max_rounds},
                     {"truncation_exponent", report.config.truncation_exponent}};
    out["tod"] = report.degenerate ? json(nullptr) : tod_to_json(report.tod);
    out["total_jumps"] = report.jump_indices.size();
    out["jump_indices"] = array_1based(report.jump_indices);
    out["jump_times"] = array_of(report.jump_times);
    out["detection_round"] = report.detection_round;
    out["detection_threshold"] = array_of(report.detection_threshold);
    out["sizes_deterministic"] = array_of(report.sizes_deterministic);
    out["sizes_randomized"] = report.sizes_randomized.size() == 0
                                  ? json(nullptr)
                                  : array_of(report.sizes_randomized);
    json rounds = json::array();
    for (const RoundRecord& record : report.rounds) {
        json r;
        r["round"] = record.round;
        r["new_count"] = record.new_indices.size();
        r["new_indices"] = array_1based(record.new_indices);
        json thresholds = json::array();
        for (Eigen::Index j : record.new_indices) thresholds.push_back(record.thresholds(j));
        r["thresholds_at_new"] = thresholds;
        r["sigmaq_daily"] = array_of(record.sigmaq_daily);
        rounds.push_back(std::move(r));
    }
    out["rounds"] = rounds;
    out["final_sigmaq_daily"] = array_of(report.final_sigmaq_daily);
    return out.dump(2) + "\n";
}

std::string jump_csv(const ReturnGrid& grid, const JumpReport& report) {
    std::string out = "index,time_years,day,slot,return,threshold_at_detection,size_deterministic\n";
    for (std::size_t k = 0; k < report.jump_indices.size(); ++k) {
        const Eigen::Index j = report.jump_indices[k];
        out += std::to_string(j + 1);
        out += ',';
        out += format_double(report.jump_times[k]);
        out += ',';
        out += std::to_string(grid.day_of(j) + 1);
        out += ',';
        out += std::to_string(grid.slot_of(j) + 1);
        out += ',';
        out += format_double(grid.returns(j));
        out += ',';
        out += format_double(report.detection_threshold[k]);
        out += ',';
        out += format_double(report.sizes_deterministic(static_cast<Eigen::Index>(k)));
        out += '\n';
    }
    return out;
}

std::string detect_plot_csv(const ReturnGrid& grid, const JumpReport& report) {
    std::vector<char> flagged(static_cast<std::size_t>(grid.n()), 0);
    for (Eigen::Index j : report.jump_indices) flagged[static_cast<std::size_t>(j)] = 1;
    std::string out = "time_years,return,flagged\n";
    for (Eigen::Index j = 0; j < grid.n(); ++j) {
        out += format_double(grid.time_of(j));
        out += ',';
        out += format_double(grid.returns(j));
        out += ',';
        out += flagged[static_cast<std::size_t>(j)] ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string truth_csv(const SimPath& path) {
    std::string out = "index,time_years,size\n";
    for (std::size_t k = 0; k < path.true_jump_indices.size(); ++k) {
        out += std::to_string(path.true_jump_indices[k] + 1);
        out += ',';
        out += format_double(path.true_jump_times[k]);
        out += ',';
        out += format_double(path.true_jump_sizes[k]);
        out += '\n';
    }
    return out;
}

std::string sim_config_json(const SimConfig& config, double resolved_level) {
    json out;
    out["m"] = config.m;
    out["N"] = config.N;
    out["delta"] = config.delta;
    out["drift"] = config.drift;
    out["seed"] = config.seed;
    out["sv"] = {{"theta", config.sv.theta},
                 {"kappa", config.sv.kappa},
                 {"xi", config.sv.xi},
                 {"rho", config.sv.rho},
                 {"v0", config.sv.v0}};
    out["diurnal"] = {{"amp_open", config.diurnal.amp_open},
                      {"rate_open", config.diurnal.rate_open},
                      {"amp_close", config.diurnal.amp_close},
                      {"rate_close", config.diurnal.rate_close},
                      {"level", config.diurnal.level ? json(*config.diurnal.level) : json(nullptr)},
                      {"level_resolved", resolved_level}};
    out["hawkes"] = {{"mu", config.hawkes.mu},
                     {"alpha", config.hawkes.alpha},
                     {"beta", config.hawkes.beta}};
    out["jump_size"] = {{"mean", config.jump_size.mean},
                        {"stddev", config.jump_size.stddev}};
    return out.dump(2) + "\n";
}

std::string metrics_json(const ConfusionSummary& summary) {
    json out;
    out["true_positives"] = summary.true_positives;
    out["false_positives"] = summary.false_positives;
    out["false_negatives"] = summary.false_negatives;
    out["matched_pairs"] = summary.matched_pairs;
    out["tolerance_slots"] = summary.tolerance_slots;
    out["precision"] = json_or_null(summary.precision);
    out["recall"] = json_or_null(summary.recall);
    out["size_bias"] = json_or_null(summary.size_bias);
    out["size_mae"] = json_or_null(summary.size_mae);
    out["size_rmse"] = json_or_null(summary.size_rmse);
    return out.dump(2) + "\n";
}

std::string manifest_json(const RunManifest& manifest) {
    json out;
    out["command"] = manifest.command;
    out["version"] = kVersion;
    out["parameters"] = manifest.parameters;
    out["inputs"] = manifest.inputs;
    out["outputs"] = manifest.outputs;
    out["seed"] = manifest.seed ? json(*manifest.seed) : json(nullptr);
    return out.dump(2) + "\n";
}

std::vector<TruthRecord> read_truth_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("index,time_years,size", 0) != 0)
        throw DataError(path + ": expected header index,time_years,size");
    std::vector<TruthRecord> records;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        TruthRecord record;
        char* cursor = line.data();
        char* end = nullptr;
        record.index = static_cast<Eigen::Index>(std::strtoll(cursor, &end, 10)) - 1;
        if (end == cursor || *end != ',')
            throw DataError(path + ":" + std::to_string(line_no) + ": malformed row");
        cursor = end + 1;
        record.time_years = std::strtod(cursor, &end);
        if (end == cursor || *end != ',')
            throw DataError(path + ":" + std::to_string(line_no) + ": malformed row");
        cursor = end + 1;
        record.size = std::strtod(cursor, &end);
        if (end == cursor)
            throw DataError(path + ":" + std::to_string(line_no) + ": malformed row");
        records.push_back(record);
    }
    return records;
}

GridDims read_sim_config_dims(const std::string& path) {
    json j = parse_json_file(path);
    GridDims dims;
    dims.m = static_cast<int>(json_number(j, "m"));
    dims.N = static_cast<int>(json_number(j, "N"));
    dims.delta = json_number(j, "delta");
    return dims;
}

DetectArtifacts read_jump_report(const std::string& path) {
    json j = parse_json_file(path);
    DetectArtifacts artifacts;
    artifacts.dims.m = static_cast<int>(json_number(j, "m"));
    artifacts.dims.N = static_cast<int>(json_number(j, "N"));
    artifacts.dims.delta = json_number(j, "delta");
    if (!j.contains("jump_indices") || !j.contains("sizes_deterministic"))
        throw DataError(path + ": missing jump_indices or sizes_deterministic");
    for (const auto& v : j.at("jump_indices"))
        artifacts.jump_indices.push_back(v.get<long long>() - 1);
    const auto& sizes = j.at("sizes_deterministic");
    artifacts.sizes_deterministic.resize(static_cast<Eigen::Index>(sizes.size()));
    Eigen::Index k = 0;
    for (const auto& v : sizes) artifacts.sizes_deterministic(k++) = v.get<double>();
    return artifacts;
}

}  // namespace jumpdet
