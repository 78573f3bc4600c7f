#include "jumpdet/detector.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace jumpdet {

namespace {

void validate_config(const DetectorConfig& config) {
    if (!(config.raw_multiplier > 0.0))
        throw ConfigError("raw_multiplier must be positive");
    if (!(config.round_multiplier > 0.0))
        throw ConfigError("round_multiplier must be positive");
    if (!(config.tod_cap > 0.0))
        throw ConfigError("tod_cap must be positive");
    if (config.max_rounds < 1)
        throw ConfigError("max_rounds must be at least 1");
}

}  // namespace

double modulus_of_continuity(double delta) {
    if (!(delta > 0.0) || delta >= 1.0)
        throw ConfigError("modulus of continuity needs 0 < delta < 1, got " +
                          std::to_string(delta));
    return std::sqrt(2.0 * delta * std::log(1.0 / delta));
}

double initial_raw_threshold(double bar_alpha_value, double delta, double raw_multiplier) {
    if (bar_alpha_value < 0.0)
        throw ConfigError("bar_alpha must be nonnegative");
    return raw_multiplier * bar_alpha_value * modulus_of_continuity(delta);
}

Eigen::ArrayXd round_thresholds(Eigen::Ref<const Eigen::ArrayXd> tod_glob,
                                Eigen::Ref<const Eigen::ArrayXd> sigmaq_glob,
                                double delta, double round_multiplier) {
    if (tod_glob.size() != sigmaq_glob.size())
        throw DataError("tod_glob length " + std::to_string(tod_glob.size()) +
                        " does not match sigmaq_glob length " +
                        std::to_string(sigmaq_glob.size()));
    return round_multiplier * tod_glob * sigmaq_glob.sqrt() * modulus_of_continuity(delta);
}

JumpReport detect_jumps(const ReturnGrid& grid, const DetectorConfig& config) {
    validate_config(config);

    JumpReport report;
    report.m = grid.m;
    report.N = grid.N;
    report.delta = grid.delta;
    report.config = config;
    report.modulus_mc = modulus_of_continuity(grid.delta);

    if ((grid.returns == 0.0).all()) {
        // Nothing estimable: the realized variance is zero and every
        // threshold would be zero, which the strict comparison never exceeds.
        report.degenerate = true;
        report.final_sigmaq_daily = Eigen::ArrayXd::Zero(grid.N);
        report.sizes_deterministic.resize(0);
        return report;
    }

    TodProfile raw_profile = tod_profile(grid, config.truncation_exponent);
    report.bar_alpha = raw_profile.bar_alpha;
    report.tod = cap_tod(std::move(raw_profile), config.tod_cap);
    const Eigen::ArrayXd tod_glob = expand_tod(report.tod, grid);

    const Eigen::ArrayXd& r = grid.returns;
    const double thr0 =
        initial_raw_threshold(report.bar_alpha, grid.delta, config.raw_multiplier);
    Eigen::ArrayXd truncated = (r.abs() <= thr0).select(r, 0.0);
    Eigen::ArrayXd sigmaq =
        daily_spot_variance(grid, truncated.square()).sigmaq_daily;

    // Round 1 tests the raw returns; later rounds test the series truncated
    // at the previous round's thresholds.
    Eigen::ArrayXd tested = r;
    std::vector<char> flagged(static_cast<std::size_t>(grid.n()), 0);

    for (int k = 1; k <= config.max_rounds; ++k) {
        RoundRecord record;
        record.round = k;
        record.sigmaq_daily = sigmaq;
        record.thresholds =
            round_thresholds(tod_glob, expand_daily({sigmaq, grid.m}, grid),
                             grid.delta, config.round_multiplier);
        for (Eigen::Index j = 0; j < grid.n(); ++j)
            if (!flagged[j] && std::abs(tested(j)) > record.thresholds(j)) {
                flagged[j] = 1;
                record.new_indices.push_back(j);
            }
        const bool done = record.new_indices.empty();
        report.rounds.push_back(std::move(record));
        if (done) {
            report.converged = true;
            break;
        }
        report.converged = false;
        const Eigen::ArrayXd& thr = report.rounds.back().thresholds;
        tested = (r.abs() <= thr).select(r, 0.0);
        sigmaq = daily_spot_variance(grid, tested.square()).sigmaq_daily;
    }

    report.final_sigmaq_daily = report.rounds.back().sigmaq_daily;

    for (Eigen::Index j = 0; j < grid.n(); ++j)
        if (flagged[j]) {
            report.jump_indices.push_back(j);
            report.jump_times.push_back(grid.time_of(j));
        }
    report.detection_round.resize(report.jump_indices.size());
    report.detection_threshold.resize(report.jump_indices.size());
    for (std::size_t k = 0; k < report.jump_indices.size(); ++k) {
        const Eigen::Index j = report.jump_indices[k];
        for (const RoundRecord& record : report.rounds)
            if (std::binary_search(record.new_indices.begin(), record.new_indices.end(), j)) {
                report.detection_round[k] = record.round;
                report.detection_threshold[k] = record.thresholds(j);
                break;
            }
    }

    SpotVolSeries final_series{report.final_sigmaq_daily, grid.m};
    report.sizes_deterministic =
        jump_sizes(grid, expand_daily(final_series, grid), report.jump_indices,
                   SizeMode::deterministic);
    return report;
}

Eigen::ArrayXd jump_sizes(const ReturnGrid& grid,
                          Eigen::Ref<const Eigen::ArrayXd> sigmaq_glob,
                          const std::vector<Eigen::Index>& jump_indices,
                          SizeMode mode, std::uint64_t seed) {
    if (sigmaq_glob.size() != grid.n())
        throw DataError("sigmaq_glob length " + std::to_string(sigmaq_glob.size()) +
                        " does not match grid size " + std::to_string(grid.n()));
    const double sqrt_delta = std::sqrt(grid.delta);
    Eigen::ArrayXd sizes(static_cast<Eigen::Index>(jump_indices.size()));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t k = 0; k < jump_indices.size(); ++k) {
        const Eigen::Index j = jump_indices[k];
        if (j < 0 || j >= grid.n())
            throw DataError("jump index " + std::to_string(j + 1) + " out of range");
        if (sigmaq_glob(j) < 0.0)
            throw DataError("negative sigma^2 at index " + std::to_string(j + 1));
        const double brownian = mode == SizeMode::deterministic
                                    ? std::sqrt(sigmaq_glob(j)) * sqrt_delta
                                    : std::sqrt(sigmaq_glob(j)) * normal(rng) * sqrt_delta;
        sizes(static_cast<Eigen::Index>(k)) = grid.returns(j) - brownian;
    }
    return sizes;
}

}  // namespace jumpdet
