#include "jumpdet/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <tuple>

namespace jumpdet {

namespace {

constexpr std::uint64_t kDiffusionTag = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kHawkesTag = 0xC2B2AE3D27D4EB4FULL;
constexpr std::uint64_t kJumpSizeTag = 0x165667B19E3779F9ULL;

void validate_sim_config(const SimConfig& config) {
    if (config.m < 2) throw ConfigError("m must be at least 2");
    if (config.N < 1) throw ConfigError("N must be at least 1");
    if (!(config.delta > 0.0)) throw ConfigError("delta must be positive");
    if (config.sv.theta < 0.0 || config.sv.kappa < 0.0 || config.sv.xi < 0.0 ||
        config.sv.v0 < 0.0)
        throw ConfigError("variance parameters theta, kappa, xi, v0 must be nonnegative");
    if (config.sv.rho < -1.0 || config.sv.rho > 0.0)
        throw ConfigError("leverage correlation rho must lie in [-1, 0]");
    if (config.jump_size.stddev < 0.0)
        throw ConfigError("jump size stddev must be nonnegative");
    if (config.hawkes.mu < 0.0) throw ConfigError("hawkes mu must be nonnegative");
    if (config.hawkes.alpha < 0.0) throw ConfigError("hawkes alpha must be nonnegative");
    if (config.hawkes.alpha >= config.hawkes.beta)
        throw ConfigError("hawkes needs alpha < beta for stationarity, got alpha=" +
                          std::to_string(config.hawkes.alpha) +
                          ", beta=" + std::to_string(config.hawkes.beta));
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

DiurnalCurve make_diurnal_curve(const DiurnalParams& params) {
    if (params.amp_open < 0.0 || params.amp_close < 0.0)
        throw ConfigError("diurnal amplitudes must be nonnegative");
    if (!(params.rate_open > 0.0) || !(params.rate_close > 0.0))
        throw ConfigError("diurnal rates must be positive");

    DiurnalCurve curve;
    curve.A = params.amp_open;
    curve.a = params.rate_open;
    curve.B = params.amp_close;
    curve.b = params.rate_close;

    if (params.level) {
        curve.C = *params.level;
    } else {
        // Solve C^2 + 2*C*s1 + s2 = 1 where s1 = integral of the exponential
        // terms and s2 = integral of their square, so that tau^2 has unit
        // mean over [0,1].
        const double A = curve.A, a = curve.a, B = curve.B, b = curve.b;
        const double s1 = A * (1.0 - std::exp(-a)) / a + B * (1.0 - std::exp(-b)) / b;
        const double cross = a == b ? std::exp(-a)
                                    : (std::exp(-a) - std::exp(-b)) / (b - a);
        const double s2 = A * A * (1.0 - std::exp(-2.0 * a)) / (2.0 * a) +
                          B * B * (1.0 - std::exp(-2.0 * b)) / (2.0 * b) +
                          2.0 * A * B * cross;
        const double disc = s1 * s1 + 1.0 - s2;
        if (disc < 0.0)
            throw ConfigError("diurnal amplitudes too large for unit mean-square level");
        curve.C = -s1 + std::sqrt(disc);
    }

    for (int i = 0; i <= 10000; ++i)
        if (!(curve.tau(i / 10000.0) > 0.0))
            throw ConfigError("diurnal shape is not positive on [0,1]");
    return curve;
}

std::vector<double> simulate_hawkes(double mu, double alpha, double beta,
                                    double horizon, std::uint64_t seed) {
    if (mu < 0.0) throw ConfigError("hawkes mu must be nonnegative");
    if (alpha < 0.0) throw ConfigError("hawkes alpha must be nonnegative");
    if (alpha >= beta)
        throw ConfigError("hawkes needs alpha < beta for stationarity, got alpha=" +
                          std::to_string(alpha) + ", beta=" + std::to_string(beta));
    if (!(horizon >= 0.0)) throw ConfigError("horizon must be nonnegative");

    std::vector<double> events;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // The intensity decays between events, so its value just after the last
    // accepted or rejected candidate is a valid thinning bound.
    double t = 0.0;
    double excitation = 0.0;  // lambda(t) - mu just after t
    while (true) {
        const double bound = mu + excitation;
        if (!(bound > 0.0)) break;
        const double wait = -std::log1p(-unif(rng)) / bound;
        if (!(t + wait <= horizon)) break;
        excitation *= std::exp(-beta * wait);
        t += wait;
        if (unif(rng) * bound <= mu + excitation) {
            events.push_back(t);
            excitation += alpha;
        }
    }
    return events;
}

SimPath simulate_path(const SimConfig& config) {
    validate_sim_config(config);
    const DiurnalCurve curve = make_diurnal_curve(config.diurnal);

    const Eigen::Index n = static_cast<Eigen::Index>(config.m) * config.N;
    const double delta = config.delta;
    const double horizon = static_cast<double>(n) * delta;

    SimPath path;
    path.feller_satisfied =
        2.0 * config.sv.kappa * config.sv.theta >= config.sv.xi * config.sv.xi;

    // Jump block: Hawkes event times, then one Gaussian size per event.
    const std::vector<double> event_times =
        simulate_hawkes(config.hawkes.mu, config.hawkes.alpha, config.hawkes.beta,
                        horizon, splitmix64(config.seed ^ kHawkesTag));
    std::mt19937_64 size_rng(splitmix64(config.seed ^ kJumpSizeTag));
    std::normal_distribution<double> size_normal(config.jump_size.mean,
                                                 config.jump_size.stddev);
    Eigen::ArrayXd jump_sum = Eigen::ArrayXd::Zero(n);
    path.true_jump_times = event_times;
    path.true_jump_indices.reserve(event_times.size());
    path.true_jump_sizes.reserve(event_times.size());
    for (double time : event_times) {
        // The return at flat index j covers (delta*j, delta*(j+1)].
        Eigen::Index j = static_cast<Eigen::Index>(std::ceil(time / delta)) - 1;
        j = std::clamp<Eigen::Index>(j, 0, n - 1);
        const double size = size_normal(size_rng);
        path.true_jump_indices.push_back(j);
        path.true_jump_sizes.push_back(size);
        jump_sum(j) += size;
    }

    // Diffusion block: two standard normals per step, variance shock
    // correlated with the price shock by rho.
    std::mt19937_64 diff_rng(splitmix64(config.seed ^ kDiffusionTag));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double rho = config.sv.rho;
    const double rho_orth = std::sqrt(1.0 - rho * rho);

    Eigen::ArrayXd returns(n);
    path.true_spot_variance.resize(n);
    path.brownian_part.resize(n);
    double v = config.sv.v0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double z_price = normal(diff_rng);
        const double z_var = rho * z_price + rho_orth * normal(diff_rng);
        const double v_plus = std::max(v, 0.0);
        const double u = static_cast<double>(i % config.m) / config.m;
        const double spot_var = curve.tau_sq(u) * v_plus;
        path.true_spot_variance(i) = spot_var;
        path.brownian_part(i) = std::sqrt(spot_var * delta) * z_price;
        returns(i) = config.drift * delta + path.brownian_part(i) + jump_sum(i);
        v += config.sv.kappa * (config.sv.theta - v_plus) * delta +
             config.sv.xi * std::sqrt(v_plus * delta) * z_var;
    }

    path.grid = make_grid(std::move(returns), config.m, delta);
    return path;
}

ConfusionSummary match_detections(const std::vector<Eigen::Index>& true_indices,
                                  const std::vector<double>& true_sizes,
                                  const std::vector<Eigen::Index>& detected_indices,
                                  const Eigen::ArrayXd& detected_sizes,
                                  int tolerance_slots) {
    if (true_sizes.size() != true_indices.size())
        throw DataError("true sizes and indices disagree in length");
    if (detected_sizes.size() != static_cast<Eigen::Index>(detected_indices.size()))
        throw DataError("detected sizes and indices disagree in length");
    if (tolerance_slots < 0) throw ConfigError("tolerance_slots must be nonnegative");

    ConfusionSummary summary;
    summary.tolerance_slots = tolerance_slots;

    // Candidate pairs within tolerance, closest first; ties broken by index
    // order so the matching is deterministic.
    std::vector<std::tuple<Eigen::Index, std::size_t, std::size_t>> candidates;
    for (std::size_t d = 0; d < detected_indices.size(); ++d)
        for (std::size_t t = 0; t < true_indices.size(); ++t) {
            const Eigen::Index dist = std::abs(detected_indices[d] - true_indices[t]);
            if (dist <= tolerance_slots) candidates.emplace_back(dist, d, t);
        }
    std::sort(candidates.begin(), candidates.end());

    std::vector<char> used_detected(detected_indices.size(), 0);
    std::vector<char> used_true(true_indices.size(), 0);
    double err_sum = 0.0, abs_sum = 0.0, sq_sum = 0.0;
    for (const auto& [dist, d, t] : candidates) {
        if (used_detected[d] || used_true[t]) continue;
        used_detected[d] = 1;
        used_true[t] = 1;
        const double err = detected_sizes(static_cast<Eigen::Index>(d)) - true_sizes[t];
        err_sum += err;
        abs_sum += std::abs(err);
        sq_sum += err * err;
        ++summary.matched_pairs;
    }

    summary.true_positives = summary.matched_pairs;
    summary.false_positives =
        static_cast<int>(detected_indices.size()) - summary.true_positives;
    summary.false_negatives =
        static_cast<int>(true_indices.size()) - summary.true_positives;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    summary.precision = detected_indices.empty()
                            ? nan
                            : static_cast<double>(summary.true_positives) /
                                  static_cast<double>(detected_indices.size());
    summary.recall = true_indices.empty()
                         ? nan
                         : static_cast<double>(summary.true_positives) /
                               static_cast<double>(true_indices.size());
    if (summary.matched_pairs > 0) {
        summary.size_bias = err_sum / summary.matched_pairs;
        summary.size_mae = abs_sum / summary.matched_pairs;
        summary.size_rmse = std::sqrt(sq_sum / summary.matched_pairs);
    } else {
        summary.size_bias = summary.size_mae = summary.size_rmse = nan;
    }
    return summary;
}

ConfusionSummary evaluate_detection(const SimPath& path, const JumpReport& report,
                                    int tolerance_slots) {
    if (path.grid.m != report.m || path.grid.N != report.N)
        throw DataError("path grid " + std::to_string(path.grid.m) + "x" +
                        std::to_string(path.grid.N) + " does not match report grid " +
                        std::to_string(report.m) + "x" + std::to_string(report.N));
    return match_detections(path.true_jump_indices, path.true_jump_sizes,
                            report.jump_indices, report.sizes_deterministic,
                            tolerance_slots);
}

}  // namespace jumpdet
