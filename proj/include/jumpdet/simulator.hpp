#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "jumpdet/detector.hpp"
#include "jumpdet/grid.hpp"

namespace jumpdet {

// Square-root variance diffusion dv = kappa*(theta - v)dt + xi*sqrt(v)dB,
// discretized with the full-truncation Euler scheme; rho correlates the price
// and variance shocks (leverage).
struct SvParams {
    double theta = 0.04;  // long-run variance, annualized
    double kappa = 5.0;   // mean-reversion speed, 1/years
    double xi = 0.5;      // vol-of-vol
    double rho = -0.5;    // leverage correlation, in [-1, 0]
    double v0 = 0.04;     // initial variance
};

// Multiplicative intraday volatility shape tau(u) = C + A*exp(-a*u) +
// B*exp(-b*(1-u)) on the intraday fraction u in [0,1]. When level is unset,
// C is solved so that the mean of tau^2 over [0,1] equals 1, which keeps
// annualized volatility levels comparable with and without the shape.
struct DiurnalParams {
    double amp_open = 0.75;        // A
    double rate_open = 10.0;       // a
    double amp_close = 0.75;       // B
    double rate_close = 10.0;      // b
    std::optional<double> level;   // C
};

struct DiurnalCurve {
    double A = 0.0, a = 1.0, B = 0.0, b = 1.0, C = 1.0;

    double tau(double u) const {
        return C + A * std::exp(-a * u) + B * std::exp(-b * (1.0 - u));
    }
    double tau_sq(double u) const {
        double t = tau(u);
        return t * t;
    }
};

// Self-exciting arrivals with intensity mu + sum alpha*exp(-beta*(t - t_k)).
struct HawkesParams {
    double mu = 25.0;      // baseline intensity, events/year
    double alpha = 1000.0; // excitation jump of the intensity
    double beta = 2000.0;  // intensity decay, must exceed alpha
};

struct JumpSizeParams {
    double mean = -0.004;  // log-price units
    double stddev = 0.02;
};

struct SimConfig {
    int m = 77;
    int N = 252;
    double delta = 1.0 / (252.0 * 77.0);
    SvParams sv;
    DiurnalParams diurnal;
    HawkesParams hawkes;
    JumpSizeParams jump_size;
    double drift = 0.0;    // constant drift b, 1/years
    std::uint64_t seed = 1;
};

struct SimPath {
    ReturnGrid grid;
    Eigen::ArrayXd true_spot_variance;       // tau^2(u_j) * v_j per slot
    Eigen::ArrayXd brownian_part;            // the retained sigma*dW increments
    std::vector<Eigen::Index> true_jump_indices;  // one entry per jump event
    std::vector<double> true_jump_times;
    std::vector<double> true_jump_sizes;
    bool feller_satisfied = true;            // 2*kappa*theta >= xi^2
};

struct ConfusionSummary {
    int true_positives = 0;
    int false_positives = 0;
    int false_negatives = 0;
    int matched_pairs = 0;
    int tolerance_slots = 0;
    double precision = 0.0;  // NaN when there are no detections
    double recall = 0.0;     // NaN when there are no true jumps
    double size_bias = 0.0;  // mean(detected - true) over matched pairs, NaN if none
    double size_mae = 0.0;
    double size_rmse = 0.0;
};

// Stateless seed mixer used to derive independent substreams (diffusion,
// Hawkes arrivals, jump sizes) from one path seed.
std::uint64_t splitmix64(std::uint64_t x);

// Solves C so that the mean of tau^2 over [0,1] is 1, then checks tau > 0 on
// a fine grid. Throws ConfigError when no such positive shape exists.
DiurnalCurve make_diurnal_curve(const DiurnalParams& params);

// Ogata thinning with the exponential kernel; returns strictly positive event
// times up to the horizon, deterministic per seed. Requires 0 <= alpha < beta.
std::vector<double> simulate_hawkes(double mu, double alpha, double beta,
                                    double horizon, std::uint64_t seed);

// Full path simulation on the delta grid: full-truncation Euler variance,
// diurnal multiplier on the spot volatility, correlated shocks, Hawkes jump
// times with Gaussian sizes landing in their enclosing slot. Overnight
// variance carries over; the clock is the trading clock.
SimPath simulate_path(const SimConfig& config);

// Greedy nearest matching of detected to true jump indices within
// +-tolerance_slots; each true jump is matched at most once. Size errors are
// computed on matched pairs (detected size minus true size).
ConfusionSummary match_detections(const std::vector<Eigen::Index>& true_indices,
                                  const std::vector<double>& true_sizes,
                                  const std::vector<Eigen::Index>& detected_indices,
                                  const Eigen::ArrayXd& detected_sizes,
                                  int tolerance_slots);

// match_detections on a simulated path and a detector report, after checking
// that both refer to the same grid dimensions.
ConfusionSummary evaluate_detection(const SimPath& path, const JumpReport& report,
                                    int tolerance_slots = 0);

}  // namespace jumpdet
