#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "jumpdet/grid.hpp"
#include "jumpdet/spotvol.hpp"
#include "jumpdet/tod.hpp"

namespace jumpdet {

struct DetectorConfig {
    double raw_multiplier = 6.0;     // coefficient of the initial raw threshold
    double round_multiplier = 2.0;   // coefficient of the per-round thresholds
    double tod_cap = 1.5;
    int max_rounds = 20;             // termination guarantee
    double truncation_exponent = 0.49;
};

// One detection round: the daily sigma^2 series behind its thresholds, the
// full threshold series, and the indices newly flagged in this round.
struct RoundRecord {
    int round = 0;                            // 1-based
    Eigen::ArrayXd sigmaq_daily;              // length N
    Eigen::ArrayXd thresholds;                // length n
    std::vector<Eigen::Index> new_indices;    // 0-based flat indices, ascending
};

struct JumpReport {
    int m = 0;
    int N = 0;
    double delta = 0.0;
    DetectorConfig config;

    std::vector<Eigen::Index> jump_indices;   // ascending union of per-round detections
    std::vector<double> jump_times;           // delta*(index+1)
    std::vector<int> detection_round;         // round that flagged each jump
    std::vector<double> detection_threshold;  // threshold the jump exceeded
    Eigen::ArrayXd sizes_deterministic;       // r_j - sqrt(sigma_sq)*sqrt(delta)
    Eigen::ArrayXd sizes_randomized;          // empty until requested (needs a seed)

    std::vector<RoundRecord> rounds;
    Eigen::ArrayXd final_sigmaq_daily;        // series behind the terminal round's thresholds
    TodProfile tod;                           // capped profile used for thresholds
    double bar_alpha = 0.0;
    double modulus_mc = 0.0;
    bool converged = true;                    // false iff max_rounds hit with detections pending
    bool degenerate = false;                  // all-zero input, nothing estimable

    Eigen::Index n() const { return static_cast<Eigen::Index>(m) * N; }
    std::size_t total_jumps() const { return jump_indices.size(); }
};

// sqrt(2*delta*log(1/delta)): asymptotic bound on the Brownian increment over
// an interval of length delta. Requires 0 < delta < 1.
double modulus_of_continuity(double delta);

// Scalar first-pass threshold raw_multiplier * bar_alpha * mc(delta).
double initial_raw_threshold(double bar_alpha_value, double delta,
                             double raw_multiplier = 6.0);

// threshold(j) = round_multiplier * tod_glob(j) * sqrt(sigmaq_glob(j)) * mc(delta).
Eigen::ArrayXd round_thresholds(Eigen::Ref<const Eigen::ArrayXd> tod_glob,
                                Eigen::Ref<const Eigen::ArrayXd> sigmaq_glob,
                                double delta, double round_multiplier = 2.0);

// Recursive threshold detection:
//   round 0   truncate at the scalar raw threshold, estimate daily sigma^2;
//   round 1   flag |r_j| > threshold(j) on the raw returns;
//   round k>1 flag exceedances of the previous round's truncated series;
//   after each detecting round, re-truncate the raw returns at that round's
//   thresholds and re-estimate sigma^2; stop at the first round with no new
//   detections or at max_rounds (reported as non-converged).
// Exceedance is strict (>), truncation non-strict (<=); every round compares
// |truncated return| against the unsquared threshold. Deterministic sizes use
// the sigma^2 series behind the terminal round's thresholds.
JumpReport detect_jumps(const ReturnGrid& grid, const DetectorConfig& config = {});

enum class SizeMode { deterministic, randomized };

// size(j) = r_j - sqrt(sigmaq_glob(j))*sqrt(delta), with the Brownian draw
// replaced by a seeded standard normal Z_j in randomized mode.
Eigen::ArrayXd jump_sizes(const ReturnGrid& grid,
                          Eigen::Ref<const Eigen::ArrayXd> sigmaq_glob,
                          const std::vector<Eigen::Index>& jump_indices,
                          SizeMode mode, std::uint64_t seed = 0);

}  // namespace jumpdet
