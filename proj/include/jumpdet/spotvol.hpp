#pragma once

#include <Eigen/Dense>

#include "jumpdet/grid.hpp"

namespace jumpdet {

// Per-day annualized squared-volatility estimates from truncated squared
// returns, one value per day, window anchored at the day's first return.
struct SpotVolSeries {
    Eigen::ArrayXd sigmaq_daily;  // length N
    int bandwidth_slots = 0;      // window length in slots (default: m, one day)
};

// Indicator-kernel delta-sequence weight: fn0 on [0, 1/fn0), else 0.
double delta_sequence_weight(double x, double fn0);

// Uniform kernel over [0, bandwidth) with weight 1/bandwidth. The window test
// compares the offset against the bandwidth value itself, so a window of k
// slots selects exactly k returns for any delta (offsets are built as
// slot_difference * delta and the boundary offset equals the bandwidth
// bit-for-bit, which the strict upper comparison excludes).
struct IndicatorKernel {
    double bandwidth = 0.0;  // window length in years

    double operator()(double x) const {
        return (x >= 0.0 && x < bandwidth) ? 1.0 / bandwidth : 0.0;
    }
};

// General delta-sequence estimator: sigma_sq(day j) = sum_l kernel(x_l) * q_l
// with x_l the offset of observation l from day j's first return. Weights are
// used as-is; no renormalization for bandwidths other than one day.
template <class Kernel>
Eigen::ArrayXd kernel_spot_variance(const ReturnGrid& grid,
                                    Eigen::Ref<const Eigen::ArrayXd> truncated_sq,
                                    const Kernel& kernel) {
    if (truncated_sq.size() != grid.n())
        throw DataError("truncated_sq length " + std::to_string(truncated_sq.size()) +
                        " does not match grid size " + std::to_string(grid.n()));
    Eigen::ArrayXd out(grid.N);
    for (int j = 0; j < grid.N; ++j) {
        const Eigen::Index anchor = static_cast<Eigen::Index>(j) * grid.m;
        double acc = 0.0;
        for (Eigen::Index l = 0; l < grid.n(); ++l)
            acc += kernel(static_cast<double>(l - anchor) * grid.delta) * truncated_sq(l);
        out(j) = acc;
    }
    return out;
}

// Closed form of the kernel sum for the default one-day indicator window:
// sigma_sq(day j) = (sum of day j's truncated squared returns) / (m*delta).
SpotVolSeries daily_spot_variance(const ReturnGrid& grid,
                                  Eigen::Ref<const Eigen::ArrayXd> truncated_sq);

// Tiles the daily estimates across slots: output(j*m + i) == sigmaq_daily(j).
Eigen::ArrayXd expand_daily(const SpotVolSeries& series, const ReturnGrid& grid);

}  // namespace jumpdet
