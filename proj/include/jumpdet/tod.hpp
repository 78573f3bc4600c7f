#pragma once

#include <Eigen/Dense>
#include <vector>

#include "jumpdet/grid.hpp"

namespace jumpdet {

// Per-slot time-of-day volatility factors. TOD(i) multiplies the average daily
// volatility level to account for the intraday U-shape. Slots where every day
// was truncated away (den_noi == 0) have no defined factor and hold NaN until
// cap_tod substitutes the cap.
struct TodProfile {
    Eigen::ArrayXd tod;      // length m
    Eigen::ArrayXi den_noi;  // length m, count of no-jump days per slot
    double bar_alpha = 0.0;  // dimensionless average daily volatility level
    long num_noi = 0;        // total count of returns below the raw threshold
    double den_tod = 0.0;    // realized variance of the whole sample
    double cap = 0.0;        // 0 until cap_tod has been applied

    int m() const { return static_cast<int>(tod.size()); }
    bool defined(int slot) const { return den_noi(slot) > 0; }
    std::vector<int> undefined_slots() const;  // 0-based
};

// Sum of adjacent absolute-return products within one day; never crosses
// day boundaries. Requires at least two returns.
double bipower_variation_day(Eigen::Ref<const Eigen::ArrayXd> day_returns);

// 3*sqrt(pi/2)*sqrt(mean daily bipower variation): raw average daily
// volatility level used to build the initial truncation.
double bar_alpha(const ReturnGrid& grid);

// mask(j) true iff |r_j| <= bar_alpha * (1/m)^exponent (non-strict, so an
// all-zero series is fully retained even when bar_alpha is 0).
Eigen::Array<bool, Eigen::Dynamic, 1> raw_truncation_mask(const ReturnGrid& grid,
                                                          double bar_alpha_value,
                                                          double exponent = 0.49);

// Full per-slot estimation: TOD(i) = (num_noi / den_noi(i)) * numer_tod(i) / den_tod
// where numer_tod(i) sums the masked squared returns of slot i across days and
// den_tod is the realized variance. Throws DataError when den_tod == 0.
TodProfile tod_profile(const ReturnGrid& grid, double exponent = 0.49);

// Replaces each defined factor with min(cap, tod(i)); undefined slots get the
// cap itself as a conservative fallback (a high factor raises the threshold
// there instead of injecting NaN into it).
TodProfile cap_tod(TodProfile profile, double cap = 1.5);

// Tiles the per-slot factors across days: output(s*m + i) == tod(i).
Eigen::ArrayXd expand_tod(const TodProfile& profile, const ReturnGrid& grid);

}  // namespace jumpdet
