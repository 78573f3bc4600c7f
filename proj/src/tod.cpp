#include "jumpdet/tod.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace jumpdet {

std::vector<int> TodProfile::undefined_slots() const {
    std::vector<int> slots;
    for (int i = 0; i < m(); ++i)
        if (den_noi(i) == 0) slots.push_back(i);
    return slots;
}

double bipower_variation_day(Eigen::Ref<const Eigen::ArrayXd> day_returns) {
    if (day_returns.size() < 2)
        throw ConfigError("bipower variation needs at least 2 returns, got " +
                          std::to_string(day_returns.size()));
    const Eigen::Index m = day_returns.size();
    return (day_returns.tail(m - 1).abs() * day_returns.head(m - 1).abs()).sum();
}

double bar_alpha(const ReturnGrid& grid) {
    auto days = grid.by_day();
    double bpv_total =
        (days.bottomRows(grid.m - 1).abs() * days.topRows(grid.m - 1).abs()).sum();
    return 3.0 * std::sqrt(std::numbers::pi / 2.0) * std::sqrt(bpv_total / grid.N);
}

Eigen::Array<bool, Eigen::Dynamic, 1> raw_truncation_mask(const ReturnGrid& grid,
                                                          double bar_alpha_value,
                                                          double exponent) {
    if (bar_alpha_value < 0.0)
        throw ConfigError("bar_alpha must be nonnegative");
    const double threshold =
        bar_alpha_value * std::pow(1.0 / static_cast<double>(grid.m), exponent);
    return grid.returns.abs() <= threshold;
}

TodProfile tod_profile(const ReturnGrid& grid, double exponent) {
    TodProfile profile;
    profile.bar_alpha = bar_alpha(grid);
    profile.den_tod = grid.returns.square().sum();
    if (!(profile.den_tod > 0.0))
        throw DataError("degenerate input: realized variance is zero");

    auto mask = raw_truncation_mask(grid, profile.bar_alpha, exponent);
    Eigen::ArrayXd mask_d = mask.cast<double>();
    Eigen::ArrayXd masked_sq = grid.returns.square() * mask_d;
    profile.num_noi = static_cast<long>(mask.count());

    Eigen::Map<const Eigen::ArrayXXd> sq_days(masked_sq.data(), grid.m, grid.N);
    Eigen::Map<const Eigen::ArrayXXd> mask_days(mask_d.data(), grid.m, grid.N);
    Eigen::ArrayXd numer_tod = sq_days.rowwise().sum();
    profile.den_noi = mask_days.rowwise().sum().cast<int>();

    profile.tod.resize(grid.m);
    for (int i = 0; i < grid.m; ++i) {
        if (profile.den_noi(i) == 0) {
            profile.tod(i) = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        double noi = static_cast<double>(profile.num_noi) / profile.den_noi(i);
        profile.tod(i) = noi * numer_tod(i) / profile.den_tod;
    }
    return profile;
}

TodProfile cap_tod(TodProfile profile, double cap) {
    if (!(cap > 0.0)) throw ConfigError("cap must be positive, got " + std::to_string(cap));
    for (int i = 0; i < profile.m(); ++i)
        profile.tod(i) = profile.defined(i) ? std::min(cap, profile.tod(i)) : cap;
    profile.cap = cap;
    return profile;
}

Eigen::ArrayXd expand_tod(const TodProfile& profile, const ReturnGrid& grid) {
    if (profile.m() != grid.m)
        throw DataError("profile has " + std::to_string(profile.m()) +
                        " slots but grid has m=" + std::to_string(grid.m));
    return profile.tod.replicate(grid.N, 1);
}

}  // namespace jumpdet
