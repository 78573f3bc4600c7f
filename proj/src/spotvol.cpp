#include "jumpdet/spotvol.hpp"

namespace jumpdet {

double delta_sequence_weight(double x, double fn0) {
    return (x >= 0.0 && x * fn0 < 1.0) ? fn0 : 0.0;
}

SpotVolSeries daily_spot_variance(const ReturnGrid& grid,
                                  Eigen::Ref<const Eigen::ArrayXd> truncated_sq) {
    if (truncated_sq.size() != grid.n())
        throw DataError("truncated_sq length " + std::to_string(truncated_sq.size()) +
                        " does not match grid size " + std::to_string(grid.n()));
    Eigen::Map<const Eigen::ArrayXXd> days(truncated_sq.data(), grid.m, grid.N);
    SpotVolSeries series;
    series.bandwidth_slots = grid.m;
    series.sigmaq_daily = days.colwise().sum().transpose() / (grid.m * grid.delta);
    return series;
}

Eigen::ArrayXd expand_daily(const SpotVolSeries& series, const ReturnGrid& grid) {
    if (series.sigmaq_daily.size() != grid.N)
        throw DataError("series has " + std::to_string(series.sigmaq_daily.size()) +
                        " days but grid has N=" + std::to_string(grid.N));
    Eigen::ArrayXd out(grid.n());
    Eigen::Map<Eigen::ArrayXXd>(out.data(), grid.m, grid.N).rowwise() =
        series.sigmaq_daily.transpose();
    return out;
}

}  // namespace jumpdet
