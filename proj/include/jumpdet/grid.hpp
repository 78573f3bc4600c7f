#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "jumpdet/types.hpp"

namespace jumpdet {

// Regular intraday panel of log-returns: N days of m slots each, stored flat in
// day-major order (slot i of day s at flat index s*m + i, 0-based internally;
// all user-facing indices are 1-based). Times are measured in financial years,
// so the return at flat index j covers the interval (delta*j, delta*(j+1)].
struct ReturnGrid {
    Eigen::ArrayXd returns;  // length n = m*N
    int m = 0;               // intraday slots per day
    int N = 0;               // number of days
    double delta = 0.0;      // slot length in financial years

    Eigen::Index n() const { return static_cast<Eigen::Index>(m) * N; }
    double horizon() const { return static_cast<double>(n()) * delta; }

    // Observation time t_j of flat index j (right endpoint of the interval).
    double time_of(Eigen::Index j) const { return delta * static_cast<double>(j + 1); }
    int day_of(Eigen::Index j) const { return static_cast<int>(j / m); }
    int slot_of(Eigen::Index j) const { return static_cast<int>(j % m); }

    // m x N view of the flat series, day s in column s.
    Eigen::Map<const Eigen::ArrayXXd> by_day() const {
        return {returns.data(), m, N};
    }
};

// Validates the invariants (m >= 2, delta > 0, length divisible by m, all
// entries finite) and assembles the grid. Throws DataError / ConfigError.
ReturnGrid make_grid(Eigen::ArrayXd returns, int m, double delta);

enum class InputLayout {
    returns,  // one decimal value per line, day-major order
    prices,   // "day_id,price" per line, day ids non-decreasing, m+1 prices per day
};

// Reads a returns or prices file into a grid. In prices layout the block size
// is inferred from the file and checked against m.
ReturnGrid load_returns(const std::string& path, int m, double delta,
                        InputLayout layout = InputLayout::returns);

// Converts per-day positive price blocks into within-day log-returns; no
// return straddles a day boundary (overnight moves are dropped).
ReturnGrid prices_to_log_returns(const std::vector<std::vector<double>>& day_blocks,
                                 double delta);

// Writes the flat return series one value per line with shortest round-trip
// formatting, so a load of the written file reproduces the grid bit-exactly.
void save_returns(const std::string& path, const ReturnGrid& grid);

}  // namespace jumpdet
