#include <doctest.h>

#include <cmath>

#include "jumpdet/tod.hpp"
#include "oracles.hpp"

using namespace jumpdet;

namespace {

const double kThreeSqrtPiHalf = 3.0 * std::sqrt(std::acos(-1.0) / 2.0);  // 3.7599424...

ReturnGrid gaussian_grid(int m, int N, double sd, std::uint64_t seed,
                         double delta = 1.0 / 19404.0) {
    return make_grid(oracle::to_eigen(oracle::gaussian_returns(m * N, sd, seed)), m, delta);
}

void check_relative(double actual, double expected, double tol = 1e-12) {
    if (expected == 0.0)
        CHECK(actual == 0.0);
    else
        CHECK(std::fabs(actual - expected) <= tol * std::fabs(expected));
}

}  // namespace

TEST_CASE("bipower_variation_day on fixed sequences") {
    Eigen::ArrayXd zeros = Eigen::ArrayXd::Zero(3);
    CHECK(bipower_variation_day(zeros) == 0.0);

    Eigen::ArrayXd ones = Eigen::ArrayXd::Ones(3);
    CHECK(bipower_variation_day(ones) == doctest::Approx(2.0));

    Eigen::ArrayXd pair(2);
    pair << 0.3, -0.2;
    CHECK(bipower_variation_day(pair) == doctest::Approx(0.06));

    Eigen::ArrayXd single(1);
    single << 1.0;
    CHECK_THROWS_AS(bipower_variation_day(single), ConfigError);
}

TEST_CASE("bar_alpha on fixed grids") {
    ReturnGrid zeros = make_grid(Eigen::ArrayXd::Zero(6), 3, 0.1);
    CHECK(bar_alpha(zeros) == 0.0);

    ReturnGrid unit = make_grid(Eigen::ArrayXd::Ones(2), 2, 0.1);
    CHECK(bar_alpha(unit) == doctest::Approx(kThreeSqrtPiHalf).epsilon(1e-12));
    CHECK(bar_alpha(unit) == doctest::Approx(3.7599424119465).epsilon(1e-10));

    Eigen::ArrayXd two_days(6);
    two_days << 1, 1, 1, 0, 0, 0;
    ReturnGrid grid = make_grid(two_days, 3, 0.1);
    // day BPVs are 2 and 0, mean 1
    CHECK(bar_alpha(grid) == doctest::Approx(kThreeSqrtPiHalf).epsilon(1e-12));
}

TEST_CASE("bar_alpha never crosses day boundaries") {
    // a huge return at the end of day 1 multiplies nothing on day 2
    Eigen::ArrayXd r(4);
    r << 0.0, 100.0, 1.0, 0.0;
    ReturnGrid grid = make_grid(r, 2, 0.1);
    CHECK(bar_alpha(grid) == 0.0);
}

TEST_CASE("raw_truncation_mask thresholds") {
    Eigen::ArrayXd r(4);
    r << 0.0, 0.1, -0.2, 0.0;
    ReturnGrid grid = make_grid(r, 2, 1.0 / 19404.0);

    auto zero_mask = raw_truncation_mask(grid, 0.0);
    CHECK(zero_mask(0));
    CHECK_FALSE(zero_mask(1));
    CHECK_FALSE(zero_mask(2));
    CHECK(zero_mask(3));

    // threshold = (1/77)^0.49 = 0.11914... with bar_alpha 1 and m=77
    ReturnGrid wide = make_grid(Eigen::ArrayXd::Constant(77, 0.1), 77, 1.0 / 19404.0);
    auto mask_low = raw_truncation_mask(wide, 1.0);
    CHECK(mask_low.all());
    ReturnGrid high = make_grid(Eigen::ArrayXd::Constant(77, 0.2), 77, 1.0 / 19404.0);
    CHECK_FALSE(raw_truncation_mask(high, 1.0).any());
    CHECK(std::pow(1.0 / 77.0, 0.49) == doctest::Approx(0.1191).epsilon(1e-3));
}

TEST_CASE("tod_profile is 1 on a slot-symmetric grid") {
    // constant returns: every slot has identical masked column sums
    ReturnGrid grid = make_grid(Eigen::ArrayXd::Constant(12, 0.02), 4, 0.1);
    TodProfile profile = tod_profile(grid);
    REQUIRE(profile.m() == 4);
    CHECK(profile.num_noi == 12);
    for (int i = 0; i < 4; ++i) {
        CHECK(profile.den_noi(i) == 3);
        CHECK(profile.tod(i) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("tod_profile matches the straight-loop oracle on a small grid") {
    std::vector<double> values = {0.01, 0.02, 0.01, 0.03};
    ReturnGrid grid = make_grid(oracle::to_eigen(values), 2, 0.1);
    TodProfile profile = tod_profile(grid);
    oracle::TodResult expected = oracle::tod_profile(values, 2, 0.49);
    check_relative(profile.bar_alpha, expected.bar_alpha);
    check_relative(profile.den_tod, expected.den_tod);
    CHECK(profile.num_noi == expected.num_noi);
    for (int i = 0; i < 2; ++i) {
        CHECK(profile.den_noi(i) == expected.den_noi[i]);
        check_relative(profile.tod(i), expected.tod[i]);
    }
}

TEST_CASE("tod_profile oracle equivalence on random small grids") {
    std::mt19937_64 meta(42);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2 + static_cast<int>(meta() % 4);   // 2..5
        const int N = 1 + static_cast<int>(meta() % 4);   // 1..4
        auto values = oracle::gaussian_returns(m * N, 0.01, meta());
        if (trial % 3 == 0) values[meta() % values.size()] = 0.5;  // plant a jump
        ReturnGrid grid = make_grid(oracle::to_eigen(values), m, 1.0 / 19404.0);
        TodProfile profile = tod_profile(grid);
        oracle::TodResult expected = oracle::tod_profile(values, m, 0.49);
        check_relative(profile.bar_alpha, expected.bar_alpha);
        check_relative(profile.den_tod, expected.den_tod);
        CHECK(profile.num_noi == expected.num_noi);
        for (int i = 0; i < m; ++i) {
            CHECK(profile.den_noi(i) == expected.den_noi[i]);
            if (expected.den_noi[i] == 0)
                CHECK_FALSE(profile.defined(i));
            else
                check_relative(profile.tod(i), expected.tod[i]);
        }
    }
}

TEST_CASE("tod_profile throws on an all-zero grid") {
    ReturnGrid grid = make_grid(Eigen::ArrayXd::Zero(4), 2, 0.1);
    CHECK_THROWS_AS(tod_profile(grid), DataError);
}

TEST_CASE("tod scale invariance and bar_alpha homogeneity") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        ReturnGrid grid = gaussian_grid(5, 4, 0.01, seed);
        TodProfile base = tod_profile(grid);
        for (double c : {0.1, 10.0, 1000.0}) {
            ReturnGrid scaled = make_grid(grid.returns * c, grid.m, grid.delta);
            TodProfile prof = tod_profile(scaled);
            check_relative(prof.bar_alpha, c * base.bar_alpha, 1e-12);
            CHECK(prof.num_noi == base.num_noi);
            for (int i = 0; i < grid.m; ++i)
                check_relative(prof.tod(i), base.tod(i), 1e-12);
        }
    }
}

TEST_CASE("tod day-permutation invariance") {
    ReturnGrid grid = gaussian_grid(3, 4, 0.01, 5);
    TodProfile base = tod_profile(grid);
    std::vector<int> perm = {3, 1, 0, 2};
    Eigen::ArrayXd permuted(grid.n());
    for (int s = 0; s < 4; ++s)
        permuted.segment(3 * s, 3) = grid.returns.segment(3 * perm[s], 3);
    TodProfile shuffled = tod_profile(make_grid(permuted, 3, grid.delta));
    check_relative(shuffled.bar_alpha, base.bar_alpha);
    for (int i = 0; i < 3; ++i) check_relative(shuffled.tod(i), base.tod(i));
}

TEST_CASE("a masked-out jump depresses TOD at unaffected slots") {
    ReturnGrid grid = gaussian_grid(4, 30, 0.01, 9);
    TodProfile base = tod_profile(grid);

    Eigen::ArrayXd bumped = grid.returns;
    bumped(4 * 7 + 2) = 5.0;  // large jump at slot 3 of day 8
    TodProfile with_jump = tod_profile(make_grid(bumped, 4, grid.delta));

    // the jump must actually be masked out for the comparison to make sense
    REQUIRE(with_jump.den_noi(2) == base.den_noi(2) - 1);
    for (int i = 0; i < 4; ++i) {
        if (i == 2) continue;
        if (with_jump.den_noi(i) == base.den_noi(i))
            CHECK(with_jump.tod(i) <= base.tod(i));
    }
}

TEST_CASE("cap_tod caps large factors and fills undefined slots") {
    TodProfile profile;
    profile.tod.resize(3);
    profile.tod << 0.8, 2.0, 1.5;
    profile.den_noi.resize(3);
    profile.den_noi << 5, 5, 5;
    TodProfile capped = cap_tod(profile, 1.5);
    CHECK(capped.tod(0) == 0.8);
    CHECK(capped.tod(1) == 1.5);
    CHECK(capped.tod(2) == 1.5);
    CHECK(capped.cap == 1.5);

    TodProfile small = profile;
    small.tod << 0.5, 1.0, 1.2;
    TodProfile unchanged = cap_tod(small, 1.5);
    for (int i = 0; i < 3; ++i) CHECK(unchanged.tod(i) == small.tod(i));

    TodProfile with_undef = profile;
    with_undef.den_noi(1) = 0;
    with_undef.tod(1) = std::nan("");
    TodProfile filled = cap_tod(with_undef, 1.5);
    CHECK(filled.tod(1) == 1.5);
    CHECK_FALSE(filled.defined(1));
    CHECK(filled.undefined_slots() == std::vector<int>{1});

    CHECK_THROWS_AS(cap_tod(profile, 0.0), ConfigError);
}

TEST_CASE("expand_tod tiles slots across days") {
    ReturnGrid grid = make_grid(Eigen::ArrayXd::Constant(4, 0.1), 2, 0.1);
    TodProfile profile;
    profile.tod.resize(2);
    profile.tod << 1.25, 0.75;
    profile.den_noi = Eigen::ArrayXi::Ones(2);
    Eigen::ArrayXd expanded = expand_tod(profile, grid);
    REQUIRE(expanded.size() == 4);
    CHECK(expanded(0) == 1.25);
    CHECK(expanded(1) == 0.75);
    CHECK(expanded(2) == 1.25);
    CHECK(expanded(3) == 0.75);

    TodProfile wrong;
    wrong.tod.resize(3);
    wrong.tod.setOnes();
    wrong.den_noi = Eigen::ArrayXi::Ones(3);
    CHECK_THROWS_AS(expand_tod(wrong, grid), DataError);

    // constant profile expands to a constant sequence; slicing a day recovers it
    TodProfile constant;
    constant.tod = Eigen::ArrayXd::Constant(2, 1.1);
    constant.den_noi = Eigen::ArrayXi::Ones(2);
    Eigen::ArrayXd tiled = expand_tod(constant, grid);
    CHECK((tiled == 1.1).all());
}
