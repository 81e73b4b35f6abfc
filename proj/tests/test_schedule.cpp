#include "catch_amalgamated.hpp"

#include "tdiff/error.hpp"
#include "tdiff/schedule.hpp"

using namespace tdiff;

TEST_CASE("solve_m examples") {
    CHECK(solve_m(1, 1, Rational(1, 2)) == 1);
    CHECK(solve_m(4, 4, Rational(1, 4)) == 3);
    // eps near 2^{-1/2}/2, as a dyadic just below it
    CHECK(solve_m(2, 2, Rational(181, 1024)) == 2);
    CHECK(solve_m(2, 2, Rational(1, 4)) == 2);
    CHECK_THROWS_AS(solve_m(1, 3, Rational(1, 8)), InvalidArgument);
}

TEST_CASE("geq schedule for p0 = 2") {
    auto s = schedule_geq(Rational(2), 3);
    REQUIRE(s.depth() == 3);
    CHECK(s.level(1).d == 1);
    CHECK(s.level(1).eps == Rational(1, 2));
    CHECK(s.level(1).m == 1);
    CHECK(s.level(2).m == 2);
    CHECK(s.level(3).m == 3);
    CHECK(s.level(2).target.lo() == Catch::Approx(std::sqrt(0.5) / 2).epsilon(1e-15));
    CHECK(s.level(3).target.lo() == Catch::Approx(1 / std::sqrt(3.0) / 2).epsilon(1e-15));
    CHECK(check_schedule(s).ok());
    CHECK_FALSE(s.degenerate);
    CHECK(schedule_geq(Rational(1), 2).degenerate);
}

TEST_CASE("frozen eps and m for levels 1..8") {
    // independent oracle: largest power of two not above j^{-1/2}/2, then the m bound
    std::vector<Rational> eps{Rational(1, 2), Rational(1, 4), Rational(1, 4), Rational(1, 4),
                              Rational(1, 8), Rational(1, 8), Rational(1, 8), Rational(1, 8)};
    std::vector<int> m{1, 2, 3, 3, 4, 4, 4, 4};
    auto s = schedule_geq(Rational(2), 8);
    for (int j = 1; j <= 8; ++j) {
        CHECK(s.level(j).eps == eps[j - 1]);
        CHECK(s.level(j).m == m[j - 1]);
    }
}

TEST_CASE("gt schedule") {
    auto s = schedule_gt(Rational(2), 1);
    CHECK(s.level(1).target.lo() == Catch::Approx(std::log(2.0) / 2).epsilon(1e-15));
    CHECK(s.level(1).eps == Rational(1, 4));
    CHECK(check_schedule(schedule_gt(Rational(2), 20)).ok());
}

TEST_CASE("quantization stays in the band") {
    for (auto p0 : {Rational(1), Rational(3, 2), Rational(2), Rational(5)}) {
        for (int bits : {0, 3}) {
            auto a = schedule_geq(p0, 64, bits);
            auto ra = check_schedule(a);
            INFO(ra.summary());
            CHECK(ra.ok());
            auto b = schedule_gt(p0, 64, bits);
            CHECK(check_schedule(b).ok());
        }
    }
}

TEST_CASE("finer granularity") {
    auto s = schedule_geq(Rational(2), 2, 4);
    // 2^{-1/2}/2 = 0.35355..., 4 extra bits below 2^-2 give floor(64 t)/64 = 22/64
    CHECK(s.level(2).eps == Rational(11, 32));
}

TEST_CASE("range classification") {
    auto geq = schedule_geq(Rational(2), 1);
    for (auto p : {Rational(2), Rational(3), Rational(10)}) CHECK(classify_diff_range(geq, p) == Range::in);
    for (auto p : {Rational(1), Rational(3, 2), Rational(199, 100)}) CHECK(classify_diff_range(geq, p) == Range::out);
    auto gt = schedule_gt(Rational(2), 1);
    CHECK(classify_diff_range(gt, Rational(2)) == Range::out);
    for (auto p : {Rational(201, 100), Rational(3)}) CHECK(classify_diff_range(gt, p) == Range::in);
    CHECK_THROWS_AS(classify_diff_range(custom_schedule({{1, Rational(1, 2)}}), Rational(2)), InvalidArgument);
}
