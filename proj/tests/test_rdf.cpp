#include "catch_amalgamated.hpp"

#include "tdiff/error.hpp"
#include "tdiff/rdf.hpp"

using namespace tdiff;

namespace {

Box cube(std::initializer_list<Rational> sides) {
    std::vector<Interval> s;
    for (const auto& x : sides) s.push_back(Interval{Rational(0), x});
    return Box::from_sides(s);
}

}  // namespace

TEST_CASE("table rows") {
    CHECK(v_cell(1).box() == cube({Rational(1, 2)}));
    CHECK(v_cell(2).box() == cube({Rational(1, 2), Rational(1, 2)}));
    CHECK(v_cell(6).box() == cube({Rational(1, 4), Rational(1, 4), Rational(1, 4)}));
    CHECK(v_cell(7).box() == cube({Rational(1, 8), Rational(1, 4), Rational(1, 4)}));
    CHECK(v_cell(10).box() == cube({Rational(1, 8), Rational(1, 8), Rational(1, 8), Rational(1, 2)}));
    CHECK(v_cell(7).measure() == Rational(1, 128));
}

TEST_CASE("measure halves at every step") {
    for (long m = 1; m <= 60; ++m) REQUIRE(v_cell(m + 1).measure() * 2 == v_cell(m).measure());
}

TEST_CASE("Q cubes") {
    CHECK(q_cube(1).measure() == Rational(1, 4));
    CHECK(q_cube(2) == cube({Rational(1, 4), Rational(1, 4), Rational(1, 4)}));
    for (int k = 1; k <= 6; ++k) {
        CHECK(v_cell(static_cast<long>(k) * k + k).box() == q_cube(k));
        CHECK(q_cube(k).measure() * Rational(CornerGrid(k).size()) == 1);
    }
}

TEST_CASE("H_m translates tile the torus") {
    for (long m = 1; m <= 20; ++m) {
        HGrid h(m);
        Rational cell = v_cell(m).measure();
        BigInt n = 0;
        for (; !h.done(); h.next()) n += 1;
        REQUIRE(n == h.size());
        REQUIRE(Rational(n) * cell == 1);
    }
    // small case: the translates are pairwise disjoint
    HGrid h(5);
    std::vector<Box> tiles;
    for (; !h.done(); h.next()) tiles.push_back(v_cell(5).box().shifted(h.corner()));
    CHECK(pairwise_disjoint(tiles));
}

TEST_CASE("splitting into Q cubes") {
    CHECK(split_into_qcubes(Box::full(), 2).size() == 64);
    CHECK(split_into_qcubes(q_cube(1), 2).size() == 16);
    auto self = split_into_qcubes(q_cube(2), 2);
    REQUIRE(self.size() == 1);
    CHECK(self[0] == q_cube(2));
    CHECK(count_qcubes(Box::full(), 5) == pow2_int(30));
    CHECK_THROWS_AS(split_into_qcubes(cube({Rational(3, 8)}), 2), InvalidArgument);
    auto cubes = split_into_qcubes(q_cube(1), 3);
    CHECK(pairwise_disjoint(cubes));
    CHECK(total_measure(cubes) == q_cube(1).measure());
}

TEST_CASE("membership in R0") {
    auto a = is_rdf0_element(cube({Rational(1, 2)}));
    CHECK(a.member);
    CHECK(a.m == 1);
    auto b = is_rdf0_element(Box::from_sides({Interval{Rational(1, 2), 1}}));
    CHECK(b.member);
    CHECK(b.m == 1);
    CHECK(b.corner.at(0) == Rational(1, 2));
    CHECK_FALSE(is_rdf0_element(cube({Rational(1, 3)})).member);
    // side pattern not in the table
    CHECK_FALSE(is_rdf0_element(cube({Rational(1, 2), Rational(1, 4)})).member);
    // misaligned corner
    CHECK_FALSE(is_rdf0_element(Box::from_sides({Interval{Rational(1, 4), Rational(3, 4)}})).member);
    auto q = is_rdf0_element(q_cube(3).shifted({Rational(1, 8), 0, Rational(5, 8), Rational(7, 8)}));
    CHECK(q.member);
    CHECK(q.m == 12);
}

TEST_CASE("Q-block decomposition") {
    Box b = Box::from_sides({Interval{Rational(3, 8), Rational(1, 2)}, Interval{0, Rational(1, 4)}});
    auto blocks = qblocks_of_box(b, 2);
    Rational tot = 0;
    std::vector<Box> regions;
    for (const auto& q : blocks) {
        CHECK(q.aligned());
        CHECK(q.level >= 2);
        tot += q.region.measure();
        regions.push_back(q.region);
        CHECK(Rational(q.count()) * q_cube(q.level).measure() == q.region.measure());
    }
    CHECK(tot == b.measure());
    CHECK(pairwise_disjoint(regions));
}
