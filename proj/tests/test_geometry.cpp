#include "catch_amalgamated.hpp"

#include "tdiff/box.hpp"
#include "tdiff/error.hpp"

#include <random>

using namespace tdiff;

namespace {

Box box1(const Rational& a, const Rational& b) { return Box::from_sides({Interval{a, b}}); }

Rational rnd_dyadic(std::mt19937_64& g, int level) {
    return Rational(static_cast<long>(g() % (1u << level)), 1L << level);
}

Box rnd_box(std::mt19937_64& g, int coords, int level) {
    std::vector<Interval> s;
    for (int c = 0; c < coords; ++c) {
        Rational a = rnd_dyadic(g, level), b = rnd_dyadic(g, level);
        if (a > b) std::swap(a, b);
        if (a == b) b = a + pow2(-level);
        s.push_back(Interval{a, b});
    }
    return Box::from_sides(s);
}

}  // namespace

TEST_CASE("measures") {
    CHECK(box_measure(Box::full()) == 1);
    CHECK(box_measure(Box::from_sides({{0, Rational(1, 2)}, {0, Rational(1, 2)}})) == Rational(1, 4));
    CHECK(box_measure(Box::from_sides({{0, Rational(1, 8)}, {0, Rational(1, 4)}, {0, Rational(1, 4)}})) == Rational(1, 128));
}

TEST_CASE("full sides are not stored") {
    Box b = Box::from_sides({{0, 1}, {0, Rational(1, 2)}});
    CHECK(b.sides().size() == 1);
    CHECK(b.max_coord() == 2);
    CHECK_FALSE(b.constrains(1));
}

TEST_CASE("intersections") {
    Box a = Box::from_sides({{0, Rational(1, 2)}, {0, Rational(1, 2)}});
    CHECK(*intersect_boxes(a, a) == a);
    CHECK_FALSE(intersect_boxes(box1(0, Rational(1, 2)), box1(Rational(1, 2), 1)));
    Box t = Box::from_sides({{Rational(3, 8), Rational(7, 8)}, {0, Rational(1, 2)}});
    auto x = intersect_boxes(a, t);
    REQUIRE(x);
    CHECK(*x == Box::from_sides({{Rational(3, 8), Rational(1, 2)}, {0, Rational(1, 2)}}));
    CHECK(x->measure() == Rational(1, 16));
}

TEST_CASE("translation with wrap") {
    Box b = box1(Rational(1, 4), Rational(1, 2));
    CHECK(translate_box(b, 1, 0) == BoxSet{b});
    CHECK(translate_box(box1(Rational(3, 4), 1), 1, Rational(1, 2)) == BoxSet{box1(Rational(1, 4), Rational(1, 2))});
    auto w = translate_box(box1(Rational(3, 5), Rational(9, 10)), 1, Rational(3, 10));
    REQUIRE(w.size() == 2);
    CHECK(total_measure(w) == Rational(3, 10));
    CHECK(std::find(w.begin(), w.end(), box1(Rational(9, 10), 1)) != w.end());
    CHECK(std::find(w.begin(), w.end(), box1(0, Rational(1, 5))) != w.end());
    CHECK_THROWS_AS(translate_box(b, 1, 1), InvalidArgument);
}

TEST_CASE("translation preserves measure") {
    std::mt19937_64 g(11);
    for (int k = 0; k < 1000; ++k) {
        Box b = rnd_box(g, 1 + static_cast<int>(g() % 4), 5);
        int coord = 1 + static_cast<int>(g() % 5);
        Rational shift = rnd_dyadic(g, 6);
        auto img = translate_box(b, coord, shift);
        REQUIRE(pairwise_disjoint(img));
        REQUIRE(total_measure(img) == b.measure());
    }
}

TEST_CASE("intersection never exceeds either box") {
    std::mt19937_64 g(5);
    for (int k = 0; k < 1000; ++k) {
        Box a = rnd_box(g, 3, 4), b = rnd_box(g, 3, 4);
        auto x = intersect_boxes(a, b);
        Rational m = x ? x->measure() : Rational(0);
        REQUIRE(m <= a.measure());
        REQUIRE(m <= b.measure());
    }
}

TEST_CASE("disjoint union and subtraction") {
    std::mt19937_64 g(3);
    for (int k = 0; k < 200; ++k) {
        std::vector<Box> v;
        for (int i = 0; i < 4; ++i) v.push_back(rnd_box(g, 2, 3));
        auto u = disjoint_union(v);
        REQUIRE(pairwise_disjoint(u));
        // inclusion-exclusion for two boxes
        auto x = intersect_boxes(v[0], v[1]);
        Rational ie = v[0].measure() + v[1].measure() - (x ? x->measure() : Rational(0));
        REQUIRE(union_measure({v[0], v[1]}) == ie);
        auto diff = subtract_box(v[0], v[1]);
        REQUIRE(total_measure(diff) == v[0].measure() - (x ? x->measure() : Rational(0)));
    }
    CHECK_THROWS_AS(make_boxset({box1(0, Rational(1, 2)), box1(Rational(1, 4), 1)}), InvalidArgument);
}

TEST_CASE("dyadic decomposition examples") {
    CHECK(dyadic_decompose({}, 0, 10).empty());
    auto one = dyadic_decompose({box1(Rational(3, 8), Rational(1, 2))}, 0, 3);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == box1(Rational(3, 8), Rational(1, 2)));
    auto two = dyadic_decompose({box1(Rational(1, 4), Rational(5, 8))}, 0, 3);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == box1(Rational(1, 4), Rational(1, 2)));
    CHECK(two[1] == box1(Rational(1, 2), Rational(5, 8)));
    CHECK_THROWS_AS(dyadic_decompose({box1(0, Rational(1, 3))}, 0, 10), InvalidArgument);
}

TEST_CASE("dyadic decomposition is sound and maximal") {
    std::mt19937_64 g(17);
    for (int k = 0; k < 60; ++k) {
        int coords = 1 + static_cast<int>(g() % 3);
        std::vector<Box> raw;
        for (int i = 0; i < 2; ++i) raw.push_back(rnd_box(g, coords, 3));
        BoxSet region = disjoint_union(raw);
        auto cubes = dyadic_decompose(region, 0, 3);
        REQUIRE(pairwise_disjoint(cubes));
        REQUIRE(total_measure(cubes) == total_measure(region));
        for (const Box& c : cubes) {
            bool inside = false;
            for (const Box& r : region) inside = inside || !boxes_disjoint(c, r);
            REQUIRE(inside);
            REQUIRE(union_measure([&] {
                        std::vector<Box> v{c};
                        for (const Box& r : region)
                            if (auto x = intersect_boxes(c, r)) v.push_back(*x);
                        return v;
                    }()) == c.measure());
        }
        // no 2^n siblings share a parent cube
        std::map<std::string, int> parents;
        for (const Box& c : cubes) {
            Rational side = c.side(1).length();
            if (side == 1) continue;
            std::vector<Interval> ps;
            int n = std::max(1, coords);
            for (int i = 1; i <= n; ++i) {
                Interval s = c.side(i);
                Rational a = Rational(floor_int(s.a / (2 * side))) * 2 * side;
                ps.push_back(Interval{a, a + 2 * side});
            }
            parents[Box::from_sides(ps).str()] += 1;
        }
        for (auto& [p, count] : parents) REQUIRE(count < (1 << std::max(1, coords)));
    }
}

TEST_CASE("metric") {
    std::vector<Rational> zero{0, 0};
    auto a = torus_metric(zero, zero, 2);
    CHECK(a.value == 0);
    CHECK(a.tail_lo == 0);
    CHECK(a.tail_hi == Rational(1, 4));
    CHECK(torus_metric({0, 0}, {Rational(1, 2), 0}, 2).value == Rational(1, 4));
    // distance wraps around the circle
    CHECK(torus_metric({Rational(1, 8)}, {Rational(7, 8)}, 1).value == Rational(1, 8));
}

TEST_CASE("diameter against sampling") {
    Box b = box1(0, Rational(1, 2));
    CHECK(box_diameter(b) == Rational(1, 2));
    CHECK(box_diameter(Box::full()) == Rational(1, 2));
    // dense grid of pairs on the first 4 coordinates, free tail bounded by 2^-4
    Box c = Box::from_sides({{0, Rational(1, 4)}, {0, Rational(1, 2)}});
    Rational best = 0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            std::vector<Rational> x{Rational(i, 32), Rational(j, 16), 0, 0};
            for (int k = 0; k < 8; ++k)
                for (int l = 0; l < 8; ++l) {
                    std::vector<Rational> y{Rational(k, 32), Rational(l, 16), Rational(1, 2), Rational(1, 2)};
                    Rational v = torus_metric(x, y, 4).value;
                    if (v > best) best = v;
                }
        }
    CHECK(best <= box_diameter(c));
    CHECK(box_diameter(c) - best <= Rational(1, 16) + Rational(1, 64));
}
