#include "catch_amalgamated.hpp"

#include "tdiff/configuration.hpp"
#include "tdiff/error.hpp"
#include "tdiff/rdf.hpp"

#include <random>

using namespace tdiff;

namespace {

Box cube(std::vector<Rational> sides) {
    std::vector<Interval> s;
    for (const auto& x : sides) s.push_back(Interval{Rational(0), x});
    return Box::from_sides(s);
}

}  // namespace

TEST_CASE("figure configuration") {
    Box q0 = cube({Rational(1, 2), Rational(1, 2)});
    auto c = make_configuration(q0, Rational(1, 4), 2);
    REQUIRE(c.translates.size() == 2);
    CHECK(c.translates[0] == Box::from_sides({{Rational(3, 8), Rational(7, 8)}, {0, Rational(1, 2)}}));
    CHECK(c.translates[1] == Box::from_sides({{0, Rational(1, 2)}, {Rational(3, 8), Rational(7, 8)}}));
    CHECK(c.union_measure() == Rational(5, 8));
    CHECK_THROWS_AS(make_configuration(q0, Rational(1, 4), 3), InvalidArgument);
    CHECK_THROWS_AS(make_configuration(q0, Rational(3, 4), 2), InvalidArgument);
    CHECK_THROWS_AS(make_configuration(q0, Rational(0), 2), InvalidArgument);
    try {
        make_configuration(q0, Rational(1, 4), 3);
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("2^-5") != std::string::npos);
    }
    auto h = make_configuration(cube({Rational(1, 2)}), Rational(1, 2), 1);
    CHECK(intersect_boxes(h.q0, h.translates[0])->measure() == Rational(1, 4));
}

TEST_CASE("cells") {
    auto c1 = make_configuration(cube({Rational(1, 2)}), Rational(1, 2), 1);
    auto cells1 = configuration_cells(c1);
    REQUIRE(cells1.size() == 3);
    for (const auto& c : cells1) CHECK(c.box.measure() == Rational(1, 4));
    auto c2 = make_configuration(cube({Rational(1, 2), Rational(1, 2)}), Rational(1, 4), 2);
    auto cells2 = configuration_cells(c2);
    REQUIRE(cells2.size() == 6);
    Rational tot = 0;
    for (const auto& c : cells2) tot += c.box.measure();
    CHECK(tot == Rational(5, 2) * c2.q0.measure());
    auto big = make_configuration(q_cube(13), Rational(1, 4), 13);
    CHECK_THROWS_AS(configuration_cells(big), CapExceeded);
    auto led = cell_measure_ledger(big);
    CHECK(led.total == big.union_measure());
}

TEST_CASE("randomized configuration identities") {
    std::mt19937_64 g(2024);
    for (int k = 0; k < 200; ++k) {
        int d = 1 + static_cast<int>(g() % 8);
        Rational eps = make_rational(1 + static_cast<long>(g() % 8), 16);
        int extra = static_cast<int>(g() % 3);
        // sides 2^-e with total exponent large enough for the measure bound
        std::vector<Rational> sides;
        long total = 0;
        for (int i = 0; i < d + extra; ++i) {
            int e = 1 + static_cast<int>(g() % 4);
            sides.push_back(pow2(-e));
            total += e;
        }
        long need = static_cast<long>(d - 1) * (d - 1) + 1;
        if (total < need) sides.back() *= pow2(-(need - total));
        auto c = make_configuration(cube(sides), eps, d);
        auto mem = c.members();
        REQUIRE(union_measure(mem) == (1 + Rational(d) - eps * d) * c.q0.measure());
        REQUIRE(c.union_measure() == union_measure(mem));
        for (int i = 1; i <= d; ++i) {
            REQUIRE(intersect_boxes(mem[i], mem[0])->measure() == eps * mem[0].measure());
            for (int j = i + 1; j <= d; ++j) {
                auto x = intersect_boxes(mem[i], mem[j]);
                REQUIRE(x);
                REQUIRE(mem[0].contains(*x));
            }
        }
        auto cells = configuration_cells(c);
        REQUIRE(cells.size() == (std::size_t(1) << d) + d);
        std::vector<Box> cb;
        for (const auto& x : cells) cb.push_back(x.box);
        REQUIRE(pairwise_disjoint(cb));
        REQUIRE(total_measure(cb) == c.union_measure());
    }
}

TEST_CASE("norm oracle") {
    auto a = config_norm_oracle(Rational(1, 8), 1, Rational(2));
    CHECK(a.regime == NormRegime::small);
    CHECK(a.value == 1);
    auto b = config_norm_oracle(Rational(1, 2), 1, Rational(2));
    CHECK(b.regime == NormRegime::log);
    CHECK(static_cast<double>(b.value) == Catch::Approx(2 / std::log(4.0)).epsilon(1e-12));
    auto c = config_norm_oracle(Rational(1, 2), 4096, Rational(2));
    CHECK(c.regime == NormRegime::linear);
    CHECK(static_cast<double>(c.value) == Catch::Approx(32 * std::exp(1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(config_norm_oracle(Rational(1, 2), 1, Rational(1)), InvalidArgument);
}

TEST_CASE("norm oracle is monotone in A_p") {
    for (auto p : {Rational(3, 2), Rational(2), Rational(3)}) {
        long double prev = 0, prev_a = 0;
        // A_p = eps d^{1/p} with eps fixed and d growing
        for (long d = 1; d <= 1000; ++d) {
            auto o = config_norm_oracle(Rational(1, 4), d, p);
            REQUIRE(o.a_p >= prev_a);
            REQUIRE(o.value >= prev - 1e-15L);
            prev = o.value;
            prev_a = o.a_p;
        }
    }
}

TEST_CASE("weak-type lower bound") {
    CHECK(weak_type_lower_search({}, Rational(2), 10, 1).lower_bound == 0);
    auto c = make_configuration(cube({Rational(1, 2), Rational(1, 2)}), Rational(1, 4), 2);
    auto r = weak_type_lower_search(c.members(), Rational(2), 50, 1);
    CHECK(r.lower_bound >= 1);
    // constant function: every average is 1, and the torus itself is in the collection
    auto coll = c.members();
    coll.push_back(Box::full());
    auto w = weak_type_ratio(coll, ExplicitFunction::constant(1), Rational(2));
    CHECK(w.value.contains(Rational(1)));
}

TEST_CASE("averages") {
    auto c = make_configuration(cube({Rational(1, 2), Rational(1, 2)}), Rational(1, 4), 2);
    CHECK(average(ExplicitFunction::indicator(c.q0), c.q0) == 1);
    CHECK(average(ExplicitFunction::indicator(c.q0, Rational(4)), c.translates[0]) == 1);
    CHECK(average(ExplicitFunction::constant(0), c.q0) == 0);
}

TEST_CASE("covering witness") {
    Box a = cube({Rational(1, 4)});
    Box b = Box::from_sides({Interval{Rational(1, 2), Rational(3, 4)}});
    auto w = covering_witness_search({a, b}, Rational(2), 100);
    CHECK(w.chosen == std::vector<int>{0, 1});
    CHECK((w.overlap_norm * w.overlap_norm).contains(Rational(1, 2)));
    Box big = cube({Rational(1, 2)});
    auto n = covering_witness_search({big, a}, Rational(2), 100);
    CHECK(n.chosen == std::vector<int>{0});
}

TEST_CASE("covering witness on a configuration matches brute force") {
    for (int d : {1, 2}) {
        std::vector<Rational> s(d, Rational(1, 2));
        if (d == 2) s = {Rational(1, 4), Rational(1, 4)};
        auto c = make_configuration(cube(s), Rational(1, 2), d);
        auto E = c.members();
        auto w = covering_witness_search(E, Rational(2), 1000);
        CHECK(w.exhaustive);
        // brute force over all nonempty subcollections with exact squares
        Rational ue = union_measure(E);
        std::optional<Rational> best_sq;
        int n = static_cast<int>(E.size());
        for (int mask = 1; mask < (1 << n); ++mask) {
            std::vector<Box> F;
            for (int i = 0; i < n; ++i)
                if (mask >> i & 1) F.push_back(E[i]);
            Rational uf = union_measure(F);
            if (2 * uf < ue) continue;
            // ||sum 1_F||_2^2 = sum_{i,j} |F_i cap F_j|
            Rational sq = 0;
            for (auto& x : F)
                for (auto& y : F)
                    if (auto z = intersect_boxes(x, y)) sq += z->measure();
            Rational c1 = ue / uf, c2sq = sq / ue;
            Rational k = std::max(Rational(c1 * c1), c2sq);
            if (!best_sq || k < *best_sq) best_sq = k;
        }
        REQUIRE(best_sq);
        CHECK((w.constant * w.constant).contains(*best_sq));
    }
}
