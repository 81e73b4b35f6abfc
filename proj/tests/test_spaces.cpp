#include "catch_amalgamated.hpp"

#include "tdiff/error.hpp"
#include "tdiff/spaces.hpp"

using namespace tdiff;

namespace {

std::vector<Exponent> grid() { return {Rational(1), Rational(3, 2), Rational(2), Rational(3)}; }

}  // namespace

TEST_CASE("column space derivates of 1_K") {
    auto s = example_e1(12);
    auto g = ColumnFunction::indicator_of_k(12);
    for (long u = 1; u <= 16; ++u)
        for (int j = 0; j <= 12; ++j) {
            auto d = column_derivates(s, g, ColumnPoint{Rational(u, 16), j}, 3);
            CHECK(d.upper == 1);
            CHECK(d.lower == 1);
        }
}

TEST_CASE("column space, finitely supported functions") {
    auto s = example_e1(10);
    ColumnFunction f;
    f.points[{Rational(1, 3), 2}] = Rational(5);
    f.points[{Rational(1, 3), 4}] = Rational(7);
    f.points[{Rational(1, 2), 1}] = Rational(1);
    auto k = column_derivates(s, f, ColumnPoint{Rational(1, 3), 4});
    CHECK(k.upper == 7);
    CHECK(k.lower == 7);
    auto shallow = column_derivates(s, f, ColumnPoint{Rational(1, 3), 0}, 1);
    CHECK(shallow.upper == 7);
    auto deep = column_derivates(s, f, ColumnPoint{Rational(1, 3), 0}, 5);
    CHECK(deep.upper == 0);
    CHECK(deep.lower == 0);
    CHECK(column_average_pair(f, Rational(1, 3), 2) == 5);
    CHECK_THROWS_AS(column_derivates(s, f, ColumnPoint{Rational(0), 0}), InvalidArgument);
}

TEST_CASE("column space probe") {
    auto ps = grid();
    ps.push_back(std::nullopt);
    auto pr = probe_e1(example_e1(8), ps);
    for (std::size_t i = 0; i < 4; ++i) CHECK(pr[i].verdict == Verdict::in);
    CHECK(pr[4].verdict == Verdict::not_probed);
}

TEST_CASE("weights of the dyadic space") {
    CHECK(e4_r(BigInt(2), 1) == 0);
    CHECK(e4_weight(BigInt(2), 1) == Rational(1, 4));
    CHECK(e4_r(BigInt(1), 1) == 1);
    CHECK(e4_weight(BigInt(1), 1) == Rational(1, 8));
    CHECK_THROWS_AS(e4_weight(BigInt(5), 1), InvalidArgument);
}

TEST_CASE("averages of g and g_n") {
    auto t = example_e4(15, 1);
    REQUIRE(t.rows.size() == 15);
    CHECK(t.limit_gn == Rational(23, 36));
    CHECK(t.limit_gn < Rational(2, 3));
    for (const auto& r : t.rows) {
        if (r.j >= 5) CHECK(r.dev_g <= pow2(-r.j + 2));
        if (r.j >= 3) CHECK(r.avg_gn < Rational(2, 3));
        CHECK(r.summed == (r.j <= 8));
    }
    CHECK(abs(t.rows.back().avg_gn - Rational(23, 36)) < pow2(-1000));
    CHECK(e4_limit_gn(2) == (Rational(2, 3) + Rational(21, 16)) / 3);
    CHECK_THROWS_AS(example_e4(5, 5), InvalidArgument);
    CHECK_THROWS_AS(example_e4(21, 1), InvalidArgument);
    auto big = example_e4(20, 3, 0);
    CHECK(big.rows.back().dev_g > 0);
}

TEST_CASE("schedule probes") {
    auto pr = probe_schedule(schedule_geq(Rational(2), 8), grid());
    CHECK(pr[0].verdict == Verdict::out);
    CHECK(pr[1].verdict == Verdict::out);
    CHECK(pr[2].verdict == Verdict::in);
    CHECK(pr[3].verdict == Verdict::in);
    auto gt = probe_schedule(schedule_gt(Rational(2), 8), {Rational(2), Rational(201, 100)});
    CHECK(gt[0].verdict == Verdict::out);
    CHECK(gt[1].verdict == Verdict::in);
}

TEST_CASE("glue is the componentwise AND") {
    auto a = component_of("rdf", schedule_geq(Rational(2), 8));
    auto e = component_of("columns", example_e1(8));
    auto ps = grid();
    ps.push_back(std::nullopt);
    auto pa = a.probe(ps), pe = e.probe(ps);
    auto g = glue(a, e);
    auto pg = g.probe(ps);
    for (std::size_t i = 0; i < ps.size(); ++i) CHECK(pg[i].verdict == combine(pa[i].verdict, pe[i].verdict));
    CHECK(pg[0].verdict == Verdict::out);
    CHECK(pg[2].verdict == Verdict::in);
    CHECK(pg[4].verdict == Verdict::not_probed);
    // idempotent
    auto aa = glue(a, a).probe(ps);
    for (std::size_t i = 0; i < ps.size(); ++i) CHECK(aa[i].verdict == pa[i].verdict);
    // carriers are tagged apart
    CHECK(g.owner("rdf:level 1 member 0") == 0);
    CHECK(g.owner("columns:pairs row 1") == 1);
    CHECK(g.distance(0, 1, Rational(0)) == 1);
}

TEST_CASE("transfer to the interval") {
    auto b = build_basis(Box::full(), schedule_geq(Rational(2), 2), 2);
    auto t = transfer_to_interval(b);
    auto rep = verify_transfer(b, t);
    INFO(rep.summary());
    CHECK(rep.ok());
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto f = BasisFunction::random(b, seed);
        auto x = weak_type_ratio(b, f, Rational(2));
        auto y = interval_weak_ratio(b, t, f, Rational(2));
        REQUIRE(x.value_pow);
        REQUIRE(y.value_pow);
        CHECK(*x.value_pow == *y.value_pow);
        CHECK(x.lambda == y.lambda);
    }
    CHECK(merge_spans({{Rational(0), Rational(1, 2)}, {Rational(1, 2), Rational(3, 4)}}).size() == 1);
}
