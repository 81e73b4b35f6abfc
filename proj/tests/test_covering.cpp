#include "catch_amalgamated.hpp"

#include "tdiff/covering.hpp"
#include "tdiff/error.hpp"

using namespace tdiff;

namespace {

Rational law(const CoveringPlan& p) {
    return (1 - pow(1 - p.c, static_cast<unsigned long>(p.rounds))) * p.domain.measure();
}

}  // namespace

TEST_CASE("one round on the torus covers c") {
    auto p = cover_rectangle(Box::full(), Rational(1, 4), 2, 1, 1);
    CHECK(p.c == Rational(5, 8));
    CHECK(p.covered_measure() == Rational(5, 8));
    CHECK(p.residual_measure() == Rational(3, 8));
    CHECK(verify_plan(p).ok());
}

TEST_CASE("five rounds follow the geometric law") {
    auto p = cover_rectangle(Box::full(), Rational(1, 4), 2, 1, 5);
    CHECK(p.covered_measure() == Rational(32525, 32768));
    auto rep = verify_plan(p);
    INFO(rep.summary());
    CHECK(rep.ok());
}

TEST_CASE("zero rounds leave U as residual") {
    auto p = cover_rectangle(Box::full(), Rational(1, 4), 2, 1, 0);
    CHECK(p.total_configs() == 0);
    CHECK(p.covered_measure() == 0);
    CHECK(p.residual_measure() == 1);
    CHECK(verify_plan(p).ok());
}

TEST_CASE("coverage law over a parameter grid") {
    struct P { Rational eps; int d, m; };
    for (const auto& q : {P{Rational(1, 4), 2, 1}, P{Rational(1, 2), 1, 1}, P{Rational(1, 8), 3, 2}, P{Rational(3, 8), 2, 2}})
        for (int T = 0; T <= 6; ++T) {
            auto p = cover_rectangle(Box::full(), q.eps, q.d, q.m, T);
            CHECK(p.covered_measure() == law(p));
            CHECK(p.covered_measure() + p.residual_measure() == 1);
        }
}

TEST_CASE("rejects bad parameters") {
    CHECK_THROWS_AS(cover_rectangle(Box::full(), Rational(1, 3), 1, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(cover_rectangle(Box::full(), Rational(3, 4), 1, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(cover_rectangle(Box::full(), Rational(1, 2), 0, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(cover_rectangle(Box::full(), Rational(1, 2), 1, 0, 1), InvalidArgument);
}

TEST_CASE("template geometry") {
    for (int d = 1; d <= 3; ++d)
        for (int t = d; t <= 5; ++t) {
            auto tp = make_template(t, Rational(1, 4), d);
            Rational res = 0;
            for (const auto& b : tp.residual) res += b.region.measure();
            CHECK(tp.union_measure + res == tp.cube().measure());
            CHECK(is_rdf0_element(tp.config.q0).m == t * (t + 1) + d);
        }
}

TEST_CASE("deleting a configuration breaks the balance") {
    auto p = cover_rectangle(Box::full(), Rational(1, 2), 1, 1, 2);
    p.deleted.push_back(BigInt(17));
    auto rep = verify_plan(p);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.first_failure()->name == "measure balance");
}

TEST_CASE("small plans verify by brute force") {
    // a single Q_{m+d} cube as domain keeps the explicit plan small
    struct P { Rational eps; int d, m, T; };
    for (const auto& q : {P{Rational(1, 2), 1, 1, 1}, P{Rational(1, 4), 2, 1, 1}, P{Rational(1, 2), 1, 2, 1}}) {
        auto p = cover_rectangle(q_cube(q.m + q.d), q.eps, q.d, q.m, q.T);
        auto ex = materialize(p, 20000);
        CHECK(BigInt(static_cast<unsigned long>(ex.configs.size())) == p.total_configs());
        auto rep = verify_explicit_plan(ex);
        INFO(rep.summary());
        CHECK(rep.ok());
    }
}

TEST_CASE("enumeration round trips and matches the walk") {
    // second-round blocks are huge, so walk only the start of the enumeration
    auto p = cover_rectangle(q_cube(2), Rational(1, 2), 1, 1, 2);
    BigInt expect = 0;
    Rational prefix = 0;
    bool all = true;
    p.for_each_config([&](const ConfigInstance& ci) {
        if (expect == 3000) return false;
        auto loc = p.locate(ci.index);
        all = all && ci.index == expect && loc.corner == ci.corner && loc.level == ci.level &&
              loc.selected == ci.selected && loc.group == ci.group && p.prefix_measure(ci.index) == prefix;
        prefix += p.tpl(ci.level).union_measure;
        expect += 1;
        return true;
    });
    CHECK(all);
    CHECK(expect == 3000);
    auto q = cover_rectangle(q_cube(2), Rational(1, 2), 1, 1, 1);
    BigInt n = 0;
    q.for_each_config([&](const ConfigInstance&) { n += 1; return true; });
    CHECK(n == q.total_configs());
    CHECK(q.prefix_measure(n - 1) + q.tpl(q.locate(n - 1).level).union_measure == q.covered_measure());
}

TEST_CASE("equal measures within every label") {
    auto p = cover_rectangle(q_cube(3), Rational(1, 4), 2, 1, 2);
    std::map<BigInt, std::vector<Rational>> by_label;
    BigInt seen = 0;
    p.for_each_config([&](const ConfigInstance& ci) {
        by_label[ci.group].push_back(p.tpl(ci.level).union_measure);
        seen += 1;
        return seen < 20000;
    });
    bool ok = true;
    for (auto& [g, v] : by_label) ok = ok && v.size() == 2 && v[0] == v[1];
    CHECK(ok);
}

TEST_CASE("first and sampled instances sit at the requested level") {
    auto p = cover_rectangle(Box::full(), Rational(1, 4), 2, 1, 3);
    gmp_randclass rng(gmp_randinit_mt);
    rng.seed(7);
    for (const auto& [t, n] : p.configs_per_template()) {
        (void)n;
        auto f = p.first_instance(t, true);
        REQUIRE(f);
        CHECK(f->level == t);
        CHECK(f->selected);
        auto g = p.first_instance(t, false);
        REQUIRE(g);
        CHECK_FALSE(g->selected);
        for (int k = 0; k < 5; ++k) {
            auto s = p.sample_instance(t, k % 2 == 0, rng);
            CHECK(s.level == t);
            CHECK(s.selected == (k % 2 == 0));
        }
    }
}

TEST_CASE("identical parameters give identical plans") {
    auto a = cover_rectangle(Box::full(), Rational(1, 8), 3, 2, 3);
    auto b = cover_rectangle(Box::full(), Rational(1, 8), 3, 2, 3);
    CHECK(a.cubes_at == b.cubes_at);
    CHECK(a.locate(a.total_configs() - 1).corner == b.locate(b.total_configs() - 1).corner);
}
