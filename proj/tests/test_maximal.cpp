#include "catch_amalgamated.hpp"

#include "tdiff/error.hpp"
#include "tdiff/maximal.hpp"

using namespace tdiff;

namespace {

const LeveledBasis& small_basis() {
    static LeveledBasis b = build_basis(Box::full(), schedule_geq(Rational(2), 2), 2);
    return b;
}

}  // namespace

TEST_CASE("lp ledger of the counterexample, limit rows") {
    auto s = schedule_geq(Rational(2), 8);
    auto rows = ledger_oracle(s, std::nullopt, Rational(1));
    auto L = lp_ledger(s, rows, Rational(2));
    REQUIRE(L.rows.size() == 8);
    REQUIRE(L.rows[0].term_exact);
    CHECK(*L.rows[0].term_exact == Rational(4, 3));
    Rational sum = 0;
    for (const auto& r : rows) sum += r.f;
    CHECK(sum < 1);
    for (const auto& r : L.rows) CHECK(r.within_bound);
    // eps rounded down to a power of two overshoots the unrounded per-level bound at j = 2
    CHECK_FALSE(L.rows[1].within_target_bound);
    CHECK(*L.rows[1].term_exact == Rational(8, 5));
}

TEST_CASE("exceptional lower bound") {
    auto s = schedule_geq(Rational(2), 8);
    auto rows = ledger_oracle(s, std::nullopt, Rational(1));
    CHECK(exceptional_lower_bound(rows, 0).value == 0);
    CHECK(exceptional_lower_bound(rows, 1).value == Rational(1, 6));
    // independent Fractions computation: 1 - prod(1 - 2^-m) - sum 2^-m / (1 + d - eps d)
    auto e = exceptional_lower_bound(rows, 8);
    CHECK(e.value == make_rational(BigInt("2111183645777"), BigInt("8909540556800")));
    CHECK(e.value > 0);
    CHECK_THROWS_AS(exceptional_lower_bound(rows, 9), InvalidArgument);
}

TEST_CASE("basis ledger matches the truncated closed form") {
    const auto& b = small_basis();
    auto rows = ledger_oracle(b.schedule, 2, Rational(1));
    for (int J = 1; J <= 2; ++J) CHECK(exceptional_lower_bound(b, J).value == exceptional_lower_bound(rows, J).value);
    auto L = lp_ledger(b, Rational(2));
    for (const auto& r : L.rows) CHECK(r.within_bound);
}

TEST_CASE("evaluation of constants") {
    const auto& b = small_basis();
    auto f = BasisFunction::constant(b, Rational(3));
    auto e = evaluate(b, f);
    CHECK(e.integral[0] == 3);
    for (const auto& g : e.avg)
        for (const auto& v : g) CHECK(v == 3);
    CHECK(*norm_pow_exact(b, e, f, Rational(1)) == 3);
    CHECK(*norm_pow_exact(b, e, f, Rational(2)) == 9);
    auto r = weak_type_ratio(b, BasisFunction::constant(b, Rational(1)), Rational(2));
    CHECK(r.value.hi() <= 1.0 + 1e-15);
    CHECK(r.value.lo() > 0.5);
}

TEST_CASE("integral agrees with the chain measure") {
    const auto& b = small_basis();
    auto f = BasisFunction::random(b, 7);
    auto e = evaluate(b, f);
    CHECK(e.integral[0] == *norm_pow_exact(b, e, f, Rational(1)));
    auto rp = norm_pow(b, e, f, Rational(3, 2));
    CHECK(rp.positive());
}

TEST_CASE("windows are monotone") {
    const auto& b = small_basis();
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto e = evaluate(b, BasisFunction::random(b, seed));
        auto all = maximal_values(b, e, Window{});
        auto upper = maximal_values(b, e, Window{2, 2});
        auto none = maximal_values(b, e, Window{3, 3});
        for (std::size_t n = 0; n < all.size(); ++n) {
            CHECK(upper[n] <= all[n]);
            CHECK(none[n] == 0);
        }
    }
}

TEST_CASE("counterexample function") {
    const auto& b = small_basis();
    auto f = counterexample_function(b);
    auto e = evaluate(b, f);
    Rational support = 0;
    for (std::size_t n = 0; n < b.nodes.size(); ++n)
        if (f.values[n] > 0) support += Rational(b.nodes[n].count) * e.piece[n];
    Rational sum = 0, most = 0;
    for (const auto& r : b.ledger()) {
        sum += r.f;
        most = std::max(most, Rational(r.f));
    }
    CHECK(support <= sum);
    CHECK(support >= most);
    CHECK(*norm_pow_exact(b, e, f, Rational(2)) <= Rational(4, 3) + Rational(8, 5));
    // on a selected level-1 translate outside Q0 the function vanishes but averages reach 1
    int witnesses = 0;
    for (int n : b.nodes_at(1)) {
        const auto& nd = b.nodes[n];
        if (!nd.selected || (nd.q0_mask & 1u)) continue;
        auto d = derivate_bounds(b, e, n, Window{1, 1});
        REQUIRE(d.upper_lb);
        CHECK(*d.upper_lb >= 1);
        CHECK(f.values[n] == 0);
        ++witnesses;
    }
    CHECK(witnesses > 0);
}

TEST_CASE("locate cells") {
    const auto& b = small_basis();
    for (int n : b.nodes_at(2)) {
        if (b.nodes[n].count == 0) continue;
        CHECK(locate_cell(b, b.node_box(n)) == n);
    }
    int n1 = b.nodes_at(1).front();
    CHECK(locate_cell(b, b.node_box(n1)) == n1);
}

TEST_CASE("maximal members are disjoint on the basis") {
    const auto& b = small_basis();
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto f = BasisFunction::random(b, seed);
        auto r = maximal_disjointness_grid(b, f);
        CHECK(r.ok);
        CHECK(r.lambdas > 0);
        CHECK(r.maximal > 0);
        auto one = maximal_disjointness_check(b, f, Rational(1));
        CHECK(one.ok);
    }
}

TEST_CASE("explicit collections") {
    Box big = Box::from_sides({Interval{Rational(0), Rational(1, 2)}, Interval{Rational(0), Rational(1, 2)}});
    Box small = Box::from_sides({Interval{Rational(0), Rational(1, 4)}, Interval{Rational(0), Rational(1, 4)}});
    Box other = Box::from_sides({Interval{Rational(1, 2), Rational(1)}, Interval{Rational(1, 2), Rational(1)}});
    std::vector<std::pair<int, Box>> nested{{1, big}, {2, small}, {2, other}};
    auto f = ExplicitFunction::indicator(small, Rational(4));
    auto r = maximal_disjointness_check(nested, f, Rational(1, 2));
    CHECK(r.ok);
    CHECK(r.maximal == 1);
    Box shifted = Box::from_sides({Interval{Rational(1, 4), Rational(3, 4)}, Interval{Rational(1, 4), Rational(3, 4)}});
    std::vector<std::pair<int, Box>> bad{{1, big}, {2, shifted}};
    CHECK_THROWS_AS(maximal_disjointness_check(bad, f, Rational(0)), PreconditionError);
}
