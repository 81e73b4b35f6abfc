#pragma once

#include "tdiff/basis.hpp"
#include "tdiff/maximal.hpp"
#include "tdiff/schedule.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tdiff {

// A probed exponent; nullopt stands for p = infinity.
using Exponent = std::optional<Rational>;
std::string to_string(const Exponent& p);
Exponent parse_exponent(const std::string& s);

enum class Verdict { in, out, not_probed };
std::string to_string(Verdict v);

struct ProbePoint {
    Exponent p;
    Verdict verdict = Verdict::not_probed;
    std::string witness;
};

// ---- column space: I = {(u,0)}, K = {(u,2^-j) : j <= rows} ----
//
// Every set with uncountably many I points has infinite mass and countable ones
// have none, so only the flag is kept. K carries counting measure. Basis: the K
// singletons and the pairs {(u,0),(u,2^-j)}.
struct ColumnSpace {
    int rows = 0;
    bool interval_mass_infinite = true;
};

ColumnSpace example_e1(int rows);

// Finitely supported on K except for whole rows given constant values.
struct ColumnFunction {
    std::map<std::pair<Rational, int>, Rational> points;  // (u, j) -> value
    std::vector<Rational> row_values;                      // j - 1 -> value on the rest of row j
    Rational on_interval = 0;                              // value on I (a null set for every average)

    Rational at(const Rational& u, int j) const;           // j = 0 is the point of I
    static ColumnFunction indicator_of_k(int rows);
};

struct ColumnPoint {
    Rational u;
    int j = 0;  // 0: on I
};

// Averages over the members shrinking to the point and listed up to row `rows`,
// restricted to pair heights 2^-j with j >= from.
struct ColumnDerivates {
    Rational upper;
    Rational lower;
    Rational value;
};
ColumnDerivates column_derivates(const ColumnSpace& s, const ColumnFunction& f, const ColumnPoint& x, int from = 1);
Rational column_average_pair(const ColumnFunction& f, const Rational& u, int j);

std::vector<ProbePoint> probe_e1(const ColumnSpace& s, const std::vector<Exponent>& ps);

// ---- weighted dyadic space with I_ij and K*_ij ----

// 2^j ceil(i / 2^j) - i
BigInt e4_r(const BigInt& i, int j);
// mu_K of (i 4^-j, 2^-j)
Rational e4_weight(const BigInt& i, int j);

struct E4Row {
    int j = 0;
    Rational avg_g;
    Rational avg_gn;
    Rational dev_g;   // |avg_g - 2/3|
    bool summed = false;  // cross-checked by direct summation over K*
};

struct E4Table {
    int j_max = 0;
    int n = 0;
    std::vector<E4Row> rows;
    Rational limit_g;   // 2/3
    Rational limit_gn;  // closed geometric sums
    Rational fitted_c;  // max_j 2^j |avg_g - 2/3|
};

// Requires 1 <= n < j_max <= 20. Rows up to `sum_upto` are also summed term by term.
E4Table example_e4(int j_max, int n, int sum_upto = 8);
Rational e4_limit_gn(int n);

// ---- probes and gluing ----

std::vector<ProbePoint> probe_schedule(const Schedule& s, const std::vector<Exponent>& ps);

struct GluedComponent {
    std::string name;
    std::vector<std::string> elements;  // element labels, each owned by this component only
    std::function<std::vector<ProbePoint>(const std::vector<Exponent>&)> probe;
};

struct GluedSpace {
    std::vector<GluedComponent> components;
    // distance between points tagged by component; inside one component the given metric
    Rational distance(int ca, int cb, const Rational& inside) const { return ca == cb ? inside : Rational(1); }
    std::vector<ProbePoint> probe(const std::vector<Exponent>& ps) const;
    std::size_t owner(const std::string& element) const;
};

GluedComponent component_of(const std::string& name, const Schedule& s);
GluedComponent component_of(const std::string& name, const ColumnSpace& e1);
GluedSpace glue(GluedComponent a, GluedComponent b);
Verdict combine(Verdict a, Verdict b);

// ---- transfer to unions of intervals in [0, |U|) ----

struct Span {
    Rational a;
    Rational b;
    Rational length() const { return b - a; }
    bool operator==(const Span& o) const { return a == o.a && b == o.b; }
};

// Representative images: instance 0 of every atom type along its chain. All
// instances of a type are laid out back to back, so instance k of a configuration
// sits k * (union measure) further right.
struct IntervalUnionBasis {
    Rational total;
    std::vector<Rational> start;         // per node: left end of its representative instance
    std::vector<Rational> length;        // per node: one instance
    std::vector<Span> residual;          // per node: uncovered part of the representative instance
    std::vector<std::vector<std::vector<Span>>> members;  // per group and member

    Rational image_length(int group, int member) const;
};

IntervalUnionBasis transfer_to_interval(const LeveledBasis& b);
std::vector<Span> merge_spans(std::vector<Span> v);
// Lengths, instance counts at level 1, and nesting or disjointness of member pairs.
Report verify_transfer(const LeveledBasis& b, const IntervalUnionBasis& t);
// Weak-type ratio computed on the interval side: Mf from interval containment.
WeakRatio interval_weak_ratio(const LeveledBasis& b, const IntervalUnionBasis& t, const BasisFunction& f, const Rational& p);

}  // namespace tdiff
