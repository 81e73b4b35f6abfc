#pragma once

#include "tdiff/rational.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tdiff {

// Half-open [a, b) with 0 <= a < b <= 1.
struct Interval {
    Rational a;
    Rational b;

    Rational length() const { return b - a; }
    bool full() const { return a == 0 && b == 1; }
    bool contains(const Interval& o) const { return a <= o.a && o.b <= b; }
    bool operator==(const Interval& o) const { return a == o.a && b == o.b; }
};

// Cylinder box on the torus. Only constrained coordinates are stored (1-based,
// strictly increasing); a [0,1) side is the full circle and is never stored.
class Box {
public:
    using Side = std::pair<int, Interval>;

    Box() = default;  // full torus
    explicit Box(std::vector<Side> sides);

    static Box full() { return Box(); }
    // Sides given for coordinates 1..n in order.
    static Box from_sides(const std::vector<Interval>& sides);

    const std::vector<Side>& sides() const { return sides_; }
    bool is_full() const { return sides_.empty(); }
    // Largest constrained coordinate, 0 for the full torus.
    int max_coord() const { return sides_.empty() ? 0 : sides_.back().first; }
    Interval side(int coord) const;
    bool constrains(int coord) const;
    Rational measure() const;

    bool contains(const Box& inner) const;
    bool operator==(const Box& o) const;
    bool operator<(const Box& o) const;  // lexicographic by corner then extent

    Box shifted(const std::vector<Rational>& offset) const;  // offset[c-1] added to coordinate c, no wrap allowed

    std::string str() const;

private:
    std::vector<Side> sides_;
};

using BoxSet = std::vector<Box>;

Rational box_measure(const Box& b);
std::optional<Box> intersect_boxes(const Box& a, const Box& b);
bool boxes_disjoint(const Box& a, const Box& b);
// Nested means one contains the other.
bool boxes_nested_or_disjoint(const Box& a, const Box& b);

// Image of b under x_coord -> x_coord + shift (mod 1). One box, or two when the side wraps.
BoxSet translate_box(const Box& b, int coord, const Rational& shift);

// a \ b as pairwise-disjoint boxes.
BoxSet subtract_box(const Box& a, const Box& b);
// Pairwise-disjoint boxes covering the union of the inputs.
BoxSet disjoint_union(const std::vector<Box>& boxes);
Rational union_measure(const std::vector<Box>& boxes);
Rational total_measure(const BoxSet& set);
bool pairwise_disjoint(const std::vector<Box>& boxes);
// Validates disjointness; throws InvalidArgument otherwise.
BoxSet make_boxset(std::vector<Box> boxes);

// Maximal dyadic cubes (equal sides 2^-k on coordinates 1..n, n = max(1, largest
// constrained coordinate), k >= min_level) tiling the region, sorted by corner.
std::vector<Box> dyadic_decompose(const BoxSet& region, int min_level, int max_level);

struct MetricValue {
    Rational value;
    Rational tail_lo;  // exact bound on the contribution of coordinates beyond D
    Rational tail_hi;
};

// Points are given by their first D coordinates in [0,1).
MetricValue torus_metric(const std::vector<Rational>& x, const std::vector<Rational>& y, int D);
// Supremum of the metric over pairs of points in b.
Rational box_diameter(const Box& b);

}  // namespace tdiff
