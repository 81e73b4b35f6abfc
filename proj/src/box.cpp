#include "tdiff/box.hpp"

#include "tdiff/error.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace tdiff {

Box::Box(std::vector<Side> sides) {
    int prev = 0;
    for (auto& [c, iv] : sides) {
        if (c <= prev) throw InvalidArgument("box coordinates must be positive and strictly increasing");
        prev = c;
        if (!(0 <= iv.a && iv.a < iv.b && iv.b <= 1))
            throw InvalidArgument("box side [" + to_string(iv.a) + ", " + to_string(iv.b) +
                                  ") is not a nonempty subinterval of [0,1)");
        if (!iv.full()) sides_.emplace_back(c, std::move(iv));
    }
}

Box Box::from_sides(const std::vector<Interval>& sides) {
    std::vector<Side> s;
    for (std::size_t i = 0; i < sides.size(); ++i) s.emplace_back(static_cast<int>(i) + 1, sides[i]);
    return Box(std::move(s));
}

Interval Box::side(int coord) const {
    for (const auto& [c, iv] : sides_) {
        if (c == coord) return iv;
        if (c > coord) break;
    }
    return Interval{Rational(0), Rational(1)};
}

bool Box::constrains(int coord) const {
    return std::any_of(sides_.begin(), sides_.end(), [&](const Side& s) { return s.first == coord; });
}

Rational Box::measure() const {
    Rational m(1);
    for (const auto& s : sides_) m *= s.second.length();
    return m;
}

bool Box::contains(const Box& inner) const {
    for (const auto& [c, iv] : sides_)
        if (!iv.contains(inner.side(c))) return false;
    return true;
}

bool Box::operator==(const Box& o) const {
    if (sides_.size() != o.sides_.size()) return false;
    for (std::size_t i = 0; i < sides_.size(); ++i)
        if (sides_[i].first != o.sides_[i].first || !(sides_[i].second == o.sides_[i].second)) return false;
    return true;
}

bool Box::operator<(const Box& o) const {
    int n = std::max(max_coord(), o.max_coord());
    for (int c = 1; c <= n; ++c) {
        Rational x = side(c).a, y = o.side(c).a;
        if (x != y) return x < y;
    }
    for (int c = 1; c <= n; ++c) {
        Rational x = side(c).b, y = o.side(c).b;
        if (x != y) return x < y;
    }
    return false;
}

Box Box::shifted(const std::vector<Rational>& offset) const {
    std::vector<Side> s = sides_;
    for (auto& [c, iv] : s) {
        if (c > static_cast<int>(offset.size())) continue;
        const Rational& o = offset[c - 1];
        iv.a += o;
        iv.b += o;
        if (iv.a < 0 || iv.b > 1) throw PreconditionError("shifted box would wrap around the circle");
    }
    return Box(std::move(s));
}

std::string Box::str() const {
    if (sides_.empty()) return "T^w";
    std::ostringstream os;
    for (std::size_t i = 0; i < sides_.size(); ++i) {
        if (i) os << " x ";
        os << "x" << sides_[i].first << "[" << sides_[i].second.a << "," << sides_[i].second.b << ")";
    }
    return os.str();
}

Rational box_measure(const Box& b) { return b.measure(); }

std::optional<Box> intersect_boxes(const Box& a, const Box& b) {
    std::vector<Box::Side> out;
    const auto& sa = a.sides();
    const auto& sb = b.sides();
    std::size_t i = 0, j = 0;
    while (i < sa.size() || j < sb.size()) {
        if (j == sb.size() || (i < sa.size() && sa[i].first < sb[j].first)) {
            out.push_back(sa[i++]);
        } else if (i == sa.size() || sb[j].first < sa[i].first) {
            out.push_back(sb[j++]);
        } else {
            Rational lo = std::max(sa[i].second.a, sb[j].second.a);
            Rational hi = std::min(sa[i].second.b, sb[j].second.b);
            if (lo >= hi) return std::nullopt;
            out.emplace_back(sa[i].first, Interval{lo, hi});
            ++i;
            ++j;
        }
    }
    return Box(std::move(out));
}

bool boxes_disjoint(const Box& a, const Box& b) {
    for (const auto& [c, iv] : a.sides()) {
        Interval o = b.side(c);
        if (std::max(iv.a, o.a) >= std::min(iv.b, o.b)) return true;
    }
    for (const auto& [c, iv] : b.sides()) {
        Interval o = a.side(c);
        if (std::max(iv.a, o.a) >= std::min(iv.b, o.b)) return true;
    }
    return false;
}

bool boxes_nested_or_disjoint(const Box& a, const Box& b) {
    return boxes_disjoint(a, b) || a.contains(b) || b.contains(a);
}

namespace {
Box with_side(const Box& b, int coord, const Interval& iv) {
    std::vector<Box::Side> s;
    bool placed = false;
    for (const auto& side : b.sides()) {
        if (!placed && side.first > coord) {
            s.emplace_back(coord, iv);
            placed = true;
        }
        if (side.first == coord) {
            s.emplace_back(coord, iv);
            placed = true;
        } else {
            s.push_back(side);
        }
    }
    if (!placed) s.emplace_back(coord, iv);
    return Box(std::move(s));
}
}  // namespace

BoxSet translate_box(const Box& b, int coord, const Rational& shift) {
    if (coord < 1) throw InvalidArgument("coordinate index must be positive");
    if (shift < 0 || shift >= 1) throw InvalidArgument("shift must lie in [0,1)");
    if (shift == 0 || !b.constrains(coord)) return {b};
    Interval iv = b.side(coord);
    Rational a = iv.a + shift, e = iv.b + shift;
    if (a >= 1) return {with_side(b, coord, Interval{a - 1, e - 1})};
    if (e <= 1) return {with_side(b, coord, Interval{a, e})};
    return {with_side(b, coord, Interval{a, Rational(1)}), with_side(b, coord, Interval{Rational(0), e - 1})};
}

BoxSet subtract_box(const Box& a, const Box& b) {
    if (boxes_disjoint(a, b)) return {a};
    BoxSet out;
    Box cur = a;
    for (const auto& [c, bi] : b.sides()) {
        Interval ai = cur.side(c);
        if (ai.a < bi.a) out.push_back(with_side(cur, c, Interval{ai.a, bi.a}));
        if (bi.b < ai.b) out.push_back(with_side(cur, c, Interval{bi.b, ai.b}));
        cur = with_side(cur, c, Interval{std::max(ai.a, bi.a), std::min(ai.b, bi.b)});
    }
    return out;
}

BoxSet disjoint_union(const std::vector<Box>& boxes) {
    BoxSet out;
    for (const Box& x : boxes) {
        BoxSet pieces{x};
        for (const Box& r : out) {
            BoxSet next;
            for (const Box& p : pieces) {
                BoxSet d = subtract_box(p, r);
                next.insert(next.end(), d.begin(), d.end());
            }
            pieces.swap(next);
            if (pieces.empty()) break;
        }
        out.insert(out.end(), pieces.begin(), pieces.end());
    }
    return out;
}

Rational total_measure(const BoxSet& set) {
    Rational m(0);
    for (const Box& b : set) m += b.measure();
    return m;
}

Rational union_measure(const std::vector<Box>& boxes) { return total_measure(disjoint_union(boxes)); }

bool pairwise_disjoint(const std::vector<Box>& boxes) {
    for (std::size_t i = 0; i < boxes.size(); ++i)
        for (std::size_t j = i + 1; j < boxes.size(); ++j)
            if (!boxes_disjoint(boxes[i], boxes[j])) return false;
    return true;
}

BoxSet make_boxset(std::vector<Box> boxes) {
    if (!pairwise_disjoint(boxes)) throw InvalidArgument("box set members are not pairwise disjoint");
    return boxes;
}

std::vector<Box> dyadic_decompose(const BoxSet& region, int min_level, int max_level) {
    if (min_level < 0 || max_level < min_level) throw InvalidArgument("need 0 <= min_level <= max_level");
    if (!pairwise_disjoint(region)) throw InvalidArgument("region boxes are not pairwise disjoint");
    int n = 1;
    for (const Box& b : region) {
        n = std::max(n, b.max_coord());
        for (const auto& [c, iv] : b.sides())
            for (const Rational* e : {&iv.a, &iv.b}) {
                int lvl = dyadic_level(*e);
                if (lvl < 0 || lvl > max_level)
                    throw InvalidArgument("endpoint " + to_string(*e) + " of coordinate " + std::to_string(c) +
                                          " is not dyadic at level " + std::to_string(max_level));
            }
    }
    if (n > 20) throw CapExceeded("dyadic_decompose supports at most 20 coordinates");
    std::vector<Box> out;
    std::vector<Interval> cube(n, Interval{Rational(0), Rational(1)});
    std::function<void(int, const std::vector<const Box*>&)> rec = [&](int level, const std::vector<const Box*>& live) {
        Box c = Box::from_sides(cube);
        Rational cm = c.measure();
        Rational inside(0);
        std::vector<const Box*> hit;
        for (const Box* b : live) {
            auto x = intersect_boxes(c, *b);
            if (!x) continue;
            inside += x->measure();
            hit.push_back(b);
        }
        if (hit.empty()) return;
        if (inside == cm && level >= min_level) {
            out.push_back(c);
            return;
        }
        if (level == max_level) throw InvalidArgument("region is not a union of level " + std::to_string(max_level) + " cubes");
        Rational half = pow2(-(level + 1));
        for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
            std::vector<Interval> saved = cube;
            for (int i = 0; i < n; ++i) {
                Rational a = cube[i].a + ((mask >> (n - 1 - i)) & 1 ? half : Rational(0));
                cube[i] = Interval{a, a + half};
            }
            rec(level + 1, hit);
            cube = saved;
        }
    };
    std::vector<const Box*> all;
    for (const Box& b : region) all.push_back(&b);
    if (!all.empty()) rec(0, all);
    std::sort(out.begin(), out.end());
    return out;
}

MetricValue torus_metric(const std::vector<Rational>& x, const std::vector<Rational>& y, int D) {
    if (D < 0 || static_cast<int>(x.size()) < D || static_cast<int>(y.size()) < D)
        throw InvalidArgument("points must carry at least D coordinates");
    Rational v(0);
    for (int d = 1; d <= D; ++d) {
        Rational t = abs(x[d - 1] - y[d - 1]);
        if (t >= 1) throw InvalidArgument("point coordinates must lie in [0,1)");
        Rational u = 1 - t;
        v += std::min(t, u) * pow2(-d);
    }
    return MetricValue{v, Rational(0), pow2(-D)};
}

Rational box_diameter(const Box& b) {
    int n = b.max_coord();
    Rational half(1, 2);
    Rational v(0);
    for (int d = 1; d <= n; ++d) v += std::min(b.side(d).length(), half) * pow2(-d);
    // coordinates beyond n are free and contribute sum_{d>n} 2^-(d+1)
    return v + pow2(-(n + 1));
}

}  // namespace tdiff
