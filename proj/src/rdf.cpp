#include "tdiff/rdf.hpp"

#include "tdiff/error.hpp"

#include <algorithm>

namespace tdiff {

RdfCell v_cell(long m) {
    if (m < 1) throw InvalidArgument("v_cell needs m >= 1");
    long k = 0;
    while ((k + 1) * (k + 1) + (k + 1) <= m) ++k;
    long s = m - (k * k + k);
    RdfCell c;
    c.m = m;
    if (s <= k + 1) {
        for (long i = 0; i < k + 1; ++i) c.exponents.push_back(static_cast<int>(i < s ? k + 1 : k));
    } else {
        for (long i = 0; i < k + 1; ++i) c.exponents.push_back(static_cast<int>(k + 1));
        c.exponents.push_back(static_cast<int>(s - (k + 1)));
    }
    // m = 1 lands in block k = 0 whose trailing coordinate has exponent 0; drop free sides
    while (!c.exponents.empty() && c.exponents.back() == 0) c.exponents.pop_back();
    return c;
}

Box RdfCell::box() const {
    std::vector<Interval> s;
    for (int e : exponents) s.push_back(Interval{Rational(0), pow2(-e)});
    return Box::from_sides(s);
}

Rational RdfCell::measure() const {
    long t = 0;
    for (int e : exponents) t += e;
    return pow2(-t);
}

Box q_cube(int k) {
    if (k < 1) throw InvalidArgument("q_cube needs k >= 1");
    return Box::from_sides(std::vector<Interval>(k + 1, Interval{Rational(0), pow2(-k)}));
}

CornerGrid::CornerGrid(int k) : k_(k) {
    if (k < 1) throw InvalidArgument("corner grid needs k >= 1");
}

BigInt CornerGrid::size() const { return pow2_int(static_cast<unsigned long>(k_) * (k_ + 1)); }

std::vector<Rational> CornerGrid::corner(const BigInt& index) const {
    if (index < 0 || index >= size()) throw InvalidArgument("corner index out of range");
    std::vector<Rational> g(k_ + 1);
    BigInt rem = index;
    BigInt base = pow2_int(k_);
    for (int c = k_; c >= 0; --c) {
        BigInt d = rem % base;
        rem /= base;
        g[c] = Rational(d) * pow2(-k_);
    }
    return g;
}

HGrid::HGrid(long m) : cell_(v_cell(m)) {
    digit_.assign(cell_.exponents.size(), 0);
    corner_.assign(cell_.exponents.size(), Rational(0));
}

BigInt HGrid::size() const { return BigInt(1 / cell_.measure()); }

void HGrid::next() {
    for (int i = static_cast<int>(digit_.size()) - 1; i >= 0; --i) {
        BigInt lim = pow2_int(cell_.exponents[i]);
        digit_[i] += 1;
        if (digit_[i] < lim) {
            corner_[i] = Rational(digit_[i]) * pow2(-cell_.exponents[i]);
            return;
        }
        digit_[i] = 0;
        corner_[i] = 0;
    }
    done_ = true;
}

BigInt count_qcubes(const Box& U, int k) {
    if (k < 1) throw InvalidArgument("Q-cube level must be >= 1");
    if (U.max_coord() > k + 1)
        throw InvalidArgument("box constrains coordinate " + std::to_string(U.max_coord()) + " beyond the level " +
                              std::to_string(k) + " cube shape");
    Rational grid = pow2(-k);
    for (const auto& [c, iv] : U.sides()) {
        Rational x = iv.a / grid, y = iv.b / grid;
        if (!is_integer(x) || !is_integer(y))
            throw InvalidArgument("box side on coordinate " + std::to_string(c) + " is not aligned to the 2^-" +
                                  std::to_string(k) + " grid");
    }
    return BigInt(U.measure() * Rational(pow2_int(static_cast<unsigned long>(k) * (k + 1))));
}

std::vector<Box> split_into_qcubes(const Box& U, int k) {
    BigInt n = count_qcubes(U, k);
    if (n > 1000000) throw CapExceeded("split_into_qcubes would produce " + n.get_str() + " cubes");
    QBlock blk{U, k};
    std::vector<Box> out;
    for (BigInt i = 0; i < n; ++i) out.push_back(blk.cube(i));
    return out;
}

RdfMatch is_rdf0_element(const Box& b) {
    RdfMatch r;
    const auto& s = b.sides();
    if (s.empty()) return r;
    std::vector<int> e;
    std::vector<Rational> corner;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].first != static_cast<int>(i) + 1) return r;
        Rational len = s[i].second.length();
        if (len.get_num() != 1 || dyadic_level(len) < 1) return r;
        int ei = dyadic_level(len);
        if (!is_integer(s[i].second.a / len)) return r;
        e.push_back(ei);
        corner.push_back(s[i].second.a);
    }
    long m = 0;
    for (int x : e) m += x;
    if (v_cell(m).exponents != e) return r;
    r.member = true;
    r.m = m;
    r.corner = corner;
    return r;
}

BigInt QBlock::count() const {
    return BigInt(region.measure() * Rational(pow2_int(static_cast<unsigned long>(level) * (level + 1))));
}

bool QBlock::aligned() const {
    if (level < 1 || region.max_coord() > level + 1) return false;
    Rational g = pow2(-level);
    for (const auto& [c, iv] : region.sides())
        if (!is_integer(iv.a / g) || !is_integer(iv.b / g)) return false;
    return true;
}

std::vector<Rational> QBlock::cube_corner(const BigInt& index) const {
    if (index < 0 || index >= count()) throw InvalidArgument("cube index out of range");
    Rational g = pow2(-level);
    std::vector<Rational> corner(level + 1);
    BigInt rem = index;
    for (int c = level + 1; c >= 1; --c) {
        Interval iv = region.side(c);
        BigInt n = BigInt(iv.length() / g);
        BigInt d = rem % n;
        rem /= n;
        corner[c - 1] = iv.a + Rational(d) * g;
    }
    return corner;
}

Box QBlock::cube(const BigInt& index) const {
    std::vector<Rational> g = cube_corner(index);
    Rational side = pow2(-level);
    std::vector<Interval> s;
    for (const Rational& x : g) s.push_back(Interval{x, x + side});
    return Box::from_sides(s);
}

namespace {

// Integer grid range [lo, hi) for one coordinate at level s.
struct GridRange {
    BigInt lo, hi;
    bool empty() const { return lo >= hi; }
};

GridRange grid_range(const Interval& iv, int s) {
    Rational scale(pow2_int(s));
    return GridRange{ceil_int(iv.a * scale), floor_int(iv.b * scale)};
}

Interval to_interval(const BigInt& lo, const BigInt& hi, int s) {
    Rational g = pow2(-s);
    return Interval{Rational(lo) * g, Rational(hi) * g};
}

}  // namespace

std::vector<QBlock> qblocks_of_box(const Box& b, int min_level) {
    if (min_level < 1) throw InvalidArgument("Q-block level must be >= 1");
    int n = b.max_coord();
    int top = 0;
    for (const auto& [c, iv] : b.sides()) {
        int la = dyadic_level(iv.a), lb = dyadic_level(iv.b);
        if (la < 0 || lb < 0) throw InvalidArgument("box endpoints must be dyadic for a Q-block decomposition");
        top = std::max({top, la, lb});
    }
    int s0 = std::max(min_level, n - 1);
    int s_end = std::max(s0, top);
    std::vector<QBlock> out;
    Rational covered(0);
    const Rational total = b.measure();
    for (int s = s0; s <= s_end && covered < total; ++s) {
        std::vector<GridRange> in(s + 1);
        bool empty = false;
        for (int c = 1; c <= s + 1; ++c) {
            in[c - 1] = grid_range(b.side(c), s);
            if (in[c - 1].empty()) empty = true;
        }
        if (empty) continue;
        // cubes already inside a level s-1 cube that fits in the box
        std::vector<GridRange> ch;
        bool has_parent = s > s0 && n <= s;
        if (has_parent) {
            ch.resize(s + 1);
            for (int c = 1; c <= s; ++c) {
                GridRange p = grid_range(b.side(c), s - 1);
                if (p.empty()) {
                    has_parent = false;
                    break;
                }
                ch[c - 1] = GridRange{2 * p.lo, 2 * p.hi};
            }
            if (has_parent) ch[s] = in[s];
        }
        auto emit = [&](const std::vector<GridRange>& r) {
            std::vector<Box::Side> sides;
            for (int c = 1; c <= s + 1; ++c) sides.emplace_back(c, to_interval(r[c - 1].lo, r[c - 1].hi, s));
            QBlock blk{Box(std::move(sides)), s};
            covered += blk.region.measure();
            out.push_back(std::move(blk));
        };
        if (!has_parent) {
            emit(in);
            continue;
        }
        // in \ ch, peeled one coordinate at a time
        std::vector<GridRange> cur = in;
        for (int c = 1; c <= s + 1; ++c) {
            const GridRange& a = cur[c - 1];
            const GridRange& x = ch[c - 1];
            if (a.lo < x.lo) {
                std::vector<GridRange> piece = cur;
                piece[c - 1] = GridRange{a.lo, x.lo};
                emit(piece);
            }
            if (x.hi < a.hi) {
                std::vector<GridRange> piece = cur;
                piece[c - 1] = GridRange{x.hi, a.hi};
                emit(piece);
            }
            cur[c - 1] = x;
        }
    }
    if (covered != total) throw PreconditionError("Q-block decomposition did not exhaust the box");
    return out;
}

}  // namespace tdiff
