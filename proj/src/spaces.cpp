#include "tdiff/spaces.hpp"

#include "tdiff/error.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace tdiff {

std::string to_string(const Exponent& p) {
    if (!p) return "inf";
    return is_integer(*p) ? p->get_num().get_str() : to_string(*p);
}

Exponent parse_exponent(const std::string& s) {
    if (s == "inf" || s == "infinity" || s == "oo") return std::nullopt;
    Rational p = parse_rational(s);
    if (p < 1) throw InvalidArgument("exponent must be >= 1, got " + s);
    return p;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::in: return "in";
        case Verdict::out: return "out";
        case Verdict::not_probed: return "not probed";
    }
    return "?";
}

// ---- column space ----

ColumnSpace example_e1(int rows) {
    if (rows < 1) throw InvalidArgument("the column space needs at least one row");
    return ColumnSpace{rows, true};
}

Rational ColumnFunction::at(const Rational& u, int j) const {
    if (j == 0) return on_interval;
    auto it = points.find({u, j});
    if (it != points.end()) return it->second;
    if (j >= 1 && j <= static_cast<int>(row_values.size())) return row_values[j - 1];
    return Rational(0);
}

ColumnFunction ColumnFunction::indicator_of_k(int rows) {
    ColumnFunction f;
    f.row_values.assign(rows, Rational(1));
    return f;
}

Rational column_average_pair(const ColumnFunction& f, const Rational& u, int j) {
    // the I point is countable, so it carries no mass; the K point has mass 1
    return f.at(u, j);
}

ColumnDerivates column_derivates(const ColumnSpace& s, const ColumnFunction& f, const ColumnPoint& x, int from) {
    if (!(x.u > 0 && x.u <= 1)) throw InvalidArgument("u must lie in (0, 1]");
    if (x.j < 0 || x.j > s.rows) throw InvalidArgument("row out of range");
    ColumnDerivates d;
    d.value = f.at(x.u, x.j);
    if (x.j > 0) {
        // only the singleton shrinks to a point of K
        d.upper = d.lower = d.value;
        return d;
    }
    if (from < 1 || from > s.rows) throw InvalidArgument("window start must lie in 1.." + std::to_string(s.rows));
    bool first = true;
    for (int j = from; j <= s.rows; ++j) {
        Rational a = column_average_pair(f, x.u, j);
        if (first || a > d.upper) d.upper = a;
        if (first || a < d.lower) d.lower = a;
        first = false;
    }
    return d;
}

std::vector<ProbePoint> probe_e1(const ColumnSpace& s, const std::vector<Exponent>& ps) {
    // finitely supported test functions: past their last row every I point has
    // averages 0 = f there, and K points are singletons
    std::mt19937_64 g(1);
    bool deep_ok = true;
    for (int t = 0; t < 20 && s.rows >= 2; ++t) {
        ColumnFunction f;
        int last = 1 + static_cast<int>(g() % static_cast<std::uint64_t>(s.rows - 1));
        for (int k = 0; k < 5; ++k) f.points[{Rational(static_cast<long>(1 + g() % 8), 8), 1 + static_cast<int>(g() % last)}] = Rational(static_cast<long>(1 + g() % 9));
        for (long u = 1; u <= 8; ++u) {
            auto d = column_derivates(s, f, ColumnPoint{Rational(u, 8), 0}, last + 1 <= s.rows ? last + 1 : s.rows);
            if (last + 1 <= s.rows && (d.upper != 0 || d.lower != 0)) deep_ok = false;
        }
    }
    auto k = ColumnFunction::indicator_of_k(s.rows);
    auto dk = column_derivates(s, k, ColumnPoint{Rational(1, 2), 0}, 1);
    std::vector<ProbePoint> out;
    for (const auto& p : ps) {
        ProbePoint pt{p, Verdict::not_probed, {}};
        if (p) {
            pt.verdict = deep_ok ? Verdict::in : Verdict::out;
            pt.witness = deep_ok ? "deep pair averages of finitely supported f vanish on I" : "deep pair averages disagree on I";
        } else {
            pt.witness = "1_K has derivates " + to_string(dk.upper) + " on I where it is 0; the failure needs uncountably many points";
        }
        out.push_back(std::move(pt));
    }
    return out;
}

// ---- weighted dyadic space ----

BigInt e4_r(const BigInt& i, int j) {
    if (i < 1) throw InvalidArgument("i must be >= 1");
    BigInt N = pow2_int(static_cast<unsigned long>(j));
    BigInt c = (i + N - 1) / N;
    return BigInt(N * c - i);
}

Rational e4_weight(const BigInt& i, int j) {
    if (j < 1 || i > pow2_int(2UL * static_cast<unsigned long>(j))) throw InvalidArgument("(i, j) outside the index set");
    return pow2(-2L * j - e4_r(i, j).get_si());
}

namespace {

// sum_{r=0}^{k-1} x^r for x = 2^-e
Rational geometric(long e, const BigInt& k) {
    Rational x = pow2(-e);
    // (1 - x^k) / (1 - x)
    Rational xk = pow2(-e * k.get_si());
    return (1 - xk) / (1 - x);
}

}  // namespace

Rational e4_limit_gn(int n) {
    if (n < 1) throw InvalidArgument("n must be >= 1");
    return (Rational(2, 3) + geometric(2, BigInt(n + 1))) / 3;
}

E4Table example_e4(int j_max, int n, int sum_upto) {
    if (!(1 <= n && n < j_max && j_max <= 20))
        throw InvalidArgument("need 1 <= n < j_max <= 20, got n = " + std::to_string(n) + ", j_max = " + std::to_string(j_max));
    E4Table t;
    t.j_max = j_max;
    t.n = n;
    t.limit_g = Rational(2, 3);
    t.limit_gn = e4_limit_gn(n);
    t.fitted_c = 0;
    for (int j = 1; j <= j_max; ++j) {
        BigInt N = pow2_int(static_cast<unsigned long>(j));
        // everything below is scaled by 4^j; the K* block holds r = 0..N-1
        Rational mass = 1 + geometric(1, N);
        Rational g = Rational(2, 3) + geometric(2, N);
        BigInt kept = std::min(BigInt(n + 1), N);
        Rational gn = Rational(2, 3) + geometric(2, kept);
        E4Row row;
        row.j = j;
        row.avg_g = g / mass;
        row.avg_gn = gn / mass;
        row.dev_g = abs(row.avg_g - t.limit_g);
        if (j <= sum_upto) {
            // direct sum over the block of i = N + 1 .. 2N (any block gives the same)
            Rational len = pow2(-2L * j), wsum = 0, gsum = 0, gnsum = 0;
            long Ni = N.get_si();
            for (long i = Ni + 1; i <= 2 * Ni && i <= (1L << (2 * j)); ++i) {
                Rational w = e4_weight(BigInt(i), j);
                Rational gv = pow2(-e4_r(BigInt(i), j).get_si());
                wsum += w;
                gsum += gv * w;
                if (gv >= pow2(-n)) gnsum += gv * w;
            }
            Rational ag = (len * Rational(2, 3) + gsum) / (len + wsum);
            Rational agn = (len * Rational(2, 3) + gnsum) / (len + wsum);
            if (ag != row.avg_g || agn != row.avg_gn)
                throw PreconditionError("closed form and direct sum disagree at j = " + std::to_string(j));
            row.summed = true;
        }
        Rational c = Rational(N) * row.dev_g;
        if (c > t.fitted_c) t.fitted_c = c;
        t.rows.push_back(std::move(row));
    }
    return t;
}

// ---- probes and gluing ----

std::vector<ProbePoint> probe_schedule(const Schedule& s, const std::vector<Exponent>& ps) {
    std::vector<ProbePoint> out;
    std::optional<std::vector<LedgerRow>> rows;
    for (const auto& p : ps) {
        ProbePoint pt{p, Verdict::not_probed, {}};
        if (!s.growth) {
            pt.witness = "no growth descriptor";
        } else if (!p) {
            pt.verdict = Verdict::in;
            pt.witness = "bounded functions are in every L^p with p >= p0";
        } else if (classify_diff_range(s, *p) == Range::in) {
            pt.verdict = Verdict::in;
            pt.witness = "sup_j eps_j d_j^(1/p) is finite";
        } else {
            pt.verdict = Verdict::out;
            if (!rows) rows = ledger_oracle(s, std::nullopt, Rational(1));
            LpLedger L = lp_ledger(s, *rows, *p);
            ExceptionalBound e = exceptional_lower_bound(*rows, s.depth());
            pt.witness = "eps_j d_j^(1/p) unbounded; ||f||_p^p <= " + to_decimal(L.total.hi_rational(), 6) + " over " +
                         std::to_string(s.depth()) + " levels, exceptional set >= " + to_decimal(e.value, 6);
        }
        out.push_back(std::move(pt));
    }
    return out;
}

Verdict combine(Verdict a, Verdict b) {
    if (a == Verdict::out || b == Verdict::out) return Verdict::out;
    if (a == Verdict::not_probed || b == Verdict::not_probed) return Verdict::not_probed;
    return Verdict::in;
}

std::vector<ProbePoint> GluedSpace::probe(const std::vector<Exponent>& ps) const {
    if (components.empty()) throw PreconditionError("empty glue");
    std::vector<ProbePoint> acc = components.front().probe(ps);
    for (std::size_t c = 1; c < components.size(); ++c) {
        auto next = components[c].probe(ps);
        for (std::size_t i = 0; i < ps.size(); ++i) {
            acc[i].verdict = combine(acc[i].verdict, next[i].verdict);
            acc[i].witness += " | " + next[i].witness;
        }
    }
    return acc;
}

std::size_t GluedSpace::owner(const std::string& element) const {
    std::optional<std::size_t> found;
    for (std::size_t c = 0; c < components.size(); ++c)
        for (const auto& e : components[c].elements)
            if (e == element) {
                if (found && *found != c) throw PreconditionError("element " + element + " belongs to two components");
                found = c;
            }
    if (!found) throw InvalidArgument("no element " + element);
    return *found;
}

GluedComponent component_of(const std::string& name, const Schedule& s) {
    GluedComponent c;
    c.name = name;
    for (const auto& L : s.levels)
        for (long k = 0; k <= L.d; ++k) c.elements.push_back("level " + std::to_string(L.j) + " member " + std::to_string(k));
    c.probe = [s](const std::vector<Exponent>& ps) { return probe_schedule(s, ps); };
    return c;
}

GluedComponent component_of(const std::string& name, const ColumnSpace& e1) {
    GluedComponent c;
    c.name = name;
    for (int j = 1; j <= e1.rows; ++j) {
        c.elements.push_back("singletons row " + std::to_string(j));
        c.elements.push_back("pairs row " + std::to_string(j));
    }
    c.probe = [e1](const std::vector<Exponent>& ps) { return probe_e1(e1, ps); };
    return c;
}

GluedSpace glue(GluedComponent a, GluedComponent b) {
    if (a.name == b.name) b.name += "'";
    // tag the carriers so they are disjoint
    for (auto& e : a.elements) e = a.name + ":" + e;
    for (auto& e : b.elements) e = b.name + ":" + e;
    GluedSpace g;
    g.components.push_back(std::move(a));
    g.components.push_back(std::move(b));
    return g;
}

// ---- transfer ----

Rational IntervalUnionBasis::image_length(int group, int member) const {
    Rational s = 0;
    for (const auto& sp : members.at(group).at(member)) s += sp.length();
    return s;
}

std::vector<Span> merge_spans(std::vector<Span> v) {
    std::sort(v.begin(), v.end(), [](const Span& x, const Span& y) { return x.a < y.a; });
    std::vector<Span> out;
    for (auto& s : v) {
        if (s.length() <= 0) continue;
        if (!out.empty() && out.back().b >= s.a) {
            if (s.b > out.back().b) out.back().b = s.b;
        } else {
            out.push_back(s);
        }
    }
    return out;
}

IntervalUnionBasis transfer_to_interval(const LeveledBasis& b) {
    IntervalUnionBasis t;
    const std::size_t N = b.nodes.size();
    t.total = b.domain.measure();
    t.start.assign(N, Rational(0));
    t.length.assign(N, Rational(0));
    t.residual.assign(N, Span{});
    t.members.resize(b.groups.size());
    for (std::size_t n = 0; n < N; ++n) {
        const BasisNode& nd = b.nodes[n];
        t.length[n] = nd.measure;
        Rational piece = b.residual_measure(static_cast<int>(n));
        t.residual[n] = Span{t.start[n], t.start[n] + piece};
        Rational at = t.start[n] + piece;
        for (int g : nd.groups) {
            const ConfigGroup& G = b.groups[g];
            Rational per_parent = Rational(G.count) / Rational(nd.count);
            Rational block = b.tpl(G.level, G.t).union_measure;
            Rational c = at;
            for (int cell : G.cells) {
                t.start[cell] = c;
                c += b.nodes[cell].measure;
            }
            if (c - at != block) throw PreconditionError("cells do not tile their configuration");
            at += per_parent * block;
        }
        if (at != t.start[n] + nd.measure) throw PreconditionError("layout does not fill atom " + std::to_string(n));
    }
    for (std::size_t g = 0; g < b.groups.size(); ++g) {
        const ConfigGroup& G = b.groups[g];
        int d = static_cast<int>(b.tpl(G.level, G.t).config.d);
        t.members[g].resize(d + 1);
        for (int k = 0; k <= d; ++k) {
            std::vector<Span> v;
            for (int cell : G.cells)
                if (b.nodes[cell].members >> k & 1u) v.push_back(Span{t.start[cell], t.start[cell] + t.length[cell]});
            t.members[g][k] = merge_spans(std::move(v));
        }
    }
    return t;
}

namespace {

Rational spans_overlap(const std::vector<Span>& x, const std::vector<Span>& y) {
    Rational s = 0;
    for (const auto& a : x)
        for (const auto& c : y) {
            Rational lo = std::max(a.a, c.a), hi = std::min(a.b, c.b);
            if (hi > lo) s += hi - lo;
        }
    return s;
}

Rational spans_length(const std::vector<Span>& x) {
    Rational s = 0;
    for (const auto& a : x) s += a.length();
    return s;
}

}  // namespace

Report verify_transfer(const LeveledBasis& b, const IntervalUnionBasis& t) {
    Report r;
    bool ok = t.start[0] == 0 && t.length[0] == t.total;
    r.add("root image", ok, ok ? "" : "root is not [0, |U|)");
    Rational level1 = t.residual[0].length();
    for (int n : b.nodes_at(1)) level1 += Rational(b.nodes[n].count) * t.length[n];
    r.add("level-1 images fill U", level1 == t.total, to_string(level1) + " vs " + to_string(t.total));
    std::string bad;
    for (std::size_t g = 0; g < b.groups.size() && bad.empty(); ++g) {
        auto boxes = b.group_configuration(static_cast<int>(g)).members();
        for (std::size_t k = 0; k < boxes.size(); ++k)
            if (t.image_length(static_cast<int>(g), static_cast<int>(k)) != boxes[k].measure()) {
                bad = "group " + std::to_string(g) + " member " + std::to_string(k);
                break;
            }
    }
    r.add("image lengths", bad.empty(), bad);
    // pairwise relations of the representative members; large bases check every member
    // against its own configuration and its ancestors plus a seeded sample of other pairs
    std::vector<std::pair<Box, const std::vector<Span>*>> all;
    std::vector<std::size_t> first(b.groups.size());
    for (std::size_t g = 0; g < b.groups.size(); ++g) {
        first[g] = all.size();
        auto boxes = b.group_configuration(static_cast<int>(g)).members();
        for (std::size_t k = 0; k < boxes.size(); ++k) all.emplace_back(boxes[k], &t.members[g][k]);
    }
    std::size_t pairs = 0;
    bad.clear();
    auto check = [&](std::size_t i, std::size_t k) {
        ++pairs;
        const Box& x = all[i].first;
        const Box& y = all[k].first;
        Rational src = 0;
        if (auto z = intersect_boxes(x, y)) src = z->measure();
        Rational img = spans_overlap(*all[i].second, *all[k].second);
        bool same = src == img;
        if (same && x.contains(y)) same = img == spans_length(*all[k].second);
        if (same && y.contains(x)) same = img == spans_length(*all[i].second);
        if (!same && bad.empty()) bad = x.str() + " and " + y.str();
    };
    const std::size_t full_limit = 2000;
    if (all.size() <= full_limit) {
        for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t k = i + 1; k < all.size(); ++k) check(i, k);
    } else {
        for (std::size_t g = 0; g < b.groups.size(); ++g) {
            std::size_t n = t.members[g].size();
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t k = i + 1; k < n; ++k) check(first[g] + i, first[g] + k);
                for (int node = b.groups[g].parent; node > 0; node = b.nodes[node].parent) {
                    int g2 = b.nodes[node].group;
                    for (std::size_t k = 0; k < t.members[g2].size(); ++k) check(first[g] + i, first[g2] + k);
                }
            }
        }
        std::mt19937_64 rng(1);
        for (int s = 0; s < 20000; ++s) {
            std::size_t i = rng() % all.size(), k = rng() % all.size();
            if (i != k) check(i, k);
        }
    }
    r.add("pair relations", bad.empty(), bad.empty() ? std::to_string(pairs) + " pairs" : bad);
    return r;
}

WeakRatio interval_weak_ratio(const LeveledBasis& b, const IntervalUnionBasis& t, const BasisFunction& f, const Rational& p) {
    if (f.values.size() != b.nodes.size()) throw InvalidArgument("function does not match the basis");
    const std::size_t N = b.nodes.size();
    // integral over one instance of every atom type, from the layout
    std::vector<Rational> whole(N);
    for (std::size_t k = N; k-- > 0;) {
        const BasisNode& nd = b.nodes[k];
        Rational s = f.values[k] * t.residual[k].length();
        for (int g : nd.groups) {
            Rational per_parent = Rational(b.groups[g].count) / Rational(nd.count);
            Rational one = 0;
            for (int cell : b.groups[g].cells) one += whole[cell];
            s += per_parent * one;
        }
        whole[k] = s;
    }
    // the image of a member is a union of whole cell instances
    std::map<Rational, std::vector<int>> cell_at;
    for (std::size_t n = 1; n < N; ++n) cell_at[t.start[n]].push_back(static_cast<int>(n));
    auto integral = [&](const std::vector<Span>& v) {
        Rational s = 0;
        for (const auto& sp : v) {
            Rational x = sp.a;
            while (x < sp.b) {
                auto it = cell_at.find(x);
                if (it == cell_at.end()) throw PreconditionError("member image does not start at a cell");
                int c = -1;
                for (int cand : it->second)
                    if (x + t.length[cand] <= sp.b && (c < 0 || t.length[cand] > t.length[c])) c = cand;
                if (c < 0) throw PreconditionError("member image splits a cell");
                s += whole[c];
                x += t.length[c];
            }
        }
        return s;
    };
    // sweep over [0, |U|): spans are unions of whole cells and pieces never straddle a
    // cell boundary, so a span holds a piece iff it holds the piece's left end
    struct Event {
        Rational x;
        int kind;  // 0 remove, 1 add, 2 query
        Rational avg;
        std::size_t node;
    };
    std::vector<Event> ev;
    for (std::size_t g = 0; g < t.members.size(); ++g)
        for (const auto& m : t.members[g]) {
            Rational avg = integral(m) / spans_length(m);
            for (const auto& sp : m) {
                ev.push_back(Event{sp.a, 1, avg, 0});
                ev.push_back(Event{sp.b, 0, avg, 0});
            }
        }
    for (std::size_t n = 0; n < N; ++n)
        if (t.residual[n].length() > 0) ev.push_back(Event{t.residual[n].a, 2, Rational(0), n});
    std::sort(ev.begin(), ev.end(), [](const Event& x, const Event& y) { return x.x < y.x || (x.x == y.x && x.kind < y.kind); });
    std::vector<Rational> mf(N, Rational(0));
    std::multiset<Rational> active;
    for (const auto& e : ev) {
        if (e.kind == 0) active.erase(active.find(e.avg));
        else if (e.kind == 1) active.insert(e.avg);
        else if (!active.empty()) mf[e.node] = std::max(Rational(0), *active.rbegin());
    }
    std::map<Rational, Rational> dist;
    bool integer = is_integer(p);
    Rational norm_q = 0;
    RealInterval norm_pp(Rational(0));
    for (std::size_t n = 0; n < N; ++n) {
        const Span& piece = t.residual[n];
        if (piece.length() == 0) continue;
        Rational mass = Rational(b.nodes[n].count) * piece.length();
        Rational v = abs(f.values[n]);
        if (v != 0) {
            if (integer) norm_q += pow(v, p.get_num().get_ui()) * mass;
            else norm_pp = norm_pp + RealInterval(v).pow(p) * RealInterval(mass);
        }
        dist[mf[n]] += mass;
    }
    std::optional<Rational> exact;
    if (integer) {
        exact = norm_q;
        norm_pp = RealInterval(norm_q);
    }
    if (integer ? norm_q == 0 : !norm_pp.positive()) {
        WeakRatio z;
        z.value = RealInterval(Rational(0));
        return z;
    }
    std::vector<LevelSet> ls;
    for (const auto& [v, m] : dist) ls.push_back(LevelSet{v, m});
    return ratio_from_distribution(std::move(ls), exact, norm_pp, p);
}

}  // namespace tdiff
