#include "tdiff/maximal.hpp"

#include "tdiff/error.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace tdiff {

BasisFunction BasisFunction::constant(const LeveledBasis& b, const Rational& c) {
    BasisFunction f;
    f.values.assign(b.nodes.size(), c);
    return f;
}

BasisFunction BasisFunction::random(const LeveledBasis& b, std::uint64_t seed, long max_value) {
    std::mt19937_64 g(seed);
    BasisFunction f;
    f.values.reserve(b.nodes.size());
    for (std::size_t i = 0; i < b.nodes.size(); ++i)
        f.values.push_back(Rational(static_cast<long>(g() % static_cast<std::uint64_t>(max_value + 1))));
    return f;
}

BasisFunction counterexample_function(const LeveledBasis& b) {
    if (b.depth() < 1) throw InvalidArgument("counterexample needs at least one level");
    BasisFunction f;
    f.values.assign(b.nodes.size(), Rational(0));
    for (std::size_t n = 0; n < b.nodes.size(); ++n) {
        std::uint64_t in_f = b.nodes[n].sel_mask & b.nodes[n].q0_mask;
        for (int j = 1; j <= b.nodes[n].level; ++j)
            if (in_f >> (j - 1) & 1) {
                Rational v = 1 / b.schedule.level(j).eps;
                if (v > f.values[n]) f.values[n] = v;
            }
    }
    return f;
}

Evaluation evaluate(const LeveledBasis& b, const BasisFunction& f) {
    if (f.values.size() != b.nodes.size()) throw InvalidArgument("function does not match the basis");
    const std::size_t N = b.nodes.size();
    Evaluation e;
    e.piece.resize(N);
    e.integral.resize(N);
    for (std::size_t n = 0; n < N; ++n) e.piece[n] = b.residual_measure(static_cast<int>(n));
    // children are always stored after their parents
    for (std::size_t k = N; k-- > 0;) {
        const BasisNode& nd = b.nodes[k];
        Rational s = f.values[k] * e.piece[k];
        for (int g : nd.groups) {
            const ConfigGroup& G = b.groups[g];
            Rational ratio = Rational(G.count) / Rational(nd.count);
            for (int c : G.cells) s += ratio * e.integral[c];
        }
        e.integral[k] = s;
    }
    e.avg.resize(b.groups.size());
    for (std::size_t g = 0; g < b.groups.size(); ++g) {
        const ConfigGroup& G = b.groups[g];
        const Configuration& c = b.tpl(G.level, G.t).config;
        Rational q = c.q0.measure();
        e.avg[g].assign(c.d + 1, Rational(0));
        for (int cell : G.cells)
            for (int k = 0; k <= c.d; ++k)
                if (b.nodes[cell].members >> k & 1u) e.avg[g][k] += e.integral[cell];
        for (auto& v : e.avg[g]) v /= q;
    }
    return e;
}

Rational average(const LeveledBasis& b, const Evaluation& e, int group, int member) {
    (void)b;
    return e.avg.at(group).at(member);
}

std::vector<Rational> maximal_values(const LeveledBasis& b, const Evaluation& e, const Window& w) {
    std::vector<Rational> A(b.nodes.size(), Rational(0));
    for (std::size_t n = 1; n < b.nodes.size(); ++n) {
        const BasisNode& nd = b.nodes[n];
        Rational a = A[nd.parent];
        if (w.has(nd.level)) {
            const auto& av = e.avg[nd.group];
            for (std::size_t k = 0; k < av.size(); ++k)
                if (nd.members >> k & 1u && av[k] > a) a = av[k];
        }
        A[n] = a;
    }
    return A;
}

Rational maximal_value(const LeveledBasis& b, const BasisFunction& f, int node, const Window& w) {
    if (node < 0 || node >= static_cast<int>(b.nodes.size())) throw InvalidArgument("no such atom");
    Evaluation e = evaluate(b, f);
    return maximal_values(b, e, w)[node];
}

int locate_cell(const LeveledBasis& b, const Box& cell) {
    if (!b.domain.contains(cell)) throw InvalidArgument("cell " + cell.str() + " is not inside U");
    int cur = 0;
    for (;;) {
        const BasisNode& nd = b.nodes[cur];
        if (nd.groups.empty()) return cur;
        int found = -1;
        for (int g : nd.groups)
            for (int c : b.groups[g].cells)
                if (b.node_box(c).contains(cell)) found = c;
        if (found < 0) return cur;
        cur = found;
    }
}

namespace {

struct PowCache {
    Rational p;
    bool integer;
    RealInterval of(const Rational& v) const {
        if (v == 0) return RealInterval(Rational(0));
        return RealInterval(v).pow(p);
    }
};

}  // namespace

std::optional<Rational> norm_pow_exact(const LeveledBasis& b, const Evaluation& e, const BasisFunction& f, const Rational& p) {
    if (!is_integer(p)) return std::nullopt;
    unsigned long n = p.get_num().get_ui();
    Rational s = 0;
    for (std::size_t k = 0; k < b.nodes.size(); ++k)
        if (f.values[k] != 0) s += pow(abs(f.values[k]), n) * Rational(b.nodes[k].count) * e.piece[k];
    return s;
}

RealInterval norm_pow(const LeveledBasis& b, const Evaluation& e, const BasisFunction& f, const Rational& p) {
    if (auto ex = norm_pow_exact(b, e, f, p)) return RealInterval(*ex);
    // group equal values so each power is enclosed once
    std::map<Rational, Rational> mass;
    for (std::size_t k = 0; k < b.nodes.size(); ++k)
        if (f.values[k] != 0) mass[abs(f.values[k])] += Rational(b.nodes[k].count) * e.piece[k];
    RealInterval s(Rational(0));
    for (const auto& [v, m] : mass) s = s + RealInterval(v).pow(p) * RealInterval(m);
    return s;
}

WeakRatio weak_type_ratio(const LeveledBasis& b, const BasisFunction& f, const Rational& p, const Window& w) {
    if (p < 1) throw InvalidArgument("weak-type ratio needs p >= 1");
    Evaluation e = evaluate(b, f);
    std::optional<Rational> exact = norm_pow_exact(b, e, f, p);
    RealInterval npp = exact ? RealInterval(*exact) : norm_pow(b, e, f, p);
    if (exact ? *exact == 0 : !npp.positive()) {
        WeakRatio r;
        r.value = RealInterval(Rational(0));
        r.lambda = 0;
        r.level_measure = 0;
        return r;
    }
    std::vector<Rational> A = maximal_values(b, e, w);
    std::map<Rational, Rational> dist;
    for (std::size_t k = 0; k < b.nodes.size(); ++k) {
        Rational m = Rational(b.nodes[k].count) * e.piece[k];
        if (m != 0) dist[A[k]] += m;
    }
    std::vector<LevelSet> ls;
    for (const auto& [v, m] : dist) ls.push_back(LevelSet{v, m});
    return ratio_from_distribution(std::move(ls), exact, npp, p);
}

DerivateBounds derivate_bounds(const LeveledBasis& b, const Evaluation& e, int node, const Window& w) {
    DerivateBounds d;
    d.node = node;
    d.window = w;
    for (int n = node; n > 0; n = b.nodes[n].parent) {
        const BasisNode& nd = b.nodes[n];
        if (!w.has(nd.level)) continue;
        const auto& av = e.avg[nd.group];
        for (std::size_t k = 0; k < av.size(); ++k) {
            if (!(nd.members >> k & 1u)) continue;
            if (!d.upper_lb || av[k] > *d.upper_lb) d.upper_lb = av[k];
            if (!d.lower_ub || av[k] < *d.lower_ub) d.lower_ub = av[k];
        }
    }
    return d;
}

LpLedger lp_ledger(const Schedule& s, const std::vector<LedgerRow>& rows, const Rational& p, const Rational& domain_measure) {
    if (p < 1) throw InvalidArgument("p must be >= 1");
    LpLedger L;
    L.p = p;
    L.total = RealInterval(Rational(0));
    L.target_total = RealInterval(Rational(0));
    bool integer = is_integer(p);
    for (const auto& r : rows) {
        const ScheduleLevel& lv = s.level(r.j);
        LpRow row;
        row.j = r.j;
        row.f_measure = r.f;
        Rational half_j2 = domain_measure / (2 * Rational(r.j) * r.j);
        if (integer) {
            unsigned long n = p.get_num().get_ui();
            row.term_exact = pow(1 / r.eps, n) * r.f;
            row.term = RealInterval(*row.term_exact);
            Rational bound = pow(1 / r.eps, n) * half_j2;
            row.bound = RealInterval(bound);
            row.within_bound = *row.term_exact <= bound;
        } else {
            RealInterval inv = RealInterval(1 / r.eps).pow(p);
            row.term = inv * RealInterval(r.f);
            row.bound = inv * RealInterval(half_j2);
            row.within_bound = row.term.certainly_leq(row.bound) || r.f <= half_j2;
        }
        RealInterval tinv = (RealInterval(Rational(1)) / lv.target).pow(p);
        row.target_bound = tinv * RealInterval(half_j2);
        row.within_target_bound = row.term.certainly_leq(row.target_bound);
        L.total = L.total + row.term;
        L.target_total = L.target_total + row.target_bound;
        row.partial = L.total;
        L.rows.push_back(std::move(row));
    }
    return L;
}

LpLedger lp_ledger(const Schedule& s, const std::vector<LedgerRow>& rows, const Rational& p) {
    return lp_ledger(s, rows, p, Rational(1));
}

LpLedger lp_ledger(const LeveledBasis& b, const Rational& p) {
    return lp_ledger(b.schedule, b.ledger(), p, b.domain.measure());
}

ExceptionalBound exceptional_lower_bound(const std::vector<LedgerRow>& rows, int J) {
    ExceptionalBound e;
    e.value = e.core = e.union_fstar = e.sum_f = 0;
    if (J <= 0) return e;
    if (J > static_cast<int>(rows.size())) throw InvalidArgument("ledger has only " + std::to_string(rows.size()) + " levels");
    e.core = rows[J - 1].covered;
    Rational miss = 1;
    for (int j = 1; j <= J; ++j) {
        miss *= 1 - pow2(-rows[j - 1].m);
        e.sum_f += rows[j - 1].f;
    }
    e.union_fstar = e.core * (1 - miss);
    e.value = e.union_fstar > e.sum_f ? Rational(e.union_fstar - e.sum_f) : Rational(0);
    return e;
}

ExceptionalBound exceptional_lower_bound(const LeveledBasis& b, int J) {
    if (J > b.depth()) throw InvalidArgument("basis has depth " + std::to_string(b.depth()));
    return exceptional_lower_bound(b.ledger(), J);
}

NestingIndex nesting_index(const LeveledBasis& b) {
    std::vector<std::vector<Box>> boxes(b.groups.size());
    for (std::size_t g = 0; g < b.groups.size(); ++g) boxes[g] = b.group_configuration(static_cast<int>(g)).members();
    NestingIndex ix;
    std::vector<std::size_t> first(b.groups.size());
    for (std::size_t g = 0; g < b.groups.size(); ++g) {
        first[g] = ix.members.size();
        for (std::size_t k = 0; k < boxes[g].size(); ++k)
            ix.members.push_back(NestingIndex::Member{static_cast<int>(g), static_cast<int>(k), b.groups[g].level, {}, {}});
    }
    for (auto& m : ix.members) {
        const Box& X = boxes[m.group][m.k];
        for (std::size_t k2 = 0; k2 < boxes[m.group].size(); ++k2)
            if (static_cast<int>(k2) != m.k && boxes[m.group][k2].contains(X) && !(boxes[m.group][k2] == X))
                m.containing.push_back(first[m.group] + k2);
        for (int node = b.groups[m.group].parent; node > 0; node = b.nodes[node].parent) {
            int g2 = b.nodes[node].group;
            for (std::size_t k2 = 0; k2 < boxes[g2].size(); ++k2) {
                const Box& Y = boxes[g2][k2];
                if (boxes_disjoint(X, Y)) continue;
                if (!Y.contains(X))
                    throw PreconditionError("members " + X.str() + " and " + Y.str() + " overlap without nesting");
                m.containing.push_back(first[g2] + k2);
                m.ancestors.push_back(first[g2] + k2);
            }
        }
    }
    return ix;
}

namespace {

struct Levels {
    std::vector<Rational> avg;
    std::vector<Rational> lo;  // largest average among members strictly containing it
};

Levels member_levels(const NestingIndex& ix, const Evaluation& e) {
    Levels l;
    l.avg.reserve(ix.members.size());
    for (const auto& m : ix.members) l.avg.push_back(e.avg[m.group][m.k]);
    l.lo.assign(ix.members.size(), Rational(0));
    for (std::size_t i = 0; i < ix.members.size(); ++i)
        for (std::size_t c : ix.members[i].containing)
            if (l.avg[c] > l.lo[i]) l.lo[i] = l.avg[c];
    return l;
}

}  // namespace

DisjointnessResult maximal_disjointness_check(const LeveledBasis& b, const NestingIndex& ix, const BasisFunction& f,
                                              const Rational& lambda) {
    Levels l = member_levels(ix, evaluate(b, f));
    DisjointnessResult r;
    r.lambdas = 1;
    auto maximal = [&](std::size_t i) { return l.lo[i] <= lambda && lambda < l.avg[i]; };
    for (std::size_t i = 0; i < ix.members.size(); ++i) {
        if (!maximal(i)) continue;
        ++r.maximal;
        for (std::size_t a : ix.members[i].ancestors) {
            ++r.pairs;
            if (maximal(a)) {
                r.ok = false;
                r.detail = "maximal members at levels " + std::to_string(ix.members[a].level) + " and " +
                           std::to_string(ix.members[i].level) + " intersect";
                return r;
            }
        }
    }
    return r;
}

DisjointnessResult maximal_disjointness_check(const LeveledBasis& b, const BasisFunction& f, const Rational& lambda) {
    return maximal_disjointness_check(b, nesting_index(b), f, lambda);
}

DisjointnessResult maximal_disjointness_grid(const LeveledBasis& b, const NestingIndex& ix, const BasisFunction& f) {
    Levels l = member_levels(ix, evaluate(b, f));
    std::vector<Rational> g = l.avg;
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    DisjointnessResult r;
    r.lambdas = g.size();
    auto count_in = [&](const Rational& lo, const Rational& hi) -> std::size_t {
        auto a = std::lower_bound(g.begin(), g.end(), lo);
        auto z = std::lower_bound(g.begin(), g.end(), hi);
        return z > a ? static_cast<std::size_t>(z - a) : 0;
    };
    for (std::size_t i = 0; i < ix.members.size(); ++i) {
        r.maximal += count_in(l.lo[i], l.avg[i]);
        for (std::size_t a : ix.members[i].ancestors) {
            ++r.pairs;
            const Rational& lo = std::max(l.lo[i], l.lo[a]);
            const Rational& hi = std::min(l.avg[i], l.avg[a]);
            if (count_in(lo, hi) > 0) {
                r.ok = false;
                r.detail = "for lambda = " + to_string(*std::lower_bound(g.begin(), g.end(), lo)) + " maximal members at levels " +
                           std::to_string(ix.members[a].level) + " and " + std::to_string(ix.members[i].level) + " intersect";
                return r;
            }
        }
    }
    return r;
}

DisjointnessResult maximal_disjointness_grid(const LeveledBasis& b, const BasisFunction& f) {
    return maximal_disjointness_grid(b, nesting_index(b), f);
}

DisjointnessResult maximal_disjointness_check(const std::vector<std::pair<int, Box>>& members, const ExplicitFunction& f,
                                              const Rational& lambda) {
    const std::size_t n = members.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = a + 1; c < n; ++c) {
            if (members[a].first == members[c].first) continue;
            const Box& x = members[a].second;
            const Box& y = members[c].second;
            if (!boxes_disjoint(x, y) && !x.contains(y) && !y.contains(x))
                throw PreconditionError("members " + x.str() + " and " + y.str() + " at levels " + std::to_string(members[a].first) +
                                        " and " + std::to_string(members[c].first) + " overlap without nesting");
        }
    std::vector<bool> above(n);
    for (std::size_t a = 0; a < n; ++a) above[a] = average(f, members[a].second) > lambda;
    std::vector<std::size_t> maxi;
    for (std::size_t a = 0; a < n; ++a) {
        if (!above[a]) continue;
        bool dominated = false;
        for (std::size_t c = 0; c < n && !dominated; ++c) {
            if (c == a || !above[c]) continue;
            const Box& x = members[a].second;
            const Box& y = members[c].second;
            if (y.contains(x) && (!(x == y) || members[c].first < members[a].first || (members[c].first == members[a].first && c < a)))
                dominated = true;
        }
        if (!dominated) maxi.push_back(a);
    }
    DisjointnessResult r;
    r.lambdas = 1;
    r.maximal = maxi.size();
    for (std::size_t a = 0; a < maxi.size(); ++a)
        for (std::size_t c = a + 1; c < maxi.size(); ++c) {
            if (members[maxi[a]].first == members[maxi[c]].first) continue;
            ++r.pairs;
            if (!boxes_disjoint(members[maxi[a]].second, members[maxi[c]].second)) {
                r.ok = false;
                r.detail = "maximal members " + members[maxi[a]].second.str() + " and " + members[maxi[c]].second.str() + " intersect";
                return r;
            }
        }
    return r;
}

}  // namespace tdiff
