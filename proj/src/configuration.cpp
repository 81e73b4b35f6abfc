#include "tdiff/configuration.hpp"

#include "tdiff/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

namespace tdiff {

std::vector<Box> Configuration::members() const {
    std::vector<Box> m{q0};
    m.insert(m.end(), translates.begin(), translates.end());
    return m;
}

Rational Configuration::union_measure() const { return (1 + Rational(d) - eps * d) * q0.measure(); }

Configuration Configuration::shifted(const std::vector<Rational>& offset) const {
    Configuration c = *this;
    c.q0 = q0.shifted(offset);
    for (auto& t : c.translates) t = t.shifted(offset);
    return c;
}

Configuration make_configuration(const Box& q0, const Rational& eps, int d) {
    if (d < 1) throw InvalidArgument("configuration needs d >= 1");
    if (!(eps > 0 && eps <= Rational(1, 2))) throw InvalidArgument("eps must lie in (0, 1/2], got " + to_string(eps));
    long e = static_cast<long>(d - 1) * (d - 1) + 1;
    if (q0.measure() > pow2(-e))
        throw InvalidArgument("|Q0| = " + to_string(q0.measure()) + " exceeds 2^-((d-1)^2+1) = 2^-" +
                              std::to_string(e));
    if (static_cast<int>(q0.sides().size()) < d)
        throw InvalidArgument("Q0 constrains " + std::to_string(q0.sides().size()) + " coordinates, fewer than d = " +
                              std::to_string(d));
    Configuration c;
    c.q0 = q0;
    c.d = d;
    c.eps = eps;
    for (int i = 0; i < d; ++i) {
        const auto& [coord, iv] = q0.sides()[i];
        Rational shift = (1 - eps) * iv.length();
        if (iv.b + shift > 1)
            throw InvalidArgument("translate along coordinate " + std::to_string(coord) + " would wrap around the circle");
        c.shift_coords.push_back(coord);
        BoxSet t = translate_box(q0, coord, shift);
        c.translates.push_back(t.front());
    }
    return c;
}

Configuration standard_configuration(const Rational& eps, int d) {
    if (d < 1) throw InvalidArgument("configuration needs d >= 1");
    long need = static_cast<long>(d - 1) * (d - 1) + 1;
    long k = 1;
    while (k * d < need) ++k;
    return make_configuration(Box::from_sides(std::vector<Interval>(d, Interval{Rational(0), pow2(-k)})), eps, d);
}

namespace {
Box replace_side(const Box& b, int coord, const Interval& iv) {
    std::vector<Box::Side> s = b.sides();
    for (auto& side : s)
        if (side.first == coord) side.second = iv;
    return Box(std::move(s));
}
}  // namespace

std::vector<ConfigCell> configuration_cells(const Configuration& c, int cap) {
    if (c.d > cap)
        throw CapExceeded("d = " + std::to_string(c.d) + " is above the atom-mode cap " + std::to_string(cap) +
                          "; use cell_measure_ledger");
    std::vector<ConfigCell> out;
    for (int mask = 0; mask < (1 << c.d); ++mask) {
        Box b = c.q0;
        std::uint64_t members = 1;
        for (int i = 0; i < c.d; ++i) {
            int coord = c.shift_coords[i];
            Interval iv = c.q0.side(coord);
            Rational cut = iv.a + (1 - c.eps) * iv.length();
            if (mask >> i & 1) {
                b = replace_side(b, coord, Interval{cut, iv.b});
                members |= std::uint64_t{1} << (i + 1);
            } else {
                b = replace_side(b, coord, Interval{iv.a, cut});
            }
        }
        out.push_back(ConfigCell{b, members, mask, 0});
    }
    for (int i = 0; i < c.d; ++i) {
        int coord = c.shift_coords[i];
        Interval q = c.q0.side(coord), t = c.translates[i].side(coord);
        out.push_back(ConfigCell{replace_side(c.q0, coord, Interval{q.b, t.b}), std::uint64_t{1} << (i + 1), -1, i + 1});
    }
    return out;
}

CellMeasureLedger cell_measure_ledger(const Configuration& c) {
    CellMeasureLedger l;
    Rational q = c.q0.measure();
    l.total = 0;
    BigInt binom = 1;
    for (int k = 0; k <= c.d; ++k) {
        Rational m = pow(c.eps, k) * pow(1 - c.eps, c.d - k) * q;
        l.inside.push_back(m);
        l.total += Rational(binom) * m;
        binom = binom * (c.d - k) / (k + 1);
    }
    l.outside = (1 - c.eps) * q;
    l.total += Rational(c.d) * l.outside;
    return l;
}

std::string to_string(NormRegime r) {
    switch (r) {
        case NormRegime::small: return "small";
        case NormRegime::log: return "log";
        case NormRegime::linear: return "linear";
    }
    return "?";
}

NormEstimate config_norm_oracle(const Rational& eps, long d, const Rational& p) {
    if (p <= 1) throw InvalidArgument("config_norm_oracle needs p > 1");
    if (!(eps > 0 && eps <= Rational(1, 2))) throw InvalidArgument("eps must lie in (0, 1/2]");
    if (d < 1) throw InvalidArgument("d must be >= 1");
    NormEstimate n;
    n.p = p;
    n.p_star = p / (p - 1);
    long double pd = to_double(p), ps = to_double(n.p_star);
    n.a_p = static_cast<long double>(to_double(eps)) * std::pow(static_cast<long double>(d), 1.0L / pd);
    long double t1 = ps * std::exp(-ps), t2 = ps * std::exp(-1.0L);
    if (n.a_p <= t1) {
        n.regime = NormRegime::small;
        n.value = 1;
    } else if (n.a_p <= t2) {
        n.regime = NormRegime::log;
        n.value = ps / std::log(ps / n.a_p);
    } else {
        n.regime = NormRegime::linear;
        n.value = std::exp(1.0L) * n.a_p;
    }
    return n;
}

Arrangement build_arrangement(const std::vector<Box>& boxes, bool keep_pieces) {
    Arrangement arr;
    arr.boxes = boxes;
    const std::size_t words = (boxes.size() + 63) / 64;
    std::vector<int> coords;
    for (const Box& b : boxes)
        for (const auto& s : b.sides()) coords.push_back(s.first);
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    std::vector<std::vector<Rational>> cuts(coords.size());
    for (std::size_t k = 0; k < coords.size(); ++k) {
        auto& v = cuts[k];
        v = {Rational(0), Rational(1)};
        for (const Box& b : boxes) {
            Interval iv = b.side(coords[k]);
            v.push_back(iv.a);
            v.push_back(iv.b);
        }
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    std::map<std::vector<std::uint64_t>, Arrangement::Atom> acc;
    std::vector<Box::Side> cur;
    std::function<void(std::size_t, const std::vector<std::size_t>&, const Rational&)> rec =
        [&](std::size_t k, const std::vector<std::size_t>& alive, const Rational& m) {
            if (alive.empty()) return;
            if (k == coords.size()) {
                std::vector<std::uint64_t> sig(words, 0);
                for (std::size_t i : alive) sig[i / 64] |= std::uint64_t{1} << (i % 64);
                auto& atom = acc[sig];
                atom.signature = sig;
                atom.measure += m;
                if (keep_pieces) atom.pieces.push_back(Box(cur));
                return;
            }
            const auto& v = cuts[k];
            for (std::size_t s = 0; s + 1 < v.size(); ++s) {
                std::vector<std::size_t> next;
                for (std::size_t i : alive) {
                    Interval iv = boxes[i].side(coords[k]);
                    if (iv.a <= v[s] && v[s + 1] <= iv.b) next.push_back(i);
                }
                cur.emplace_back(coords[k], Interval{v[s], v[s + 1]});
                rec(k + 1, next, m * (v[s + 1] - v[s]));
                cur.pop_back();
            }
        };
    std::vector<std::size_t> all(boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i) all[i] = i;
    rec(0, all, Rational(1));
    for (auto& [sig, atom] : acc) arr.atoms.push_back(std::move(atom));
    return arr;
}

ExplicitFunction ExplicitFunction::indicator(const Box& b, const Rational& value) { return ExplicitFunction{{b}, {value}}; }

ExplicitFunction ExplicitFunction::constant(const Rational& value) { return ExplicitFunction{{Box::full()}, {value}}; }

Rational ExplicitFunction::integral() const {
    Rational s(0);
    for (std::size_t i = 0; i < cells.size(); ++i) s += abs(values[i]) * cells[i].measure();
    return s;
}

RealInterval ExplicitFunction::norm_pow(const Rational& p) const {
    RealInterval s(Rational(0));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (values[i] == 0) continue;
        s = s + RealInterval(abs(values[i])).pow(p) * RealInterval(cells[i].measure());
    }
    return s;
}

Rational average(const ExplicitFunction& f, const Box& S) {
    Rational m = S.measure();
    if (m == 0) throw InvalidArgument("average over a null set");
    Rational s(0);
    for (std::size_t i = 0; i < f.cells.size(); ++i)
        if (auto x = intersect_boxes(f.cells[i], S)) s += f.values[i] * x->measure();
    return s / m;
}

WeakRatio ratio_from_distribution(std::vector<LevelSet> dist, const std::optional<Rational>& norm_exact,
                                  const RealInterval& norm_pp, const Rational& p) {
    WeakRatio r;
    r.value = RealInterval(Rational(0));
    r.lambda = 0;
    r.level_measure = 0;
    std::sort(dist.begin(), dist.end(), [](const LevelSet& a, const LevelSet& b) { return a.value > b.value; });
    bool integer_p = is_integer(p) && norm_exact.has_value();
    Rational inv_p = 1 / p;
    Rational cum(0);
    bool first = true;
    std::optional<Rational> best_pow;
    RealInterval norm_root = norm_pp.pow(inv_p);
    for (std::size_t i = 0; i < dist.size(); ++i) {
        cum += dist[i].measure;
        if (i + 1 < dist.size() && dist[i + 1].value == dist[i].value) continue;
        if (dist[i].value <= 0) break;
        if (integer_p) {
            unsigned long n = p.get_num().get_ui();
            Rational vp = pow(dist[i].value, n) * cum / *norm_exact;
            if (!best_pow || vp > *best_pow) {
                best_pow = vp;
                r.lambda = dist[i].value;
                r.level_measure = cum;
            }
        } else {
            RealInterval cand = RealInterval(dist[i].value) * RealInterval(cum).pow(inv_p) / norm_root;
            if (first || r.value.certainly_less(cand) || (!cand.certainly_less(r.value) && cand.lo() > r.value.lo())) {
                r.lambda = dist[i].value;
                r.level_measure = cum;
            }
            r.value = first ? cand : RealInterval::max(r.value, cand);
            first = false;
        }
    }
    if (integer_p && best_pow) {
        r.value_pow = best_pow;
        r.value = RealInterval(*best_pow).pow(inv_p);
    }
    return r;
}

WeakRatio weak_type_ratio(const std::vector<Box>& collection, const ExplicitFunction& f, const Rational& p) {
    if (p < 1) throw InvalidArgument("weak-type ratio needs p >= 1");
    if (f.cells.size() != f.values.size()) throw InvalidArgument("function cells and values differ in length");
    if (!pairwise_disjoint(f.cells)) throw InvalidArgument("function cells are not pairwise disjoint");
    std::vector<Box> all = collection;
    all.insert(all.end(), f.cells.begin(), f.cells.end());
    Arrangement arr = build_arrangement(all);
    const std::size_t K = collection.size();
    std::vector<Rational> val(arr.atoms.size(), Rational(0));
    for (std::size_t a = 0; a < arr.atoms.size(); ++a)
        for (std::size_t j = 0; j < f.cells.size(); ++j)
            if (arr.atoms[a].in(K + j)) val[a] = abs(f.values[j]);
    Rational norm_q(0);
    bool integer_p = is_integer(p);
    RealInterval norm_pp(Rational(0));
    for (std::size_t a = 0; a < arr.atoms.size(); ++a) {
        if (val[a] == 0) continue;
        if (integer_p) norm_q += pow(val[a], p.get_num().get_ui()) * arr.atoms[a].measure;
        else norm_pp = norm_pp + RealInterval(val[a]).pow(p) * RealInterval(arr.atoms[a].measure);
    }
    if (integer_p) norm_pp = RealInterval(norm_q);
    if ((integer_p && norm_q == 0) || (!integer_p && !norm_pp.positive())) {
        WeakRatio zero;
        zero.value = RealInterval(Rational(0));
        zero.value_pow = Rational(0);
        return zero;
    }
    std::vector<Rational> avg(K, Rational(0));
    for (std::size_t a = 0; a < arr.atoms.size(); ++a)
        for (std::size_t k = 0; k < K; ++k)
            if (arr.atoms[a].in(k)) avg[k] += val[a] * arr.atoms[a].measure;
    for (std::size_t k = 0; k < K; ++k) avg[k] /= collection[k].measure();
    std::vector<LevelSet> dist;
    for (std::size_t a = 0; a < arr.atoms.size(); ++a) {
        Rational mf(0);
        bool any = false;
        for (std::size_t k = 0; k < K; ++k)
            if (arr.atoms[a].in(k) && (!any || avg[k] > mf)) {
                mf = avg[k];
                any = true;
            }
        if (mf > 0) dist.push_back(LevelSet{mf, arr.atoms[a].measure});
    }
    std::optional<Rational> exact;
    if (integer_p) exact = norm_q;
    return ratio_from_distribution(std::move(dist), exact, norm_pp, p);
}

WeakTypeSearchResult weak_type_lower_search(const std::vector<Box>& collection, const Rational& p, long budget,
                                            std::uint64_t seed) {
    WeakTypeSearchResult res;
    res.lower_bound = 0;
    res.enclosure = RealInterval(Rational(0));
    if (collection.empty()) return res;
    if (budget < 1) throw InvalidArgument("budget must be >= 1");
    if (p <= 1) throw InvalidArgument("weak-type search needs p > 1");
    Arrangement arr = build_arrangement(collection, true);
    auto function_on_atoms = [&](const std::vector<Rational>& v) {
        ExplicitFunction f;
        for (std::size_t a = 0; a < v.size(); ++a) {
            if (v[a] == 0) continue;
            for (const Box& b : arr.atoms[a].pieces) {
                f.cells.push_back(b);
                f.values.push_back(v[a]);
            }
        }
        return f;
    };
    bool first = true;
    Rational best_lo(0);
    auto consider = [&](const ExplicitFunction& f, const std::string& what) {
        ++res.candidates;
        if (f.cells.empty()) return;
        WeakRatio r = weak_type_ratio(collection, f, p);
        Rational lo = r.value.lo_rational();
        if (first || lo > best_lo) {
            best_lo = lo;
            res.enclosure = r.value;
            res.best = what;
            first = false;
        }
    };
    const std::size_t A = arr.atoms.size();
    for (std::size_t a = 0; a < A; ++a) {
        std::vector<Rational> v(A, Rational(0));
        v[a] = 1;
        consider(function_on_atoms(v), "atom " + std::to_string(a));
    }
    for (std::size_t k = 0; k < collection.size(); ++k) consider(ExplicitFunction::indicator(collection[k]), "member " + std::to_string(k));
    {
        std::vector<Rational> v(A, Rational(1));
        consider(function_on_atoms(v), "union");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> digit(0, 8);
    for (long b = 0; b < budget; ++b) {
        std::vector<Rational> v(A);
        for (auto& x : v) x = digit(rng);
        consider(function_on_atoms(v), "random " + std::to_string(b));
    }
    res.lower_bound = best_lo;
    return res;
}

namespace {

struct CoverEval {
    bool feasible = false;
    Rational union_f;
    Rational c_union;
    RealInterval overlap_norm;
    RealInterval c_overlap;
    RealInterval constant;
};

}  // namespace

CoveringWitness covering_witness_search(const std::vector<Box>& E, const Rational& p_star, long budget) {
    if (p_star < 1) throw InvalidArgument("covering exponent p* must be >= 1");
    CoveringWitness w;
    w.union_e = 0;
    w.union_f = 0;
    w.c_union = 0;
    if (E.empty()) return w;
    Arrangement arr = build_arrangement(E);
    const std::size_t n = E.size();
    w.union_e = 0;
    for (const auto& a : arr.atoms) w.union_e += a.measure;
    std::vector<RealInterval> count_pow;
    for (std::size_t k = 0; k <= n; ++k) count_pow.push_back(RealInterval(Rational(static_cast<long>(k))).pow(p_star));
    RealInterval ue_root = RealInterval(w.union_e).pow(1 / p_star);
    auto eval = [&](const std::vector<char>& chosen) {
        CoverEval e;
        Rational uf(0);
        RealInterval ov(Rational(0));
        bool integer_p = is_integer(p_star);
        Rational ovq(0);
        for (const auto& a : arr.atoms) {
            long cnt = 0;
            for (std::size_t k = 0; k < n; ++k)
                if (chosen[k] && a.in(k)) ++cnt;
            if (cnt == 0) continue;
            uf += a.measure;
            if (integer_p) ovq += pow(Rational(cnt), p_star.get_num().get_ui()) * a.measure;
            else ov = ov + count_pow[cnt] * RealInterval(a.measure);
        }
        if (integer_p) ov = RealInterval(ovq);
        e.feasible = uf > 0 && 2 * uf >= w.union_e;
        if (!e.feasible) return e;
        e.union_f = uf;
        e.c_union = w.union_e / uf;
        e.overlap_norm = ov.pow(1 / p_star);
        e.c_overlap = e.overlap_norm / ue_root;
        e.constant = RealInterval::max(RealInterval(e.c_union), e.c_overlap);
        return e;
    };
    auto better = [&](const CoverEval& a, std::size_t size_a, const CoverEval& b, std::size_t size_b) {
        if (a.constant.certainly_less(b.constant)) return true;
        if (b.constant.certainly_less(a.constant)) return false;
        if (a.overlap_norm.certainly_less(b.overlap_norm)) return true;
        if (b.overlap_norm.certainly_less(a.overlap_norm)) return false;
        return size_a < size_b;
    };
    std::vector<char> best;
    CoverEval best_eval;
    std::size_t best_size = 0;
    auto offer = [&](const std::vector<char>& chosen) {
        CoverEval e = eval(chosen);
        if (!e.feasible) return;
        std::size_t sz = static_cast<std::size_t>(std::count(chosen.begin(), chosen.end(), 1));
        if (best.empty() || better(e, sz, best_eval, best_size)) {
            best = chosen;
            best_eval = e;
            best_size = sz;
        }
    };
    if (n <= 20) {
        w.exhaustive = true;
        // Enumerate subsets in lexicographic order of their sorted index lists so that
        // the first optimum found is the lexicographically first one.
        std::vector<char> chosen(n, 0);
        std::function<void(std::size_t)> rec = [&](std::size_t start) {
            for (std::size_t k = start; k < n; ++k) {
                chosen[k] = 1;
                offer(chosen);
                rec(k + 1);
                chosen[k] = 0;
            }
        };
        rec(0);
    } else {
        std::vector<char> chosen(n, 0);
        Rational uf(0);
        std::vector<char> covered_atom(arr.atoms.size(), 0);
        while (2 * uf < w.union_e) {
            std::size_t pick = n;
            Rational gain_best(-1);
            for (std::size_t k = 0; k < n; ++k) {
                if (chosen[k]) continue;
                Rational g(0);
                for (std::size_t a = 0; a < arr.atoms.size(); ++a)
                    if (!covered_atom[a] && arr.atoms[a].in(k)) g += arr.atoms[a].measure;
                if (g > gain_best) {
                    gain_best = g;
                    pick = k;
                }
            }
            chosen[pick] = 1;
            for (std::size_t a = 0; a < arr.atoms.size(); ++a)
                if (arr.atoms[a].in(pick) && !covered_atom[a]) {
                    covered_atom[a] = 1;
                    uf += arr.atoms[a].measure;
                }
        }
        offer(chosen);
        for (long round = 0; round < budget; ++round) {
            bool improved = false;
            for (std::size_t k = 0; k < n; ++k) {
                std::vector<char> trial = best;
                trial[k] = !trial[k];
                std::vector<char> before = best;
                offer(trial);
                if (best != before) improved = true;
            }
            if (!improved) break;
        }
    }
    for (std::size_t k = 0; k < n; ++k)
        if (best[k]) w.chosen.push_back(static_cast<int>(k));
    w.union_f = best_eval.union_f;
    w.c_union = best_eval.c_union;
    w.overlap_norm = best_eval.overlap_norm;
    w.c_overlap = best_eval.c_overlap;
    w.constant = best_eval.constant;
    return w;
}

}  // namespace tdiff
