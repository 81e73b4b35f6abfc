#include "tdiff/covering.hpp"

#include "tdiff/error.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace tdiff {

namespace {

std::vector<Rational> add_offsets(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    std::vector<Rational> r(std::max(a.size(), b.size()), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

BigInt children_per_cube(int s) { return pow2_int(static_cast<unsigned long>(2 * s + 2)); }

Rational q_measure(int s) { return pow2(-static_cast<long>(s) * (s + 1)); }

}  // namespace

Box ConfigTemplate::cube() const {
    return Box::from_sides(std::vector<Interval>(level + 1, Interval{Rational(0), pow2(-level)}));
}

ConfigTemplate make_template(int t, const Rational& eps, int d) {
    if (d > t + 1) throw InvalidArgument("template level too small for d");
    ConfigTemplate tpl;
    tpl.level = t;
    Rational L = pow2(-t), h = pow2(-t - 1);
    std::vector<Interval> q;
    for (int c = 1; c <= t + 1; ++c) q.push_back(Interval{Rational(0), c <= d ? h : L});
    tpl.config = make_configuration(Box::from_sides(q), eps, d);
    tpl.union_measure = tpl.config.union_measure();
    // children of S* with at least two high halves among coordinates 1..d miss every member
    for (int mask = 0; mask < (1 << d); ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) < 2) continue;
        std::vector<Interval> s;
        for (int c = 1; c <= t + 1; ++c) {
            if (c <= d) s.push_back((mask >> (c - 1)) & 1 ? Interval{h, L} : Interval{Rational(0), h});
            else s.push_back(Interval{Rational(0), L});
        }
        tpl.residual.push_back(QBlock{Box::from_sides(s), t + 1});
    }
    // the part of the single-high child along coordinate i that translate i leaves uncovered
    for (int i = 1; i <= d; ++i) {
        std::vector<Interval> s;
        for (int c = 1; c <= t + 1; ++c) {
            if (c == i) s.push_back(Interval{(2 - eps) * h, L});
            else if (c <= d) s.push_back(Interval{Rational(0), h});
            else s.push_back(Interval{Rational(0), L});
        }
        for (auto& b : qblocks_of_box(Box::from_sides(s), t + 2)) tpl.residual.push_back(std::move(b));
    }
    return tpl;
}

const ConfigTemplate& CoveringPlan::tpl(int t) const {
    auto it = templates.find(t);
    if (it == templates.end()) throw PreconditionError("plan has no template at level " + std::to_string(t));
    return it->second;
}

const QBlock& CoveringPlan::block(int parent_t, int slot) const {
    return parent_t == 0 ? initial.at(slot) : tpl(parent_t).residual.at(slot);
}

int CoveringPlan::block_level(int parent_t, int slot) const { return block(parent_t, slot).level; }

const BigInt& CoveringPlan::per_cube(int s, int j) const {
    auto key = std::make_pair(s, j);
    if (auto it = per_cube_.find(key); it != per_cube_.end()) return it->second;
    BigInt v;
    if (j == 0) {
        v = children_per_cube(s);
    } else {
        BigInt sum = 0;
        for (const auto& b : tpl(s + 1).residual) sum += b.count() * per_cube(b.level, j - 1);
        v = children_per_cube(s) * sum;
    }
    return per_cube_[key] = v;
}

const Rational& CoveringPlan::per_cube_weight(int s, int j) const {
    auto key = std::make_pair(s, j);
    if (auto it = per_cube_weight_.find(key); it != per_cube_weight_.end()) return it->second;
    Rational v;
    if (j == 0) {
        v = Rational(children_per_cube(s)) * tpl(s + 1).union_measure;
    } else {
        Rational sum = 0;
        for (const auto& b : tpl(s + 1).residual) sum += Rational(b.count()) * per_cube_weight(b.level, j - 1);
        v = Rational(children_per_cube(s)) * sum;
    }
    return per_cube_weight_[key] = v;
}

const BigInt& CoveringPlan::reach(int s, int j, int target) const {
    auto key = std::make_tuple(s, j, target);
    if (auto it = reach_.find(key); it != reach_.end()) return it->second;
    BigInt v = 0;
    if (j == 0) {
        v = s == target ? 1 : 0;
    } else {
        for (const auto& b : tpl(s + 1).residual) v += b.count() * reach(b.level, j - 1, target);
        v *= children_per_cube(s);
    }
    return reach_[key] = v;
}

std::vector<Rational> CoveringPlan::child_offset(int s, const BigInt& child) const {
    std::vector<Rational> off(s + 2, Rational(0));
    Rational g = pow2(-(s + 1));
    BigInt tail = pow2_int(static_cast<unsigned long>(s + 1));
    off[s + 1] = Rational(child % tail) * g;
    BigInt bits = child / tail;
    for (int c = s + 1; c >= 1; --c) {
        if (bits % 2 == 1) off[c - 1] = g;
        bits /= 2;
    }
    return off;
}

bool CoveringPlan::is_selected_sibling(const BigInt& sibling) const { return sibling % block_size() == selection_offset; }

BigInt CoveringPlan::configs_in_round(int r, int t) const {
    if (r < 1 || r > rounds) return 0;
    auto it = cubes_at[r - 1].find(t - 1);
    return it == cubes_at[r - 1].end() ? BigInt(0) : BigInt(it->second * children_per_cube(t - 1));
}

BigInt CoveringPlan::configs_in_round(int r) const {
    BigInt n = 0;
    if (r < 1 || r > rounds) return n;
    for (const auto& [s, cnt] : cubes_at[r - 1]) n += cnt * children_per_cube(s);
    return n;
}

BigInt CoveringPlan::total_configs() const {
    BigInt n = 0;
    for (int r = 1; r <= rounds; ++r) n += configs_in_round(r);
    return n;
}

std::map<int, BigInt> CoveringPlan::configs_per_template() const {
    std::map<int, BigInt> out;
    for (int r = 1; r <= rounds; ++r)
        for (const auto& [s, cnt] : cubes_at[r - 1]) out[s + 1] += cnt * children_per_cube(s);
    return out;
}

std::map<int, BigInt> CoveringPlan::selected_per_template() const {
    std::map<int, BigInt> out;
    for (auto& [t, n] : configs_per_template()) out[t] = n / block_size();
    return out;
}

Rational CoveringPlan::covered_in_round(int r) const {
    Rational v = 0;
    if (r < 1 || r > rounds) return v;
    for (const auto& [s, cnt] : cubes_at[r - 1]) v += Rational(cnt * children_per_cube(s)) * tpl(s + 1).union_measure;
    return v;
}

Rational CoveringPlan::covered_measure() const {
    Rational v = 0;
    for (int r = 1; r <= rounds; ++r) v += covered_in_round(r);
    for (const auto& n : deleted) v -= tpl(locate(n).level).union_measure;
    return v;
}

Rational CoveringPlan::residual_measure() const {
    Rational v = 0;
    for (const auto& [s, cnt] : cubes_at[rounds]) v += Rational(cnt) * q_measure(s);
    return v;
}

std::vector<PathStep> CoveringPlan::path_of(const BigInt& index, int* round_out) const {
    if (index < 0) throw InvalidArgument("negative configuration index");
    BigInt n = index;
    int r = 1;
    for (; r <= rounds; ++r) {
        BigInt R = configs_in_round(r);
        if (n < R) break;
        n -= R;
    }
    if (r > rounds) throw InvalidArgument("configuration index " + index.get_str() + " is out of range");
    if (round_out) *round_out = r;
    std::vector<PathStep> path;
    int parent_t = 0;
    for (int depth = 0;; ++depth) {
        int j = r - 1 - depth;
        std::size_t nslots = parent_t == 0 ? initial.size() : tpl(parent_t).residual.size();
        std::size_t slot = 0;
        for (; slot < nslots; ++slot) {
            const QBlock& b = block(parent_t, static_cast<int>(slot));
            BigInt tot = b.count() * per_cube(b.level, j);
            if (n < tot) break;
            n -= tot;
        }
        if (slot == nslots) throw PreconditionError("enumeration walk ran past the last block");
        int s = block_level(parent_t, static_cast<int>(slot));
        PathStep st;
        st.slot = static_cast<int>(slot);
        const BigInt& pc = per_cube(s, j);
        st.cube = n / pc;
        n %= pc;
        if (j == 0) {
            st.child = n;
            path.push_back(st);
            return path;
        }
        BigInt per_child = pc / children_per_cube(s);
        st.child = n / per_child;
        n %= per_child;
        path.push_back(st);
        parent_t = s + 1;
    }
}

BigInt CoveringPlan::index_of(int r, const std::vector<PathStep>& path) const {
    if (r < 1 || r > rounds || static_cast<int>(path.size()) != r) throw InvalidArgument("path does not match its round");
    BigInt n = 0;
    for (int rr = 1; rr < r; ++rr) n += configs_in_round(rr);
    int parent_t = 0;
    for (int depth = 0; depth < r; ++depth) {
        int j = r - 1 - depth;
        const PathStep& st = path[depth];
        for (int slot = 0; slot < st.slot; ++slot) {
            const QBlock& b = block(parent_t, slot);
            n += b.count() * per_cube(b.level, j);
        }
        const QBlock& b = block(parent_t, st.slot);
        int s = b.level;
        if (st.cube < 0 || st.cube >= b.count() || st.child < 0 || st.child >= children_per_cube(s))
            throw InvalidArgument("path digit out of range");
        n += st.cube * per_cube(s, j);
        n += j == 0 ? st.child : BigInt(st.child * (per_cube(s, j) / children_per_cube(s)));
        parent_t = s + 1;
    }
    return n;
}

ConfigInstance CoveringPlan::locate(const BigInt& index) const {
    ConfigInstance ci;
    std::vector<PathStep> path = path_of(index, &ci.round);
    std::vector<Rational> base;
    int parent_t = 0;
    int s = 0;
    for (const auto& st : path) {
        const QBlock& b = block(parent_t, st.slot);
        s = b.level;
        std::vector<Rational> cube = add_offsets(base, b.cube_corner(st.cube));
        base = add_offsets(cube, child_offset(s, st.child));
        parent_t = s + 1;
    }
    ci.index = index;
    ci.level = s + 1;
    ci.corner = base;
    ci.sibling = path.back().child;
    ci.selected = is_selected_sibling(ci.sibling);
    ci.group = index / block_size() + 1;
    return ci;
}

Rational CoveringPlan::prefix_measure(const BigInt& index) const {
    int r = 0;
    std::vector<PathStep> path = path_of(index, &r);
    Rational w = 0;
    for (int rr = 1; rr < r; ++rr) w += covered_in_round(rr);
    int parent_t = 0;
    for (int depth = 0; depth < r; ++depth) {
        int j = r - 1 - depth;
        const PathStep& st = path[depth];
        for (int slot = 0; slot < st.slot; ++slot) {
            const QBlock& b = block(parent_t, slot);
            w += Rational(b.count()) * per_cube_weight(b.level, j);
        }
        int s = block_level(parent_t, st.slot);
        w += Rational(st.cube) * per_cube_weight(s, j);
        if (j == 0) w += Rational(st.child) * tpl(s + 1).union_measure;
        else w += Rational(st.child) * per_cube_weight(s, j) / Rational(children_per_cube(s));
        parent_t = s + 1;
    }
    return w;
}

std::optional<ConfigInstance> CoveringPlan::first_instance(int t, bool selected) const {
    BigInt B = block_size();
    BigInt last_child = selected ? selection_offset : BigInt(selection_offset == 0 ? 1 : 0);
    for (int r = 1; r <= rounds; ++r) {
        std::vector<PathStep> path;
        int parent_t = 0;
        bool ok = true;
        for (int depth = 0; depth < r && ok; ++depth) {
            int j = r - 1 - depth;
            std::size_t nslots = parent_t == 0 ? initial.size() : tpl(parent_t).residual.size();
            int found = -1;
            for (std::size_t slot = 0; slot < nslots; ++slot)
                if (reach(block_level(parent_t, static_cast<int>(slot)), j, t - 1) > 0) {
                    found = static_cast<int>(slot);
                    break;
                }
            if (found < 0) {
                ok = false;
                break;
            }
            PathStep st;
            st.slot = found;
            st.cube = 0;
            st.child = j == 0 ? last_child : BigInt(0);
            path.push_back(st);
            parent_t = block_level(parent_t, found) + 1;
        }
        if (ok) return locate(index_of(r, path));
    }
    return std::nullopt;
}

ConfigInstance CoveringPlan::sample_instance(int t, bool selected, gmp_randclass& rng) const {
    BigInt total = 0;
    std::vector<BigInt> per_round(rounds + 1, 0);
    for (int r = 1; r <= rounds; ++r) {
        per_round[r] = configs_in_round(r, t);
        total += per_round[r];
    }
    if (total == 0) throw InvalidArgument("plan has no configuration at template level " + std::to_string(t));
    BigInt x = rng.get_z_range(total);
    int r = 1;
    while (x >= per_round[r]) x -= per_round[r++];
    std::vector<PathStep> path;
    int parent_t = 0;
    for (int depth = 0; depth < r; ++depth) {
        int j = r - 1 - depth;
        std::size_t nslots = parent_t == 0 ? initial.size() : tpl(parent_t).residual.size();
        BigInt wsum = 0;
        std::vector<BigInt> w(nslots);
        for (std::size_t slot = 0; slot < nslots; ++slot) {
            const QBlock& b = block(parent_t, static_cast<int>(slot));
            w[slot] = b.count() * reach(b.level, j, t - 1);
            wsum += w[slot];
        }
        BigInt y = rng.get_z_range(wsum);
        std::size_t slot = 0;
        while (y >= w[slot]) y -= w[slot++];
        const QBlock& b = block(parent_t, static_cast<int>(slot));
        PathStep st;
        st.slot = static_cast<int>(slot);
        st.cube = rng.get_z_range(b.count());
        BigInt kids = children_per_cube(b.level);
        if (j > 0) {
            st.child = rng.get_z_range(kids);
        } else {
            BigInt B = block_size();
            if (selected) {
                st.child = rng.get_z_range(kids / B) * B + selection_offset;
            } else {
                BigInt k = rng.get_z_range(kids - kids / B);
                BigInt blockno = k / (B - 1), rem = k % (B - 1);
                if (rem >= selection_offset) rem += 1;
                st.child = blockno * B + rem;
            }
        }
        path.push_back(st);
        parent_t = b.level + 1;
    }
    return locate(index_of(r, path));
}

void CoveringPlan::for_each_config(const std::function<bool(const ConfigInstance&)>& fn) const {
    BigInt index = 0;
    bool stop = false;
    for (int r = 1; r <= rounds && !stop; ++r) {
        std::function<void(int, int, const std::vector<Rational>&)> visit = [&](int depth, int parent_t,
                                                                               const std::vector<Rational>& base) {
            std::size_t nslots = parent_t == 0 ? initial.size() : tpl(parent_t).residual.size();
            for (std::size_t slot = 0; slot < nslots && !stop; ++slot) {
                const QBlock& b = block(parent_t, static_cast<int>(slot));
                int s = b.level;
                BigInt cubes = b.count(), kids = children_per_cube(s);
                for (BigInt q = 0; q < cubes && !stop; ++q) {
                    std::vector<Rational> cube = add_offsets(base, b.cube_corner(q));
                    for (BigInt ch = 0; ch < kids && !stop; ++ch) {
                        std::vector<Rational> corner = add_offsets(cube, child_offset(s, ch));
                        if (depth == r - 1) {
                            ConfigInstance ci;
                            ci.index = index;
                            ci.round = r;
                            ci.level = s + 1;
                            ci.corner = corner;
                            ci.sibling = ch;
                            ci.selected = is_selected_sibling(ch);
                            ci.group = index / block_size() + 1;
                            index += 1;
                            if (!fn(ci)) stop = true;
                        } else {
                            visit(depth + 1, s + 1, corner);
                        }
                    }
                }
            }
        };
        visit(0, 0, {});
    }
}

void CoveringPlan::for_each_residual_block(const std::function<bool(const QBlock&)>& fn) const {
    bool stop = false;
    std::function<void(int, int, const std::vector<Rational>&)> visit = [&](int depth, int parent_t,
                                                                           const std::vector<Rational>& base) {
        std::size_t nslots = parent_t == 0 ? initial.size() : tpl(parent_t).residual.size();
        for (std::size_t slot = 0; slot < nslots && !stop; ++slot) {
            const QBlock& b = block(parent_t, static_cast<int>(slot));
            if (depth == rounds) {
                if (!fn(QBlock{b.region.shifted(base), b.level})) stop = true;
                continue;
            }
            int s = b.level;
            BigInt cubes = b.count(), kids = children_per_cube(s);
            for (BigInt q = 0; q < cubes && !stop; ++q) {
                std::vector<Rational> cube = add_offsets(base, b.cube_corner(q));
                for (BigInt ch = 0; ch < kids && !stop; ++ch)
                    visit(depth + 1, s + 1, add_offsets(cube, child_offset(s, ch)));
            }
        }
    };
    visit(0, 0, {});
}

CoveringPlan cover_rectangle(const Box& U, const Rational& eps, int d, int m, int T) {
    if (d < 1) throw InvalidArgument("d must be >= 1");
    if (m < 1) throw InvalidArgument("m must be >= 1");
    if (T < 0) throw InvalidArgument("rounds must be >= 0");
    if (!(eps > 0 && eps <= Rational(1, 2))) throw InvalidArgument("eps must lie in (0, 1/2]");
    if (!is_dyadic(eps)) throw InvalidArgument("eps = " + to_string(eps) + " is not dyadic; the residual would not be a finite union of dyadic cubes");
    for (const auto& [c, iv] : U.sides())
        if (!is_dyadic(iv.a) || !is_dyadic(iv.b)) throw InvalidArgument("covering domain must have dyadic endpoints");
    CoveringPlan p;
    p.domain = U;
    p.eps = eps;
    p.d = d;
    p.m = m;
    p.rounds = T;
    p.c = pow2(-d) * (1 + Rational(d) - eps * d);
    p.selection_offset = p.block_size() - 1;
    p.initial = qblocks_of_box(U, m + d);
    p.cubes_at.assign(T + 1, {});
    for (const auto& b : p.initial) p.cubes_at[0][b.level] += b.count();
    for (int k = 0; k < T; ++k) {
        for (const auto& [s, cnt] : p.cubes_at[k]) {
            int t = s + 1;
            if (!p.templates.count(t)) p.templates.emplace(t, make_template(t, eps, d));
            const ConfigTemplate& tp = p.templates.at(t);
            BigInt kids = cnt * children_per_cube(s);
            for (const auto& b : tp.residual) p.cubes_at[k + 1][b.level] += kids * b.count();
        }
    }
    return p;
}

namespace {

void check_template(Report& rep, const CoveringPlan& p, const ConfigTemplate& tp) {
    const std::string name = "template t=" + std::to_string(tp.level);
    const Configuration& cf = tp.config;
    Box S = tp.cube();
    RdfMatch rm = is_rdf0_element(cf.q0);
    long want_m = static_cast<long>(tp.level) * (tp.level + 1) + p.d;
    bool ok = rm.member && rm.m == want_m;
    std::string why;
    if (!ok) why = "central box is not V_" + std::to_string(want_m);
    std::vector<Box> mem = cf.members();
    for (const Box& b : mem)
        if (!S.contains(b)) {
            ok = false;
            why = "member leaves S*";
        }
    for (int i = 1; i <= cf.d; ++i) {
        auto x = intersect_boxes(mem[i], mem[0]);
        if (!x || x->measure() != p.eps * mem[0].measure()) {
            ok = false;
            why = "overlap of translate " + std::to_string(i) + " with Q0 is not eps|Q0|";
        }
        for (int j = i + 1; j <= cf.d; ++j) {
            auto y = intersect_boxes(mem[i], mem[j]);
            if (y && !mem[0].contains(*y)) {
                ok = false;
                why = "translates " + std::to_string(i) + "," + std::to_string(j) + " meet outside Q0";
            }
        }
    }
    Rational um = union_measure(mem);
    if (um != p.c * S.measure() || um != tp.union_measure) {
        ok = false;
        why = "union measure " + to_string(um) + " differs from c|S*|";
    }
    Rational res(0);
    for (std::size_t a = 0; a < tp.residual.size(); ++a) {
        const QBlock& b = tp.residual[a];
        res += b.region.measure();
        if (!b.aligned() || b.level < p.m + p.d || !S.contains(b.region)) {
            ok = false;
            why = "residual block " + std::to_string(a) + " is not an aligned Q-block inside S*";
        }
        for (const Box& x : mem)
            if (!boxes_disjoint(x, b.region)) {
                ok = false;
                why = "residual block " + std::to_string(a) + " meets the configuration";
            }
        for (std::size_t c = a + 1; c < tp.residual.size(); ++c)
            if (!boxes_disjoint(b.region, tp.residual[c].region)) {
                ok = false;
                why = "residual blocks overlap";
            }
    }
    if (um + res != S.measure()) {
        ok = false;
        why = "union + residual = " + to_string(um + res) + " != |S*|";
    }
    rep.add(name, ok, why);
}

}  // namespace

Report verify_plan(const CoveringPlan& p, std::uint64_t seed) {
    Report rep;
    {
        bool ok = is_dyadic(p.eps) && p.eps > 0 && p.eps <= Rational(1, 2) && p.d >= 1 && p.m >= 1 && p.rounds >= 0 &&
                  p.c == pow2(-p.d) * (1 + Rational(p.d) - p.eps * p.d);
        rep.add("parameters", ok, ok ? "" : "eps/d/m/c inconsistent");
    }
    {
        bool ok = true;
        std::string why;
        Rational tot(0);
        for (std::size_t a = 0; a < p.initial.size(); ++a) {
            const QBlock& b = p.initial[a];
            tot += b.region.measure();
            if (!b.aligned() || b.level < p.m + p.d || !p.domain.contains(b.region)) {
                ok = false;
                why = "initial block " + std::to_string(a) + " is not an aligned Q-block of level >= m+d inside U";
            }
            for (std::size_t c = a + 1; c < p.initial.size(); ++c)
                if (!boxes_disjoint(b.region, p.initial[c].region)) {
                    ok = false;
                    why = "initial blocks overlap";
                }
        }
        if (tot != p.domain.measure()) {
            ok = false;
            why = "initial blocks cover " + to_string(tot) + " of " + to_string(p.domain.measure());
        }
        rep.add("initial split", ok, why);
    }
    for (int k = 0; k < p.rounds; ++k)
        for (const auto& [s, cnt] : p.cubes_at[k]) {
            (void)cnt;
            if (!p.templates.count(s + 1)) rep.add("template t=" + std::to_string(s + 1), false, "missing");
        }
    for (const auto& [t, tp] : p.templates) check_template(rep, p, tp);
    {
        bool ok = true;
        std::string why;
        for (int k = 0; k < p.rounds; ++k)
            for (const auto& [s, cnt] : p.cubes_at[k]) {
                (void)cnt;
                if (2 * s + 2 < p.m) {
                    ok = false;
                    why = "sibling run of level " + std::to_string(s) + " is not a multiple of 2^m";
                }
            }
        rep.add("grouping", ok, why);
    }
    Rational covered = p.covered_measure();
    Rational residual = p.residual_measure();
    {
        bool ok = true;
        std::string why;
        for (const auto& n : p.deleted)
            if (n < 0 || n >= p.total_configs()) {
                ok = false;
                why = "deleted index out of range";
            }
        if (covered + residual != p.domain.measure()) {
            ok = false;
            why = "covered " + to_string(covered) + " + residual " + to_string(residual) + " != |U| = " +
                  to_string(p.domain.measure());
        }
        rep.add("measure balance", ok, why);
    }
    {
        Rational law = (1 - pow(1 - p.c, static_cast<unsigned long>(p.rounds))) * p.domain.measure();
        rep.add("coverage law", covered == law, covered == law ? "" : "covered " + to_string(covered) + " != " + to_string(law));
    }
    {
        bool ok = true;
        std::string why;
        BigInt total = p.total_configs();
        if (total > 0) {
            gmp_randclass rng(gmp_randinit_mt);
            rng.seed(static_cast<unsigned long>(seed));
            std::vector<BigInt> probe{0, total - 1};
            for (int k = 0; k < 30; ++k) probe.push_back(rng.get_z_range(total));
            BigInt B = p.block_size();
            for (const BigInt& n : probe) {
                int r = 0;
                auto path = p.path_of(n, &r);
                if (p.index_of(r, path) != n) {
                    ok = false;
                    why = "enumeration round trip failed at " + n.get_str();
                    break;
                }
                // every member of the label sits in the same sibling run
                BigInt g0 = (n / B) * B;
                int r0 = 0, r1 = 0;
                auto a = p.path_of(g0, &r0);
                auto b = p.path_of(g0 + B - 1, &r1);
                bool same = r0 == r1 && a.size() == b.size();
                for (std::size_t i = 0; same && i < a.size(); ++i) {
                    same = a[i].slot == b[i].slot && a[i].cube == b[i].cube;
                    if (i + 1 < a.size()) same = same && a[i].child == b[i].child;
                }
                if (!same || b.back().child - a.back().child != B - 1) {
                    ok = false;
                    why = "label " + BigInt(n / B + 1).get_str() + " straddles sibling runs";
                    break;
                }
            }
        }
        rep.add("enumeration labels", ok, why);
    }
    return rep;
}

ExplicitPlan materialize(const CoveringPlan& plan, std::size_t cap) {
    if (plan.total_configs() > cap)
        throw CapExceeded("plan has " + plan.total_configs().get_str() + " configurations, above the cap " + std::to_string(cap));
    ExplicitPlan ex;
    ex.domain = plan.domain;
    ex.m = plan.m;
    plan.for_each_config([&](const ConfigInstance& ci) {
        for (const auto& n : plan.deleted)
            if (n == ci.index) return true;
        ex.configs.push_back(ci);
        ex.configurations.push_back(ci.configuration(plan.tpl(ci.level)));
        return true;
    });
    std::size_t count = 0;
    plan.for_each_residual_block([&](const QBlock& b) {
        if (++count > 20 * cap) throw CapExceeded("too many residual blocks to materialize");
        ex.residual.push_back(b);
        return true;
    });
    return ex;
}

Report verify_explicit_plan(const ExplicitPlan& ex) {
    Report rep;
    const std::size_t n = ex.configurations.size();
    std::vector<std::vector<Box>> mem(n);
    for (std::size_t i = 0; i < n; ++i) mem[i] = ex.configurations[i].members();
    {
        bool ok = true;
        std::string why;
        for (std::size_t i = 0; i < n && ok; ++i)
            for (const Box& b : mem[i])
                if (!ex.domain.contains(b)) {
                    ok = false;
                    why = "configuration " + ex.configs[i].index.get_str() + " leaves U";
                }
        rep.add("inside domain", ok, why);
    }
    {
        bool ok = true;
        std::string why;
        for (std::size_t i = 0; i < n && ok; ++i)
            for (std::size_t j = i + 1; j < n && ok; ++j)
                for (const Box& a : mem[i]) {
                    for (const Box& b : mem[j])
                        if (!boxes_disjoint(a, b)) {
                            ok = false;
                            why = "unions " + ex.configs[i].index.get_str() + " and " + ex.configs[j].index.get_str() + " meet";
                            break;
                        }
                    if (!ok) break;
                }
        rep.add("pairwise disjoint unions", ok, why);
    }
    {
        bool ok = true;
        std::string why;
        for (std::size_t a = 0; a < ex.residual.size() && ok; ++a) {
            for (std::size_t b = a + 1; b < ex.residual.size() && ok; ++b)
                if (!boxes_disjoint(ex.residual[a].region, ex.residual[b].region)) {
                    ok = false;
                    why = "residual blocks overlap";
                }
            for (std::size_t i = 0; i < n && ok; ++i)
                for (const Box& x : mem[i])
                    if (!boxes_disjoint(x, ex.residual[a].region)) {
                        ok = false;
                        why = "residual meets configuration " + ex.configs[i].index.get_str();
                        break;
                    }
        }
        rep.add("residual disjoint", ok, why);
    }
    {
        Rational tot(0);
        for (std::size_t i = 0; i < n; ++i) tot += union_measure(mem[i]);
        for (const auto& b : ex.residual) tot += b.region.measure();
        bool ok = tot == ex.domain.measure();
        rep.add("measure balance", ok, ok ? "" : "unions + residual = " + to_string(tot) + " != |U|");
    }
    {
        bool ok = true;
        std::string why;
        BigInt B = pow2_int(static_cast<unsigned long>(ex.m));
        std::map<BigInt, std::vector<std::size_t>> labels;
        for (std::size_t i = 0; i < n; ++i) labels[ex.configs[i].group].push_back(i);
        for (const auto& [g, idx] : labels) {
            if (BigInt(static_cast<unsigned long>(idx.size())) != B) {
                ok = false;
                why = "label " + g.get_str() + " has " + std::to_string(idx.size()) + " members";
                break;
            }
            const Configuration& a = ex.configurations[idx[0]];
            for (std::size_t k = 1; k < idx.size() && ok; ++k) {
                const Configuration& b = ex.configurations[idx[k]];
                if (union_measure(a.members()) != union_measure(b.members())) {
                    ok = false;
                    why = "label " + g.get_str() + " mixes measures";
                }
                // congruent: same shapes and the same relative placement of members
                auto ma = a.members(), mb = b.members();
                for (std::size_t q = 0; q < ma.size() && ok; ++q) {
                    int top = std::max(ma[q].max_coord(), mb[q].max_coord());
                    for (int c = 1; c <= top; ++c) {
                        Interval x = ma[q].side(c), y = mb[q].side(c);
                        Interval x0 = ma[0].side(c), y0 = mb[0].side(c);
                        if (x.length() != y.length() || x.a - x0.a != y.a - y0.a) {
                            ok = false;
                            why = "label " + g.get_str() + " members are not translates";
                            break;
                        }
                    }
                }
            }
            if (!ok) break;
        }
        rep.add("labels", ok, why);
    }
    return rep;
}

}  // namespace tdiff
