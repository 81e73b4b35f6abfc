#include "tdiff/basis.hpp"

#include "tdiff/error.hpp"
#include "tdiff/rdf.hpp"

#include <algorithm>
#include <random>

namespace tdiff {

namespace {

std::vector<Rational> add(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    std::vector<Rational> r(std::max(a.size(), b.size()), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

Rational kappa(const Rational& c, int T) { return 1 - pow(1 - c, static_cast<unsigned long>(T)); }

Rational c_of(const ScheduleLevel& L) { return pow2(-L.d) * (1 + Rational(L.d) - L.eps * L.d); }

}  // namespace

const ConfigTemplate& LeveledBasis::tpl(int j, int t) const {
    for (const auto& p : plans)
        if (p.j == j)
            if (auto it = p.plan.templates.find(t); it != p.plan.templates.end()) return it->second;
    throw PreconditionError("no template (" + std::to_string(j) + ", " + std::to_string(t) + ")");
}

const std::vector<ConfigCell>& LeveledBasis::template_cells(int j, int t) const { return cells.at({j, t}); }

Configuration LeveledBasis::group_configuration(int g) const {
    const ConfigGroup& G = groups.at(g);
    return tpl(G.level, G.t).config.shifted(G.origin);
}

Box LeveledBasis::node_box(int n) const {
    const BasisNode& N = nodes.at(n);
    if (N.level == 0) return domain;
    return template_cells(N.level, N.t).at(N.cell).box.shifted(groups.at(N.group).origin);
}

std::vector<int> LeveledBasis::nodes_at(int level) const {
    std::vector<int> v;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].level == level) v.push_back(static_cast<int>(i));
    return v;
}

std::vector<int> LeveledBasis::groups_at(int level) const {
    std::vector<int> v;
    for (std::size_t i = 0; i < groups.size(); ++i)
        if (groups[i].level == level) v.push_back(static_cast<int>(i));
    return v;
}

Rational LeveledBasis::residual_measure(int n) const {
    const BasisNode& N = nodes.at(n);
    Rational covered = 0;
    for (int g : N.groups) {
        const ConfigGroup& G = groups[g];
        covered += Rational(G.count) * tpl(G.level, G.t).union_measure;
    }
    return N.measure - covered / Rational(N.count);
}

std::vector<LedgerRow> LeveledBasis::ledger() const {
    std::vector<LedgerRow> rows;
    for (const auto& L : schedule.levels) {
        LedgerRow r;
        r.j = L.j;
        r.d = L.d;
        r.eps = L.eps;
        r.m = L.m;
        r.c = c_of(L);
        r.kappa = kappa(r.c, rounds);
        r.covered = r.f_star = r.f = 0;
        for (const auto& G : groups) {
            if (G.level != L.j) continue;
            const ConfigTemplate& tp = tpl(G.level, G.t);
            r.covered += Rational(G.count) * tp.union_measure;
            if (G.selected) {
                r.f_star += Rational(G.count) * tp.union_measure;
                r.f += Rational(G.count) * tp.config.q0.measure();
            }
        }
        if (L.j == 1) {
            const PlanClass& P = plans.at(0);
            for (const auto& n : extra_selected) {
                ConfigInstance ci = P.plan.locate(n);
                if (ci.selected) continue;
                const ConfigTemplate& tp = P.plan.tpl(ci.level);
                r.f_star += tp.union_measure;
                r.f += tp.config.q0.measure();
            }
        }
        rows.push_back(r);
    }
    return rows;
}

Rational LeveledBasis::core_measure() const {
    Rational v = 0;
    for (const auto& N : nodes)
        if (N.level == depth()) v += Rational(N.count) * N.measure;
    return v;
}

std::vector<LedgerRow> ledger_oracle(const Schedule& s, std::optional<int> T, const Rational& domain_measure) {
    std::vector<LedgerRow> rows;
    Rational frac = domain_measure;
    for (const auto& L : s.levels) {
        LedgerRow r;
        r.j = L.j;
        r.d = L.d;
        r.eps = L.eps;
        r.m = L.m;
        r.c = c_of(L);
        r.kappa = T ? kappa(r.c, *T) : Rational(1);
        frac *= r.kappa;
        r.covered = frac;
        r.f_star = pow2(-L.m) * frac;
        r.f = r.f_star / (1 + Rational(L.d) - L.eps * L.d);
        rows.push_back(r);
    }
    return rows;
}

LeveledBasis build_basis(const Box& U, const Schedule& s, int T, const BuildOptions& opt) {
    if (T < 1) throw InvalidArgument("rounds must be >= 1");
    if (s.depth() > 60) throw InvalidArgument("depth above 60 is not supported");
    LeveledBasis b;
    b.domain = U;
    b.schedule = s;
    b.rounds = T;
    b.options = opt;
    BasisNode root;
    root.count = 1;
    root.measure = U.measure();
    b.nodes.push_back(root);
    auto plan_for = [&](int j, int parent_t, int parent_cell) -> int {
        auto key = std::make_tuple(j, parent_t, parent_cell);
        if (auto it = b.plan_index.find(key); it != b.plan_index.end()) return it->second;
        const ScheduleLevel& L = s.level(j);
        PlanClass P;
        P.j = j;
        P.parent_t = parent_t;
        P.parent_cell = parent_cell;
        P.domain = j == 1 ? U : b.template_cells(j - 1, parent_t).at(parent_cell).box;
        P.plan = cover_rectangle(P.domain, L.eps, static_cast<int>(L.d), L.m, T);
        BigInt B = P.plan.block_size();
        long shift = j - 1 < static_cast<int>(opt.selection_shift.size()) ? opt.selection_shift[j - 1] : 0;
        BigInt off = (B - 1 + shift) % B;
        if (off < 0) off += B;
        P.plan.selection_offset = off;
        P.per_template = P.plan.configs_per_template();
        for (const auto& [t, tp] : P.plan.templates)
            if (!b.cells.count({j, t})) b.cells[{j, t}] = configuration_cells(tp.config);
        b.plans.push_back(std::move(P));
        int id = static_cast<int>(b.plans.size()) - 1;
        b.plan_index[key] = id;
        return id;
    };
    std::vector<int> frontier{0};
    for (int j = 1; j <= s.depth(); ++j) {
        std::vector<int> next;
        for (int nid : frontier) {
            int pc = plan_for(j, b.nodes[nid].t, b.nodes[nid].cell);
            b.nodes[nid].plan = pc;
            PlanClass& P = b.plans[pc];
            BigInt B = P.plan.block_size();
            for (const auto& [t, n] : P.per_template) {
                for (bool sel : {true, false}) {
                    BigInt k = sel ? BigInt(n / B) : BigInt(n - n / B);
                    if (k == 0) continue;
                    auto rk = std::make_pair(t, sel);
                    if (!P.reps.count(rk)) {
                        auto inst = P.plan.first_instance(t, sel);
                        if (!inst) throw PreconditionError("plan lost its template " + std::to_string(t));
                        P.reps[rk] = *inst;
                    }
                    ConfigGroup G;
                    G.level = j;
                    G.parent = nid;
                    G.t = t;
                    G.selected = sel;
                    G.count = b.nodes[nid].count * k;
                    G.origin = j == 1 ? P.reps[rk].corner : add(b.groups[b.nodes[nid].group].origin, P.reps[rk].corner);
                    int gid = static_cast<int>(b.groups.size());
                    b.nodes[nid].groups.push_back(gid);
                    const auto& cl = b.cells.at({j, t});
                    for (std::size_t c = 0; c < cl.size(); ++c) {
                        if (b.nodes.size() >= opt.chain_cap)
                            throw CapExceeded("chain tree exceeds " + std::to_string(opt.chain_cap) + " atom types");
                        BasisNode N;
                        N.level = j;
                        N.parent = nid;
                        N.group = gid;
                        N.t = t;
                        N.selected = sel;
                        N.cell = static_cast<int>(c);
                        N.members = cl[c].members;
                        N.sel_mask = b.nodes[nid].sel_mask | (sel ? std::uint64_t(1) << (j - 1) : 0);
                        N.q0_mask = b.nodes[nid].q0_mask | ((cl[c].members & 1u) ? std::uint64_t(1) << (j - 1) : 0);
                        N.count = G.count;
                        N.measure = cl[c].box.measure();
                        G.cells.push_back(static_cast<int>(b.nodes.size()));
                        next.push_back(static_cast<int>(b.nodes.size()));
                        b.nodes.push_back(std::move(N));
                    }
                    b.groups.push_back(std::move(G));
                }
            }
        }
        frontier = std::move(next);
    }
    return b;
}

Rational independence_measure(const LeveledBasis& b, std::uint64_t subset) {
    Rational v = 0;
    for (const auto& N : b.nodes)
        if (N.level == b.depth() && (N.sel_mask & subset) == subset) v += Rational(N.count) * N.measure;
    return v;
}

namespace {

// Cross-level pairs of members along one chain must be nested (deeper inside) or disjoint.
bool chain_nested(const std::vector<std::pair<int, std::vector<Box>>>& chain, std::string& why, std::size_t& pairs) {
    for (std::size_t a = 0; a < chain.size(); ++a)
        for (std::size_t b = a + 1; b < chain.size(); ++b) {
            if (chain[a].first == chain[b].first) continue;
            const auto& outer = chain[a].first < chain[b].first ? chain[a].second : chain[b].second;
            const auto& inner = chain[a].first < chain[b].first ? chain[b].second : chain[a].second;
            for (const Box& x : outer)
                for (const Box& y : inner) {
                    ++pairs;
                    if (!boxes_disjoint(x, y) && !x.contains(y)) {
                        why = "member " + y.str() + " meets " + x.str() + " without nesting";
                        return false;
                    }
                }
        }
    return true;
}

}  // namespace

Report verify_axioms(const LeveledBasis& b, const AxiomOptions& opt) {
    Report rep;
    const int J = b.depth();
    // A1: central boxes are R0 cells of the right size
    for (int j = 1; j <= J; ++j) {
        const ScheduleLevel& L = b.schedule.level(j);
        bool ok = true;
        std::string why;
        std::size_t checked = 0;
        for (const auto& G : b.groups) {
            if (G.level != j) continue;
            Configuration c = b.group_configuration(static_cast<int>(&G - b.groups.data()));
            RdfMatch m = is_rdf0_element(c.q0);
            ++checked;
            if (c.eps != L.eps || c.d != L.d || !m.member || m.m != static_cast<long>(G.t) * (G.t + 1) + L.d) {
                ok = false;
                why = "central box " + c.q0.str() + " is not an R0 cell of level t(t+1)+d";
                break;
            }
        }
        gmp_randclass rng(gmp_randinit_mt);
        rng.seed(static_cast<unsigned long>(opt.seed + j));
        for (const auto& P : b.plans) {
            if (!ok || P.j != j) continue;
            for (const auto& [t, n] : P.per_template) {
                (void)n;
                for (int k = 0; k < 4 && ok; ++k) {
                    ConfigInstance ci = P.plan.sample_instance(t, k % 2 == 0, rng);
                    Box q = P.plan.tpl(t).config.q0.shifted(ci.corner);
                    // relative to the parent S*, whose corner lies on the level-t grid
                    RdfMatch m = is_rdf0_element(q);
                    ++checked;
                    if (!m.member || m.m != static_cast<long>(t) * (t + 1) + L.d) {
                        ok = false;
                        why = "sampled central box " + q.str() + " is not an R0 cell";
                    }
                }
            }
        }
        rep.add("A1 level " + std::to_string(j), ok, ok ? std::to_string(checked) + " central boxes" : why);
    }
    // A2: each plan is a valid covering of its atom
    for (int j = 1; j <= J; ++j) {
        bool ok = true;
        std::string why;
        int n = 0;
        for (const auto& P : b.plans) {
            if (P.j != j) continue;
            ++n;
            Report r = verify_plan(P.plan, opt.seed);
            if (!r.ok()) {
                ok = false;
                const Check* f = r.first_failure();
                why = "plan (" + std::to_string(P.parent_t) + "," + std::to_string(P.parent_cell) + "): " + f->name + ": " +
                      f->detail;
                break;
            }
        }
        rep.add("A2 level " + std::to_string(j), ok, ok ? std::to_string(n) + " plan classes" : why);
    }
    // A3 structure: every cell is inside or outside each member of its configuration
    {
        bool ok = true;
        std::string why;
        for (const auto& [key, cl] : b.cells) {
            const Configuration& c = b.tpl(key.first, key.second).config;
            auto mem = c.members();
            std::vector<Box> boxes;
            for (const auto& cell : cl) {
                boxes.push_back(cell.box);
                for (std::size_t k = 0; k < mem.size(); ++k) {
                    bool in = (cell.members >> k) & 1u;
                    if (in ? !mem[k].contains(cell.box) : !boxes_disjoint(mem[k], cell.box)) {
                        ok = false;
                        why = "cell " + cell.box.str() + " straddles member " + std::to_string(k);
                    }
                }
            }
            if (!pairwise_disjoint(boxes) || total_measure(boxes) != c.union_measure()) {
                ok = false;
                why = "cells of template (" + std::to_string(key.first) + "," + std::to_string(key.second) + ") do not partition the union";
            }
        }
        for (const auto& P : b.plans)
            if (P.j > 1) {
                Box cellbox = b.template_cells(P.j - 1, P.parent_t).at(P.parent_cell).box;
                if (!(P.domain == cellbox)) {
                    ok = false;
                    why = "plan domain differs from its atom";
                }
            }
        rep.add("A3 cells", ok, why);
    }
    // A3 on realizations: representative chains, then random ones
    {
        bool ok = true;
        std::string why;
        std::size_t pairs = 0;
        for (std::size_t g = 0; g < b.groups.size() && ok; ++g) {
            if (b.groups[g].level != J) continue;
            std::vector<std::pair<int, std::vector<Box>>> chain;
            int cur = static_cast<int>(g);
            while (cur >= 0) {
                chain.push_back({b.groups[cur].level, b.group_configuration(cur).members()});
                int parent = b.groups[cur].parent;
                cur = b.nodes[parent].group;
            }
            ok = chain_nested(chain, why, pairs);
        }
        std::mt19937_64 pick(opt.seed);
        gmp_randclass rng(gmp_randinit_mt);
        rng.seed(static_cast<unsigned long>(opt.seed) + 1000);
        for (int k = 0; k < opt.random_chains && ok && J > 0; ++k) {
            std::vector<std::pair<int, std::vector<Box>>> chain;
            std::vector<Rational> origin;
            int pc = 0;
            for (int j = 1; j <= J; ++j) {
                const PlanClass& P = b.plans.at(pc);
                std::vector<int> ts;
                for (const auto& [t, n] : P.per_template) ts.push_back(t);
                int t = ts[pick() % ts.size()];
                ConfigInstance ci = P.plan.sample_instance(t, pick() % 2 == 0, rng);
                origin = add(origin, ci.corner);
                chain.push_back({j, P.plan.tpl(t).config.shifted(origin).members()});
                if (j == J) break;
                const auto& cl = b.template_cells(j, t);
                int cell = static_cast<int>(pick() % cl.size());
                auto it = b.plan_index.find({j + 1, t, cell});
                if (it == b.plan_index.end()) break;
                pc = it->second;
            }
            ok = chain_nested(chain, why, pairs);
        }
        rep.add("A3 nesting", ok, ok ? std::to_string(pairs) + " cross-level pairs" : why);
    }
    // A4: selected measure inside every processed atom
    for (int j = 1; j <= J; ++j) {
        const ScheduleLevel& L = b.schedule.level(j);
        Rational kap = kappa(c_of(L), b.rounds);
        bool ok = true;
        std::string why;
        BigInt atoms = 0;
        for (std::size_t nid = 0; nid < b.nodes.size(); ++nid) {
            const BasisNode& N = b.nodes[nid];
            if (N.level != j - 1) continue;
            atoms += N.count;
            Rational sel = 0, all = 0;
            for (int g : N.groups) {
                const ConfigGroup& G = b.groups[g];
                Rational u = Rational(G.count) * b.tpl(j, G.t).union_measure;
                all += u;
                if (G.selected) sel += u;
            }
            if (j == 1) {
                for (const auto& n : b.extra_selected) {
                    ConfigInstance ci = b.plans.at(0).plan.locate(n);
                    if (!ci.selected) sel += b.plans.at(0).plan.tpl(ci.level).union_measure;
                }
            }
            Rational per = Rational(N.count) * N.measure;
            if (all != kap * per) {
                ok = false;
                why = "atom covered " + to_string(all) + " instead of " + to_string(kap * per);
                break;
            }
            if (sel != pow2(-L.m) * all) {
                ok = false;
                why = "|F*_" + std::to_string(j) + " in A| = " + to_string(sel) + ", expected 2^-" + std::to_string(L.m) +
                      " of the covered part = " + to_string(pow2(-L.m) * all) + " (deficit " + to_string(pow2(-L.m) * all - sel) + ")";
                break;
            }
        }
        rep.add("A4 level " + std::to_string(j), ok, ok ? atoms.get_str() + " atoms" : why);
    }
    // independence on the core
    if (J >= 1) {
        Rational core = b.core_measure();
        Rational expect_core = b.domain.measure();
        for (const auto& L : b.schedule.levels) expect_core *= kappa(c_of(L), b.rounds);
        rep.add("core measure", core == expect_core, core == expect_core ? to_string(core) : to_string(core) + " != " + to_string(expect_core));
        bool ok = true;
        std::string why;
        int n = 0;
        for (std::uint64_t sub = 1; sub < (std::uint64_t(1) << J) && J <= 16; ++sub) {
            Rational expect = core;
            for (int j = 1; j <= J; ++j)
                if (sub >> (j - 1) & 1) expect *= pow2(-b.schedule.level(j).m);
            Rational got = independence_measure(b, sub);
            ++n;
            if (got != expect) {
                ok = false;
                why = "subset mask " + std::to_string(sub) + ": " + to_string(got) + " != " + to_string(expect);
                break;
            }
        }
        rep.add("independence", ok, ok ? std::to_string(n) + " identities" : why);
    }
    return rep;
}

}  // namespace tdiff
