#include "tdiff/json_io.hpp"

#include "tdiff/error.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace tdiff {

std::string rational_text(const Rational& r) { return r.get_num().get_str() + "/" + r.get_den().get_str(); }

Rational rational_from_json(const Json& j) {
    if (!j.is_string()) throw InvalidArgument("rational must be a \"p/q\" string, got " + j.dump());
    return parse_rational(j.get<std::string>());
}

Json box_to_json(const Box& b) {
    Json coords = Json::array();
    for (const auto& [i, iv] : b.sides()) coords.push_back({{"i", i}, {"a", rational_text(iv.a)}, {"b", rational_text(iv.b)}});
    return Json{{"coords", coords}};
}

Box box_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("coords") || !j["coords"].is_array()) throw InvalidArgument("box JSON needs a \"coords\" array");
    std::vector<Box::Side> sides;
    for (const auto& c : j["coords"]) {
        if (!c.contains("i") || !c["i"].is_number_integer()) throw InvalidArgument("box side needs an integer \"i\"");
        int i = c["i"].get<int>();
        Rational a = rational_from_json(c.at("a")), b = rational_from_json(c.at("b"));
        if (i < 1) throw InvalidArgument("coordinates are 1-based");
        if (!(0 <= a && a < b && b <= 1)) throw InvalidArgument("side " + std::to_string(i) + " is not a subinterval of [0,1)");
        if (a == 0 && b == 1) continue;
        sides.emplace_back(i, Interval{a, b});
    }
    return Box(std::move(sides));
}

namespace {

Json corner_json(const std::vector<Rational>& c) {
    Json a = Json::array();
    for (const auto& x : c) a.push_back(rational_text(x));
    return a;
}

// Side exponents k of a box whose sides are all 2^-k long.
Json side_exponents(const Box& b) {
    Json a = Json::array();
    for (const auto& [i, iv] : b.sides()) {
        Rational len = iv.length();
        long k = 0;
        while (pow2(-k) > len) ++k;
        a.push_back(pow2(-k) == len ? Json(k) : Json(rational_text(len)));
    }
    return a;
}

Json config_json(const Configuration& c) {
    Json t = Json::array();
    for (const auto& b : c.translates) t.push_back(box_to_json(b));
    return Json{{"q0", box_to_json(c.q0)}, {"translates", t}, {"shift_coords", c.shift_coords},
                {"eps", rational_text(c.eps)}, {"d", c.d}};
}

Json qblock_json(const QBlock& q) { return Json{{"region", box_to_json(q.region)}, {"level", q.level}}; }

}  // namespace

Json plan_to_json(const CoveringPlan& plan, std::size_t listing_cap) {
    Json j;
    j["params"] = {{"eps", rational_text(plan.eps)}, {"d", plan.d}, {"m", plan.m}, {"rounds", plan.rounds},
                   {"domain", box_to_json(plan.domain)}};
    j["c"] = rational_text(plan.c);
    j["covered"] = rational_text(plan.covered_measure());
    j["residual_measure"] = rational_text(plan.residual_measure());
    j["total_configs"] = plan.total_configs().get_str();
    j["selection_offset"] = plan.selection_offset.get_str();
    Json rounds = Json::array();
    for (int r = 1; r <= plan.rounds; ++r)
        rounds.push_back({{"round", r}, {"configs", plan.configs_in_round(r).get_str()},
                          {"covered", rational_text(plan.covered_in_round(r))}});
    j["rounds"] = rounds;
    Json tpls = Json::array();
    for (const auto& [t, tpl] : plan.templates) {
        Json res = Json::array();
        for (const auto& q : tpl.residual) res.push_back(qblock_json(q));
        tpls.push_back({{"t", t}, {"configuration", config_json(tpl.config)}, {"side_exponents", side_exponents(tpl.config.q0)},
                        {"union_measure", rational_text(tpl.union_measure)}, {"residual", res}});
    }
    j["templates"] = tpls;
    Json configs = Json::array();
    std::size_t listed = 0;
    plan.for_each_config([&](const ConfigInstance& ci) {
        if (listed == listing_cap) return false;
        configs.push_back({{"index", ci.index.get_str()}, {"round", ci.round}, {"t", ci.level}, {"corner", corner_json(ci.corner)},
                           {"group", ci.group.get_str()}, {"selected", ci.selected}});
        ++listed;
        return true;
    });
    j["configurations"] = configs;
    j["configurations_truncated"] = BigInt(listed) < plan.total_configs();
    Json residual = Json::array();
    std::size_t rl = 0;
    bool more = false;
    plan.for_each_residual_block([&](const QBlock& q) {
        if (rl == listing_cap) {
            more = true;
            return false;
        }
        residual.push_back(qblock_json(q));
        ++rl;
        return true;
    });
    j["residual_blocks"] = residual;
    j["residual_truncated"] = more;
    return j;
}

Schedule BasisParams::schedule() const {
    if (depth < 1) throw InvalidArgument("depth must be >= 1");
    if (variant == "custom") {
        if (static_cast<int>(custom.size()) != depth) throw InvalidArgument("custom schedule needs one (d, eps) per level");
        return custom_schedule(custom);
    }
    return make_schedule(parse_variant(variant), p0, depth, eps_bits);
}

LeveledBasis BasisParams::build() const {
    if (rounds < 1) throw InvalidArgument("rounds must be >= 1");
    BuildOptions opt;
    opt.chain_cap = chain_cap;
    return build_basis(domain, schedule(), rounds, opt);
}

Json params_to_json(const BasisParams& p) {
    Json j{{"variant", p.variant}, {"p0", rational_text(p.p0)}, {"depth", p.depth}, {"rounds", p.rounds},
           {"eps_bits", p.eps_bits}, {"domain", box_to_json(p.domain)}, {"chain_cap", p.chain_cap}};
    if (!p.custom.empty()) {
        Json c = Json::array();
        for (const auto& [d, e] : p.custom) c.push_back({{"d", d}, {"eps", rational_text(e)}});
        j["custom"] = c;
    }
    return j;
}

BasisParams params_from_json(const Json& j) {
    BasisParams p;
    try {
        p.variant = j.at("variant").get<std::string>();
        p.p0 = rational_from_json(j.at("p0"));
        p.depth = j.at("depth").get<int>();
        p.rounds = j.at("rounds").get<int>();
        p.eps_bits = j.at("eps_bits").get<int>();
        p.domain = box_from_json(j.at("domain"));
        p.chain_cap = j.at("chain_cap").get<std::size_t>();
        if (j.contains("custom"))
            for (const auto& c : j["custom"]) p.custom.emplace_back(c.at("d").get<long>(), rational_from_json(c.at("eps")));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad basis parameters: ") + e.what());
    }
    return p;
}

Json schedule_to_json(const Schedule& s) {
    Json levels = Json::array();
    for (const auto& L : s.levels)
        levels.push_back({{"j", L.j}, {"d", L.d}, {"eps", rational_text(L.eps)}, {"m", L.m}, {"target", L.target_text}});
    Json j{{"variant", to_string(s.variant)}, {"levels", levels}, {"degenerate", s.degenerate}};
    if (s.variant != Variant::custom) j["p0"] = rational_text(s.p0);
    if (s.growth) j["growth"] = {{"a", rational_text(s.growth->a)}, {"b", rational_text(s.growth->b)}};
    return j;
}

Json ledger_to_json(const std::vector<LedgerRow>& rows) {
    Json a = Json::array();
    for (const auto& r : rows)
        a.push_back({{"j", r.j}, {"d", r.d}, {"eps", rational_text(r.eps)}, {"m", r.m}, {"c", rational_text(r.c)},
                     {"kappa", rational_text(r.kappa)}, {"covered", rational_text(r.covered)},
                     {"f_star", rational_text(r.f_star)}, {"f", rational_text(r.f)}});
    return a;
}

Json basis_to_json(const LeveledBasis& b, const BasisParams& p, std::size_t listing_cap) {
    Json j;
    j["params"] = params_to_json(p);
    j["schedule"] = schedule_to_json(b.schedule);
    j["ledger"] = ledger_to_json(b.ledger());
    j["core_measure"] = rational_text(b.core_measure());
    Json levels = Json::array();
    for (int lv = 1; lv <= b.depth(); ++lv) {
        Json groups = Json::array();
        for (int g : b.groups_at(lv)) {
            const ConfigGroup& G = b.groups[g];
            Configuration c = b.group_configuration(g);
            Json g_json{{"id", g}, {"parent", G.parent}, {"t", G.t}, {"selected", G.selected}, {"count", G.count.get_str()},
                        {"corner", corner_json(G.origin)}, {"side_exponents", side_exponents(c.q0)},
                        {"eps", rational_text(c.eps)}, {"d", c.d}};
            const PlanClass& pc = b.plans[b.nodes[G.parent].plan];
            if (auto it = pc.reps.find({G.t, G.selected}); it != pc.reps.end()) g_json["label"] = it->second.group.get_str();
            groups.push_back(std::move(g_json));
        }
        Json tpls = Json::array();
        for (const auto& pc : b.plans)
            if (pc.j == lv)
                for (const auto& [t, tpl] : pc.plan.templates) tpls.push_back({{"t", t}, {"configuration", config_json(tpl.config)}});
        std::sort(tpls.begin(), tpls.end(), [](const Json& x, const Json& y) { return x["t"].get<int>() < y["t"].get<int>(); });
        tpls.erase(std::unique(tpls.begin(), tpls.end()), tpls.end());
        levels.push_back({{"j", lv}, {"templates", tpls}, {"groups", groups}});
    }
    j["levels"] = levels;
    // nodes: level, parent, group, t, selected, cell, members, sel_mask, q0_mask, count, measure, residual
    Json nodes = Json::array();
    for (std::size_t n = 0; n < b.nodes.size(); ++n) {
        const BasisNode& N = b.nodes[n];
        nodes.push_back(Json::array({N.level, N.parent, N.group, N.t, N.selected, N.cell, N.members, N.sel_mask, N.q0_mask,
                                     N.count.get_str(), rational_text(N.measure),
                                     rational_text(b.residual_measure(static_cast<int>(n)))}));
    }
    j["nodes"] = nodes;
    Json plans = Json::array();
    for (const auto& pc : b.plans) {
        Json res = Json::array();
        std::size_t listed = 0;
        bool more = false;
        pc.plan.for_each_residual_block([&](const QBlock& q) {
            if (listed == listing_cap) {
                more = true;
                return false;
            }
            res.push_back(qblock_json(q));
            ++listed;
            return true;
        });
        plans.push_back({{"j", pc.j}, {"parent_t", pc.parent_t}, {"parent_cell", pc.parent_cell},
                         {"domain", box_to_json(pc.domain)}, {"configs", pc.plan.total_configs().get_str()},
                         {"covered", rational_text(pc.plan.covered_measure())}, {"residual_blocks", res},
                         {"residual_truncated", more}});
    }
    j["plans"] = plans;
    j["deferred"] = b.deferred;
    return j;
}

Json transfer_to_json(const LeveledBasis& b, const IntervalUnionBasis& t) {
    auto spans = [](const std::vector<Span>& v) {
        Json a = Json::array();
        for (const auto& s : v) a.push_back(Json::array({rational_text(s.a), rational_text(s.b)}));
        return a;
    };
    // nested: every node lists its residual interval and its configuration groups
    std::function<Json(int)> node = [&](int n) {
        const BasisNode& N = b.nodes[n];
        Json groups = Json::array();
        for (int g : N.groups) {
            Json members = Json::array();
            for (const auto& m : t.members[g]) members.push_back(spans(m));
            Json cells = Json::array();
            for (int c : b.groups[g].cells) cells.push_back(node(c));
            groups.push_back({{"group", g}, {"instances_per_atom", BigInt(b.groups[g].count / N.count).get_str()},
                              {"members", members}, {"cells", cells}});
        }
        return Json{{"node", n}, {"level", N.level}, {"instances", N.count.get_str()},
                    {"interval", Json::array({rational_text(t.start[n]), rational_text(t.start[n] + t.length[n])})},
                    {"residual", spans({t.residual[n]})}, {"groups", groups}};
    };
    return Json{{"total", rational_text(t.total)}, {"root", node(0)}};
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(path + ": " + e.what());
    }
}

std::string canonical(const Json& j) { return j.dump() + "\n"; }

}  // namespace tdiff
