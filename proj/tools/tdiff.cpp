// Command-line front end. Every run writes its artifacts plus a manifest with
// SHA-256 hashes; `replay` re-runs a manifest and compares the hashes.
#include "tdiff/basis.hpp"
#include "tdiff/configuration.hpp"
#include "tdiff/covering.hpp"
#include "tdiff/error.hpp"
#include "tdiff/json_io.hpp"
#include "tdiff/maximal.hpp"
#include "tdiff/rdf.hpp"
#include "tdiff/spaces.hpp"

#include "CLI11.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace tdiff;

namespace {

struct VerificationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream o;
    for (unsigned int i = 0; i < len; ++i) o << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return o.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read " + p.string());
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
}

struct Run {
    fs::path out_dir;
    std::string subcommand;
    std::vector<std::string> args;
    std::vector<std::pair<std::string, std::string>> outputs;  // manifest name, hash
    std::vector<std::pair<std::string, std::string>> inputs;

    fs::path resolve(const std::string& name) const {
        fs::path p(name);
        return p.is_absolute() ? p : out_dir / p;
    }
    void write(const std::string& name, const std::string& content) {
        fs::path p = resolve(name);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        std::ofstream o(p, std::ios::binary);
        if (!o) throw InvalidArgument("cannot write " + p.string());
        o << content;
        outputs.emplace_back(fs::path(name).is_absolute() ? name : fs::path(name).lexically_normal().string(), sha256_hex(content));
    }
    Json input_json(const std::string& path) {
        std::string text = slurp(path);
        inputs.emplace_back(fs::absolute(path).lexically_normal().string(), sha256_hex(text));
        try {
            return Json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument(path + ": " + e.what());
        }
    }
    void manifest() {
        Json outs = Json::array(), ins = Json::array();
        for (const auto& [n, h] : outputs) outs.push_back({{"path", n}, {"sha256", h}});
        for (const auto& [n, h] : inputs) ins.push_back({{"path", n}, {"sha256", h}});
        Json m{{"tool", "tdiff"}, {"subcommand", subcommand}, {"args", args}, {"outputs", outs}, {"inputs", ins}};
        fs::create_directories(out_dir);
        // named after the first artifact so runs sharing a directory keep their manifests
        std::string stem = outputs.empty() ? subcommand : fs::path(outputs.front().first).stem().string();
        fs::path where = outputs.empty() ? out_dir : resolve(outputs.front().first).parent_path();
        std::ofstream o(where / (stem + ".manifest.json"));
        o << canonical(m);
    }
};

std::string csv_rational(const Rational& r) { return rational_text(r) + "," + to_decimal(r, 12); }

std::vector<Exponent> parse_grid(const std::string& s) {
    std::vector<Exponent> out;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ','))
        if (!tok.empty()) out.push_back(parse_exponent(tok));
    if (out.empty()) throw InvalidArgument("empty probe grid");
    return out;
}

Rational rational_arg(const std::string& s, const char* what) {
    try {
        return parse_rational(s);
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(std::string(what) + ": " + e.what());
    }
}

BasisParams basis_params_from_file(Run& run, const std::string& path, Json* whole = nullptr) {
    Json j = run.input_json(path);
    if (!j.contains("params")) throw InvalidArgument(path + " is not a basis file");
    if (whole) *whole = j;
    return params_from_json(j["params"]);
}

struct Options {
    // build
    std::string p0 = "2", variant = "geq", domain, out;
    int depth = -1, rounds = 2, eps_bits = 0;
    std::size_t chain_cap = 1000000, list = 64;
    // verify
    std::string basis_file;
    std::uint64_t seed = 1;
    int random_chains = 200;
    // cover
    std::string eps = "1/2";
    int d = 1, m = 1;
    // counterexample / probe
    std::string p, rounds_text, probe = "1,1.5,2,3", csv;
    int levels = 8;
    // norm
    long budget = 0;
    // fixture
    int rows = 12, jmax = 10, n = 1;
    // glue
    std::string a, b;
    // transfer
    int functions = 20;
    // rdf
    long rdf_m = 1;
    // replay
    std::string manifest;
};

void cmd_build(Run& run, const Options& o) {
    if (o.depth < 1) throw InvalidArgument("build needs --depth >= 1, got " + std::to_string(o.depth));
    BasisParams p;
    p.variant = o.variant;
    p.p0 = rational_arg(o.p0, "--p0");
    p.depth = o.depth;
    p.rounds = o.rounds;
    p.eps_bits = o.eps_bits;
    p.chain_cap = o.chain_cap;
    if (!o.domain.empty()) p.domain = box_from_json(run.input_json(o.domain));
    LeveledBasis b = p.build();
    Json j = basis_to_json(b, p, o.list);
    j["listing_cap"] = o.list;
    std::string out = o.out.empty() ? "basis.json" : o.out;
    run.write(out, canonical(j));
    std::cout << "basis: depth " << b.depth() << ", rounds " << b.rounds << ", " << b.nodes.size() << " atom types, "
              << b.groups.size() << " configuration types, " << b.plans.size() << " plans\n";
    for (const auto& r : b.ledger())
        std::cout << "  level " << r.j << ": d=" << r.d << " eps=" << to_string(r.eps) << " m=" << r.m
                  << " |E|=" << to_decimal(r.covered) << " |F|=" << to_decimal(r.f) << "\n";
    std::cout << "wrote " << run.resolve(out).string() << "\n";
}

void cmd_verify(Run& run, const Options& o) {
    Json stored;
    BasisParams p = basis_params_from_file(run, o.basis_file, &stored);
    LeveledBasis b = p.build();
    std::size_t cap = stored.value("listing_cap", std::size_t{64});
    Json again = basis_to_json(b, p, cap);
    again["listing_cap"] = cap;
    Report rep;
    rep.add("rebuild matches file", canonical(again) == canonical(stored),
            "stored basis differs from the rebuild with the same parameters");
    Report ax = verify_axioms(b, AxiomOptions{o.seed, o.random_chains});
    for (auto& c : ax.checks) rep.checks.push_back(c);
    run.write(o.out.empty() ? "verify.txt" : o.out, rep.summary());
    std::cout << rep.summary();
    if (!rep.ok()) throw VerificationFailed(rep.first_failure()->name + ": " + rep.first_failure()->detail);
}

void cmd_cover(Run& run, const Options& o) {
    if (o.rounds < 0) throw InvalidArgument("--rounds must be >= 0");
    Box U = o.domain.empty() ? Box::full() : box_from_json(run.input_json(o.domain));
    CoveringPlan plan = cover_rectangle(U, rational_arg(o.eps, "--eps"), o.d, o.m, o.rounds);
    Report rep = verify_plan(plan, o.seed);
    std::string out = o.out.empty() ? "plan.json" : o.out;
    run.write(out, canonical(plan_to_json(plan, o.list)));
    std::cout << "covered " << rational_text(plan.covered_measure()) << " (" << to_decimal(plan.covered_measure()) << ") of "
              << rational_text(U.measure()) << " with " << plan.total_configs().get_str() << " configurations\n";
    std::cout << rep.summary();
    if (!rep.ok()) throw VerificationFailed(rep.first_failure()->name + ": " + rep.first_failure()->detail);
}

void cmd_counterexample(Run& run, const Options& o) {
    if (o.p.empty()) throw InvalidArgument("counterexample needs --p");
    Rational p = rational_arg(o.p, "--p");
    if (p < 1) throw InvalidArgument("--p must be >= 1");
    if (o.levels < 1) throw InvalidArgument("--levels must be >= 1");
    BasisParams bp;
    bp.variant = o.variant;
    bp.p0 = rational_arg(o.p0, "--p0");
    bp.eps_bits = o.eps_bits;
    std::optional<LeveledBasis> built;
    if (!o.basis_file.empty()) {
        bp = basis_params_from_file(run, o.basis_file);
        built = bp.build();
    }
    std::optional<int> T;
    std::string rt = o.rounds_text.empty() ? (built ? std::to_string(bp.rounds) : "inf") : o.rounds_text;
    if (rt != "inf") {
        T = std::stoi(rt);
        if (*T < 1) throw InvalidArgument("--rounds must be >= 1 or inf");
    }
    BasisParams lp = bp;
    lp.depth = o.levels;
    if (lp.variant == "custom") throw InvalidArgument("custom schedules cannot be extended; use a geq or gt basis");
    Schedule s = lp.schedule();
    Rational dom = built ? built->domain.measure() : Rational(1);
    auto rows = ledger_oracle(s, T, dom);
    if (built && T) {
        auto br = built->ledger();
        for (std::size_t i = 0; i < br.size() && i < rows.size(); ++i)
            if (br[i].f != rows[i].f || br[i].f_star != rows[i].f_star)
                throw VerificationFailed("basis ledger differs from the closed form at level " + std::to_string(i + 1));
    }
    LpLedger L = lp_ledger(s, rows, p, dom);
    std::ostringstream csv;
    csv << "level,eps,f,f_decimal,f_star,f_star_decimal,term,term_decimal,partial_decimal,bound_decimal,within_bound,exceptional,exceptional_decimal\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const auto& lr = L.rows[i];
        ExceptionalBound e = exceptional_lower_bound(rows, r.j);
        csv << r.j << "," << rational_text(r.eps) << "," << csv_rational(r.f) << "," << csv_rational(r.f_star) << ","
            << (lr.term_exact ? rational_text(*lr.term_exact) : std::string()) << "," << to_decimal(lr.term.hi_rational(), 12) << ","
            << to_decimal(lr.partial.hi_rational(), 12) << "," << to_decimal(lr.bound.hi_rational(), 12) << ","
            << (lr.within_bound ? "true" : "false") << "," << csv_rational(e.value) << "\n";
    }
    std::string out = o.csv.empty() ? "counterexample.csv" : o.csv;
    run.write(out, csv.str());
    ExceptionalBound e = exceptional_lower_bound(rows, o.levels);
    std::cout << "p = " << rational_text(p) << ", " << o.levels << " levels, rounds " << rt << "\n"
              << "  ||f||_p^p <= " << to_decimal(L.total.hi_rational()) << "\n"
              << "  exceptional set >= " << rational_text(e.value) << " (" << to_decimal(e.value) << ")\n"
              << "wrote " << run.resolve(out).string() << "\n";
}

std::vector<ProbePoint> probe_source(Run& run, const std::string& source, const std::vector<Exponent>& grid, std::string* name) {
    if (source == "e1" || source.rfind("e1:", 0) == 0) {
        int rows = source.size() > 3 ? std::stoi(source.substr(3)) : 12;
        *name = "e1";
        return probe_e1(example_e1(rows), grid);
    }
    if (source.rfind("geq:", 0) == 0 || source.rfind("gt:", 0) == 0) {
        auto colon = source.find(':');
        std::string rest = source.substr(colon + 1);
        int levels = 8;
        if (auto c2 = rest.find(':'); c2 != std::string::npos) {
            levels = std::stoi(rest.substr(c2 + 1));
            rest = rest.substr(0, c2);
        }
        *name = source;
        return probe_schedule(make_schedule(parse_variant(source.substr(0, colon)), rational_arg(rest, "p0"), levels), grid);
    }
    BasisParams p = basis_params_from_file(run, source);
    *name = fs::path(source).filename().string();
    return probe_schedule(p.schedule(), grid);
}

GluedComponent component_source(Run& run, const std::string& source) {
    std::string name;
    auto first = probe_source(run, source, {Rational(2)}, &name);
    (void)first;
    if (name == "e1") {
        int rows = source.size() > 3 ? std::stoi(source.substr(3)) : 12;
        return component_of(name, example_e1(rows));
    }
    if (source.rfind("geq:", 0) == 0 || source.rfind("gt:", 0) == 0) {
        auto colon = source.find(':');
        std::string rest = source.substr(colon + 1);
        int levels = 8;
        if (auto c2 = rest.find(':'); c2 != std::string::npos) {
            levels = std::stoi(rest.substr(c2 + 1));
            rest = rest.substr(0, c2);
        }
        return component_of(name, make_schedule(parse_variant(source.substr(0, colon)), rational_arg(rest, "p0"), levels));
    }
    Json j = read_json_file(source);
    return component_of(name, params_from_json(j.at("params")).schedule());
}

void cmd_probe(Run& run, const Options& o) {
    auto grid = parse_grid(o.probe);
    std::string source = o.basis_file.empty() ? o.variant + ":" + o.p0 + ":" + std::to_string(o.levels) : o.basis_file;
    std::string name;
    auto pr = probe_source(run, source, grid, &name);
    std::ostringstream csv;
    csv << "p,verdict,witness\n";
    for (const auto& pt : pr) {
        csv << to_string(pt.p) << "," << to_string(pt.verdict) << ",\"" << pt.witness << "\"\n";
        std::cout << "p = " << to_string(pt.p) << ": " << to_string(pt.verdict) << "  (" << pt.witness << ")\n";
    }
    run.write(o.csv.empty() ? "probe.csv" : o.csv, csv.str());
}

void cmd_norm(Run& run, const Options& o) {
    if (o.p.empty()) throw InvalidArgument("norm needs --p");
    Rational eps = rational_arg(o.eps, "--eps"), p = rational_arg(o.p, "--p");
    NormEstimate est = config_norm_oracle(eps, o.d, p);
    std::string lower;
    if (o.budget > 0) {
        Configuration c = standard_configuration(eps, o.d);
        auto r = weak_type_lower_search(c.members(), p, o.budget, o.seed);
        lower = rational_text(r.lower_bound);
    }
    std::cout << "regime " << to_string(est.regime) << ", A_p = " << std::setprecision(12) << static_cast<double>(est.a_p)
              << ", value " << static_cast<double>(est.value);
    if (!lower.empty()) std::cout << ", search lower bound " << to_decimal(parse_rational(lower), 12);
    std::cout << "\n";
    std::ostringstream csv;
    csv << "eps,d,p,A_p,regime,value,lower_bound\n"
        << rational_text(eps) << "," << o.d << "," << rational_text(p) << "," << std::setprecision(12) << static_cast<double>(est.a_p)
        << "," << to_string(est.regime) << "," << static_cast<double>(est.value) << "," << lower << "\n";
    run.write(o.csv.empty() ? "norm.csv" : o.csv, csv.str());
}

void cmd_fixture_e1(Run& run, const Options& o) {
    auto s = example_e1(o.rows);
    auto g = ColumnFunction::indicator_of_k(o.rows);
    std::ostringstream csv;
    csv << "u,row,upper,lower,value\n";
    bool ok = true;
    for (long u = 1; u <= 8; ++u)
        for (int j = 0; j <= o.rows; ++j) {
            auto d = column_derivates(s, g, ColumnPoint{Rational(u, 8), j}, 1);
            csv << rational_text(Rational(u, 8)) << "," << j << "," << rational_text(d.upper) << "," << rational_text(d.lower) << ","
                << rational_text(d.value) << "\n";
            ok = ok && d.upper == 1 && d.lower == 1;
        }
    run.write(o.csv.empty() ? "e1.csv" : o.csv, csv.str());
    std::cout << "1_K derivates " << (ok ? "equal 1 at every queried point" : "differ from 1") << "\n";
    for (const auto& pt : probe_e1(s, parse_grid(o.probe + ",inf")))
        std::cout << "p = " << to_string(pt.p) << ": " << to_string(pt.verdict) << "\n";
    if (!ok) throw VerificationFailed("derivates of 1_K differ from 1");
}

void cmd_fixture_e4(Run& run, const Options& o) {
    E4Table t = example_e4(o.jmax, o.n);
    std::ostringstream csv;
    // exact values are written while they stay short; the decimals are always there
    auto exact = [](const Rational& r) {
        std::string s = rational_text(r);
        return s.size() <= 4096 ? s : std::string();
    };
    csv << "j,avg_g,avg_g_decimal,avg_gn,avg_gn_decimal,dev_g_decimal,summed\n";
    for (const auto& r : t.rows)
        csv << r.j << "," << exact(r.avg_g) << "," << to_decimal(r.avg_g, 12) << "," << exact(r.avg_gn) << ","
            << to_decimal(r.avg_gn, 12) << "," << to_decimal(r.dev_g, 12) << "," << (r.summed ? "true" : "false") << "\n";
    run.write(o.csv.empty() ? "e4.csv" : o.csv, csv.str());
    std::cout << "g limit 2/3, g_" << o.n << " limit " << rational_text(t.limit_gn) << " (" << to_decimal(t.limit_gn) << ")\n"
              << "fitted C = " << to_decimal(t.fitted_c) << "\n";
}

void cmd_glue(Run& run, const Options& o) {
    if (o.a.empty() || o.b.empty()) throw InvalidArgument("glue needs --a and --b");
    auto grid = parse_grid(o.probe);
    GluedComponent ca = component_source(run, o.a), cb = component_source(run, o.b);
    auto pa = ca.probe(grid), pb = cb.probe(grid);
    GluedSpace g = glue(ca, cb);
    auto pg = g.probe(grid);
    std::ostringstream csv;
    csv << "p,a,b,glue,and\n";
    bool ok = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        bool same = pg[i].verdict == combine(pa[i].verdict, pb[i].verdict);
        ok = ok && same;
        csv << to_string(grid[i]) << "," << to_string(pa[i].verdict) << "," << to_string(pb[i].verdict) << ","
            << to_string(pg[i].verdict) << "," << (same ? "true" : "false") << "\n";
        std::cout << "p = " << to_string(grid[i]) << ": " << to_string(pa[i].verdict) << " & " << to_string(pb[i].verdict)
                  << " -> " << to_string(pg[i].verdict) << "\n";
    }
    run.write(o.csv.empty() ? "glue.csv" : o.csv, csv.str());
    if (!ok) throw VerificationFailed("glue probe is not the componentwise AND");
}

void cmd_transfer(Run& run, const Options& o) {
    if (o.basis_file.empty()) throw InvalidArgument("transfer needs --basis");
    BasisParams bp = basis_params_from_file(run, o.basis_file);
    LeveledBasis b = bp.build();
    IntervalUnionBasis t = transfer_to_interval(b);
    Report rep = verify_transfer(b, t);
    Rational p = rational_arg(o.p.empty() ? "2" : o.p, "--p");
    std::size_t agree = 0;
    for (int k = 0; k < o.functions; ++k) {
        auto f = BasisFunction::random(b, o.seed + static_cast<std::uint64_t>(k));
        auto x = weak_type_ratio(b, f, p);
        auto y = interval_weak_ratio(b, t, f, p);
        bool same = x.value_pow && y.value_pow ? *x.value_pow == *y.value_pow
                                               : x.lambda == y.lambda && x.level_measure == y.level_measure;
        if (same) ++agree;
    }
    rep.add("weak-type ratios agree", agree == static_cast<std::size_t>(o.functions),
            std::to_string(agree) + " of " + std::to_string(o.functions));
    run.write(o.out.empty() ? "transfer.json" : o.out, canonical(transfer_to_json(b, t)));
    std::cout << rep.summary();
    if (!rep.ok()) throw VerificationFailed(rep.first_failure()->name + ": " + rep.first_failure()->detail);
}

void cmd_rdf_show(Run& run, const Options& o) {
    RdfCell c = v_cell(o.rdf_m);
    Box b = c.box();
    std::cout << "V_" << o.rdf_m << " = " << b.str() << "\n|V_" << o.rdf_m << "| = " << rational_text(c.measure()) << "\n"
              << "|H_" << o.rdf_m << "| = " << HGrid(o.rdf_m).size().get_str() << "\n";
    Json j{{"m", o.rdf_m}, {"cell", box_to_json(b)}, {"measure", rational_text(c.measure())}, {"exponents", c.exponents}};
    run.write(o.out.empty() ? "rdf.json" : o.out, canonical(j));
}

int run_cli(std::vector<std::string> args, const std::optional<fs::path>& forced_out);

void cmd_replay(const Options& o) {
    Json m = read_json_file(o.manifest);
    for (const auto& in : m.value("inputs", Json::array())) {
        std::string path = in.at("path").get<std::string>();
        if (sha256_hex(slurp(path)) != in.at("sha256").get<std::string>()) throw VerificationFailed("input " + path + " changed");
    }
    fs::path tmp = fs::temp_directory_path() / ("tdiff-replay-" + std::to_string(::getpid()));
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    std::vector<std::string> args = m.at("args").get<std::vector<std::string>>();
    int code = run_cli(args, tmp);
    bool ok = true;
    for (const auto& out : m.at("outputs")) {
        std::string path = out.at("path").get<std::string>();
        if (fs::path(path).is_absolute()) throw VerificationFailed("cannot replay into absolute output " + path);
        std::string h = sha256_hex(slurp(tmp / path));
        bool same = h == out.at("sha256").get<std::string>();
        ok = ok && same;
        std::cout << (same ? "same " : "DIFF ") << path << "\n";
    }
    fs::remove_all(tmp);
    if (code != 0) throw VerificationFailed("replayed run exited with " + std::to_string(code));
    if (!ok) throw VerificationFailed("replayed outputs differ");
}

int run_cli(std::vector<std::string> args, const std::optional<fs::path>& forced_out) {
    CLI::App app{"Differentiation bases on the infinite torus"};
    app.require_subcommand(1);
    Options o;
    std::string out_dir;
    app.add_option("--out-dir", out_dir, "output directory (default $TDIFF_OUT_DIR or .)");

    auto add_build_opts = [&](CLI::App* c) {
        c->add_option("--p0", o.p0, "critical exponent");
        c->add_option("--variant", o.variant, "geq, gt or custom");
        c->add_option("--eps-bits", o.eps_bits, "extra binary digits of eps");
    };
    auto* build = app.add_subcommand("build", "build a leveled basis");
    add_build_opts(build);
    build->add_option("--depth", o.depth, "number of levels")->required();
    build->add_option("--rounds", o.rounds, "covering rounds per level");
    build->add_option("--domain", o.domain, "box JSON file for U");
    build->add_option("--chain-cap", o.chain_cap, "cap on atom types");
    build->add_option("--list", o.list, "residual blocks listed per plan");
    build->add_option("--out", o.out, "basis JSON");

    auto* verify = app.add_subcommand("verify", "rebuild a basis file and check it");
    verify->add_option("basis", o.basis_file, "basis JSON")->required();
    verify->add_option("--seed", o.seed);
    verify->add_option("--random-chains", o.random_chains);
    verify->add_option("--out", o.out, "report file");

    auto* cover = app.add_subcommand("cover", "covering plan for one (eps, d, m)");
    cover->add_option("--eps", o.eps)->required();
    cover->add_option("--d", o.d)->required();
    cover->add_option("--m", o.m)->required();
    cover->add_option("--rounds", o.rounds)->required();
    cover->add_option("--domain", o.domain, "box JSON file for U");
    cover->add_option("--list", o.list, "configurations listed");
    cover->add_option("--seed", o.seed);
    cover->add_option("--out", o.out, "plan JSON");

    auto* cex = app.add_subcommand("counterexample", "ledger of the failing function");
    add_build_opts(cex);
    cex->add_option("--basis", o.basis_file, "basis JSON");
    cex->add_option("--p", o.p)->required();
    cex->add_option("--levels", o.levels);
    cex->add_option("--rounds", o.rounds_text, "integer or inf");
    cex->add_option("--csv", o.csv);

    auto* probe = app.add_subcommand("probe-range", "probe the differentiated range on a p grid");
    add_build_opts(probe);
    probe->add_option("--basis", o.basis_file, "basis JSON");
    probe->add_option("--levels", o.levels);
    probe->add_option("--probe", o.probe, "comma separated exponents, inf allowed");
    probe->add_option("--csv", o.csv);

    auto add_norm_opts = [&](CLI::App* c) {
        c->add_option("--eps", o.eps)->required();
        c->add_option("--d", o.d)->required();
        c->add_option("--p", o.p)->required();
        c->add_option("--budget", o.budget, "random candidates for the lower-bound search (0: skip)");
        c->add_option("--seed", o.seed);
        c->add_option("--csv", o.csv);
    };
    auto* norm = app.add_subcommand("norm", "weak-type norm of one configuration");
    add_norm_opts(norm);
    auto* config = app.add_subcommand("config", "configuration tools");
    auto* config_norm = config->add_subcommand("norm", "weak-type norm of one configuration");
    add_norm_opts(config_norm);
    config->require_subcommand(1);

    auto* fixture = app.add_subcommand("fixture", "example spaces");
    fixture->require_subcommand(1);
    auto* e1 = fixture->add_subcommand("e1", "column space");
    e1->add_option("--rows", o.rows);
    e1->add_option("--probe", o.probe);
    e1->add_option("--csv", o.csv);
    auto* e4 = fixture->add_subcommand("e4", "weighted dyadic space");
    e4->add_option("--jmax", o.jmax);
    e4->add_option("--n", o.n);
    e4->add_option("--csv", o.csv);

    auto* gl = app.add_subcommand("glue", "glue two spaces and probe the range");
    gl->add_option("--a", o.a, "basis JSON, e1[:rows], geq:p0[:levels] or gt:p0[:levels]")->required();
    gl->add_option("--b", o.b)->required();
    gl->add_option("--probe", o.probe);
    gl->add_option("--csv", o.csv);

    auto* tr = app.add_subcommand("transfer", "move a basis to unions of intervals");
    tr->add_option("--basis", o.basis_file)->required();
    tr->add_option("--functions", o.functions);
    tr->add_option("--seed", o.seed);
    tr->add_option("--p", o.p);
    tr->add_option("--out", o.out);

    auto* rdf = app.add_subcommand("rdf", "fundamental-domain cells");
    rdf->require_subcommand(1);
    auto* show = rdf->add_subcommand("show", "print V_m");
    show->add_option("--m", o.rdf_m)->required();
    show->add_option("--out", o.out);

    auto* replay = app.add_subcommand("replay", "re-run a manifest and compare hashes");
    replay->add_option("manifest", o.manifest)->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    Run run;
    if (forced_out) run.out_dir = *forced_out;
    else if (!out_dir.empty()) run.out_dir = out_dir;
    else if (const char* env = std::getenv("TDIFF_OUT_DIR")) run.out_dir = env;
    else run.out_dir = ".";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out-dir") {
            ++i;
            continue;
        }
        if (args[i].rfind("--out-dir=", 0) == 0) continue;
        run.args.push_back(args[i]);
    }
    try {
        if (*build) run.subcommand = "build", cmd_build(run, o);
        else if (*verify) run.subcommand = "verify", cmd_verify(run, o);
        else if (*cover) run.subcommand = "cover", cmd_cover(run, o);
        else if (*cex) run.subcommand = "counterexample", cmd_counterexample(run, o);
        else if (*probe) run.subcommand = "probe-range", cmd_probe(run, o);
        else if (*norm || *config_norm) run.subcommand = "norm", cmd_norm(run, o);
        else if (*e1) run.subcommand = "fixture-e1", cmd_fixture_e1(run, o);
        else if (*e4) run.subcommand = "fixture-e4", cmd_fixture_e4(run, o);
        else if (*gl) run.subcommand = "glue", cmd_glue(run, o);
        else if (*tr) run.subcommand = "transfer", cmd_transfer(run, o);
        else if (*show) run.subcommand = "rdf-show", cmd_rdf_show(run, o);
        else if (*replay) {
            cmd_replay(o);
            std::cout << "replay ok\n";
            return 0;
        }
        run.manifest();
    } catch (const VerificationFailed& e) {
        if (!run.subcommand.empty()) run.manifest();
        std::cerr << "verification failed: " << e.what() << "\n";
        return 1;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: bad number: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: number out of range: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed JSON input: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "failed: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run_cli(args, std::nullopt);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
