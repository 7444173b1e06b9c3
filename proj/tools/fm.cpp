// Batch front-end: build a setup from JSON, compute any series constructor,
// run verification suites, and compare series files. All output is JSON with
// schema "fm/1", sorted keys and canonical coefficient strings, so identical
// configs produce byte-identical files and serialize -> parse -> serialize is
// a fixed point. A setup hash is embedded in every artifact; verify and
// compare refuse data whose hash does not match unless --force is given.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fm/ifunction.hpp"
#include "fm/ring.hpp"
#include "fm/verify.hpp"

using nlohmann::json;
using namespace fm;

namespace {

struct RunConfig {
    std::string command;  // compute | verify | compare
    std::string setup_path;
    std::string input_path;  // verify input / compare left
    std::string input_path_b;
    std::string constructor_name;
    TruncConfig trunc;
    bool trunc_overridden = false;
    std::string out_path;  // empty = stdout
    std::vector<std::string> checks;
    bool force = false;
    int threads = 1;
};

// ------------------------------------------------------------------ utilities

[[noreturn]] void die(const std::string& what, const std::string& detail) {
    json err;
    err["error"] = what;
    if (!detail.empty()) err["detail"] = detail;
    std::cerr << err.dump() << "\n";
    std::exit(2);
}

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) die("cannot open file", path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        die("malformed json in " + path, e.what());
    }
    return j;
}

void emit(const json& j, const std::string& out_path) {
    std::string text = j.dump(1) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) die("cannot write file", out_path);
        out << text;
    }
}

Poly parse_poly(const json& j, const std::string& where) {
    if (!j.is_string()) die("expected a polynomial string", where);
    ParamRat r;
    try {
        r = ParamRat::parse(j.get<std::string>());
    } catch (const std::exception& e) {
        die("cannot parse polynomial at " + where, e.what());
    }
    if (!r.is_polynomial()) die("denominators are not allowed at " + where, j.get<std::string>());
    return r.num();
}

// ----------------------------------------------------------- setup from json

std::shared_ptr<const RingSpec> build_ring_spec(const json& j, const std::string& where) {
    if (j.is_string()) {
        std::string k = j.get<std::string>();
        if (k == "point") return build_point();
        if (k == "formal") return build_formal();
        die("ring kind needs parameters", where + ": " + k);
    }
    if (!j.is_object() || !j.contains("kind")) die("expected a ring object", where);
    std::string k = j["kind"].get<std::string>();
    if (k == "point") return build_point();
    if (k == "formal") return build_formal();
    if (k == "projective") return build_projective(j.at("n").get<int>());
    if (k == "grassmann") return build_grassmann(j.at("r").get<int>(), j.at("n").get<int>());
    if (k == "product")
        return build_product(build_ring_spec(j.at("left"), where + ".left"),
                             build_ring_spec(j.at("right"), where + ".right"));
    if (k == "gkm_flag" || k == "gkm_toric_flag") {
        std::vector<int> r = j.at("r").get<std::vector<int>>();
        int N = j.at("N").get<int>();
        return k == "gkm_flag" ? build_gkm_flag(N, r) : build_gkm_toric_flag(N, r);
    }
    die("unknown ring kind", k);
}

struct LoadedSetup {
    FlagSetup s;
    json raw;  // normalized copy embedded into outputs
    std::shared_ptr<const RingSpec> ring;           // coefficient ring, when given
    std::optional<json> family;                     // "unit" or {"lines": ...}
    int base_dim = 0;                               // projective base dimension
};

LoadedSetup load_setup(const json& j) {
    LoadedSetup out;
    out.raw = j;
    FlagSetup& s = out.s;
    if (!j.is_object()) die("setup must be a json object", "");
    s.N = j.value("N", 0);
    s.r = j.value("r", std::vector<int>{});
    s.base_rank = j.value("base_rank", 0);
    s.equivariant = j.value("equivariant", false);
    s.twisted = j.value("twisted", false);

    json base = j.value("base", json("point"));
    if (base.is_string() && base.get<std::string>() == "point") {
        s.base = build_point();
    } else if (base.is_object() && base.value("kind", "") == "projective") {
        out.base_dim = base.at("n").get<int>();
        s.base = build_projective(out.base_dim);
    } else {
        die("setup.base must be \"point\" or a projective ring", base.dump());
    }

    auto poly_list = [&](const char* field) {
        std::vector<Poly> v;
        if (!j.contains(field)) return v;
        int idx = 0;
        for (const auto& e : j.at(field))
            v.push_back(parse_poly(e, std::string(field) + "[" + std::to_string(idx++) + "]"));
        return v;
    };
    s.chern_v = poly_list("chern_v");
    s.chern_q = poly_list("chern_q");
    s.v_lines = poly_list("v_lines");

    if (j.contains("ring")) out.ring = build_ring_spec(j.at("ring"), "setup.ring");
    if (j.contains("family")) out.family = j.at("family");
    return out;
}

// base J-function with closed coefficients: unit over a point, the projective
// small J over P^n
CoeffSeries base_j(const LoadedSetup& ls, const TruncConfig& tc) {
    SeriesShape sh{Side::nonabelian, ls.s.base_rank, {}};
    if (ls.s.base_rank == 0) return CoeffSeries::unit(sh, ls.s.base, tc);
    CoeffSeries J = CoeffSeries::zero(sh, ls.s.base, tc);
    for (int d = 0; d <= tc.d_max; ++d) {
        Poly den(Rational(1));
        for (int c = 1; c <= d; ++c)
            den = den * (Poly::var(vars::hbase()) + Poly::var(vars::z()) * Rational(c))
                            .pow(ls.base_dim + 1);
        MultiDeg key = MultiDeg::zero(sh);
        key.d_B = {d};
        J.set_closed(key, ParamRat::of(Poly(Rational(1)), den));
    }
    J.expand_from_closed();
    return J;
}

LambdaFamily build_family(const LoadedSetup& ls, const TruncConfig& tc) {
    if (!ls.family || (ls.family->is_string() && ls.family->get<std::string>() == "unit")) {
        SeriesShape sh{Side::nonabelian, ls.s.base_rank, {}};
        return LambdaFamily::constant(CoeffSeries::unit(sh, ls.s.base, tc));
    }
    if (!ls.family->is_object() || !ls.family->contains("lines"))
        die("setup.family must be \"unit\" or {\"lines\": [...]}", ls.family->dump());
    std::vector<LineData> lines;
    int idx = 0;
    for (const auto& L : ls.family->at("lines")) {
        LineData ld;
        ld.c1 = parse_poly(L.at("c1"), "family.lines[" + std::to_string(idx) + "].c1");
        ld.pairing = L.at("pairing").get<std::vector<int>>();
        lines.push_back(std::move(ld));
        ++idx;
    }
    return oh_split_input(ls.s, lines, base_j(ls, tc), tc);
}

// --------------------------------------------------------------- constructors

CoeffSeries run_constructor(const std::string& name, const LoadedSetup& ls,
                            const TruncConfig& tc) {
    if (name == "qde_small_j") {
        const json& o = ls.raw.value("oracle", json());
        if (!o.is_object()) die("qde_small_j needs setup.oracle", ls.raw.dump());
        QuantumRing qr = o.value("kind", "") == "projective"
                             ? quantum_ring_projective(o.at("n").get<int>())
                             : quantum_ring_grassmann(o.at("r").get<int>(), o.at("n").get<int>());
        return qde_small_j(qr, tc.d_max, -tc.z_lo, o.value("base_keys", false));
    }
    if (name == "toric_i_hirzebruch") {
        if (!ls.ring) die("toric_i_hirzebruch needs setup.ring", "");
        return toric_i_hirzebruch(1, tc, ls.ring);
    }
    if (name == "f_ab") return f_ab(ls.s, build_family(ls, tc), tc);
    if (name == "brown_i") {
        if (!ls.ring) die("brown_i needs setup.ring", "");
        return brown_i(ls.s, base_j(ls, tc), tc, ls.ring);
    }
    if (name == "grassmann_i" || name == "main_flag_i" || name == "twisted_F") {
        if (!ls.ring) die(name + " needs setup.ring", "");
        LambdaFamily fam = build_family(ls, tc);
        if (name == "grassmann_i") return grassmann_i(ls.s, fam, tc, ls.ring);
        if (name == "main_flag_i") return main_flag_i(ls.s, fam, tc, ls.ring);
        return twisted_F(ls.s, fam, tc, ls.ring);
    }
    die("unknown constructor", name);
}

// -------------------------------------------------------- series file format

json trunc_json(const TruncConfig& tc) {
    return json{{"dmax", tc.d_max}, {"zlo", tc.z_lo}, {"zhi", tc.z_hi}, {"minv", tc.m_inv}};
}

TruncConfig trunc_from_json(const json& j) {
    TruncConfig tc;
    tc.d_max = j.at("dmax").get<int>();
    tc.z_lo = j.at("zlo").get<int>();
    tc.z_hi = j.at("zhi").get<int>();
    tc.m_inv = j.at("minv").get<int>();
    return tc;
}

std::string setup_hash(const json& setup, const std::string& ctor, const TruncConfig& tc) {
    json h{{"constructor", ctor}, {"setup", setup}, {"truncation", trunc_json(tc)}};
    return fnv1a_hex(h.dump());
}

json series_to_json(const CoeffSeries& F, const json& setup, const std::string& ctor) {
    json out;
    out["schema"] = "fm/1";
    out["constructor"] = ctor;
    out["setup"] = setup;
    out["truncation"] = trunc_json(F.trunc);
    out["setup_hash"] = setup_hash(setup, ctor, F.trunc);
    out["shape"] = {{"side", F.shape.side == Side::abelian ? "abelian" : "nonabelian"},
                    {"base_rank", F.shape.base_rank},
                    {"r", F.shape.r}};
    out["t_exponential"] = F.t_exponential;
    out["ring_labels"] = F.ring->labels;

    json entries = json::array();
    for (const auto& [d, zl] : F.coeff) {
        json e;
        e["d_B"] = d.d_B;
        e["k"] = d.k;
        if (auto cc = F.closed_at(d)) e["closed"] = cc->str();
        json zmap = json::object();
        for (const auto& [k, cls] : zl.terms()) {
            if (cls.is_zero()) continue;
            json coords = json::array();
            for (const auto& c : cls.v) coords.push_back(c.str());
            zmap[std::to_string(k)] = std::move(coords);
        }
        e["z"] = std::move(zmap);
        entries.push_back(std::move(e));
    }
    out["entries"] = std::move(entries);
    return out;
}

struct LoadedSeries {
    CoeffSeries F;
    json doc;
    std::string hash;
    LoadedSetup setup;
};

LoadedSeries series_from_json(const json& j, bool force) {
    if (j.value("schema", "") != "fm/1") die("unsupported schema", j.value("schema", "<none>"));
    LoadedSeries out{CoeffSeries(), j, "", {}};
    out.setup = load_setup(j.at("setup"));
    TruncConfig tc = trunc_from_json(j.at("truncation"));
    out.hash = j.value("setup_hash", "");
    std::string expect = setup_hash(j.at("setup"), j.value("constructor", ""), tc);
    if (out.hash != expect) {
        if (!force) die("setup hash mismatch (use --force to override)", out.hash + " vs " + expect);
        out.hash = expect;
    }

    SeriesShape sh;
    const json& shape = j.at("shape");
    sh.side = shape.at("side").get<std::string>() == "abelian" ? Side::abelian : Side::nonabelian;
    sh.base_rank = shape.at("base_rank").get<int>();
    sh.r = shape.at("r").get<std::vector<int>>();

    std::shared_ptr<const RingSpec> ring = out.setup.ring;
    if (!ring) die("series setup carries no ring", "");
    if (ring->labels != j.at("ring_labels").get<std::vector<std::string>>())
        die("ring labels do not match the setup ring", "");

    CoeffSeries F = CoeffSeries::zero(sh, ring, tc);
    F.t_exponential = j.value("t_exponential", false);
    for (const auto& e : j.at("entries")) {
        MultiDeg d = MultiDeg::zero(sh);
        d.d_B = e.at("d_B").get<std::vector<int>>();
        d.k = e.at("k").get<std::vector<std::vector<int>>>();
        ZLaurent<CohClass> zl;
        for (const auto& [ks, coords] : e.at("z").items()) {
            CohClass cls = ring->zero();
            if (int(coords.size()) != ring->size()) die("coefficient width mismatch", ks);
            for (std::size_t i = 0; i < cls.v.size(); ++i)
                cls.v[i] = ParamRat::parse(coords[i].get<std::string>());
            zl.add_term(std::stoi(ks), cls);
        }
        zl.truncate(tc.z_lo, tc.z_hi);
        F.set(d, zl);
        if (e.contains("closed")) F.set_closed(d, ParamRat::parse(e.at("closed").get<std::string>()));
    }
    out.F = std::move(F);
    return out;
}

// -------------------------------------------------------------------- verify

json run_checks(const LoadedSeries& ls, const std::vector<std::string>& checks) {
    json reports = json::array();
    bool all_ok = true;
    auto push = [&](const CheckReport& rep) {
        reports.push_back(json::parse(rep.json()));
        all_ok = all_ok && rep.ok;
    };
    const GKMGraph* G = ls.F.ring->graph ? ls.F.ring->graph.get() : nullptr;
    for (const std::string& c : checks) {
        if (c == "divisor") {
            push(check_divisor_equation(ls.F));
        } else if (c == "weyl") {
            push(check_weyl_invariance(ls.F));
        } else if (c == "c1" || c == "c2" || c == "c3") {
            if (!G) die("check " + c + " needs a fixed-point ring", "");
            if (c == "c1") {
                push(check_pole_locations_C1(ls.F, *G));
            } else if (c == "c2") {
                CheckReport xr;
                xr.check = "recursion_extraction";
                RecursionTable T = extract_recursion_table(ls.F, *G, 2, &xr);
                push(xr);
                push(check_recursion_C2(ls.F, *G, T));
            } else {
                push(check_base_cone_C3(ls.F, *G, std::max(1, ls.setup.base_dim)));
            }
        } else {
            die("unknown check", c);
        }
    }
    json out;
    out["schema"] = "fm/1";
    out["setup_hash"] = ls.hash;
    out["ok"] = all_ok;
    out["reports"] = std::move(reports);
    return out;
}

// ----------------------------------------------------------------------- run

int run(const RunConfig& cfg) {
    if (cfg.trunc.d_max < 0 || cfg.trunc.z_lo >= cfg.trunc.z_hi || cfg.trunc.m_inv < 1)
        die("truncation must be positive", "");

    if (cfg.command == "compute") {
        json sj = load_json(cfg.setup_path);
        LoadedSetup ls = load_setup(sj);
        std::string ctor = cfg.constructor_name.empty() ? sj.value("constructor", "")
                                                        : cfg.constructor_name;
        if (ctor.empty()) die("no constructor given", "use --constructor or setup.constructor");
        CoeffSeries F = run_constructor(ctor, ls, cfg.trunc);
        emit(series_to_json(F, sj, ctor), cfg.out_path);
        return 0;
    }
    if (cfg.command == "verify") {
        LoadedSeries ls = series_from_json(load_json(cfg.input_path), cfg.force);
        json rep = run_checks(ls, cfg.checks);
        emit(rep, cfg.out_path);
        return rep["ok"].get<bool>() ? 0 : 1;
    }
    if (cfg.command == "compare") {
        LoadedSeries a = series_from_json(load_json(cfg.input_path), cfg.force);
        LoadedSeries b = series_from_json(load_json(cfg.input_path_b), cfg.force);
        if (a.hash != b.hash && !cfg.force)
            die("setup hash mismatch between inputs (use --force)", a.hash + " vs " + b.hash);
        auto diff = compare_series(a.F, b.F);
        if (diff) {
            std::cout << diff->str() << "\n";
            return 1;
        }
        return 0;
    }
    die("unknown command", cfg.command);
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"exact truncated series: compute, verify, compare"};
    app.require_subcommand(1);

    if (const char* t = std::getenv("FM_THREADS")) {
        char* end = nullptr;
        long n = std::strtol(t, &end, 10);
        if (!end || *end || n < 1) die("FM_THREADS must be a positive integer", t);
        cfg.threads = int(n);  // reserved: the engine currently runs serially
    }

    int dmax = -1, minv = -1;
    std::string zwin;

    CLI::App* compute = app.add_subcommand("compute", "evaluate a constructor");
    compute->add_option("--constructor", cfg.constructor_name, "series constructor name");
    compute->add_option("--setup", cfg.setup_path, "setup json path")->required();
    compute->add_option("--dmax", dmax, "total Novikov degree bound");
    compute->add_option("--zwin", zwin, "z-exponent window lo:hi");
    compute->add_option("--minv", minv, "inverse-parameter depth");
    compute->add_option("--out", cfg.out_path, "output path (default stdout)");

    CLI::App* verify = app.add_subcommand("verify", "run checks on a series file");
    verify->add_option("--input", cfg.input_path, "series json path")->required();
    std::string checks = "divisor,weyl";
    verify->add_option("--checks", checks, "comma list: divisor,weyl,c1,c2,c3");
    verify->add_option("--out", cfg.out_path, "report path (default stdout)");
    verify->add_flag("--force", cfg.force, "ignore setup hash mismatches");

    CLI::App* compare = app.add_subcommand("compare", "first difference of two series files");
    compare->add_option("a", cfg.input_path, "left series json")->required();
    compare->add_option("b", cfg.input_path_b, "right series json")->required();
    compare->add_flag("--force", cfg.force, "ignore setup hash mismatches");

    CLI11_PARSE(app, argc, argv);

    if (dmax >= 0) cfg.trunc.d_max = dmax;
    if (minv >= 0) cfg.trunc.m_inv = minv;
    if (!zwin.empty()) {
        auto sep = zwin.find(':');
        if (sep == std::string::npos) die("--zwin expects lo:hi", zwin);
        try {
            cfg.trunc.z_lo = std::stoi(zwin.substr(0, sep));
            cfg.trunc.z_hi = std::stoi(zwin.substr(sep + 1));
        } catch (const std::exception&) {
            die("--zwin expects integers lo:hi", zwin);
        }
    }

    for (auto* sub : {compute, verify, compare})
        if (sub->parsed()) cfg.command = sub->get_name();

    std::stringstream cl(checks);
    std::string item;
    while (std::getline(cl, item, ','))
        if (!item.empty()) cfg.checks.push_back(item);

    try {
        return run(cfg);
    } catch (const std::exception& e) {
        die("unhandled failure", e.what());
    }
}
