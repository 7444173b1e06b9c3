#include "fm/verify.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace fm {

namespace {

Poly zpoly() { return Poly::var(vars::z()); }
Poly hbpoly() { return Poly::var(vars::hbase()); }

std::string json_escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out + "\"";
}

}  // namespace

// --------------------------------------------------------------- CheckReport

void CheckReport::fail(std::string location, std::string expected, std::string got) {
    ok = false;
    issues.push_back({std::move(location), std::move(expected), std::move(got)});
}

std::string CheckReport::json() const {
    std::string out = "{\"check\":" + json_escape(check);
    out += ",\"ok\":";
    out += ok ? "true" : "false";
    if (!header.empty()) out += ",\"header\":" + json_escape(header);
    out += ",\"issues\":[";
    for (std::size_t i = 0; i < issues.size(); ++i) {
        if (i) out += ",";
        out += "{\"location\":" + json_escape(issues[i].location);
        out += ",\"expected\":" + json_escape(issues[i].expected);
        out += ",\"got\":" + json_escape(issues[i].got) + "}";
    }
    out += "],\"notes\":[";
    for (std::size_t i = 0; i < notes.size(); ++i) {
        if (i) out += ",";
        out += json_escape(notes[i]);
    }
    return out + "]}";
}

// -------------------------------------------------------------- quantum Pieri

std::vector<std::tuple<Partition, int, Rational>> quantum_pieri_sigma1(int r, int n,
                                                                       const Partition& lam) {
    if (r < 1 || n <= r) throw std::invalid_argument("quantum_pieri_sigma1: need 1 <= r < n");
    if (!lam.fits(r, n - r))
        throw std::invalid_argument("quantum_pieri_sigma1: partition outside the r x (n-r) box");

    std::vector<std::tuple<Partition, int, Rational>> out;
    for (int i = 0; i < r; ++i) {
        // a box can go on row i when the result is still a partition in the box
        if (lam.part(i) + 1 > n - r) continue;
        if (i > 0 && lam.part(i - 1) == lam.part(i)) continue;
        std::vector<int> p;
        for (int j = 0; j < r; ++j)
            if (int v = lam.part(j) + (j == i ? 1 : 0); v > 0) p.push_back(v);
        out.emplace_back(Partition::of(std::move(p)), 0, Rational(1));
    }

    // the q-term strips the full first row and one box from every other row
    if (lam.part(0) == n - r) {
        bool chopped_ok = true;
        for (int j = 1; j < r; ++j)
            if (lam.part(j) < 1) chopped_ok = false;
        if (chopped_ok) {
            std::vector<int> p;
            for (int j = 1; j < r; ++j)
                if (lam.part(j) - 1 > 0) p.push_back(lam.part(j) - 1);
            out.emplace_back(Partition::of(std::move(p)), 1, Rational(1));
        }
    }
    return out;
}

QuantumRing quantum_ring_grassmann(int r, int n) {
    QuantumRing qr;
    qr.ring = build_grassmann(r, n);
    const auto& parts = qr.ring->partitions;
    auto index_of = [&](const Partition& lam) {
        auto it = std::lower_bound(parts.begin(), parts.end(), lam);
        if (it == parts.end() || !(*it == lam))
            throw std::runtime_error("quantum_ring_grassmann: partition not in basis");
        return int(it - parts.begin());
    };
    qr.divisor_index = index_of(Partition::of({1}));
    for (const auto& lam : parts) {
        std::vector<std::tuple<int, int, Rational>> row;
        for (const auto& [mu, qpow, c] : quantum_pieri_sigma1(r, n, lam))
            row.emplace_back(index_of(mu), qpow, c);
        qr.divisor_product.push_back(std::move(row));
    }
    return qr;
}

QuantumRing quantum_ring_projective(int n) {
    if (n < 1) throw std::invalid_argument("quantum_ring_projective: need n >= 1");
    QuantumRing qr;
    qr.ring = build_projective(n);
    qr.divisor_index = 1;
    for (int j = 0; j <= n; ++j) {
        if (j < n)
            qr.divisor_product.push_back({{j + 1, 0, Rational(1)}});
        else
            qr.divisor_product.push_back({{0, 1, Rational(1)}});
    }
    return qr;
}

// ---------------------------------------------------------------- QDE columns

QdeSolution qde_columns(const QuantumRing& qr, int d_max, int z_depth) {
    if (!qr.ring || qr.ring->kind != RingSpec::Kind::table)
        throw std::invalid_argument("qde_columns: oracle needs a table ring");
    if (d_max < 0 || z_depth < 1) throw std::invalid_argument("qde_columns: bad truncation");
    if (int(qr.divisor_product.size()) != qr.ring->size())
        throw std::invalid_argument("qde_columns: divisor table size mismatch");

    const RingSpec& R = *qr.ring;
    const int B = R.size();
    const CohClass sig1 = R.basis_class(qr.divisor_index);

    QdeSolution sol;
    sol.qr = qr;
    sol.d_max = d_max;
    sol.z_depth = z_depth;
    sol.columns.assign(std::size_t(B), std::vector<ZLaurent<CohClass>>(std::size_t(d_max) + 1));
    for (int a = 0; a < B; ++a)
        sol.columns[std::size_t(a)][0] = ZLaurent<CohClass>::term(0, R.basis_class(a));

    auto coeff_at = [](const ZLaurent<CohClass>& s, int k) {
        auto it = s.terms().find(k);
        return it == s.terms().end() ? CohClass() : it->second;
    };

    // d * S_{a,d,j} = [ sum_b c_a^b(q) S_b - sigma_1 cup S_a ]_{d, j-1}; the
    // classical part of c and the cup term do not cancel, because one acts on
    // coordinates and the other on the column classes.
    for (int d = 1; d <= d_max; ++d) {
        for (int j = 1; j <= z_depth; ++j) {
            for (int a = 0; a < B; ++a) {
                CohClass cls = R.zero();
                for (const auto& [t, qpow, c] : qr.divisor_product[std::size_t(a)]) {
                    if (qpow != 0 && qpow != 1)
                        throw std::runtime_error("qde_columns: q-power beyond the column grading");
                    const auto& src = sol.columns[std::size_t(t)][std::size_t(d - qpow)];
                    CohClass v = coeff_at(src, -(j - 1));
                    if (!v.is_zero()) cls += v * c;
                }
                CohClass cupped = sig1 * coeff_at(sol.columns[std::size_t(a)][std::size_t(d)], -(j - 1));
                cls += -cupped;
                if (!cls.is_zero())
                    sol.columns[std::size_t(a)][std::size_t(d)].add_term(-j, cls * Rational(1, d));
            }
        }
        for (int a = 0; a < B; ++a) sol.columns[std::size_t(a)][std::size_t(d)].set_lo(-z_depth);
    }
    return sol;
}

CoeffSeries qde_small_j(const QuantumRing& qr, int d_max, int z_depth, bool base_keys) {
    QdeSolution sol = qde_columns(qr, d_max, z_depth);
    SeriesShape sh;
    sh.side = Side::nonabelian;
    if (base_keys) {
        sh.base_rank = 1;
    } else {
        sh.r = {qr.ring->flavor == RingSpec::Flavor::grassmann ? qr.ring->gr_r : 1};
    }
    TruncConfig tc;
    tc.d_max = d_max;
    tc.z_lo = -z_depth;
    tc.z_hi = 0;
    CoeffSeries J = CoeffSeries::zero(sh, qr.ring, tc);
    J.t_exponential = true;
    for (int d = 0; d <= d_max; ++d) {
        MultiDeg key = MultiDeg::zero(sh);
        if (base_keys)
            key.d_B[0] = d;
        else
            key.k[0][0] = d;
        J.set(key, sol.columns[std::size_t(qr.ring->unit_index)][std::size_t(d)]);
    }
    return J;
}

// ----------------------------------------------------------- Hirzebruch toric

CoeffSeries toric_i_hirzebruch(int a, const TruncConfig& tc,
                               std::shared_ptr<const RingSpec> ring) {
    if (a != 1)
        throw std::invalid_argument("toric_i_hirzebruch: only the a = 1 convention is provided");
    SeriesShape sh{Side::nonabelian, 1, {1}};
    CoeffSeries F = CoeffSeries::zero(sh, std::move(ring), tc);
    F.t_exponential = true;

    const Poly h = hbpoly(), H = Poly::var(vars::root(1, 1)), z = zpoly();
    for (int d = 0; d <= tc.d_max; ++d) {
        for (int k = 0; d + k <= tc.d_max; ++k) {
            FactoredRat f;
            for (int c = 1; c <= d; ++c) f.mul_den(h + z * Rational(c), 2);
            for (int c = 1; c <= k; ++c) f.mul_den(H + z * Rational(c));
            int p = k - a * d;  // pairing of the twisted fiber divisor H - a h
            if (p >= 0)
                for (int c = 1; c <= p; ++c) f.mul_den(H - h * Rational(a) + z * Rational(c));
            else
                for (int c = p + 1; c <= 0; ++c) f.mul_num(H - h * Rational(a) + z * Rational(c));
            MultiDeg key = MultiDeg::zero(sh);
            key.d_B[0] = d;
            key.k[0][0] = k;
            F.set_closed_factored(key, f);
        }
    }
    F.expand_from_closed();
    return F;
}

// ------------------------------------------------------------ divisor equation

CheckReport check_divisor_equation(const CoeffSeries& F) {
    CheckReport rep;
    rep.check = "divisor_equation";
    rep.header =
        "z d/dt F = z q d/dq F + H.F in every divisor direction; the left side is "
        "recomputed from the closed form, the right side from the stored expansion";
    if (!F.t_exponential) {
        rep.fail("series", "exponential t-convention", "flag not set");
        return rep;
    }
    const RingSpec& R = *F.ring;

    struct Direction {
        std::string name;
        Poly pol;       // the divisor class as a generator polynomial
        CohClass cls;   // the same class in the ring
        int level = 0;  // 0 = base direction
        int slot = 0;
    };
    std::vector<Direction> dirs;
    for (int m = 1; m <= F.shape.levels(); ++m) {
        if (F.shape.side == Side::abelian) {
            for (int i = 1; i <= F.shape.r[std::size_t(m - 1)]; ++i)
                dirs.push_back({"t(" + std::to_string(m) + "," + std::to_string(i) + ")",
                                Poly::var(vars::root(m, i)), root_class(R, m, i), m, i});
        } else {
            Poly pol;
            for (int i = 1; i <= F.shape.r[std::size_t(m - 1)]; ++i)
                pol += Poly::var(vars::root(m, i));
            dirs.push_back({"t(" + std::to_string(m) + ")", pol, level_class(R, F.shape, m), m, 1});
        }
    }
    if (F.shape.base_rank == 1) {
        dirs.push_back({"t(base)", hbpoly(), R.from_poly(hbpoly()), 0, 0});
    } else if (F.shape.base_rank > 1) {
        rep.note("base directions beyond rank one are not checked");
    }

    for (const auto& [d, expansion] : F.coeff) {
        for (const auto& dir : dirs) {
            long ks = dir.level == 0 ? d.d_B.at(0)
                                     : d.k.at(std::size_t(dir.level - 1))
                                           .at(F.shape.side == Side::abelian
                                                   ? std::size_t(dir.slot - 1)
                                                   : 0);
            ZLaurent<CohClass> rhs = expansion.scale(dir.cls);
            if (ks != 0)
                rhs += expansion.map([&](const CohClass& c) { return c * Rational(ks); }).shift(1);

            ZLaurent<CohClass> lhs;
            auto cc = F.closed_at(d);
            if (cc) {
                Poly mult = dir.pol + Poly::term(Rational(ks), Monomial::var(vars::z()));
                // no reduction needed: the expansion of an uncancelled fraction
                // is the same function, and mult may well divide the denominator
                ParamRat prod = ParamRat::of_reduced(cc->num() * mult, cc->den());
                lhs = expand_closed(R, prod, F.trunc);
            } else {
                rep.note("no closed form at " + d.str() + "; direction " + dir.name +
                         " checked along the expansion only");
                lhs = rhs;
            }
            clamp_window(lhs, F.trunc.z_lo, F.trunc.z_hi);
            clamp_window(rhs, F.trunc.z_lo, F.trunc.z_hi);
            if (auto e = ZLaurent<CohClass>::first_difference(lhs, rhs)) {
                rep.fail(dir.name + " at " + d.str() + ", z^" + std::to_string(*e),
                         lhs.coeff(*e).str(), rhs.coeff(*e).str());
            }
        }
    }
    return rep;
}

// ------------------------------------------------------------- Weyl invariance

CheckReport check_weyl_invariance(const CoeffSeries& F) {
    CheckReport rep;
    rep.check = "weyl_invariance";
    rep.header =
        "closed coefficients of an abelian series under every adjacent root "
        "transposition per level, permuting the Novikov indices simultaneously; "
        "lambda labels of input families are covered by their own invariance test";
    if (F.shape.side != Side::abelian) {
        rep.fail("series", "abelian Novikov grading", "nonabelian");
        return rep;
    }

    WeylElem id;
    for (int m = 1; m <= F.shape.levels(); ++m) {
        std::vector<int> line(std::size_t(F.shape.r[std::size_t(m - 1)]));
        for (std::size_t i = 0; i < line.size(); ++i) line[i] = int(i);
        id.push_back(std::move(line));
    }

    std::vector<std::pair<std::string, WeylElem>> gens;
    for (int m = 1; m <= F.shape.levels(); ++m)
        for (int i = 1; i < F.shape.r[std::size_t(m - 1)]; ++i) {
            WeylElem w = id;
            std::swap(w[std::size_t(m - 1)][std::size_t(i - 1)], w[std::size_t(m - 1)][std::size_t(i)]);
            gens.emplace_back("swap(" + std::to_string(m) + ";" + std::to_string(i) + "," +
                                  std::to_string(i + 1) + ")",
                              std::move(w));
        }
    if (gens.empty()) rep.note("trivial Weyl group: nothing to permute");

    for (const auto& [d, ignored] : F.coeff)
        if (!F.has_closed(d)) {
            rep.fail(d.str(), "closed form present", "expansion only");
            return rep;
        }
    for (const auto& [d, cc] : F.closed) {
        for (const auto& [name, w] : gens) {
            ParamRat expected = weyl_act(w, cc);
            auto got = F.closed_at(weyl_act_deg(w, d));
            if (!got || *got != expected)
                rep.fail(name + " at " + d.str(), expected.str(),
                         got ? got->str() : "<beyond truncation>");
        }
    }
    return rep;
}

// -------------------------------------------------------- pole locations (C1)

namespace {

// strip every power of the candidate factor from den, counting them
int peel_factor(Poly& den, const Poly& fac) {
    int count = 0;
    while (true) {
        auto q = divide_exact(den, fac);
        if (!q) return count;
        den = *q;
        ++count;
    }
}

}  // namespace

CheckReport check_pole_locations_C1(const CoeffSeries& F, const GKMGraph& G) {
    CheckReport rep;
    rep.check = "pole_locations_C1";
    rep.header =
        "every z-root of a restricted denominator must sit at z = 0 (pure powers of "
        "z, or shifts by nilpotent base classes) or at a conormal point rho/a of an "
        "adjacent fixed point; leftover factors are reported in the canonical "
        "variable order";
    if (!F.ring || F.ring->kind != RingSpec::Kind::gkm) {
        rep.fail("series", "fixed-point (gkm) coefficient ring", "table or formal ring");
        return rep;
    }
    if (F.ring->size() != G.points()) {
        rep.fail("graph", std::to_string(F.ring->size()) + " fixed points",
                 std::to_string(G.points()));
        return rep;
    }

    for (int p = 0; p < G.points(); ++p) {
        auto rest = fixed_point_restrict_series(F, p);
        for (const auto& [d, f] : rest) {
            Poly den = f.den();
            if (!den.depends_on(vars::z())) continue;
            int amax = std::max(1, d.total());
            for (const auto& e : G.edges[std::size_t(p)])
                for (int a = 1; a <= amax; ++a)
                    peel_factor(den, zpoly() * Rational(a) - e.rho);

            int dz = den.deg(vars::z());
            if (dz == 0) continue;
            bool bad = !den.coeff_of(vars::z(), dz).is_constant();
            for (int j = 0; j < dz && !bad; ++j) {
                for (const auto& [mono, c] : den.coeff_of(vars::z(), j).terms()) {
                    (void)c;
                    if (mono.is_one()) bad = true;  // a z-root away from 0 and every rho/a
                    for (const auto& [v, exp] : mono.e) {
                        (void)exp;
                        if (v != vars::hbase()) bad = true;  // nu or another parameter mixed in
                    }
                    if (bad) break;
                }
            }
            if (bad)
                rep.fail("point " + G.labels[std::size_t(p)] + " at " + d.str(),
                         "z-roots at 0 or rho/a over adjacent points", den.str());
        }
    }
    return rep;
}

// ------------------------------------------------------------- recursion (C2)

namespace {

// multiplicity of the factor (a z - rho) in f's denominator, and the residue
// at z = rho/a when the pole is simple
struct PoleData {
    int mult = 0;
    ParamRat residue;
};

PoleData pole_at(const ParamRat& f, const Poly& rho, int a) {
    PoleData out;
    Poly fac = zpoly() * Rational(a) - rho;
    Poly den = f.den();
    out.mult = peel_factor(den, fac);
    if (out.mult != 1) return out;
    Poly z0 = rho * Rational(1, a);
    out.residue = ParamRat::of(f.num().subst(vars::z(), z0),
                               den.subst(vars::z(), z0) * Rational(a));
    return out;
}

std::optional<ParamRat> eval_z(const ParamRat& f, const Poly& z0) {
    Poly dv = f.den().subst(vars::z(), z0);
    if (dv.is_zero()) return std::nullopt;
    return ParamRat::of(f.num().subst(vars::z(), z0), dv);
}

// Novikov shift by a times the edge curve class; nullopt when the shifted
// degree leaves the effective cone (the coefficient there is an exact zero)
std::optional<MultiDeg> edge_shift(const MultiDeg& d, const std::vector<int>& edge_d, int a) {
    MultiDeg out = d;
    std::size_t idx = 0;
    for (auto& blk : out.k)
        for (int& kk : blk) {
            if (idx >= edge_d.size())
                throw std::invalid_argument("edge curve class does not match the series shape");
            kk -= a * edge_d[idx++];
            if (kk < 0) return std::nullopt;
        }
    if (idx != edge_d.size())
        throw std::invalid_argument("edge curve class does not match the series shape");
    return out;
}

std::vector<std::map<MultiDeg, ParamRat>> all_restrictions(const CoeffSeries& F,
                                                           const GKMGraph& G) {
    if (!F.ring || F.ring->kind != RingSpec::Kind::gkm || F.ring->size() != G.points())
        throw std::invalid_argument("recursion checks need the series' own gkm graph");
    std::vector<std::map<MultiDeg, ParamRat>> rest;
    rest.reserve(std::size_t(G.points()));
    for (int p = 0; p < G.points(); ++p) rest.push_back(fixed_point_restrict_series(F, p));
    return rest;
}

std::string edge_name(const GKMGraph& G, int alpha, int beta, int a) {
    return G.labels[std::size_t(alpha)] + " -> " + G.labels[std::size_t(beta)] +
           ", a=" + std::to_string(a);
}

}  // namespace

RecursionTable extract_recursion_table(const CoeffSeries& F, const GKMGraph& G, int a_max,
                                       CheckReport* report) {
    if (a_max < 1) throw std::invalid_argument("extract_recursion_table: need a_max >= 1");
    auto rest = all_restrictions(F, G);

    RecursionTable T;
    T.a_max = a_max;
    for (int alpha = 0; alpha < G.points(); ++alpha) {
        for (const auto& e : G.edges[std::size_t(alpha)]) {
            for (int a = 1; a <= a_max; ++a) {
                Poly z0 = e.rho * Rational(1, a);
                std::optional<ParamRat> entry;
                for (const auto& [d, f] : rest[std::size_t(alpha)]) {
                    PoleData pd = pole_at(f, e.rho, a);
                    if (pd.mult > 1) {
                        if (report)
                            report->fail(edge_name(G, alpha, e.to, a) + " at " + d.str(),
                                         "simple pole", "order " + std::to_string(pd.mult));
                        continue;
                    }
                    ParamRat val;
                    if (auto dd = edge_shift(d, e.d, a)) {
                        auto it = rest[std::size_t(e.to)].find(*dd);
                        if (it != rest[std::size_t(e.to)].end()) {
                            auto ev = eval_z(it->second, z0);
                            if (!ev) {
                                if (report)
                                    report->fail(edge_name(G, alpha, e.to, a) + " at " + d.str(),
                                                 "adjacent value regular at rho/a", "pole");
                                continue;
                            }
                            val = *ev;
                        }
                    }
                    ParamRat candidate;
                    if (pd.mult == 0) {
                        if (val.is_zero()) continue;  // 0 = entry * 0 determines nothing
                        candidate = ParamRat();       // zero residue against a nonzero value
                    } else {
                        if (val.is_zero()) {
                            if (report)
                                report->fail(edge_name(G, alpha, e.to, a) + " at " + d.str(),
                                             "zero residue over a vanishing adjacent value",
                                             pd.residue.str());
                            continue;
                        }
                        candidate = pd.residue / val;
                    }
                    if (!entry) {
                        entry = candidate;
                    } else if (*entry != candidate) {
                        if (report)
                            report->fail(edge_name(G, alpha, e.to, a) + " at " + d.str(),
                                         entry->str(), candidate.str());
                    }
                }
                if (entry)
                    T.entries[{alpha, e.to, a}] = *entry;
                else
                    T.undefined.push_back(edge_name(G, alpha, e.to, a));
            }
        }
    }
    return T;
}

CheckReport check_recursion_C2(const CoeffSeries& F, const GKMGraph& G,
                               const RecursionTable& T) {
    CheckReport rep;
    rep.check = "recursion_C2";
    rep.header =
        "the residue of iota_alpha^* F at z = rho/a equals the table entry times "
        "iota_beta^* F there, Novikov-shifted by a times the edge class, at every "
        "stored degree";
    auto rest = all_restrictions(F, G);

    for (int alpha = 0; alpha < G.points(); ++alpha) {
        for (const auto& e : G.edges[std::size_t(alpha)]) {
            for (int a = 1; a <= T.a_max; ++a) {
                Poly z0 = e.rho * Rational(1, a);
                auto ent = T.entries.find({alpha, e.to, a});
                for (const auto& [d, f] : rest[std::size_t(alpha)]) {
                    PoleData pd = pole_at(f, e.rho, a);
                    if (pd.mult > 1) {
                        rep.fail(edge_name(G, alpha, e.to, a) + " at " + d.str(), "simple pole",
                                 "order " + std::to_string(pd.mult));
                        continue;
                    }
                    ParamRat residue = pd.mult == 1 ? pd.residue : ParamRat();
                    ParamRat val;
                    if (auto dd = edge_shift(d, e.d, a)) {
                        auto it = rest[std::size_t(e.to)].find(*dd);
                        if (it != rest[std::size_t(e.to)].end()) {
                            auto ev = eval_z(it->second, z0);
                            if (!ev) {
                                rep.fail(edge_name(G, alpha, e.to, a) + " at " + d.str(),
                                         "adjacent value regular at rho/a", "pole");
                                continue;
                            }
                            val = *ev;
                        }
                    }
                    if (ent == T.entries.end()) {
                        if (!residue.is_zero())
                            rep.fail(edge_name(G, alpha, e.to, a) + " at " + d.str(),
                                     "no table entry, so no principal part", residue.str());
                        continue;
                    }
                    ParamRat expected = ent->second * val;
                    if (residue != expected)
                        rep.fail(edge_name(G, alpha, e.to, a) + " at " + d.str(), expected.str(),
                                 residue.str());
                }
            }
        }
    }
    return rep;
}

// ------------------------------------------------------------ series compare

std::string SeriesDiff::str() const {
    return "at " + key.str() + ", z^" + std::to_string(z_exp) + ", " + basis_label + ": " + lhs +
           " != " + rhs;
}

std::optional<SeriesDiff> compare_series(const CoeffSeries& A, const CoeffSeries& B) {
    if (!(A.shape == B.shape)) throw std::invalid_argument("compare_series: shapes differ");
    if (!A.ring || !B.ring || A.ring->size() != B.ring->size() || A.ring->kind != B.ring->kind ||
        A.ring->labels != B.ring->labels)
        throw std::invalid_argument("compare_series: coefficient rings differ");
    // the two sides may carry independently built copies of the same ring
    auto rebase = [&](const CohClass& c) {
        if (!c.ring || c.ring == A.ring.get()) return c;
        CohClass out = A.ring->zero();
        out.v = c.v;
        return out;
    };

    std::set<MultiDeg> keys;
    for (const auto& [d, v] : A.coeff) {
        (void)v;
        keys.insert(d);
    }
    for (const auto& [d, v] : B.coeff) {
        (void)v;
        keys.insert(d);
    }

    auto entry = [](const CohClass& c, int i) {
        return c.ring && i < int(c.v.size()) ? c.v[std::size_t(i)] : ParamRat();
    };
    for (const MultiDeg& d : keys) {
        ZLaurent<CohClass> za = A.at(d), zb = B.at(d).map(rebase);
        if (auto e = ZLaurent<CohClass>::first_difference(za, zb)) {
            CohClass ca = za.coeff(*e), cb = zb.coeff(*e);
            for (int i = 0; i < A.ring->size(); ++i) {
                if (entry(ca, i) != entry(cb, i)) {
                    std::string label = i < int(A.ring->labels.size())
                                            ? A.ring->labels[std::size_t(i)]
                                            : "#" + std::to_string(i);
                    return SeriesDiff{d, *e, label, entry(ca, i).str(), entry(cb, i).str()};
                }
            }
        }
    }
    return std::nullopt;
}

// --------------------------------------------------- base-direction cone (C3)

namespace {

// coordinates of a restricted ratio in powers of the base hyperplane class,
// inverting any leftover base factors through the nilpotency h^{dim+1} = 0
std::optional<std::vector<ParamRat>> base_coordinates(const ParamRat& f, int dim,
                                                      std::string* why) {
    Poly num = f.num(), den = f.den();
    if (den.depends_on(vars::hbase())) {
        Poly d0 = den.subst(vars::hbase(), Poly());
        if (d0.is_zero()) {
            if (why) *why = "denominator vanishes at h = 0";
            return std::nullopt;
        }
        Poly rest = den - d0;
        Poly acc;  // num * sum_t (-rest)^t d0^{dim-t}
        Poly pw(Rational(1));
        for (int t = 0; t <= dim; ++t) {
            acc += pw * d0.pow(dim - t);
            pw = pw * (-rest);
        }
        num = num * acc;
        den = d0.pow(dim + 1);
    }
    std::vector<ParamRat> out(std::size_t(dim) + 1);
    for (const auto& [pw, c] : num.collect(vars::hbase())) {
        if (pw > dim) continue;  // ring-zero above the base dimension
        out[std::size_t(pw)] = ParamRat::of(c, den);
    }
    return out;
}

struct LinearRow {
    std::vector<ParamRat> a;
    ParamRat rhs;
    std::string name;
};

// Gauss-Jordan over the rational-function field; returns the solution of the
// pivoted unknowns (free ones stay zero) or the name of an inconsistent row.
std::optional<std::string> solve_rows(std::vector<LinearRow>& rows, std::vector<ParamRat>& sol) {
    const std::size_t n = sol.size();
    std::size_t next = 0;
    std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (row, col)
    for (std::size_t col = 0; col < n && next < rows.size(); ++col) {
        std::size_t r = next;
        while (r < rows.size() && rows[r].a[col].is_zero()) ++r;
        if (r == rows.size()) continue;
        std::swap(rows[next], rows[r]);
        ParamRat inv = rows[next].a[col].inv();
        for (auto& v : rows[next].a) v *= inv;
        rows[next].rhs *= inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == next || rows[i].a[col].is_zero()) continue;
            ParamRat c = rows[i].a[col];
            for (std::size_t j = 0; j < n; ++j) rows[i].a[j] -= c * rows[next].a[j];
            rows[i].rhs -= c * rows[next].rhs;
        }
        pivots.emplace_back(next, col);
        ++next;
    }
    for (std::size_t i = next; i < rows.size(); ++i)
        if (!rows[i].rhs.is_zero()) return rows[i].name;
    for (const auto& [r, c] : pivots) sol[c] = rows[r].rhs;
    return std::nullopt;
}

}  // namespace

CheckReport check_base_cone_C3(const CoeffSeries& F, const GKMGraph& G, int base_dim,
                               int gen_degree) {
    CheckReport rep;
    rep.check = "base_cone_C3";
    rep.header =
        "scoped completion: at each fixed point and fiber degree, the coefficients "
        "divided by the base J-function 1/prod_{c<=d}(h+cz)^{dim+1} must be one "
        "combination sum c_ij (dz)^i (h+dz)^j with i+j <= " +
        std::to_string(gen_degree) +
        " that is the same at every base degree d; the c_ij may be rational in z "
        "(they absorb the fiber tail), degree-dependent coefficients and bases "
        "beyond P^2 are out of scope";
    if (F.shape.base_rank == 0) {
        rep.note("point base: nothing to check");
        return rep;
    }
    if (F.shape.base_rank != 1 || base_dim < 1 || base_dim > 2) {
        rep.fail("series", "one base direction with dim 1 or 2", "unsupported base");
        return rep;
    }
    if (gen_degree < 0) throw std::invalid_argument("check_base_cone_C3: bad generator degree");
    auto rest = all_restrictions(F, G);

    // unknown order: (i, j) with i + j <= gen_degree
    std::vector<std::pair<int, int>> unknowns;
    for (int i = 0; i <= gen_degree; ++i)
        for (int j = 0; i + j <= gen_degree; ++j) unknowns.emplace_back(i, j);

    auto jden = [&](int d) {
        Poly den(Rational(1));
        for (int c = 1; c <= d; ++c) den = den * (hbpoly() + zpoly() * Rational(c)).pow(base_dim + 1);
        return den;
    };

    for (int p = 0; p < G.points(); ++p) {
        // group the keys by their fiber part; each group is one solve
        std::map<std::vector<std::vector<int>>, std::map<int, ParamRat>> groups;
        int fiber_total = 0;
        for (const auto& [d, f] : rest[std::size_t(p)]) {
            // divide out the base J-coefficient by trial division against its factors
            Poly num = f.num(), den = f.den();
            for (int c = 1; c <= d.d_B[0]; ++c) {
                Poly fac = hbpoly() + zpoly() * Rational(c);
                for (int t = 0; t <= base_dim; ++t) {
                    if (auto q = divide_exact(den, fac))
                        den = *q;
                    else
                        num = num * fac;
                }
            }
            groups[d.k][d.d_B[0]] = ParamRat::of_reduced(num, den);
        }
        for (auto& [kpart, by_deg] : groups) {
            fiber_total = 0;
            for (const auto& blk : kpart)
                for (int kk : blk) fiber_total += kk;
            const int e_max = F.trunc.d_max - fiber_total;

            std::vector<LinearRow> rows;
            for (int e = 0; e <= e_max; ++e) {
                auto it = by_deg.find(e);
                std::vector<ParamRat> coords(std::size_t(base_dim) + 1);
                if (it != by_deg.end()) {
                    std::string why;
                    auto got = base_coordinates(it->second, base_dim, &why);
                    if (!got) {
                        rep.fail("point " + G.labels[std::size_t(p)] + ", base degree " +
                                     std::to_string(e),
                                 "base-invertible ratio", why);
                        continue;
                    }
                    coords = *got;
                }
                for (int pw = 0; pw <= base_dim; ++pw) {
                    LinearRow row;
                    row.rhs = coords[std::size_t(pw)];
                    row.name = "point " + G.labels[std::size_t(p)] + ", base degree " +
                               std::to_string(e) + ", h^" + std::to_string(pw);
                    for (const auto& [i, j] : unknowns) {
                        ParamRat c;
                        int t = i + j - pw;
                        if (pw <= j && t >= 0 && (e > 0 || t == 0)) {
                            Rational bin = binomial(Rational(j), long(pw));
                            Rational scale = bin * Rational(e).pow(t);
                            if (!scale.is_zero())
                                c = ParamRat(Poly::term(scale, Monomial::var(vars::z(), t)));
                        }
                        row.a.push_back(c);
                    }
                    rows.push_back(std::move(row));
                }
            }
            std::vector<ParamRat> sol(unknowns.size());
            if (auto badrow = solve_rows(rows, sol))
                rep.fail(*badrow, "a consistent combination across base degrees",
                         "inconsistent linear system");
        }
    }
    return rep;
}

}  // namespace fm
