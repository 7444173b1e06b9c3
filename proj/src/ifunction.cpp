#include "fm/ifunction.hpp"

#include <stdexcept>
#include <utility>

namespace fm {

namespace {

Poly zvar() { return Poly::var(vars::z()); }

Poly shifted(const Poly& x, int c) {
    if (c == 0) return x;
    return x + zvar() * Rational(c);
}

Poly root_poly(int m, int i) { return Poly::var(vars::root(m, i)); }

// prod_{c=-inf}^{0}(X+cz) / prod_{c=-inf}^{delta}(X+cz), cancelled to a
// finite ratio
void brown_tail(FactoredRat& f, const Poly& x, int delta) {
    if (delta > 0)
        for (int c = 1; c <= delta; ++c) f.mul_den(shifted(x, c));
    else
        for (int c = delta + 1; c <= 0; ++c) f.mul_num(shifted(x, c));
}

// the reciprocal orientation: prod_{c=-inf}^{delta} / prod_{c=-inf}^{0}
void hyp_tail(FactoredRat& f, const Poly& x, int delta) {
    if (delta > 0)
        for (int c = 1; c <= delta; ++c) f.mul_num(shifted(x, c));
    else
        for (int c = delta + 1; c <= 0; ++c) f.mul_den(shifted(x, c));
}

// prod over the Chern roots delta of (x + delta), expanded by the classes
Poly chern_poly(const std::vector<Poly>& c, const Poly& x) {
    int rho = int(c.size()) - 1;
    Poly out;
    for (int j = 0; j <= rho; ++j) out += c[std::size_t(j)] * x.pow(rho - j);
    return out;
}

bool higher_cherns_vanish(const std::vector<Poly>& c) {
    for (std::size_t j = 1; j < c.size(); ++j)
        if (!c[j].is_zero()) return false;
    return true;
}

// ordered compositions of `total` into `slots` nonnegative parts
void compositions_rec(int total, int slots, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
    if (slots == 1) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int first = 0; first <= total; ++first) {
        cur.push_back(first);
        compositions_rec(total - first, slots - 1, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> compositions(int total, int slots) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    compositions_rec(total, slots, cur, out);
    return out;
}

// cartesian product of per-level compositions of the level sums
std::vector<std::vector<std::vector<int>>> level_compositions(const std::vector<int>& r,
                                                              const std::vector<int>& ktot) {
    std::vector<std::vector<std::vector<int>>> acc(1);
    for (std::size_t m = 0; m < r.size(); ++m) {
        auto parts = compositions(ktot[m], r[m]);
        std::vector<std::vector<std::vector<int>>> next;
        next.reserve(acc.size() * parts.size());
        for (const auto& pre : acc)
            for (const auto& p : parts) {
                next.push_back(pre);
                next.back().push_back(p);
            }
        acc = std::move(next);
    }
    return acc;
}

// evaluate a base-valued lambda family at a polynomial assignment of the
// lambda parameters, in closed form
ParamRat family_closed_eval(const LambdaFamily& fam, const std::vector<int>& d_B, int need_dmax,
                            const std::map<VarId, Poly>& assign) {
    ParamRat out;
    for (const auto& [mono, C] : fam.terms) {
        if (C.shape.levels() != 0)
            throw std::invalid_argument("ifunction: input family must be base-valued");
        if (int(d_B.size()) != C.shape.base_rank)
            throw std::invalid_argument("ifunction: family base rank does not match the setup");
        if (C.trunc.d_max < need_dmax)
            throw std::invalid_argument("ifunction: family truncated below the requested degree");
        MultiDeg d = MultiDeg::zero(C.shape);
        d.d_B = d_B;
        auto cl = C.closed_at(d);
        if (!cl)
            throw std::runtime_error("ifunction: family coefficient has no closed form at " +
                                     d.str());
        if (cl->is_zero()) continue;
        Poly factor(Rational(1));
        for (const auto& [v, e] : mono) {
            auto it = assign.find(v);
            if (it == assign.end())
                throw std::invalid_argument("ifunction: family parameter " + vars::name(v) +
                                            " has no assigned class");
            factor = factor * it->second.pow(e);
        }
        out += *cl * ParamRat(factor);
    }
    return out;
}

// shared accumulator: sum of factored terms with a flag recording whether
// any denominator factor was a non-linear (opaque) polynomial, in which case
// the final form gets a full gcd normalization
struct TermSum {
    FactoredRat acc{Rational(0)};
    bool opaque_den = false;

    void add(FactoredRat term, const ParamRat& famval) {
        if (famval.is_zero()) return;
        term.mul_num(famval.num());
        if (!famval.den().is_one()) {
            if (famval.den().total_deg() > 1) opaque_den = true;
            term.mul_den(famval.den());
        }
        acc = acc + term;
    }

    ParamRat finish() const {
        ParamRat cl = acc.to_paramrat();
        if (opaque_den && !cl.is_zero()) cl = ParamRat::of(cl.num(), cl.den());
        return cl;
    }
};

}  // namespace

void validate_setup(const FlagSetup& s) {
    if (s.r.empty()) throw std::invalid_argument("setup: empty rank set");
    if (int(s.r.size()) > vars::MAX_LEVEL)
        throw std::invalid_argument("setup: too many flag levels");
    for (std::size_t m = 0; m < s.r.size(); ++m) {
        if (s.r[m] < 1 || s.r[m] > vars::MAX_SLOT)
            throw std::invalid_argument("setup: level rank out of range");
        if (m && s.r[m] <= s.r[m - 1])
            throw std::invalid_argument("setup: ranks must increase strictly");
    }
    if (s.N <= s.r.back())
        throw std::invalid_argument("setup: frame rank must exceed the last level");
    if (s.equivariant && s.N > vars::MAX_NU)
        throw std::invalid_argument("setup: frame too large for equivariant weights");
    if (!s.base) throw std::invalid_argument("setup: missing base ring");
    if (s.base_rank < 0) throw std::invalid_argument("setup: negative base rank");
    if (!s.chern_v.empty() && !s.chern_v[0].is_one())
        throw std::invalid_argument("setup: c_0(V) must be 1");
    if (!s.chern_q.empty() && !s.chern_q[0].is_one())
        throw std::invalid_argument("setup: c_0(Q) must be 1");
    if (!s.chern_v.empty() && !s.chern_q.empty() && s.rank_v() + s.rank_q() != s.N)
        throw std::invalid_argument("setup: rank V + rank Q must equal the frame rank");
    if (!s.v_lines.empty() && int(s.v_lines.size()) != s.rank_v())
        throw std::invalid_argument("setup: split line data must list rank V line bundles");
}

namespace {

FactoredRat hyp_factored(const std::vector<int>& r, const std::vector<std::vector<int>>& k) {
    if (k.size() != r.size()) throw std::invalid_argument("hyp_factor: level count mismatch");
    FactoredRat f;
    for (std::size_t m = 0; m < r.size(); ++m) {
        if (int(k[m].size()) != r[m])
            throw std::invalid_argument("hyp_factor: slot count mismatch");
        for (int e : k[m])
            if (e < 0) throw std::invalid_argument("hyp_factor: negative degree");
        for (int i = 1; i <= r[m]; ++i)
            for (int j = 1; j <= r[m]; ++j) {
                if (i == j) continue;
                hyp_tail(f, root_poly(int(m) + 1, i) - root_poly(int(m) + 1, j),
                         k[m][std::size_t(i - 1)] - k[m][std::size_t(j - 1)]);
            }
    }
    return f;
}

}  // namespace

ParamRat hyp_factor(const std::vector<int>& r, const std::vector<std::vector<int>>& k) {
    return hyp_factored(r, k).to_paramrat();
}

CoeffSeries gt_modify(const CoeffSeries& F, std::shared_ptr<const RingSpec> target) {
    if (F.shape.side != Side::abelian)
        throw std::invalid_argument("gt_modify: input must be an abelian-side series");
    if (!target) throw std::invalid_argument("gt_modify: missing target ring");
    if (auto err = check_weyl_equivariance_closed(F))
        throw std::invalid_argument("gt_modify: input is not Weyl-invariant: " + *err);

    SeriesShape sh{Side::nonabelian, F.shape.base_rank, F.shape.r};
    CoeffSeries out = CoeffSeries::zero(sh, std::move(target), F.trunc);
    out.t_exponential = F.t_exponential;

    // accumulate the orbit sums with explicitly factored denominators, so
    // the root-difference cancellations happen by trial division
    std::map<MultiDeg, FactoredRat> acc;
    std::map<MultiDeg, bool> opaque;
    for (const auto& d : all_multidegs(F.shape, F.trunc.d_max)) {
        auto cl = F.closed_at(d);
        if (!cl) throw std::runtime_error("gt_modify: no closed form at " + d.str());
        if (cl->is_zero()) continue;
        FactoredRat term;
        auto hint = F.closed_factored.find(d);
        if (hint != F.closed_factored.end()) {
            term = hint->second;
        } else {
            term.num = cl->num();
            if (!cl->den().is_one()) term.mul_den(cl->den());
        }
        term = term * hyp_factored(F.shape.r, d.k);
        MultiDeg D = MultiDeg::zero(sh);
        D.d_B = d.d_B;
        for (int m = 1; m <= int(sh.r.size()); ++m) D.k[std::size_t(m - 1)][0] = d.level_sum(m);
        bool& op = opaque[D];
        for (const auto& [f, m] : term.den)
            if (f.total_deg() > 1) op = true;
        auto it = acc.find(D);
        if (it == acc.end())
            acc.emplace(D, std::move(term));
        else
            it->second = it->second + term;
    }

    // the orbit sums must be regular where the abelian roots coincide: once
    // the roots (and base generators) are set to zero, a z-power must remain
    std::map<VarId, Poly> tozero;
    for (int m = 1; m <= int(F.shape.r.size()); ++m)
        for (int i = 1; i <= F.shape.r[std::size_t(m - 1)]; ++i) tozero[vars::root(m, i)] = Poly();
    tozero[vars::hbase()] = Poly();
    for (auto& [D, fr] : acc) {
        fr.reduce();
        ParamRat cl = fr.to_paramrat();
        if (cl.is_zero()) continue;
        if (opaque[D]) cl = ParamRat::of(cl.num(), cl.den());
        if (cl.den().subst(tozero).is_zero())
            throw std::runtime_error("gt_modify: orbit sum left a root denominator at " + D.str());
        out.set_closed(D, cl);
    }
    out.expand_from_closed();
    return out;
}

CoeffSeries brown_i(const FlagSetup& s, const CoeffSeries& J_B, const TruncConfig& tc,
                    std::shared_ptr<const RingSpec> ring) {
    validate_setup(s);
    if (!s.equivariant) throw std::invalid_argument("brown_i: equivariant frame required");
    if (J_B.shape.levels() != 0 || J_B.shape.base_rank != s.base_rank)
        throw std::invalid_argument("brown_i: base series shape mismatch");
    int l = s.levels();
    SeriesShape sh{Side::abelian, s.base_rank, s.r};
    CoeffSeries out = CoeffSeries::zero(sh, std::move(ring), tc);
    out.t_exponential = true;
    for (const auto& d : all_multidegs(sh, tc.d_max)) {
        MultiDeg db = MultiDeg::zero(J_B.shape);
        db.d_B = d.d_B;
        auto jb = J_B.closed_at(db);
        if (!jb)
            throw std::runtime_error("brown_i: base J-coefficient has no closed form at " +
                                     db.str());
        if (jb->is_zero()) continue;
        FactoredRat f;
        for (int m = 1; m <= l; ++m) {
            int rn = (m == l) ? s.N : s.r[std::size_t(m)];
            for (int i = 1; i <= s.r[std::size_t(m - 1)]; ++i)
                for (int j = 1; j <= rn; ++j) {
                    Poly x = root_poly(m, i) -
                             (m == l ? Poly::var(vars::nu(j)) : root_poly(m + 1, j));
                    int delta = d.k[std::size_t(m - 1)][std::size_t(i - 1)] -
                                (m == l ? 0 : d.k[std::size_t(m)][std::size_t(j - 1)]);
                    brown_tail(f, x, delta);
                }
        }
        f.mul_num(jb->num());
        if (!jb->den().is_one()) f.mul_den(jb->den());
        out.set_closed_factored(d, std::move(f));
    }
    out.expand_from_closed();
    return out;
}

CoeffSeries main_flag_i(const FlagSetup& s, const LambdaFamily& fam, const TruncConfig& tc,
                        std::shared_ptr<const RingSpec> ring) {
    validate_setup(s);
    int l = s.levels();
    int rl = s.r.back();
    if (s.equivariant) {
        if (!higher_cherns_vanish(s.chern_v))
            throw std::invalid_argument("main_flag_i: equivariant frame needs a trivial V");
    } else {
        if (s.chern_v.empty())
            throw std::invalid_argument("main_flag_i: Chern classes of V required");
        if (rl >= s.rank_v())
            throw std::invalid_argument("main_flag_i: last level must lie below rank V");
    }
    if (!lambda_weyl_invariant(fam, s.r))
        throw std::invalid_argument("main_flag_i: input family is not Weyl-invariant");

    SeriesShape sh{Side::nonabelian, s.base_rank, s.r};
    CoeffSeries out = CoeffSeries::zero(sh, std::move(ring), tc);
    out.t_exponential = true;
    // the Chern-polynomial branch contributes non-linear denominator
    // factors, so its results get the full gcd normalization at the end
    bool v_opaque = !s.equivariant && s.v_lines.empty();
    for (const auto& D : all_multidegs(sh, tc.d_max)) {
        std::vector<int> ktot(std::size_t(l), 0);
        for (int m = 0; m < l; ++m) ktot[std::size_t(m)] = D.k[std::size_t(m)][0];
        TermSum sum;
        sum.opaque_den = v_opaque;
        for (const auto& kk : level_compositions(s.r, ktot)) {
            FactoredRat f;
            for (int i = 1; i <= rl; ++i)
                for (int c = 1; c <= kk[std::size_t(l - 1)][std::size_t(i - 1)]; ++c) {
                    if (s.equivariant) {
                        for (int j = 1; j <= s.N; ++j)
                            f.mul_den(shifted(root_poly(l, i) - Poly::var(vars::nu(j)), c));
                    } else if (!s.v_lines.empty()) {
                        for (const Poly& c1 : s.v_lines)
                            f.mul_den(shifted(root_poly(l, i) + c1, c));
                    } else {
                        f.mul_den(chern_poly(s.chern_v, shifted(root_poly(l, i), c)));
                    }
                }
            for (int m = 1; m < l; ++m)
                for (int i = 1; i <= s.r[std::size_t(m - 1)]; ++i)
                    for (int j = 1; j <= s.r[std::size_t(m)]; ++j)
                        brown_tail(f, root_poly(m, i) - root_poly(m + 1, j),
                                   kk[std::size_t(m - 1)][std::size_t(i - 1)] -
                                       kk[std::size_t(m)][std::size_t(j - 1)]);
            for (int m = 1; m <= l; ++m)
                for (int i = 1; i <= s.r[std::size_t(m - 1)]; ++i)
                    for (int j = 1; j <= s.r[std::size_t(m - 1)]; ++j) {
                        if (i == j) continue;
                        hyp_tail(f, root_poly(m, i) - root_poly(m, j),
                                 kk[std::size_t(m - 1)][std::size_t(i - 1)] -
                                     kk[std::size_t(m - 1)][std::size_t(j - 1)]);
                    }
            std::map<VarId, Poly> assign;
            for (int m = 1; m <= l; ++m)
                for (int i = 1; i <= s.r[std::size_t(m - 1)]; ++i)
                    assign[vars::lam(m, i)] =
                        shifted(root_poly(m, i), kk[std::size_t(m - 1)][std::size_t(i - 1)]);
            sum.add(std::move(f), family_closed_eval(fam, D.d_B, tc.d_max, assign));
        }
        ParamRat cl = sum.finish();
        if (!cl.is_zero()) out.set_closed(D, cl);
    }
    out.expand_from_closed();
    return out;
}

CoeffSeries grassmann_i(const FlagSetup& s, const LambdaFamily& fam, const TruncConfig& tc,
                        std::shared_ptr<const RingSpec> ring) {
    validate_setup(s);
    if (s.levels() != 1)
        throw std::invalid_argument("grassmann_i: exactly one flag level expected");
    int r1 = s.r[0];
    if (s.equivariant) {
        if (!higher_cherns_vanish(s.chern_v))
            throw std::invalid_argument("grassmann_i: equivariant frame needs a trivial V");
    } else {
        if (s.chern_v.empty())
            throw std::invalid_argument("grassmann_i: Chern classes of V required");
        if (r1 >= s.rank_v())
            throw std::invalid_argument("grassmann_i: rank must lie below rank V");
    }
    if (!lambda_weyl_invariant(fam, s.r))
        throw std::invalid_argument("grassmann_i: input family is not Weyl-invariant");

    SeriesShape sh{Side::nonabelian, s.base_rank, s.r};
    CoeffSeries out = CoeffSeries::zero(sh, std::move(ring), tc);
    out.t_exponential = true;
    bool v_opaque = !s.equivariant && s.v_lines.empty();
    for (const auto& D : all_multidegs(sh, tc.d_max)) {
        int k = D.k[0][0];
        TermSum sum;
        sum.opaque_den = v_opaque;
        for (const auto& kk : compositions(k, r1)) {
            FactoredRat f;
            for (int i = 1; i <= r1; ++i)
                for (int c = 1; c <= kk[std::size_t(i - 1)]; ++c) {
                    if (s.equivariant) {
                        for (int j = 1; j <= s.N; ++j)
                            f.mul_den(shifted(root_poly(1, i) - Poly::var(vars::nu(j)), c));
                    } else if (!s.v_lines.empty()) {
                        for (const Poly& c1 : s.v_lines)
                            f.mul_den(shifted(root_poly(1, i) + c1, c));
                    } else {
                        f.mul_den(chern_poly(s.chern_v, shifted(root_poly(1, i), c)));
                    }
                }
            for (int i = 1; i <= r1; ++i)
                for (int j = i + 1; j <= r1; ++j) {
                    Poly diff = root_poly(1, i) - root_poly(1, j);
                    f.mul_num(shifted(diff, kk[std::size_t(i - 1)] - kk[std::size_t(j - 1)]));
                    f.mul_den(diff);
                }
            std::map<VarId, Poly> assign;
            for (int i = 1; i <= r1; ++i)
                assign[vars::lam(1, i)] = shifted(root_poly(1, i), kk[std::size_t(i - 1)]);
            sum.add(std::move(f), family_closed_eval(fam, D.d_B, tc.d_max, assign));
        }
        ParamRat cl = sum.finish();
        if ((k * (r1 - 1)) % 2) cl = cl * Rational(-1);
        if (!cl.is_zero()) out.set_closed(D, cl);
    }
    out.expand_from_closed();
    return out;
}

LambdaFamily oh_split_input(const FlagSetup& s, const std::vector<LineData>& lines,
                            const CoeffSeries& J_B, const TruncConfig& tc) {
    validate_setup(s);
    if (J_B.shape.levels() != 0 || J_B.shape.base_rank != s.base_rank)
        throw std::invalid_argument("oh_split_input: base series shape mismatch");
    for (const auto& L : lines) {
        if (int(L.pairing.size()) != s.base_rank)
            throw std::invalid_argument("oh_split_input: pairing length must match the base rank");
        for (int p : L.pairing)
            if (p > 0)
                throw std::invalid_argument(
                    "oh_split_input: line bundle has positive degree on an effective class");
    }
    int l = s.levels(), rl = s.r.back();
    std::map<LambdaFamily::Mono, CoeffSeries> terms;
    for (const auto& d : all_multidegs(J_B.shape, tc.d_max)) {
        auto jb = J_B.closed_at(d);
        if (!jb)
            throw std::runtime_error("oh_split_input: base J-coefficient has no closed form at " +
                                     d.str());
        if (jb->is_zero()) continue;
        std::map<LambdaFamily::Mono, Poly> acc;
        acc[{}] = Poly(Rational(1));
        for (const auto& L : lines) {
            long deg = 0;
            for (std::size_t a = 0; a < L.pairing.size(); ++a)
                deg += long(L.pairing[a]) * d.d_B[a];
            for (int i = 1; i <= rl; ++i)
                for (long c = 0; c < -deg; ++c) {
                    // multiply by (lambda_i^{(l)} + c1(L) - cz)
                    Poly tail = L.c1 - zvar() * Rational(c);
                    std::map<LambdaFamily::Mono, Poly> next;
                    for (const auto& [mono, p] : acc) {
                        LambdaFamily::Mono up = mono;
                        ++up[vars::lam(l, i)];
                        next[up] += p;
                        Poly low = p * tail;
                        if (!low.is_zero()) next[mono] += low;
                    }
                    acc = std::move(next);
                }
        }
        for (const auto& [mono, p] : acc) {
            if (p.is_zero()) continue;
            auto it = terms.find(mono);
            if (it == terms.end())
                it = terms.emplace(mono, CoeffSeries::zero(J_B.shape, J_B.ring, tc)).first;
            it->second.set_closed(d, *jb * ParamRat(p));
        }
    }
    LambdaFamily fam;
    for (auto& [mono, C] : terms) {
        C.expand_from_closed();
        fam.terms.emplace(mono, std::move(C));
    }
    return fam;
}

CoeffSeries twisted_F(const FlagSetup& s, const LambdaFamily& fam, const TruncConfig& tc,
                      std::shared_ptr<const RingSpec> ring) {
    validate_setup(s);
    if (!s.twisted)
        throw std::invalid_argument("twisted_F: setup must enable the twist parameter");
    if (s.chern_q.empty()) throw std::invalid_argument("twisted_F: Chern classes of Q required");
    if (!lambda_weyl_invariant(fam, s.r))
        throw std::invalid_argument("twisted_F: input family is not Weyl-invariant");
    int l = s.levels();
    int rl = s.r.back();

    SeriesShape sh{Side::nonabelian, s.base_rank, s.r};
    CoeffSeries out = CoeffSeries::zero(sh, std::move(ring), tc);
    out.t_exponential = true;
    for (const auto& D : all_multidegs(sh, tc.d_max)) {
        std::vector<int> ktot(std::size_t(l), 0);
        for (int m = 0; m < l; ++m) ktot[std::size_t(m)] = D.k[std::size_t(m)][0];
        TermSum sum;
        for (const auto& kk : level_compositions(s.r, ktot)) {
            FactoredRat f;
            for (int i = 1; i <= rl; ++i)
                for (int c = 1; c <= kk[std::size_t(l - 1)][std::size_t(i - 1)]; ++c) {
                    f.mul_num(chern_poly(
                        s.chern_q, Poly::var(vars::mu()) + shifted(root_poly(l, i), c)));
                    f.mul_den(shifted(root_poly(l, i), c), s.N);
                }
            for (int m = 1; m < l; ++m)
                for (int i = 1; i <= s.r[std::size_t(m - 1)]; ++i)
                    for (int j = 1; j <= s.r[std::size_t(m)]; ++j)
                        brown_tail(f, root_poly(m, i) - root_poly(m + 1, j),
                                   kk[std::size_t(m - 1)][std::size_t(i - 1)] -
                                       kk[std::size_t(m)][std::size_t(j - 1)]);
            for (int m = 1; m <= l; ++m)
                for (int i = 1; i <= s.r[std::size_t(m - 1)]; ++i)
                    for (int j = 1; j <= s.r[std::size_t(m - 1)]; ++j) {
                        if (i == j) continue;
                        hyp_tail(f, root_poly(m, i) - root_poly(m, j),
                                 kk[std::size_t(m - 1)][std::size_t(i - 1)] -
                                     kk[std::size_t(m - 1)][std::size_t(j - 1)]);
                    }
            std::map<VarId, Poly> assign;
            for (int m = 1; m <= l; ++m)
                for (int i = 1; i <= s.r[std::size_t(m - 1)]; ++i)
                    assign[vars::lam(m, i)] =
                        Poly::var(vars::mu()) +
                        shifted(root_poly(m, i), kk[std::size_t(m - 1)][std::size_t(i - 1)]);
            sum.add(std::move(f), family_closed_eval(fam, D.d_B, tc.d_max, assign));
        }
        ParamRat cl = sum.finish();
        if (!cl.is_zero()) out.set_closed(D, cl);
    }
    out.expand_from_closed();
    return out;
}

CoeffSeries f_ab(const FlagSetup& s, const LambdaFamily& fam, const TruncConfig& tc) {
    validate_setup(s);
    if (!s.twisted) throw std::invalid_argument("f_ab: setup must enable the twist parameter");
    if (s.chern_q.empty()) throw std::invalid_argument("f_ab: Chern classes of Q required");
    if (!lambda_weyl_invariant(fam, s.r))
        throw std::invalid_argument("f_ab: input family is not Weyl-invariant");
    int l = s.levels();
    int rl = s.r.back();

    SeriesShape sh{Side::abelian, s.base_rank, s.r};
    CoeffSeries out = CoeffSeries::zero(sh, build_formal(), tc);
    out.t_exponential = true;
    for (const auto& d : all_multidegs(sh, tc.d_max)) {
        const auto& kk = d.k;
        FactoredRat f;
        for (int i = 1; i <= rl; ++i)
            for (int c = 1; c <= kk[std::size_t(l - 1)][std::size_t(i - 1)]; ++c) {
                f.mul_num(
                    chern_poly(s.chern_q, Poly::var(vars::mu()) + shifted(root_poly(l, i), c)));
                f.mul_den(shifted(root_poly(l, i), c), s.N);
            }
        for (int m = 1; m < l; ++m)
            for (int i = 1; i <= s.r[std::size_t(m - 1)]; ++i)
                for (int j = 1; j <= s.r[std::size_t(m)]; ++j)
                    brown_tail(f, root_poly(m, i) - root_poly(m + 1, j),
                               kk[std::size_t(m - 1)][std::size_t(i - 1)] -
                                   kk[std::size_t(m)][std::size_t(j - 1)]);
        std::map<VarId, Poly> assign;
        for (int m = 1; m <= l; ++m)
            for (int i = 1; i <= s.r[std::size_t(m - 1)]; ++i)
                assign[vars::lam(m, i)] =
                    Poly::var(vars::mu()) +
                    shifted(root_poly(m, i), kk[std::size_t(m - 1)][std::size_t(i - 1)]);
        ParamRat famval = family_closed_eval(fam, d.d_B, tc.d_max, assign);
        if (famval.is_zero()) continue;
        f.mul_num(famval.num());
        if (!famval.den().is_one()) f.mul_den(famval.den());
        out.set_closed_factored(d, std::move(f));
    }
    out.expand_from_closed();
    return out;
}

}  // namespace fm
