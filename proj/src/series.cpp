#include "fm/series.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <tuple>

namespace fm {

namespace {

// union of the multidegree keys of both stored maps
std::set<MultiDeg> stored_keys(const CoeffSeries& F) {
    std::set<MultiDeg> keys;
    for (const auto& [d, v] : F.coeff) keys.insert(d);
    for (const auto& [d, v] : F.closed) keys.insert(d);
    return keys;
}

Monomial zpow(int e) { return e == 0 ? Monomial::one() : Monomial::var(vars::z(), e); }

ParamRat laurent_to_rat(const ZLaurent<Rational>& c) {
    if (c.truncated())
        throw std::invalid_argument("divisor_op_apply: operator coefficient is truncated");
    int shift = std::min(0, c.is_zero() ? 0 : c.min_exp());
    Poly num;
    for (const auto& [e, v] : c.terms()) num += Poly::term(v, zpow(e - shift));
    Poly den = shift < 0 ? Poly::var(vars::z(), -shift) : Poly(Rational(1));
    return ParamRat::of(num, den);
}

}  // namespace

// ------------------------------------------------------------------- shapes

int SeriesShape::block_size(int m) const {
    if (m < 1 || m > levels()) throw std::out_of_range("SeriesShape: level out of range");
    return side == Side::abelian ? r[std::size_t(m - 1)] : 1;
}

MultiDeg MultiDeg::zero(const SeriesShape& sh) {
    MultiDeg d;
    d.d_B.assign(std::size_t(sh.base_rank), 0);
    for (int m = 1; m <= sh.levels(); ++m)
        d.k.emplace_back(std::size_t(sh.block_size(m)), 0);
    return d;
}

int MultiDeg::total() const {
    int t = base_total();
    for (const auto& blk : k)
        for (int x : blk) t += x;
    return t;
}

int MultiDeg::base_total() const {
    int t = 0;
    for (int x : d_B) t += x;
    return t;
}

int MultiDeg::level_sum(int m) const {
    const auto& blk = k.at(std::size_t(m - 1));
    int t = 0;
    for (int x : blk) t += x;
    return t;
}

bool MultiDeg::fits(const SeriesShape& sh) const {
    if (int(d_B.size()) != sh.base_rank || int(k.size()) != sh.levels()) return false;
    for (int m = 1; m <= sh.levels(); ++m)
        if (int(k[std::size_t(m - 1)].size()) != sh.block_size(m)) return false;
    for (int x : d_B)
        if (x < 0) return false;
    for (const auto& blk : k)
        for (int x : blk)
            if (x < 0) return false;
    return true;
}

MultiDeg MultiDeg::operator+(const MultiDeg& o) const {
    if (d_B.size() != o.d_B.size() || k.size() != o.k.size())
        throw std::invalid_argument("MultiDeg: shape mismatch in +");
    MultiDeg r = *this;
    for (std::size_t a = 0; a < d_B.size(); ++a) r.d_B[a] += o.d_B[a];
    for (std::size_t m = 0; m < k.size(); ++m) {
        if (k[m].size() != o.k[m].size())
            throw std::invalid_argument("MultiDeg: block size mismatch in +");
        for (std::size_t i = 0; i < k[m].size(); ++i) r.k[m][i] += o.k[m][i];
    }
    return r;
}

bool MultiDeg::operator<(const MultiDeg& o) const {
    int ta = total(), tb = o.total();
    if (ta != tb) return ta < tb;
    if (d_B != o.d_B) return d_B < o.d_B;
    return k < o.k;
}

std::string MultiDeg::str() const {
    std::string s = "[";
    for (std::size_t a = 0; a < d_B.size(); ++a) s += (a ? "," : "") + std::to_string(d_B[a]);
    s += ";";
    for (std::size_t m = 0; m < k.size(); ++m) {
        if (m) s += "|";
        for (std::size_t i = 0; i < k[m].size(); ++i)
            s += (i ? "," : "") + std::to_string(k[m][i]);
    }
    return s + "]";
}

std::vector<MultiDeg> all_multidegs(const SeriesShape& sh, int d_max) {
    std::vector<MultiDeg> out;
    MultiDeg cur = MultiDeg::zero(sh);
    std::vector<int*> slots;
    for (auto& x : cur.d_B) slots.push_back(&x);
    for (auto& blk : cur.k)
        for (auto& x : blk) slots.push_back(&x);
    std::function<void(std::size_t, int)> rec = [&](std::size_t idx, int left) {
        if (idx == slots.size()) {
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            *slots[idx] = v;
            rec(idx + 1, left - v);
        }
        *slots[idx] = 0;
    };
    rec(0, d_max);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------- expansion

ZLaurent<ParamRat> z_expand(const ParamRat& f, int lo) {
    ZLaurent<ParamRat> out;
    if (f.is_zero()) return out;
    const VarId zv = vars::z();
    auto numc = f.num().collect(zv);
    auto denc = f.den().collect(zv);
    const int h = denc.rbegin()->first;
    const Poly& dh = denc.rbegin()->second;
    ParamRat inv_dh = ParamRat::of(Poly(Rational(1)), dh);

    // den = dh z^h (1 + U) with U carrying strictly negative exponents
    ZLaurent<ParamRat> U;
    for (const auto& [j, p] : denc)
        if (j != h) U.add_term(j - h, ParamRat::of(p, dh));

    ZLaurent<ParamRat> N;
    for (const auto& [j, p] : numc) N.add_term(j, ParamRat(p));

    const bool infinite = !U.is_zero();
    // lowest geometric-series exponent that can still land at or above lo
    const int slo = lo - (N.is_zero() ? 0 : N.max_exp()) + h;
    ZLaurent<ParamRat> S = ZLaurent<ParamRat>::term(0, ParamRat(1));
    if (infinite) {
        ZLaurent<ParamRat> mU = -U;
        ZLaurent<ParamRat> pw = mU;
        while (!pw.is_zero() && pw.max_exp() >= slo) {
            ZLaurent<ParamRat> trimmed;
            for (const auto& [e, c] : pw.terms())
                if (e >= slo) trimmed.add_term(e, c);
            S += trimmed;
            pw = trimmed * mU;
        }
    }
    ZLaurent<ParamRat> R = (N * S).shift(-h).scale(inv_dh);
    bool cut = infinite;
    for (const auto& [e, c] : R.terms()) {
        if (e < lo) {
            cut = true;
            continue;
        }
        out.add_term(e, c);
    }
    if (cut) out.set_lo(lo);
    return out;
}

ZLaurent<CohClass> lift_scalar(const RingSpec& R, const ZLaurent<Rational>& s) {
    return s.map([&](const Rational& c) { return R.unit() * c; });
}

ZLaurent<CohClass> expand_closed(const RingSpec& R, const ParamRat& cl, const TruncConfig& tc) {
    ZLaurent<CohClass> out;
    if (cl.is_zero()) return out;

    if (R.kind == RingSpec::Kind::formal) {
        out = z_expand(cl, tc.z_lo).map([&](const ParamRat& c) { return R.from_rat(c); });
        clamp_window(out, tc.z_lo, tc.z_hi);
        return out;
    }

    if (R.kind == RingSpec::Kind::gkm) {
        const int n = R.size();
        std::vector<ZLaurent<ParamRat>> per(std::size_t(n), ZLaurent<ParamRat>{});
        std::optional<int> lo_mark, hi_mark;
        for (int p = 0; p < n; ++p) {
            per[std::size_t(p)] = z_expand(restrict_at(R, cl, p), tc.z_lo);
            if (auto l = per[std::size_t(p)].lo_cut())
                lo_mark = lo_mark ? std::max(*lo_mark, *l) : *l;
            if (auto hmk = per[std::size_t(p)].hi_cut())
                hi_mark = hi_mark ? std::min(*hi_mark, *hmk) : *hmk;
        }
        std::set<int> exps;
        for (const auto& zl : per)
            for (const auto& [e, c] : zl.terms()) exps.insert(e);
        for (int e : exps) {
            if (lo_mark && e < *lo_mark) continue;
            if (hi_mark && e > *hi_mark) continue;
            CohClass v(&R);
            for (int p = 0; p < n; ++p) v.v[std::size_t(p)] = per[std::size_t(p)].coeff(e);
            out.add_term(e, v);
        }
        if (lo_mark) out.set_lo(*lo_mark);
        if (hi_mark) out.set_hi(*hi_mark);
        clamp_window(out, tc.z_lo, tc.z_hi);
        return out;
    }

    // table ring: invert the scalar part of the denominator, then run the
    // geometric series against the nilpotent remainder inside the ring
    std::map<VarId, Poly> tozero;
    for (VarId g : R.generator_vars()) tozero.emplace(g, Poly());
    const Poly den0 = cl.den().subst(tozero);
    if (den0.is_zero())
        throw std::domain_error("expand_closed: denominator has no invertible scalar part");
    const Poly dnil = cl.den() - den0;

    auto reduce_zpoly = [&](const Poly& p) {
        ZLaurent<CohClass> zl;
        for (const auto& [j, q] : p.collect(vars::z())) zl.add_term(j, R.from_poly(q));
        return zl;
    };
    ZLaurent<CohClass> N = reduce_zpoly(cl.num());
    ZLaurent<CohClass> D = reduce_zpoly(dnil);
    const int dim = R.dimension();
    const int xlo = tc.z_lo - std::max(0, N.is_zero() ? 0 : N.max_exp()) -
                    dim * std::max(0, D.is_zero() ? 0 : D.max_exp());

    ZLaurent<ParamRat> inv0 = z_expand(ParamRat::of(Poly(Rational(1)), den0), xlo);
    ZLaurent<CohClass> inv0L = inv0.map([&](const ParamRat& c) { return R.unit().scale(c); });

    ZLaurent<CohClass> geom = ZLaurent<CohClass>::term(0, R.unit());
    if (!D.is_zero()) {
        ZLaurent<CohClass> base = -(D * inv0L);
        ZLaurent<CohClass> pw = base;
        for (int n2 = 1; n2 <= dim + 1 && !pw.terms().empty(); ++n2) {
            geom += pw;
            pw = pw * base;
        }
    }
    out = N * inv0L * geom;
    clamp_window(out, tc.z_lo, tc.z_hi);
    return out;
}

CohClass root_class(const RingSpec& R, int m, int i) {
    return R.from_poly(Poly::var(vars::root(m, i)));
}

CohClass level_class(const RingSpec& R, const SeriesShape& sh, int m) {
    if (m < 1 || m > sh.levels()) throw std::out_of_range("level_class: level out of range");
    Poly s;
    for (int i = 1; i <= sh.r[std::size_t(m - 1)]; ++i) s += Poly::var(vars::root(m, i));
    return R.from_poly(s);
}

// -------------------------------------------------------------- CoeffSeries

CoeffSeries CoeffSeries::zero(SeriesShape sh, std::shared_ptr<const RingSpec> R,
                              TruncConfig tc) {
    if (!R) throw std::invalid_argument("CoeffSeries: null ring");
    CoeffSeries F;
    F.shape = std::move(sh);
    F.ring = std::move(R);
    F.trunc = tc;
    return F;
}

CoeffSeries CoeffSeries::unit(SeriesShape sh, std::shared_ptr<const RingSpec> R,
                              TruncConfig tc) {
    CoeffSeries F = zero(std::move(sh), std::move(R), tc);
    MultiDeg d0 = MultiDeg::zero(F.shape);
    F.coeff.emplace(d0, ZLaurent<CohClass>::term(0, F.ring->unit()));
    F.closed.emplace(d0, ParamRat(1));
    return F;
}

ZLaurent<CohClass> CoeffSeries::at(const MultiDeg& d) const {
    auto it = coeff.find(d);
    if (it != coeff.end()) return it->second;
    auto ic = closed.find(d);
    if (ic != closed.end()) return expand_closed(*ring, ic->second, trunc);
    return {};
}

std::optional<ParamRat> CoeffSeries::closed_at(const MultiDeg& d) const {
    auto ic = closed.find(d);
    if (ic != closed.end()) return ic->second;
    if (coeff.find(d) == coeff.end()) return ParamRat();  // structurally zero
    return std::nullopt;
}

void CoeffSeries::set(const MultiDeg& d, ZLaurent<CohClass> v) {
    if (!d.fits(shape)) throw std::invalid_argument("CoeffSeries: key does not fit the shape");
    if (v.is_zero() && !v.truncated()) coeff.erase(d);
    else coeff[d] = std::move(v);
}

void CoeffSeries::set_closed(const MultiDeg& d, ParamRat v) {
    if (!d.fits(shape)) throw std::invalid_argument("CoeffSeries: key does not fit the shape");
    closed[d] = std::move(v);
    closed_factored.erase(d);
}

void CoeffSeries::set_closed_factored(const MultiDeg& d, FactoredRat f) {
    f.reduce();
    set_closed(d, f.to_paramrat());
    closed_factored[d] = std::move(f);
}

void CoeffSeries::expand_from_closed() {
    for (const auto& [d, c] : closed) coeff[d] = expand_closed(*ring, c, trunc);
}

std::string CoeffSeries::str() const {
    std::string out;
    for (const MultiDeg& d : stored_keys(*this)) {
        out += d.str() + " -> " + at(d).str();
        if (auto c = closed_at(d); c && coeff.count(d)) out += "   [closed " + c->str() + "]";
        out += "\n";
    }
    return out.empty() ? "0\n" : out;
}

std::optional<std::string> check_closed_consistency(const CoeffSeries& F) {
    for (const auto& [d, c] : F.closed) {
        ZLaurent<CohClass> want = expand_closed(*F.ring, c, F.trunc);
        ZLaurent<CohClass> have = F.at(d);
        if (auto e = ZLaurent<CohClass>::first_difference(want, have))
            return d.str() + ": z^" + std::to_string(*e);
    }
    return std::nullopt;
}

// ------------------------------------------------------------------ combine

CoeffSeries combine(CombineOp op, const CoeffSeries& A, const CoeffSeries& B) {
    if (!(A.shape == B.shape)) throw std::invalid_argument("combine: shape mismatch");
    if (A.ring.get() != B.ring.get()) throw std::invalid_argument("combine: ring mismatch");
    if (!(A.trunc == B.trunc)) throw std::invalid_argument("combine: truncation mismatch");

    CoeffSeries out = CoeffSeries::zero(A.shape, A.ring, A.trunc);

    if (op == CombineOp::add) {
        if (A.t_exponential != B.t_exponential)
            throw std::invalid_argument("combine: adding series with different t-conventions");
        out.t_exponential = A.t_exponential;
        std::set<MultiDeg> keys = stored_keys(A);
        for (const MultiDeg& d : stored_keys(B)) keys.insert(d);
        for (const MultiDeg& d : keys) {
            out.set(d, A.at(d) + B.at(d));
            auto ca = A.closed_at(d), cb = B.closed_at(d);
            if (ca && cb) out.set_closed(d, *ca + *cb);
        }
        return out;
    }

    if (A.t_exponential && B.t_exponential)
        throw std::invalid_argument(
            "combine: product of two series carrying the exponential t-convention");
    out.t_exponential = A.t_exponential || B.t_exponential;

    std::vector<std::tuple<MultiDeg, ZLaurent<CohClass>, std::optional<ParamRat>>> rhs;
    for (const MultiDeg& db : stored_keys(B)) rhs.emplace_back(db, B.at(db), B.closed_at(db));
    std::map<MultiDeg, ZLaurent<CohClass>> acc;
    std::map<MultiDeg, std::pair<ParamRat, bool>> acc_cl;  // value, still determined
    for (const MultiDeg& da : stored_keys(A)) {
        ZLaurent<CohClass> va = A.at(da);
        auto ca = A.closed_at(da);
        for (const auto& [db, vb, cb] : rhs) {
            MultiDeg d = da + db;
            if (d.total() > A.trunc.d_max) continue;
            auto& slot = acc[d];
            slot = slot + va * vb;
            auto& cslot = acc_cl.emplace(d, std::make_pair(ParamRat(), true)).first->second;
            if (ca && cb && cslot.second) cslot.first += *ca * *cb;
            else cslot.second = false;
        }
    }
    for (auto& [d, v] : acc) {
        clamp_window(v, out.trunc.z_lo, out.trunc.z_hi);
        out.set(d, std::move(v));
    }
    for (auto& [d, c] : acc_cl)
        if (c.second) out.set_closed(d, std::move(c.first));
    return out;
}

// ------------------------------------------------------------- LambdaFamily

namespace {
void check_family(const LambdaFamily& F) {
    if (F.terms.empty()) throw std::invalid_argument("LambdaFamily: no terms");
    const CoeffSeries& p = F.terms.begin()->second;
    for (const auto& [m, c] : F.terms) {
        if (!(c.shape == p.shape) || c.ring.get() != p.ring.get() || !(c.trunc == p.trunc) ||
            c.t_exponential != p.t_exponential)
            throw std::invalid_argument("LambdaFamily: inconsistent coefficient series");
    }
}
}  // namespace

LambdaFamily LambdaFamily::constant(CoeffSeries c) {
    LambdaFamily F;
    F.terms.emplace(Mono{}, std::move(c));
    return F;
}

LambdaFamily LambdaFamily::variable(VarId v, const SeriesShape& sh,
                                    std::shared_ptr<const RingSpec> R, TruncConfig tc) {
    LambdaFamily F;
    F.terms.emplace(Mono{{v, 1}}, CoeffSeries::unit(sh, std::move(R), tc));
    return F;
}

LambdaFamily LambdaFamily::operator+(const LambdaFamily& o) const {
    check_family(*this);
    check_family(o);
    LambdaFamily out = *this;
    for (const auto& [m, c] : o.terms) {
        auto it = out.terms.find(m);
        if (it == out.terms.end()) out.terms.emplace(m, c);
        else it->second = combine(CombineOp::add, it->second, c);
    }
    return out;
}

LambdaFamily LambdaFamily::operator*(const LambdaFamily& o) const {
    check_family(*this);
    check_family(o);
    LambdaFamily out;
    for (const auto& [ma, ca] : terms)
        for (const auto& [mb, cb] : o.terms) {
            Mono m = ma;
            for (const auto& [v, e] : mb) m[v] += e;
            CoeffSeries prod = combine(CombineOp::mul, ca, cb);
            auto it = out.terms.find(m);
            if (it == out.terms.end()) out.terms.emplace(std::move(m), std::move(prod));
            else it->second = combine(CombineOp::add, it->second, prod);
        }
    return out;
}

int LambdaFamily::lambda_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms) {
        int t = 0;
        for (const auto& [v, e] : m) t += e;
        d = std::max(d, t);
    }
    return d;
}

std::vector<VarId> LambdaFamily::lambda_vars() const {
    std::set<VarId> s;
    for (const auto& [m, c] : terms)
        for (const auto& [v, e] : m) s.insert(v);
    return {s.begin(), s.end()};
}

const CoeffSeries& LambdaFamily::any_term() const {
    if (terms.empty()) throw std::invalid_argument("LambdaFamily: no terms");
    return terms.begin()->second;
}

CoeffSeries substitute_lambda(
    const LambdaFamily& F,
    const std::function<LambdaValue(VarId, const MultiDeg&)>& assign) {
    check_family(F);
    const CoeffSeries& proto = F.any_term();
    CoeffSeries out = CoeffSeries::zero(proto.shape, proto.ring, proto.trunc);
    out.t_exponential = proto.t_exponential;

    std::set<MultiDeg> keys;
    for (const auto& [m, c] : F.terms)
        for (const MultiDeg& d : stored_keys(c)) keys.insert(d);

    const CohClass unit = out.ring->unit();
    for (const MultiDeg& d : keys) {
        ZLaurent<CohClass> acc;
        ParamRat acc_cl;
        bool closed_ok = true;
        for (const auto& [mono, C] : F.terms) {
            ZLaurent<CohClass> fac = ZLaurent<CohClass>::term(0, unit);
            ParamRat fac_cl(1);
            bool fac_poly = true;
            for (const auto& [v, e] : mono) {
                if (e <= 0) continue;
                LambdaValue val = assign(v, d);
                ZLaurent<CohClass> lin = ZLaurent<CohClass>::term(0, val.cls);
                if (val.shift != 0)
                    lin += ZLaurent<CohClass>::term(1, unit * Rational(val.shift));
                for (int j = 0; j < e; ++j) fac = fac * lin;
                if (val.has_poly) {
                    for (int j = 0; j < e; ++j) fac_cl *= ParamRat(val.poly);
                } else {
                    fac_poly = false;
                }
            }
            acc += fac * C.at(d);
            auto cc = C.closed_at(d);
            if (cc && fac_poly && closed_ok) acc_cl += fac_cl * *cc;
            else closed_ok = false;
        }
        clamp_window(acc, out.trunc.z_lo, out.trunc.z_hi);
        out.set(d, std::move(acc));
        if (closed_ok) out.set_closed(d, std::move(acc_cl));
    }
    return out;
}

// ---------------------------------------------------------------- divisor op

DivisorSymbol DivisorSymbol::fiber(int m, int i) {
    DivisorSymbol s;
    s.kind = Kind::dt;
    s.m = m;
    s.i = i;
    return s;
}

DivisorSymbol DivisorSymbol::base(CohClass c1, Poly c1_poly, std::vector<int> pairing) {
    DivisorSymbol s;
    s.kind = Kind::dbase;
    s.c1 = std::move(c1);
    s.c1_poly = std::move(c1_poly);
    s.pairing = std::move(pairing);
    return s;
}

DivisorOperator DivisorOperator::symbol(DivisorSymbol s) {
    DivisorOperator P;
    P.terms.emplace_back(std::vector<DivisorSymbol>{std::move(s)},
                         ZLaurent<Rational>::term(0, Rational(1)));
    return P;
}

DivisorOperator DivisorOperator::scalar(ZLaurent<Rational> c) {
    DivisorOperator P;
    P.terms.emplace_back(std::vector<DivisorSymbol>{}, std::move(c));
    return P;
}

DivisorOperator DivisorOperator::operator+(const DivisorOperator& o) const {
    DivisorOperator P = *this;
    P.terms.insert(P.terms.end(), o.terms.begin(), o.terms.end());
    return P;
}

DivisorOperator DivisorOperator::operator*(const DivisorOperator& o) const {
    DivisorOperator P;
    for (const auto& [sa, ca] : terms)
        for (const auto& [sb, cb] : o.terms) {
            std::vector<DivisorSymbol> s = sa;
            s.insert(s.end(), sb.begin(), sb.end());
            P.terms.emplace_back(std::move(s), ca * cb);
        }
    return P;
}

CoeffSeries divisor_op_apply(const CoeffSeries& F, const DivisorOperator& P) {
    if (!F.t_exponential)
        throw std::invalid_argument(
            "divisor_op_apply: series does not carry the exponential t-convention");
    CoeffSeries out = CoeffSeries::zero(F.shape, F.ring, F.trunc);
    out.t_exponential = true;

    const CohClass unit = F.ring->unit();
    auto multiplier = [&](const DivisorSymbol& s, const MultiDeg& d) {
        CohClass cls;
        Poly pol;
        long kshift = 0;
        if (s.kind == DivisorSymbol::Kind::dt) {
            if (F.shape.side == Side::abelian) {
                kshift = d.k.at(std::size_t(s.m - 1)).at(std::size_t(s.i - 1));
                cls = root_class(*F.ring, s.m, s.i);
                pol = Poly::var(vars::root(s.m, s.i));
            } else {
                kshift = d.k.at(std::size_t(s.m - 1)).at(0);
                cls = level_class(*F.ring, F.shape, s.m);
                for (int i = 1; i <= F.shape.r[std::size_t(s.m - 1)]; ++i)
                    pol += Poly::var(vars::root(s.m, i));
            }
        } else {
            if (int(s.pairing.size()) != F.shape.base_rank)
                throw std::invalid_argument("divisor_op_apply: base pairing size mismatch");
            for (std::size_t a = 0; a < s.pairing.size(); ++a)
                kshift += long(s.pairing[a]) * d.d_B[a];
            cls = s.c1;
            pol = s.c1_poly;
        }
        ZLaurent<CohClass> zl = ZLaurent<CohClass>::term(0, cls);
        if (kshift != 0) {
            pol += Poly::term(Rational(kshift), Monomial::var(vars::z()));
            zl += ZLaurent<CohClass>::term(1, unit * Rational(kshift));
        }
        return std::make_pair(zl, pol);
    };

    for (const MultiDeg& d : stored_keys(F)) {
        ZLaurent<CohClass> mult;
        ParamRat mult_cl;
        for (const auto& [syms, c] : P.terms) {
            ZLaurent<CohClass> m = lift_scalar(*F.ring, c);
            ParamRat mc = laurent_to_rat(c);
            for (const DivisorSymbol& s : syms) {
                auto [zl, pol] = multiplier(s, d);
                m = m * zl;
                mc *= ParamRat(pol);
            }
            mult += m;
            mult_cl += mc;
        }
        ZLaurent<CohClass> v = mult * F.at(d);
        clamp_window(v, F.trunc.z_lo, F.trunc.z_hi);
        out.set(d, std::move(v));
        if (auto cc = F.closed_at(d)) out.set_closed(d, mult_cl * *cc);
    }
    return out;
}

// --------------------------------------------------------- Novikov regrading

CoeffSeries specialize_novikov(const CoeffSeries& F, const std::vector<int>& signs) {
    if (F.shape.side != Side::abelian)
        throw std::invalid_argument("specialize_novikov: input must be abelian");
    if (int(signs.size()) != F.shape.levels())
        throw std::invalid_argument("specialize_novikov: one sign per level required");
    for (int s : signs)
        if (s != 1 && s != -1) throw std::invalid_argument("specialize_novikov: signs are +-1");

    SeriesShape sh = F.shape;
    sh.side = Side::nonabelian;
    CoeffSeries out = CoeffSeries::zero(sh, F.ring, F.trunc);
    out.t_exponential = F.t_exponential;

    std::map<MultiDeg, std::pair<ParamRat, bool>> acc_cl;
    for (const MultiDeg& d : stored_keys(F)) {
        MultiDeg dd;
        dd.d_B = d.d_B;
        Rational sgn(1);
        for (int m = 1; m <= F.shape.levels(); ++m) {
            int ks = d.level_sum(m);
            dd.k.push_back({ks});
            if (signs[std::size_t(m - 1)] < 0 && ks % 2 == 1) sgn = -sgn;
        }
        auto scaled = F.at(d).map([&](const CohClass& c) { return c * sgn; });
        auto it = out.coeff.find(dd);
        if (it == out.coeff.end()) out.coeff.emplace(dd, std::move(scaled));
        else it->second = it->second + scaled;

        auto& cslot = acc_cl.emplace(dd, std::make_pair(ParamRat(), true)).first->second;
        auto cc = F.closed_at(d);
        if (cc && cslot.second) cslot.first += *cc * sgn;
        else cslot.second = false;
    }
    for (auto it = out.coeff.begin(); it != out.coeff.end();) {
        if (it->second.is_zero() && !it->second.truncated()) it = out.coeff.erase(it);
        else ++it;
    }
    for (auto& [d, c] : acc_cl)
        if (c.second) out.set_closed(d, std::move(c.first));
    return out;
}

// --------------------------------------------------------------- restriction

std::map<MultiDeg, ParamRat> fixed_point_restrict_series(const CoeffSeries& F, int point) {
    if (!F.ring || F.ring->kind != RingSpec::Kind::gkm)
        throw std::invalid_argument("fixed_point_restrict_series: ring has no fixed-point model");
    std::map<MultiDeg, ParamRat> out;
    for (const MultiDeg& d : stored_keys(F)) {
        auto c = F.closed_at(d);
        if (!c)
            throw std::runtime_error("fixed_point_restrict_series: no closed form at " + d.str());
        try {
            out.emplace(d, c->subst(F.ring->graph->assignment(point)));
        } catch (const std::domain_error&) {
            throw std::domain_error("fixed_point_restrict_series: denominator vanishes at " +
                                    F.ring->labels[std::size_t(point)] + " for " + d.str());
        }
    }
    return out;
}

std::map<MultiDeg, ParamRat> fixed_point_restrict_series(const CoeffSeries& F,
                                                         const std::string& label) {
    if (!F.ring || F.ring->kind != RingSpec::Kind::gkm)
        throw std::invalid_argument("fixed_point_restrict_series: ring has no fixed-point model");
    return fixed_point_restrict_series(F, F.ring->label_index(label));
}

// ---------------------------------------------------------------- Weyl group

std::vector<WeylElem> weyl_group(const std::vector<int>& r) {
    std::vector<std::vector<std::vector<int>>> per_level;
    for (int rm : r) {
        std::vector<int> id(std::size_t(rm), 0);
        for (int i = 0; i < rm; ++i) id[std::size_t(i)] = i;
        std::vector<std::vector<int>> perms;
        std::vector<int> p = id;
        do perms.push_back(p);
        while (std::next_permutation(p.begin(), p.end()));
        per_level.push_back(std::move(perms));
    }
    std::vector<WeylElem> out{WeylElem{}};
    for (const auto& perms : per_level) {
        std::vector<WeylElem> next;
        for (const auto& w : out)
            for (const auto& p : perms) {
                WeylElem e = w;
                e.push_back(p);
                next.push_back(std::move(e));
            }
        out = std::move(next);
    }
    return out;
}

MultiDeg weyl_act_deg(const WeylElem& w, const MultiDeg& d) {
    if (w.size() != d.k.size()) throw std::invalid_argument("weyl_act_deg: level mismatch");
    MultiDeg r = d;
    for (std::size_t m = 0; m < w.size(); ++m) {
        if (w[m].size() != d.k[m].size())
            throw std::invalid_argument("weyl_act_deg: block size mismatch");
        for (std::size_t i = 0; i < w[m].size(); ++i)
            r.k[m][std::size_t(w[m][i])] = d.k[m][i];
    }
    return r;
}

std::map<VarId, Poly> weyl_root_subst(const WeylElem& w) {
    std::map<VarId, Poly> s;
    for (std::size_t m = 0; m < w.size(); ++m)
        for (std::size_t i = 0; i < w[m].size(); ++i)
            s.emplace(vars::root(int(m) + 1, int(i) + 1),
                      Poly::var(vars::root(int(m) + 1, w[m][i] + 1)));
    return s;
}

ParamRat weyl_act(const WeylElem& w, const ParamRat& f) {
    return f.subst(weyl_root_subst(w));
}

std::optional<std::string> check_weyl_equivariance_closed(const CoeffSeries& F) {
    if (F.shape.side != Side::abelian) return "series is not abelian";
    auto W = weyl_group(F.shape.r);
    for (const MultiDeg& d : stored_keys(F)) {
        auto cd = F.closed_at(d);
        if (!cd) return "no closed form at " + d.str();
        for (const WeylElem& w : W) {
            MultiDeg t = weyl_act_deg(w, d);
            auto ct = F.closed_at(t);
            if (!ct) return "no closed form at " + t.str();
            if (!(weyl_act(w, *cd) == *ct)) {
                std::string ws;
                for (const auto& p : w) {
                    ws += "(";
                    for (std::size_t i = 0; i < p.size(); ++i)
                        ws += (i ? "," : "") + std::to_string(p[i] + 1);
                    ws += ")";
                }
                return d.str() + ": " + ws;
            }
        }
    }
    return std::nullopt;
}

bool lambda_weyl_invariant(const LambdaFamily& F, const std::vector<int>& r) {
    check_family(F);
    for (const WeylElem& w : weyl_group(r)) {
        std::map<LambdaFamily::Mono, const CoeffSeries*> image;
        for (const auto& [mono, c] : F.terms) {
            LambdaFamily::Mono m2;
            for (const auto& [v, e] : mono) {
                VarId v2 = v;
                for (std::size_t m = 0; m < w.size(); ++m)
                    for (std::size_t i = 0; i < w[m].size(); ++i)
                        if (v == vars::lam(int(m) + 1, int(i) + 1))
                            v2 = vars::lam(int(m) + 1, w[m][i] + 1);
                m2[v2] += e;
            }
            image.emplace(std::move(m2), &c);
        }
        for (const auto& [mono, c] : F.terms) {
            auto it = image.find(mono);
            if (it == image.end()) return false;
            const CoeffSeries& o = *it->second;
            if (o.coeff != c.coeff || o.closed != c.closed) return false;
        }
    }
    return true;
}

}  // namespace fm
