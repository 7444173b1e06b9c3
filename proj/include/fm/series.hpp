// Truncated Novikov-by-z series with cohomology-valued coefficients.
//
// A CoeffSeries stores, per multidegree (base curve degrees d_B plus one
// k-block per flag level), a z-Laurent coefficient over CohClass (the
// "expanded" form) and, optionally, the same coefficient as one exact
// rational function of the formal root variables H_i^{(m)}, the base
// generators, nu/mu and z (the "closed" form). Closed forms are kept raw:
// they are what Weyl-orbit summation and fixed-point restriction consume,
// and they reduce into the ring only when expanded.
//
// Conventions:
//   - a missing multidegree key is an exact zero; series are complete up to
//     trunc.d_max and keys beyond that are never stored;
//   - z-expansion is around z = infinity (descending powers): positive
//     powers are finitely many and exact, the tail is cut at trunc.z_lo and
//     marked;
//   - t-variables are never materialized. A series with t_exponential set
//     carries an implicit factor exp((k_i^{(m)} + H_i^{(m)}/z) t_i^{(m)})
//     per abelian slot (per level on the nonabelian side, with H^{(m)} =
//     sum_i H_i^{(m)}), and divisor-direction operators act through the
//     k-shift rule: z d/dt_i^{(m)} multiplies the (d_B, k)-coefficient by
//     H_i^{(m)} + k_i^{(m)} z, and z d/dc1(L) in the base direction
//     multiplies by c1(L) + (c1(L).d_B) z.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fm/laurent.hpp"
#include "fm/ring.hpp"

namespace fm {

enum class Side { abelian, nonabelian };

struct TruncConfig {
    int d_max = 3;    // bound on |d_B| + sum of all k entries
    int z_lo = -12;   // retained z-exponent window
    int z_hi = 6;
    int m_inv = 6;    // order for expansions in an inverse parameter (1/mu)
    bool operator==(const TruncConfig&) const = default;
};

// Shape of the Novikov grading: base curve classes plus one k-block per flag
// level. Abelian blocks have r_m entries (one q_i^{(m)} per root), nonabelian
// blocks are single level sums (one q^{(m)}). r keeps the true ranks on both
// sides so level classes H^{(m)} can be formed after specialization.
struct SeriesShape {
    Side side = Side::nonabelian;
    int base_rank = 0;
    std::vector<int> r;  // r_1..r_l

    int levels() const { return int(r.size()); }
    int block_size(int m) const;  // m is 1-based
    bool operator==(const SeriesShape&) const = default;
};

struct MultiDeg {
    std::vector<int> d_B;
    std::vector<std::vector<int>> k;

    static MultiDeg zero(const SeriesShape& sh);

    int total() const;
    int base_total() const;
    int level_sum(int m) const;  // m is 1-based
    bool fits(const SeriesShape& sh) const;

    MultiDeg operator+(const MultiDeg& o) const;
    bool operator==(const MultiDeg& o) const = default;
    bool operator<(const MultiDeg& o) const;  // by total weight, then lex
    std::string str() const;
};

// every key of the given shape with total weight <= d_max, sorted
std::vector<MultiDeg> all_multidegs(const SeriesShape& sh, int d_max);

// Drop coefficients outside [lo, hi], marking a side only when something was
// actually lost there (existing tighter marks are kept).
template <class C>
void clamp_window(ZLaurent<C>& a, int lo, int hi) {
    bool cut_lo = false, cut_hi = false;
    ZLaurent<C> out;
    for (const auto& [k, v] : a.terms()) {
        if (k < lo) cut_lo = true;
        else if (k > hi) cut_hi = true;
        else out.add_term(k, v);
    }
    if (auto l = a.lo_cut(); l || cut_lo) out.set_lo(cut_lo ? std::max(lo, l ? *l : lo) : *l);
    if (auto h = a.hi_cut(); h || cut_hi) out.set_hi(cut_hi ? std::min(hi, h ? *h : hi) : *h);
    a = out;
}

// Laurent expansion of a rational function around z = infinity. Exponents
// above stay exact; everything below `lo` is dropped and the low side is
// marked when the tail is infinite or nonzero terms were cut. Coefficients
// are rational in the remaining variables.
ZLaurent<ParamRat> z_expand(const ParamRat& f, int lo);

// z-expand a closed coefficient and reduce it into the ring, honoring the
// window. gkm rings restrict to each fixed point first; table rings invert
// the scalar part of the denominator and run the nilpotent geometric series;
// the formal ring stores the expansion coefficients as they come.
ZLaurent<CohClass> expand_closed(const RingSpec& R, const ParamRat& closed,
                                 const TruncConfig& tc);

ZLaurent<CohClass> lift_scalar(const RingSpec& R, const ZLaurent<Rational>& s);

// generator classes: H_i^{(m)} and the level class H^{(m)} = sum_i H_i^{(m)}
CohClass root_class(const RingSpec& R, int m, int i);
CohClass level_class(const RingSpec& R, const SeriesShape& sh, int m);

struct CoeffSeries {
    SeriesShape shape;
    std::shared_ptr<const RingSpec> ring;
    TruncConfig trunc;
    bool t_exponential = false;

    std::map<MultiDeg, ZLaurent<CohClass>> coeff;
    std::map<MultiDeg, ParamRat> closed;
    // construction-time denominator factorizations for keys of `closed`,
    // kept so orbit sums over these coefficients can cancel by trial
    // division instead of general multivariate gcds; each entry equals the
    // closed form at its key
    std::map<MultiDeg, FactoredRat> closed_factored;

    static CoeffSeries zero(SeriesShape sh, std::shared_ptr<const RingSpec> R, TruncConfig tc);
    static CoeffSeries unit(SeriesShape sh, std::shared_ptr<const RingSpec> R, TruncConfig tc);

    ZLaurent<CohClass> at(const MultiDeg& d) const;  // exact zero when absent
    bool has_closed(const MultiDeg& d) const { return closed.count(d) != 0; }
    // closed value when determined: stored closed, or exact zero for a key
    // that is absent from both maps; nullopt when only the expansion exists
    std::optional<ParamRat> closed_at(const MultiDeg& d) const;

    void set(const MultiDeg& d, ZLaurent<CohClass> v);
    void set_closed(const MultiDeg& d, ParamRat v);
    // store a factored coefficient: reduces, records both representations
    void set_closed_factored(const MultiDeg& d, FactoredRat f);

    // fill `coeff` from every stored closed form (overwrites those keys)
    void expand_from_closed();

    std::string str() const;
};

// first place where a stored closed form disagrees with the stored
// expansion, if any ("<key>: z^<e>"); forms agree wherever both exist
std::optional<std::string> check_closed_consistency(const CoeffSeries& F);

enum class CombineOp { add, mul };

// add: coefficientwise sum. mul: Cauchy product over MultiDeg with the
// z-window enforced; exact on the retained window. Closed forms are carried
// along whenever every contributing key has one.
CoeffSeries combine(CombineOp op, const CoeffSeries& A, const CoeffSeries& B);

// polynomial in declared lambda-parameters with CoeffSeries coefficients
struct LambdaFamily {
    using Mono = std::map<VarId, int>;  // lambda variable -> exponent
    std::map<Mono, CoeffSeries> terms;

    static LambdaFamily constant(CoeffSeries c);
    static LambdaFamily variable(VarId v, const SeriesShape& sh,
                                 std::shared_ptr<const RingSpec> R, TruncConfig tc);

    LambdaFamily operator+(const LambdaFamily& o) const;
    LambdaFamily operator*(const LambdaFamily& o) const;

    int lambda_degree() const;
    std::vector<VarId> lambda_vars() const;
    const CoeffSeries& any_term() const;
};

// value assigned to one lambda variable at one multidegree: the expanded
// side uses cls + shift*z, the closed side uses poly (which should already
// include the k z shift) when has_poly is set
struct LambdaValue {
    CohClass cls;
    int shift = 0;
    Poly poly;
    bool has_poly = false;
};

// evaluate the family with each lambda replaced per multidegree (the k-shift
// rule lambda_i^{(m)} -> H_i^{(m)} + k_i^{(m)} z is the standard assignment)
CoeffSeries substitute_lambda(
    const LambdaFamily& F,
    const std::function<LambdaValue(VarId, const MultiDeg&)>& assign);

struct DivisorSymbol {
    enum class Kind { dt, dbase };
    Kind kind = Kind::dt;
    int m = 1, i = 1;          // dt: level and slot (slot ignored nonabelian)
    CohClass c1;               // dbase: the class c1(L)
    Poly c1_poly;              // dbase: same class as a generator polynomial
    std::vector<int> pairing;  // dbase: c1(L) . (basis of base curve classes)

    static DivisorSymbol fiber(int m, int i = 1);
    static DivisorSymbol base(CohClass c1, Poly c1_poly, std::vector<int> pairing);
};

// polynomial in divisor-direction symbols with scalar z-Laurent coefficients
struct DivisorOperator {
    std::vector<std::pair<std::vector<DivisorSymbol>, ZLaurent<Rational>>> terms;

    static DivisorOperator symbol(DivisorSymbol s);
    static DivisorOperator scalar(ZLaurent<Rational> c);
    DivisorOperator operator+(const DivisorOperator& o) const;
    DivisorOperator operator*(const DivisorOperator& o) const;
};

CoeffSeries divisor_op_apply(const CoeffSeries& F, const DivisorOperator& P);

// abelian -> nonabelian regrading: sum over all k with the given level sums,
// scaled by prod_m signs[m]^{k^{(m)}}
CoeffSeries specialize_novikov(const CoeffSeries& F, const std::vector<int>& signs);

// restriction of every closed coefficient at a fixed point (gkm rings)
std::map<MultiDeg, ParamRat> fixed_point_restrict_series(const CoeffSeries& F, int point);
std::map<MultiDeg, ParamRat> fixed_point_restrict_series(const CoeffSeries& F,
                                                         const std::string& label);

// ---------------------------------------------------------------- Weyl group
// W = prod_m S_{r_m}; an element is one permutation per level, as an image
// table on 0-based slots.
using WeylElem = std::vector<std::vector<int>>;

std::vector<WeylElem> weyl_group(const std::vector<int>& r);
MultiDeg weyl_act_deg(const WeylElem& w, const MultiDeg& d);
std::map<VarId, Poly> weyl_root_subst(const WeylElem& w);
ParamRat weyl_act(const WeylElem& w, const ParamRat& f);

// closed-form Weyl equivariance of an abelian series in the t-specialized
// sense: closed[w.d](w.H) == closed[d] for all d and w; returns the first
// violation ("<key>: <element>") or nullopt
std::optional<std::string> check_weyl_equivariance_closed(const CoeffSeries& F);

// invariance of a lambda-family under simultaneous permutation of the
// lambda_i^{(m)} within each level
bool lambda_weyl_invariant(const LambdaFamily& F, const std::vector<int>& r);

}  // namespace fm
