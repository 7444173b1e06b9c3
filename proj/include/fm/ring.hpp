// Cohomology-ring backends. Two kinds:
//
//   table: finite basis with structure constants derived from the flavor
//     (point, projective space, Grassmannian Schubert basis, product of two
//     table rings). Classes are coefficient vectors over ParamRat.
//
//   gkm: equivariant model over the fixed-point set of a GKM graph; a class
//     is its tuple of restrictions (ParamRat in nu and any symbolic
//     parameters), cup is pointwise, integration is the localization sum
//     over e(N_alpha).
//
//   formal: a single raw rational function in the root and base variables,
//     with cup = multiplication and no integration. Used for series whose
//     coefficients must stay in formal-root presentation (e.g. abelianized
//     series over a base with no table or fixed-point model).
//
// Polynomial expressions in the generator variables (h for projective
// factors, H1_1..H1_r for Grassmannians, all H_i^{(m)} for gkm kinds) enter
// through from_poly/from_rat, which reduce into the basis or restrict to the
// fixed points.
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fm/gkm.hpp"
#include "fm/laurent.hpp"
#include "fm/paramrat.hpp"
#include "fm/schur.hpp"

namespace fm {

struct RingSpec;

struct CohClass {
    const RingSpec* ring = nullptr;  // null = unambiguous zero
    std::vector<ParamRat> v;

    CohClass() = default;
    explicit CohClass(const RingSpec* R);

    bool is_zero() const;

    CohClass operator+(const CohClass& o) const;
    CohClass operator-() const;
    CohClass operator-(const CohClass& o) const { return *this + (-o); }
    CohClass operator*(const CohClass& o) const;  // cup product
    CohClass operator*(const Rational& c) const;
    CohClass& operator+=(const CohClass& o) { return *this = *this + o; }
    CohClass scale(const ParamRat& c) const;
    bool operator==(const CohClass& o) const;
    bool operator!=(const CohClass& o) const { return !(*this == o); }

    std::string str() const;
};

struct RingSpec {
    enum class Kind { table, gkm, formal };
    enum class Flavor { point, projective, grassmann, product, gkm_flag, gkm_toric, formal };

    Kind kind = Kind::table;
    Flavor flavor = Flavor::point;
    std::string name;

    // table payload
    std::vector<std::string> labels;
    std::vector<int> degrees;
    int unit_index = 0;
    std::vector<Rational> pairing;  // integration functional
    int pn = 0;                     // projective(n)
    int gr_r = 0, gr_n = 0;         // grassmann(r,n)
    std::vector<Partition> partitions;
    std::shared_ptr<const RingSpec> left, right;  // product factors

    // gkm payload
    std::shared_ptr<const GKMGraph> graph;

    // lazily filled product cache (table kind); keyed with i <= j
    mutable std::map<std::pair<int, int>, std::vector<std::pair<int, Rational>>> sc_cache;

    int size() const;
    int dimension() const;  // complex dimension (top degree)
    CohClass zero() const { return CohClass(this); }
    CohClass unit() const;
    CohClass basis_class(int k) const;
    int label_index(const std::string& s) const;

    // generator variables consumed by from_poly for this ring
    std::vector<VarId> generator_vars() const;

    // sparse structure constants (table kind only)
    std::vector<std::pair<int, Rational>> struct_const(int i, int j) const;

    // reduce a polynomial in the generator variables (coefficients may carry
    // free parameters) into the ring
    CohClass from_poly(const Poly& expr) const;
    // same for a rational expression; the denominator must be free of the
    // generator variables (table) or nonvanishing at every point (gkm)
    CohClass from_rat(const ParamRat& expr) const;
};

std::shared_ptr<const RingSpec> build_point();
std::shared_ptr<const RingSpec> build_projective(int n);
std::shared_ptr<const RingSpec> build_grassmann(int r, int n);
std::shared_ptr<const RingSpec> build_product(std::shared_ptr<const RingSpec> a,
                                              std::shared_ptr<const RingSpec> b);
std::shared_ptr<const RingSpec> build_gkm_flag(int N, const std::vector<int>& r);
std::shared_ptr<const RingSpec> build_gkm_toric_flag(int N, const std::vector<int>& r);
std::shared_ptr<const RingSpec> build_formal();

inline CohClass cup(const CohClass& a, const CohClass& b) { return a * b; }

// table: pairing functional; gkm: localization sum over fixed points
ParamRat integrate(const CohClass& a);

// gkm kinds: restriction of a generator-variable expression at a fixed point
ParamRat restrict_at(const RingSpec& R, const Poly& expr, int point);
ParamRat restrict_at(const RingSpec& R, const ParamRat& expr, int point);

// sum_{j=0..rho} c_j (X + shift)^{rho-j}: the Chern-class expansion of
// prod_delta (X + delta + shift) over the roots delta of a bundle with total
// Chern class c. Requires c[0] = 1 (as a class).
ZLaurent<CohClass> chern_product_eval(const std::vector<CohClass>& c, const CohClass& X,
                                      const ZLaurent<Rational>& shift);

}  // namespace fm
