#include "fm/ring.hpp"

#include <algorithm>
#include <stdexcept>

namespace fm {

namespace {

constexpr int MAX_BASIS = 10000;

void enum_box(int rows, int cols, std::vector<int>& cur, std::vector<Partition>& out) {
    out.push_back(Partition::of(cur));
    if (int(cur.size()) == rows) return;
    int hi = cur.empty() ? cols : cur.back();
    for (int p = 1; p <= hi; ++p) {
        cur.push_back(p);
        enum_box(rows, cols, cur, out);
        cur.pop_back();
    }
}

std::vector<Partition> box_partitions(int rows, int cols) {
    std::vector<Partition> out;
    std::vector<int> cur;
    enum_box(rows, cols, cur, out);
    std::sort(out.begin(), out.end());
    return out;
}

int partition_index(const RingSpec& R, const Partition& lam) {
    auto it = std::lower_bound(R.partitions.begin(), R.partitions.end(), lam);
    if (it == R.partitions.end() || !(*it == lam))
        throw std::logic_error("ring: partition outside the basis box");
    return int(it - R.partitions.begin());
}

}  // namespace

// ---------------------------------------------------------------- CohClass

CohClass::CohClass(const RingSpec* R) : ring(R), v(R->size()) {}

bool CohClass::is_zero() const {
    for (const auto& x : v)
        if (!x.is_zero()) return false;
    return true;
}

CohClass CohClass::operator+(const CohClass& o) const {
    if (!ring) return o;
    if (!o.ring) return *this;
    if (ring != o.ring) throw std::invalid_argument("CohClass: ring mismatch in +");
    CohClass r = *this;
    for (std::size_t k = 0; k < v.size(); ++k) r.v[k] += o.v[k];
    return r;
}

CohClass CohClass::operator-() const {
    CohClass r = *this;
    for (auto& x : r.v) x = -x;
    return r;
}

CohClass CohClass::operator*(const CohClass& o) const {
    if (!ring || !o.ring) return CohClass();
    if (ring != o.ring) throw std::invalid_argument("CohClass: ring mismatch in cup");
    CohClass r(ring);
    if (ring->kind != RingSpec::Kind::table) {  // gkm and formal multiply pointwise
        for (std::size_t p = 0; p < v.size(); ++p) r.v[p] = v[p] * o.v[p];
        return r;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i].is_zero()) continue;
        for (std::size_t j = 0; j < o.v.size(); ++j) {
            if (o.v[j].is_zero()) continue;
            ParamRat prod = v[i] * o.v[j];
            for (const auto& [k, c] : ring->struct_const(int(i), int(j))) r.v[k] += prod * c;
        }
    }
    return r;
}

CohClass CohClass::operator*(const Rational& c) const {
    if (!ring || c.is_zero()) return ring ? CohClass(ring) : CohClass();
    CohClass r = *this;
    for (auto& x : r.v) x = x * c;
    return r;
}

CohClass CohClass::scale(const ParamRat& c) const {
    if (!ring) return CohClass();
    CohClass r(ring);
    if (c.is_zero()) return r;
    for (std::size_t k = 0; k < v.size(); ++k) r.v[k] = v[k] * c;
    return r;
}

bool CohClass::operator==(const CohClass& o) const {
    if (!ring) return o.is_zero();
    if (!o.ring) return is_zero();
    if (ring != o.ring) throw std::invalid_argument("CohClass: ring mismatch in ==");
    return v == o.v;
}

std::string CohClass::str() const {
    if (!ring || is_zero()) return "0";
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k].is_zero()) continue;
        if (!out.empty()) out += " + ";
        const std::string& lab = ring->labels[k];
        if (lab == "1")
            out += v[k].str();
        else if (v[k].is_one())
            out += lab;
        else
            out += "(" + v[k].str() + ")*" + lab;
    }
    return out;
}

// ---------------------------------------------------------------- RingSpec

int RingSpec::size() const {
    return kind == Kind::gkm ? graph->points() : int(labels.size());
}

int RingSpec::dimension() const {
    if (kind == Kind::gkm) return graph->dim;
    return *std::max_element(degrees.begin(), degrees.end());
}

CohClass RingSpec::unit() const {
    CohClass r(this);
    if (kind == Kind::gkm) {
        for (auto& x : r.v) x = ParamRat(1);
        return r;
    }
    r.v[unit_index] = ParamRat(1);
    return r;
}

CohClass RingSpec::basis_class(int k) const {
    if (kind != Kind::table) throw std::logic_error("basis_class: not a table ring");
    if (k < 0 || k >= size()) throw std::out_of_range("basis_class: index out of range");
    CohClass r(this);
    r.v[k] = ParamRat(1);
    return r;
}

int RingSpec::label_index(const std::string& s) const {
    for (std::size_t k = 0; k < labels.size(); ++k)
        if (labels[k] == s) return int(k);
    throw std::invalid_argument("ring '" + name + "': no basis label '" + s + "'");
}

std::vector<VarId> RingSpec::generator_vars() const {
    std::vector<VarId> out;
    switch (flavor) {
        case Flavor::point: break;
        case Flavor::projective:
            out.push_back(vars::hbase());
            break;
        case Flavor::grassmann:
            for (int i = 1; i <= gr_r; ++i) out.push_back(vars::root(1, i));
            break;
        case Flavor::product: {
            out = left->generator_vars();
            auto rv = right->generator_vars();
            out.insert(out.end(), rv.begin(), rv.end());
            break;
        }
        case Flavor::gkm_flag:
        case Flavor::gkm_toric:
            for (int m = 1; m <= graph->levels(); ++m)
                for (int i = 1; i <= graph->r[m - 1]; ++i) out.push_back(vars::root(m, i));
            break;
        case Flavor::formal:
            for (int m = 1; m <= vars::MAX_LEVEL; ++m)
                for (int i = 1; i <= vars::MAX_SLOT; ++i) out.push_back(vars::root(m, i));
            out.push_back(vars::hbase());
            break;
    }
    return out;
}

std::vector<std::pair<int, Rational>> RingSpec::struct_const(int i, int j) const {
    if (kind != Kind::table) throw std::logic_error("struct_const: not a table ring");
    if (i > j) std::swap(i, j);  // all our table rings are commutative
    auto key = std::make_pair(i, j);
    auto hit = sc_cache.find(key);
    if (hit != sc_cache.end()) return hit->second;

    std::vector<std::pair<int, Rational>> out;
    switch (flavor) {
        case Flavor::point:
            out.emplace_back(0, Rational(1));
            break;
        case Flavor::projective:
            if (i + j <= pn) out.emplace_back(i + j, Rational(1));
            break;
        case Flavor::grassmann: {
            auto prod = lr_product(partitions[i], partitions[j], gr_r, gr_n - gr_r);
            for (const auto& [lam, c] : prod) out.emplace_back(partition_index(*this, lam), c);
            break;
        }
        case Flavor::product: {
            int rs = right->size();
            auto a = left->struct_const(i / rs, j / rs);
            auto b = right->struct_const(i % rs, j % rs);
            for (const auto& [ka, ca] : a)
                for (const auto& [kb, cb] : b) out.emplace_back(ka * rs + kb, ca * cb);
            std::sort(out.begin(), out.end(),
                      [](const auto& x, const auto& y) { return x.first < y.first; });
            break;
        }
        default:
            throw std::logic_error("struct_const: unsupported flavor");
    }
    sc_cache.emplace(key, out);
    return out;
}

CohClass RingSpec::from_poly(const Poly& expr) const {
    CohClass r(this);
    switch (flavor) {
        case Flavor::point:
            r.v[0] = ParamRat(expr);
            break;
        case Flavor::projective: {
            auto coeffs = expr.collect(vars::hbase());
            for (std::size_t k = 0; k < coeffs.size(); ++k) {
                if (int(k) > pn) break;  // h^{n+1} = 0
                r.v[k] = ParamRat(coeffs[k]);
            }
            break;
        }
        case Flavor::grassmann: {
            std::vector<VarId> roots;
            for (int i = 1; i <= gr_r; ++i) roots.push_back(vars::root(1, i));
            for (const auto& [lam, c] : schur_reduce_general(expr, roots, gr_n - gr_r))
                r.v[partition_index(*this, lam)] = ParamRat(c);
            break;
        }
        case Flavor::product: {
            CohClass cl = left->from_poly(expr);
            int rs = right->size();
            for (int il = 0; il < left->size(); ++il) {
                if (cl.v[il].is_zero()) continue;
                CohClass cr = right->from_poly(cl.v[il].num());
                for (int ir = 0; ir < rs; ++ir) r.v[il * rs + ir] = cr.v[ir];
            }
            break;
        }
        case Flavor::gkm_flag:
        case Flavor::gkm_toric:
            for (int p = 0; p < graph->points(); ++p)
                r.v[p] = ParamRat(expr.subst(graph->assignment(p)));
            break;
        case Flavor::formal:
            r.v[0] = ParamRat(expr);
            break;
    }
    return r;
}

CohClass RingSpec::from_rat(const ParamRat& expr) const {
    if (kind == Kind::formal) {
        CohClass r(this);
        r.v[0] = expr;
        return r;
    }
    if (kind == Kind::gkm) {
        CohClass r(this);
        for (int p = 0; p < graph->points(); ++p) r.v[p] = expr.subst(graph->assignment(p));
        return r;
    }
    for (VarId g : generator_vars())
        if (expr.den().depends_on(g))
            throw std::invalid_argument("from_rat: denominator involves ring generators");
    return from_poly(expr.num()).scale(ParamRat::of_reduced(Poly(Rational(1)), expr.den()));
}

// ---------------------------------------------------------------- builders

std::shared_ptr<const RingSpec> build_point() {
    auto R = std::make_shared<RingSpec>();
    R->kind = RingSpec::Kind::table;
    R->flavor = RingSpec::Flavor::point;
    R->name = "point";
    R->labels = {"1"};
    R->degrees = {0};
    R->unit_index = 0;
    R->pairing = {Rational(1)};
    return R;
}

std::shared_ptr<const RingSpec> build_projective(int n) {
    if (n < 0) throw std::invalid_argument("projective: need n >= 0");
    auto R = std::make_shared<RingSpec>();
    R->kind = RingSpec::Kind::table;
    R->flavor = RingSpec::Flavor::projective;
    R->pn = n;
    R->name = "projective(" + std::to_string(n) + ")";
    for (int k = 0; k <= n; ++k) {
        R->labels.push_back(k == 0 ? "1" : k == 1 ? "h" : "h^" + std::to_string(k));
        R->degrees.push_back(k);
        R->pairing.emplace_back(k == n ? 1 : 0);
    }
    R->unit_index = 0;
    return R;
}

std::shared_ptr<const RingSpec> build_grassmann(int r, int n) {
    if (r < 1 || r >= n) throw std::invalid_argument("grassmann: need 1 <= r < n");
    auto R = std::make_shared<RingSpec>();
    R->kind = RingSpec::Kind::table;
    R->flavor = RingSpec::Flavor::grassmann;
    R->gr_r = r;
    R->gr_n = n;
    R->name = "grassmann(" + std::to_string(r) + "," + std::to_string(n) + ")";
    R->partitions = box_partitions(r, n - r);
    if (int(R->partitions.size()) > MAX_BASIS)
        throw std::invalid_argument("grassmann: basis size exceeds guard");
    Partition full = Partition::of(std::vector<int>(std::size_t(r), n - r));
    for (const auto& lam : R->partitions) {
        R->labels.push_back("s" + lam.str());
        R->degrees.push_back(lam.weight());
        R->pairing.emplace_back(lam == full ? 1 : 0);
    }
    R->unit_index = R->label_index("s()");
    return R;
}

std::shared_ptr<const RingSpec> build_product(std::shared_ptr<const RingSpec> a,
                                              std::shared_ptr<const RingSpec> b) {
    if (!a || !b) throw std::invalid_argument("product: null factor");
    if (a->kind != RingSpec::Kind::table || b->kind != RingSpec::Kind::table)
        throw std::invalid_argument("product: factors must be table rings");
    if (long(a->size()) * b->size() > MAX_BASIS)
        throw std::invalid_argument("product: basis size exceeds guard");
    // polynomials are decomposed by generator variable, so the factors must
    // not share any (e.g. two projective factors would both claim h)
    auto ga = a->generator_vars();
    for (VarId g : b->generator_vars())
        if (std::find(ga.begin(), ga.end(), g) != ga.end())
            throw std::invalid_argument("product: factors share generator variable " +
                                        vars::name(g));
    auto R = std::make_shared<RingSpec>();
    R->kind = RingSpec::Kind::table;
    R->flavor = RingSpec::Flavor::product;
    R->left = a;
    R->right = b;
    R->name = "product(" + a->name + "," + b->name + ")";
    for (int il = 0; il < a->size(); ++il)
        for (int ir = 0; ir < b->size(); ++ir) {
            R->labels.push_back(a->labels[il] + "*" + b->labels[ir]);
            R->degrees.push_back(a->degrees[il] + b->degrees[ir]);
            R->pairing.push_back(a->pairing[il] * b->pairing[ir]);
        }
    R->unit_index = a->unit_index * b->size() + b->unit_index;
    return R;
}

namespace {
std::shared_ptr<const RingSpec> build_gkm(int N, const std::vector<int>& r,
                                          GKMGraph::Variant variant) {
    auto R = std::make_shared<RingSpec>();
    R->kind = RingSpec::Kind::gkm;
    R->flavor = variant == GKMGraph::Variant::flag ? RingSpec::Flavor::gkm_flag
                                                   : RingSpec::Flavor::gkm_toric;
    R->graph = gkm_data(N, r, variant);
    std::string rs;
    for (std::size_t m = 0; m < r.size(); ++m) rs += (m ? "," : "") + std::to_string(r[m]);
    R->name = std::string(variant == GKMGraph::Variant::flag ? "gkm_flag(" : "gkm_toric_flag(") +
              std::to_string(N) + ",{" + rs + "})";
    R->labels = R->graph->labels;
    return R;
}
}  // namespace

std::shared_ptr<const RingSpec> build_gkm_flag(int N, const std::vector<int>& r) {
    return build_gkm(N, r, GKMGraph::Variant::flag);
}

std::shared_ptr<const RingSpec> build_gkm_toric_flag(int N, const std::vector<int>& r) {
    return build_gkm(N, r, GKMGraph::Variant::toric);
}

std::shared_ptr<const RingSpec> build_formal() {
    auto R = std::make_shared<RingSpec>();
    R->kind = RingSpec::Kind::formal;
    R->flavor = RingSpec::Flavor::formal;
    R->name = "formal";
    R->labels = {"1"};
    R->degrees = {0};
    R->unit_index = 0;
    return R;
}

// ---------------------------------------------------------------- functionals

ParamRat integrate(const CohClass& a) {
    if (!a.ring) return ParamRat();
    const RingSpec& R = *a.ring;
    if (R.kind == RingSpec::Kind::formal)
        throw std::invalid_argument("integrate: formal ring carries no pairing");
    ParamRat acc;
    if (R.kind == RingSpec::Kind::gkm) {
        for (int p = 0; p < R.size(); ++p) {
            if (a.v[p].is_zero()) continue;
            if (R.graph->euler[p].is_zero())
                throw std::domain_error("integrate: zero Euler class at fixed point " +
                                        R.labels[p]);
            acc += a.v[p] * ParamRat::of_reduced(Poly(Rational(1)), R.graph->euler[p]);
        }
        return acc;
    }
    for (int k = 0; k < R.size(); ++k)
        if (!R.pairing[k].is_zero()) acc += a.v[k] * R.pairing[k];
    return acc;
}

ParamRat restrict_at(const RingSpec& R, const Poly& expr, int point) {
    if (R.kind != RingSpec::Kind::gkm)
        throw std::invalid_argument("restrict_at: ring has no fixed-point model");
    return ParamRat(expr.subst(R.graph->assignment(point)));
}

ParamRat restrict_at(const RingSpec& R, const ParamRat& expr, int point) {
    if (R.kind != RingSpec::Kind::gkm)
        throw std::invalid_argument("restrict_at: ring has no fixed-point model");
    return expr.subst(R.graph->assignment(point));
}

ZLaurent<CohClass> chern_product_eval(const std::vector<CohClass>& c, const CohClass& X,
                                      const ZLaurent<Rational>& shift) {
    if (c.empty()) throw std::invalid_argument("chern_product_eval: need c_0");
    const RingSpec* R = c[0].ring ? c[0].ring : X.ring;
    if (!R) throw std::invalid_argument("chern_product_eval: no ring to work in");
    if (!(c[0] == R->unit())) throw std::invalid_argument("chern_product_eval: c_0 != 1");

    ZLaurent<CohClass> base =
        shift.map([&](const Rational& s) { return R->unit() * s; });
    base += ZLaurent<CohClass>::term(0, X);

    int rho = int(c.size()) - 1;
    ZLaurent<CohClass> pw = ZLaurent<CohClass>::term(0, R->unit());
    std::vector<ZLaurent<CohClass>> powers{pw};
    for (int k = 1; k <= rho; ++k) {
        pw = pw * base;
        powers.push_back(pw);
    }
    ZLaurent<CohClass> out;
    for (int j = 0; j <= rho; ++j) out += powers[std::size_t(rho - j)].scale(c[j]);
    return out;
}

}  // namespace fm
