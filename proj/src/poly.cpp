#include "fm/poly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace fm {

namespace vars {
VarId parse(const std::string& s) {
    for (VarId v = 0; v < COUNT; ++v)
        if (name(v) == s) return v;
    throw std::invalid_argument("unknown variable '" + s + "'");
}
}  // namespace vars

Monomial Monomial::var(VarId v, int exp) {
    Monomial m;
    if (exp < 0) throw std::invalid_argument("Monomial: negative exponent");
    if (exp > 0) m.e.push_back({v, exp});
    return m;
}

int Monomial::total_deg() const {
    int d = 0;
    for (auto& [v, k] : e) d += k;
    return d;
}

int Monomial::deg(VarId v) const {
    for (auto& [w, k] : e)
        if (w == v) return k;
    return 0;
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial r;
    r.e.reserve(e.size() + o.e.size());
    std::size_t i = 0, j = 0;
    while (i < e.size() && j < o.e.size()) {
        if (e[i].first < o.e[j].first) r.e.push_back(e[i++]);
        else if (e[i].first > o.e[j].first) r.e.push_back(o.e[j++]);
        else {
            r.e.push_back({e[i].first, e[i].second + o.e[j].second});
            ++i, ++j;
        }
    }
    for (; i < e.size(); ++i) r.e.push_back(e[i]);
    for (; j < o.e.size(); ++j) r.e.push_back(o.e[j]);
    return r;
}

std::optional<Monomial> Monomial::divide(const Monomial& o) const {
    Monomial r;
    std::size_t i = 0, j = 0;
    while (j < o.e.size()) {
        if (i == e.size()) return std::nullopt;
        if (e[i].first < o.e[j].first) {
            r.e.push_back(e[i++]);
        } else if (e[i].first > o.e[j].first) {
            return std::nullopt;
        } else {
            int d = e[i].second - o.e[j].second;
            if (d < 0) return std::nullopt;
            if (d > 0) r.e.push_back({e[i].first, d});
            ++i, ++j;
        }
    }
    for (; i < e.size(); ++i) r.e.push_back(e[i]);
    return r;
}

Monomial Monomial::pow(int k) const {
    if (k < 0) throw std::invalid_argument("Monomial: negative power");
    Monomial r;
    if (k == 0) return r;
    r.e = e;
    for (auto& [v, d] : r.e) d *= k;
    return r;
}

std::string Monomial::str() const {
    if (e.empty()) return "1";
    std::string s;
    bool first = true;
    for (auto& [v, k] : e) {
        if (!first) s += "*";
        first = false;
        s += vars::name(v);
        if (k != 1) s += "^" + std::to_string(k);
    }
    return s;
}

bool MonoLex::operator()(const Monomial& a, const Monomial& b) const {
    // returns a < b in lex (b has higher exponent on first differing var,
    // where "missing" counts as exponent 0)
    std::size_t i = 0, j = 0;
    while (i < a.e.size() || j < b.e.size()) {
        VarId va = i < a.e.size() ? a.e[i].first : vars::COUNT;
        VarId vb = j < b.e.size() ? b.e[j].first : vars::COUNT;
        if (va < vb) return false;  // a has positive exp where b has 0
        if (vb < va) return true;
        if (a.e[i].second != b.e[j].second) return a.e[i].second < b.e[j].second;
        ++i, ++j;
    }
    return false;
}

Poly::Poly(const Rational& c) {
    if (!c.is_zero()) t_.emplace(Monomial::one(), c);
}

Poly Poly::var(VarId v, int exp) { return term(Rational(1), Monomial::var(v, exp)); }

Poly Poly::term(const Rational& c, const Monomial& m) {
    Poly p;
    if (!c.is_zero()) p.t_.emplace(m, c);
    return p;
}

Rational Poly::constant_value() const {
    if (t_.empty()) return Rational(0);
    if (t_.size() != 1 || !t_.begin()->first.is_one())
        throw std::logic_error("Poly: constant_value of non-constant");
    return t_.begin()->second;
}

int Poly::total_deg() const {
    int d = 0;
    for (auto& [m, c] : t_) d = std::max(d, m.total_deg());
    return d;
}

int Poly::deg(VarId v) const {
    int d = 0;
    for (auto& [m, c] : t_) d = std::max(d, m.deg(v));
    return d;
}

std::vector<VarId> Poly::vars_present() const {
    std::vector<bool> seen(vars::COUNT, false);
    for (auto& [m, c] : t_)
        for (auto& [v, k] : m.e) seen[v] = true;
    std::vector<VarId> out;
    for (VarId v = 0; v < vars::COUNT; ++v)
        if (seen[v]) out.push_back(v);
    return out;
}

const Monomial& Poly::lead_mono() const {
    if (t_.empty()) throw std::logic_error("Poly: leading term of zero");
    return t_.rbegin()->first;
}

const Rational& Poly::lead_coeff() const {
    if (t_.empty()) throw std::logic_error("Poly: leading coeff of zero");
    return t_.rbegin()->second;
}

Poly Poly::operator-() const {
    Poly r;
    for (auto& [m, c] : t_) r.t_.emplace(m, -c);
    return r;
}

void Poly::add_term(const Rational& c, const Monomial& m) {
    if (c.is_zero()) return;
    auto it = t_.find(m);
    if (it == t_.end()) {
        t_.emplace(m, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) t_.erase(it);
    }
}

Poly& Poly::operator+=(const Poly& o) {
    for (auto& [m, c] : o.t_) add_term(c, m);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    for (auto& [m, c] : o.t_) add_term(-c, m);
    return *this;
}

Poly Poly::operator*(const Poly& o) const {
    Poly r;
    if (t_.empty() || o.t_.empty()) return r;
    for (auto& [m1, c1] : t_)
        for (auto& [m2, c2] : o.t_) r.add_term(c1 * c2, m1 * m2);
    return r;
}

Poly Poly::operator*(const Rational& c) const {
    Poly r;
    if (c.is_zero()) return r;
    for (auto& [m, k] : t_) r.t_.emplace(m, k * c);
    return r;
}

Poly Poly::pow(int k) const {
    if (k < 0) throw std::invalid_argument("Poly: negative power");
    Poly r(Rational(1));
    Poly base = *this;
    while (k > 0) {
        if (k & 1) r = r * base;
        base = (k >>= 1) ? base * base : base;
    }
    return r;
}

int Poly::cmp(const Poly& a, const Poly& b) {
    auto ia = a.t_.begin(), ib = b.t_.begin();
    MonoLex less;
    for (; ia != a.t_.end() && ib != b.t_.end(); ++ia, ++ib) {
        if (less(ia->first, ib->first)) return -1;
        if (less(ib->first, ia->first)) return 1;
        if (ia->second < ib->second) return -1;
        if (ib->second < ia->second) return 1;
    }
    if (ia != a.t_.end()) return 1;
    if (ib != b.t_.end()) return -1;
    return 0;
}

std::map<int, Poly> Poly::collect(VarId v) const {
    std::map<int, Poly> out;
    for (auto& [m, c] : t_) {
        int k = m.deg(v);
        Monomial rest;
        for (auto& [w, d] : m.e)
            if (w != v) rest.e.push_back({w, d});
        out[k].add_term(c, rest);
    }
    return out;
}

Poly Poly::coeff_of(VarId v, int k) const {
    Poly out;
    for (auto& [m, c] : t_) {
        if (m.deg(v) != k) continue;
        Monomial rest;
        for (auto& [w, d] : m.e)
            if (w != v) rest.e.push_back({w, d});
        out.add_term(c, rest);
    }
    return out;
}

Poly Poly::subst(VarId v, const Poly& value) const {
    if (!depends_on(v)) return *this;
    auto by_deg = collect(v);
    // Horner from the top exponent down
    int top = by_deg.rbegin()->first;
    Poly acc;
    for (int k = top; k >= 0; --k) {
        acc = acc * value;
        auto it = by_deg.find(k);
        if (it != by_deg.end()) acc += it->second;
    }
    return acc;
}

Poly Poly::subst(const std::map<VarId, Poly>& assignment) const {
    // simultaneous substitution: rebuild term by term
    Poly r;
    for (auto& [m, c] : t_) {
        Poly term(c);
        for (auto& [v, k] : m.e) {
            auto it = assignment.find(v);
            if (it == assignment.end()) term = term * Poly::var(v).pow(k);
            else term = term * it->second.pow(k);
        }
        r += term;
    }
    return r;
}

Rational Poly::rat_content() const {
    if (t_.empty()) return Rational(0);
    mpz_class num_gcd = 0, den_lcm = 1;
    for (auto& [m, c] : t_) {
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.num().get_mpz_t());
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.den().get_mpz_t());
    }
    Rational content(mpq_class(num_gcd, den_lcm));
    if (lead_coeff().sign() < 0) content = -content;
    return content;
}

Poly Poly::primitive_rat() const {
    if (t_.empty()) return *this;
    Rational c = rat_content();
    Poly r;
    for (auto& [m, k] : t_) r.t_.emplace(m, k / c);
    return r;
}

std::string Poly::str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // descending lex order
    for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
        const Rational& c = it->second;
        Rational a = c.abs();
        if (first) {
            if (c.sign() < 0) os << "-";
            first = false;
        } else {
            os << (c.sign() < 0 ? " - " : " + ");
        }
        if (it->first.is_one()) os << a.str();
        else if (a.is_one()) os << it->first.str();
        else os << a.str() << "*" << it->first.str();
    }
    return os.str();
}

std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
    if (b.is_zero()) return std::nullopt;
    if (a.is_zero()) return Poly();
    Poly rem = a, quot;
    const Monomial& lmb = b.lead_mono();
    const Rational& lcb = b.lead_coeff();
    while (!rem.is_zero()) {
        auto q = rem.lead_mono().divide(lmb);
        if (!q) return std::nullopt;
        Rational cq = rem.lead_coeff() / lcb;
        Poly t = Poly::term(cq, *q);
        quot += t;
        rem -= t * b;
    }
    return quot;
}

namespace {

// pseudo-remainder of a by b w.r.t. v: lc(b)^(da-db+1) * a = q*b + r
Poly prem(const Poly& a, const Poly& b, VarId v) {
    int db = b.deg(v);
    Poly lcb = b.lead_coeff_in(v);
    Poly r = a;
    int e = a.deg(v) - db + 1;
    while (!r.is_zero() && r.deg(v) >= db) {
        int dr = r.deg(v);
        Poly lcr = r.lead_coeff_in(v);
        // r <- lcb*r - lcr*v^(dr-db)*b
        r = lcb * r - lcr * Poly::var(v, dr - db) * b;
        --e;
    }
    for (; e > 0; --e) r = r * lcb;
    return r;
}

// content of a w.r.t. v (gcd of the v-coefficients)
Poly content_in(const Poly& a, VarId v) {
    Poly g;
    for (auto& [k, coeff] : a.collect(v)) {
        g = poly_gcd(g, coeff);
        if (g.is_constant() && !g.is_zero()) return Poly(Rational(1));
    }
    return g;
}

}  // namespace

Poly poly_gcd(const Poly& a0, const Poly& b0) {
    if (a0.is_zero()) return b0.is_zero() ? Poly() : b0.primitive_rat();
    if (b0.is_zero()) return a0.primitive_rat();
    Poly a = a0.primitive_rat(), b = b0.primitive_rat();
    if (a.is_constant() || b.is_constant()) return Poly(Rational(1));

    // fast paths: one divides the other
    if (divide_exact(b, a)) return a;
    if (divide_exact(a, b)) return b;

    // choose a shared main variable minimizing the larger degree
    std::vector<VarId> va = a.vars_present(), vb = b.vars_present();
    VarId v = -1;
    int best = -1;
    for (VarId w : va) {
        if (std::find(vb.begin(), vb.end(), w) == vb.end()) continue;
        int d = std::max(a.deg(w), b.deg(w));
        if (best < 0 || d < best) best = d, v = w;
    }
    if (v < 0) return Poly(Rational(1));  // disjoint supports

    Poly ca = content_in(a, v), cb = content_in(b, v);
    Poly cont = poly_gcd(ca, cb);
    Poly pa = *divide_exact(a, ca), pb = *divide_exact(b, cb);
    if (pa.deg(v) < pb.deg(v)) std::swap(pa, pb);

    // subresultant PRS
    Poly g(Rational(1)), h(Rational(1));
    Poly result;
    while (true) {
        int d = pa.deg(v) - pb.deg(v);
        Poly r = prem(pa, pb, v);
        if (r.is_zero()) {
            Poly pp = *divide_exact(pb, content_in(pb, v));
            result = pp;
            break;
        }
        if (r.deg(v) == 0) {
            result = Poly(Rational(1));
            break;
        }
        pa = pb;
        Poly denom = g * h.pow(d);
        pb = *divide_exact(r, denom);
        g = pa.lead_coeff_in(v);
        if (d == 0) {
            // h unchanged
        } else if (d == 1) {
            h = g;
        } else {
            h = *divide_exact(g.pow(d), h.pow(d - 1));
        }
    }
    return (cont * result).primitive_rat();
}

}  // namespace fm
