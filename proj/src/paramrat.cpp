#include "fm/paramrat.hpp"

#include <cctype>
#include <stdexcept>

namespace fm {

ParamRat ParamRat::of_reduced(Poly num, Poly den) {
    if (den.is_zero()) throw std::domain_error("ParamRat: zero denominator");
    ParamRat r;
    if (num.is_zero()) return r;
    const Rational lc = den.lead_coeff();
    if (!lc.is_one()) {
        Rational inv = lc.inv();
        num = num * inv;
        den = den * inv;
    }
    r.num_ = std::move(num);
    r.den_ = std::move(den);
    return r;
}

ParamRat ParamRat::of(const Poly& num, const Poly& den) {
    if (den.is_zero()) throw std::domain_error("ParamRat: zero denominator");
    ParamRat r;
    if (num.is_zero()) return r;
    Poly n = num, d = den;
    if (!d.is_constant()) {
        Poly g = poly_gcd(n, d);
        if (!g.is_constant()) {
            n = *divide_exact(n, g);
            d = *divide_exact(d, g);
        }
    }
    const Rational lc = d.lead_coeff();
    if (!lc.is_one()) {
        Rational inv = lc.inv();
        n = n * inv;
        d = d * inv;
    }
    r.num_ = n;
    r.den_ = d;
    return r;
}

ParamRat ParamRat::operator-() const {
    ParamRat r = *this;
    r.num_ = -r.num_;
    return r;
}

ParamRat ParamRat::operator+(const ParamRat& o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    if (den_ == o.den_) return of(num_ + o.num_, den_);
    Poly g = poly_gcd(den_, o.den_);
    if (g.is_constant()) return of(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
    Poly da = *divide_exact(den_, g), db = *divide_exact(o.den_, g);
    return of(num_ * db + o.num_ * da, da * o.den_);
}

ParamRat ParamRat::operator-(const ParamRat& o) const { return *this + (-o); }

ParamRat ParamRat::operator*(const ParamRat& o) const {
    if (is_zero() || o.is_zero()) return ParamRat();
    // cross-cancel before multiplying
    Poly an = num_, ad = den_, bn = o.num_, bd = o.den_;
    if (!ad.is_one() && !bn.is_constant()) {
        Poly g = poly_gcd(bn, ad);
        if (!g.is_constant()) {
            bn = *divide_exact(bn, g);
            ad = *divide_exact(ad, g);
        }
    }
    if (!bd.is_one() && !an.is_constant()) {
        Poly g = poly_gcd(an, bd);
        if (!g.is_constant()) {
            an = *divide_exact(an, g);
            bd = *divide_exact(bd, g);
        }
    }
    return of(an * bn, ad * bd);
}

ParamRat ParamRat::inv() const {
    if (is_zero()) throw std::domain_error("ParamRat: inverse of zero");
    return of_reduced(den_, num_);
}

ParamRat ParamRat::operator/(const ParamRat& o) const { return *this * o.inv(); }

ParamRat ParamRat::pow(int k) const {
    if (k == 0) return ParamRat(Rational(1));
    ParamRat base = k > 0 ? *this : inv();
    ParamRat acc(Rational(1));
    for (int i = 0, n = k > 0 ? k : -k; i < n; ++i) acc = acc * base;
    return acc;
}

int ParamRat::cmp(const ParamRat& a, const ParamRat& b) {
    int c = Poly::cmp(a.num_, b.num_);
    if (c != 0) return c;
    return Poly::cmp(a.den_, b.den_);
}

ParamRat ParamRat::subst(VarId v, const Poly& value) const {
    Poly d = den_.subst(v, value);
    if (d.is_zero()) throw std::domain_error("ParamRat: substitution vanishes on denominator");
    return of(num_.subst(v, value), d);
}

ParamRat ParamRat::subst(const std::map<VarId, Poly>& assignment) const {
    Poly d = den_.subst(assignment);
    if (d.is_zero()) throw std::domain_error("ParamRat: substitution vanishes on denominator");
    return of(num_.subst(assignment), d);
}

std::string ParamRat::str() const {
    if (den_.is_one()) return num_.str();
    return "(" + num_.str() + ")/(" + den_.str() + ")";
}

// ---------------------------------------------------------------------------
// small recursive-descent parser for the canonical string rendering

namespace {

struct Parser {
    const std::string& s;
    std::size_t i = 0;

    explicit Parser(const std::string& in) : s(in) {}

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) { ++i; return true; }
        return false;
    }
    [[noreturn]] void fail(const std::string& why) {
        throw std::invalid_argument("ParamRat parse error at " + std::to_string(i) + ": " + why);
    }

    ParamRat expr() {
        ParamRat v = eat('-') ? -term() : term();
        while (true) {
            skip();
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else return v;
        }
    }
    ParamRat term() {
        ParamRat v = factor();
        while (true) {
            skip();
            if (eat('*')) v *= factor();
            else if (eat('/')) v = v / factor();
            else return v;
        }
    }
    ParamRat factor() {
        ParamRat base = atom();
        skip();
        if (eat('^')) {
            skip();
            bool neg = eat('-');
            std::size_t j = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (j == i) fail("expected exponent");
            int k = std::stoi(s.substr(j, i - j));
            return base.pow(neg ? -k : k);
        }
        return base;
    }
    ParamRat atom() {
        skip();
        if (i >= s.size()) fail("unexpected end");
        if (s[i] == '(') {
            ++i;
            ParamRat v = expr();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(s[i]))) {
            std::size_t j = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            return ParamRat(Rational::parse(s.substr(j, i - j)));
        }
        if (std::isalpha(static_cast<unsigned char>(s[i]))) {
            std::size_t j = i;
            while (i < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
                ++i;
            return ParamRat(Poly::var(vars::parse(s.substr(j, i - j))));
        }
        fail("unexpected character");
    }
};

}  // namespace

ParamRat ParamRat::parse(const std::string& in) {
    Parser p(in);
    ParamRat v = p.expr();
    p.skip();
    if (p.i != in.size()) p.fail("trailing input");
    return v;
}

// ---------------------------------------------------------------------------

void FactoredRat::mul_den(const Poly& f, int k) {
    if (k == 0) return;
    if (f.is_zero()) throw std::domain_error("FactoredRat: zero denominator factor");
    Rational c = f.rat_content();
    num = num * c.pow(-k);
    Poly fhat = f.primitive_rat();
    if (fhat.is_one()) return;
    int& m = den[fhat];
    m += k;
    if (m == 0) {
        den.erase(fhat);
    } else if (m < 0) {
        num = num * fhat.pow(-m);
        den.erase(fhat);
    }
}

FactoredRat FactoredRat::operator*(const FactoredRat& o) const {
    FactoredRat r;
    r.num = num * o.num;
    r.den = den;
    for (auto& [f, m] : o.den) r.den[f] += m;
    return r;
}

FactoredRat FactoredRat::operator+(const FactoredRat& o) const {
    // common denominator holds each factor at its maximal multiplicity
    FactoredRat r;
    for (auto& [f, m] : den) r.den[f] = m;
    for (auto& [f, m] : o.den) {
        int& slot = r.den[f];
        slot = std::max(slot, m);
    }
    Poly ca(Rational(1)), cb(Rational(1));
    for (auto& [f, big] : r.den) {
        auto ita = den.find(f);
        int ma = ita == den.end() ? 0 : ita->second;
        auto itb = o.den.find(f);
        int mb = itb == o.den.end() ? 0 : itb->second;
        if (big > ma) ca = ca * f.pow(big - ma);
        if (big > mb) cb = cb * f.pow(big - mb);
    }
    r.num = num * ca + o.num * cb;
    if (r.num.is_zero()) r.den.clear();
    return r;
}

void FactoredRat::reduce() {
    if (num.is_zero()) {
        den.clear();
        return;
    }
    for (auto it = den.begin(); it != den.end();) {
        int m = it->second;
        while (m > 0) {
            auto q = divide_exact(num, it->first);
            if (!q) break;
            num = *q;
            --m;
        }
        if (m == 0) {
            it = den.erase(it);
        } else {
            it->second = m;
            ++it;
        }
    }
}

ParamRat FactoredRat::to_paramrat() const {
    Poly n = num;
    if (n.is_zero()) return ParamRat();
    Poly d(Rational(1));
    for (auto& [f, mult] : den) {
        int m = mult;
        while (m > 0) {
            auto q = divide_exact(n, f);
            if (!q) break;
            n = *q;
            --m;
        }
        if (m > 0) d = d * f.pow(m);
    }
    return ParamRat::of_reduced(n, d);
}

}  // namespace fm
