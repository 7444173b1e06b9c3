// Sparse multivariate polynomials over Rational, with exact division, content
// extraction and subresultant gcd. Monomial order is lex over the fixed
// variable order of vars.hpp (earlier variable = more significant).
#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fm/rational.hpp"
#include "fm/vars.hpp"

namespace fm {

struct Monomial {
    // sorted by VarId, exponents > 0 only
    std::vector<std::pair<VarId, int>> e;

    static Monomial one() { return {}; }
    static Monomial var(VarId v, int exp = 1);

    bool is_one() const { return e.empty(); }
    int total_deg() const;
    int deg(VarId v) const;

    Monomial operator*(const Monomial& o) const;
    // componentwise quotient, or nullopt when not divisible
    std::optional<Monomial> divide(const Monomial& o) const;
    Monomial pow(int k) const;

    bool operator==(const Monomial& o) const { return e == o.e; }
    std::string str() const;
};

// lex: compare exponents variable-by-variable in increasing VarId; higher
// exponent on the first differing variable wins.
struct MonoLex {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

class Poly {
public:
    using Terms = std::map<Monomial, Rational, MonoLex>;

    Poly() = default;
    explicit Poly(const Rational& c);
    explicit Poly(long c) : Poly(Rational(c)) {}
    static Poly var(VarId v, int exp = 1);
    static Poly term(const Rational& c, const Monomial& m);

    bool is_zero() const { return t_.empty(); }
    bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.is_one()); }
    Rational constant_value() const;  // requires is_constant
    bool is_one() const { return is_constant() && constant_value().is_one(); }

    const Terms& terms() const { return t_; }
    std::size_t term_count() const { return t_.size(); }

    int total_deg() const;
    int deg(VarId v) const;
    std::vector<VarId> vars_present() const;
    bool depends_on(VarId v) const { return deg(v) > 0; }

    // leading (greatest) lex term
    const Monomial& lead_mono() const;
    const Rational& lead_coeff() const;

    Poly operator-() const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    Poly operator*(const Poly& o) const;
    Poly operator*(const Rational& c) const;
    Poly pow(int k) const;

    bool operator==(const Poly& o) const { return t_ == o.t_; }
    bool operator!=(const Poly& o) const { return !(t_ == o.t_); }

    // total order compatible with ==, for use as map key (lex on term lists)
    static int cmp(const Poly& a, const Poly& b);
    bool operator<(const Poly& o) const { return cmp(*this, o) < 0; }

    void add_term(const Rational& c, const Monomial& m);

    // univariate view in v: exponent -> coefficient polynomial
    std::map<int, Poly> collect(VarId v) const;
    Poly coeff_of(VarId v, int k) const;
    // leading coefficient w.r.t. v
    Poly lead_coeff_in(VarId v) const { return coeff_of(v, deg(v)); }

    Poly subst(VarId v, const Poly& value) const;
    Poly subst(const std::map<VarId, Poly>& assignment) const;

    // rational content: c with this/c integer-coefficient, coprime, positive
    // lex-leading coefficient; zero polynomial reports content 0
    Rational rat_content() const;
    Poly primitive_rat() const;  // this / rat_content (zero stays zero)

    std::string str() const;

private:
    Terms t_;
};

inline Poly operator*(const Rational& c, const Poly& p) { return p * c; }

// exact quotient a/b, or nullopt when b does not divide a
std::optional<Poly> divide_exact(const Poly& a, const Poly& b);

// gcd up to normalization: result is primitive with positive leading
// coefficient; gcd(0,0) = 0; constants give 1
Poly poly_gcd(const Poly& a, const Poly& b);

}  // namespace fm
