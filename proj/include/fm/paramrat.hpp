// Exact rational functions in the registered variables, kept in canonical
// form at all times: gcd-reduced, denominator monic w.r.t. the lex-leading
// coefficient, zero represented as 0/1. Equality is representation equality.
//
// FactoredRat is the construction-time companion: a numerator polynomial with
// an explicitly factored denominator (factor -> multiplicity). Series
// constructors build with it (all their denominators are known products of
// linear forms) and reduce by trial division, avoiding general gcds.
#pragma once

#include <map>
#include <optional>
#include <string>

#include "fm/poly.hpp"

namespace fm {

class ParamRat {
public:
    ParamRat() : num_(), den_(Rational(1)) {}
    explicit ParamRat(const Rational& c) : num_(c), den_(Rational(1)) {}
    explicit ParamRat(long c) : num_(Rational(c)), den_(Rational(1)) {}
    explicit ParamRat(const Poly& p) : num_(p), den_(Rational(1)) {}

    // normalize_rational: the canonicalizing constructor
    static ParamRat of(const Poly& num, const Poly& den);

    // trusted constructor for inputs already known coprime (e.g. after trial
    // division against irreducible factors): skips the gcd, only rescales so
    // the denominator is monic
    static ParamRat of_reduced(Poly num, Poly den);

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_polynomial() const { return den_.is_one(); }
    bool is_constant() const { return num_.is_constant() && den_.is_one(); }
    Rational constant_value() const { return num_.constant_value(); }
    bool depends_on(VarId v) const { return num_.depends_on(v) || den_.depends_on(v); }

    ParamRat operator-() const;
    ParamRat operator+(const ParamRat& o) const;
    ParamRat operator-(const ParamRat& o) const;
    ParamRat operator*(const ParamRat& o) const;
    ParamRat operator/(const ParamRat& o) const;
    ParamRat& operator+=(const ParamRat& o) { return *this = *this + o; }
    ParamRat& operator-=(const ParamRat& o) { return *this = *this - o; }
    ParamRat& operator*=(const ParamRat& o) { return *this = *this * o; }
    ParamRat operator*(const Rational& c) const {
        return c.is_zero() ? ParamRat() : of_reduced(num_ * c, den_);
    }
    ParamRat inv() const;
    ParamRat pow(int k) const;

    bool operator==(const ParamRat& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const ParamRat& o) const { return !(*this == o); }
    static int cmp(const ParamRat& a, const ParamRat& b);
    bool operator<(const ParamRat& o) const { return cmp(*this, o) < 0; }

    // substitute a polynomial value; throws if the denominator vanishes
    ParamRat subst(VarId v, const Poly& value) const;
    ParamRat subst(const std::map<VarId, Poly>& assignment) const;

    std::string str() const;  // "num" or "(num)/(den)"
    static ParamRat parse(const std::string& s);

private:
    Poly num_, den_;
};

// canonicalizing constructor under its conventional free-function name
inline ParamRat normalize_rational(const Poly& num, const Poly& den) {
    return ParamRat::of(num, den);
}

struct FactoredRat {
    Poly num;
    // canonical factor (primitive integer coefficients, positive lex-leading
    // coefficient, non-constant) -> multiplicity >= 1
    std::map<Poly, int> den;

    FactoredRat() : num(Rational(1)) {}
    explicit FactoredRat(const Poly& p) : num(p) {}
    explicit FactoredRat(const Rational& c) : num(c) {}

    bool is_zero() const { return num.is_zero(); }

    void mul_num(const Poly& p) { num = num * p; }
    void mul_num(const Rational& c) { num = num * c; }
    // multiply by 1/f^k (k may be negative to push a factor to the numerator)
    void mul_den(const Poly& f, int k = 1);
    FactoredRat operator*(const FactoredRat& o) const;
    FactoredRat operator+(const FactoredRat& o) const;

    // cancel stored factors that divide the numerator, in place
    void reduce();
    // reduce by trial division against the stored factors and normalize
    ParamRat to_paramrat() const;
};

}  // namespace fm
