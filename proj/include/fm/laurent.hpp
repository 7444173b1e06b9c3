// Truncated Laurent objects in z over an arbitrary exact coefficient type.
//
// A ZLaurent is a finite set of (exponent, coefficient) pairs plus two
// optional truncation marks. When truncated below at `lo`, exponents < lo
// are unknown (they were dropped at some point); likewise above at `hi`.
// An untruncated side is exact: absent coefficients there are genuinely zero.
// Arithmetic propagates the marks so that every stored coefficient of a
// result is guaranteed correct:
//
//   (A + O(z^{<a})) * (B + O(z^{<b}))  has unknown tail below
//   max(b + maxexp A, a + maxexp B, a + b), and symmetrically above.
//
// The coefficient type needs: default ctor == zero, +, unary -, *, ==,
// is_zero(), str().
#pragma once

#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "fm/rational.hpp"

namespace fm {

template <class C>
class ZLaurent {
public:
    ZLaurent() = default;

    static ZLaurent term(int k, C v) {
        ZLaurent r;
        if (!v.is_zero()) r.c_.emplace(k, std::move(v));
        return r;
    }

    bool is_zero() const { return c_.empty(); }
    bool truncated() const { return lo_.has_value() || hi_.has_value(); }
    std::optional<int> lo_cut() const { return lo_; }
    std::optional<int> hi_cut() const { return hi_; }
    const std::map<int, C>& terms() const { return c_; }

    int min_exp() const { return c_.empty() ? 0 : c_.begin()->first; }
    int max_exp() const { return c_.empty() ? 0 : c_.rbegin()->first; }

    bool known(int k) const {
        if (lo_ && k < *lo_) return false;
        if (hi_ && k > *hi_) return false;
        return true;
    }

    // coefficient of z^k; throws if k lies in a dropped region
    C coeff(int k) const {
        if (!known(k)) throw std::out_of_range("ZLaurent: coefficient beyond truncation");
        auto it = c_.find(k);
        return it == c_.end() ? C() : it->second;
    }

    void add_term(int k, const C& v) {
        if (!known(k) || v.is_zero()) return;
        auto [it, fresh] = c_.emplace(k, v);
        if (!fresh) {
            it->second = it->second + v;
            if (it->second.is_zero()) c_.erase(it);
        }
    }

    // enforce a window; marks the sides where something could now be missing
    void truncate(int lo, int hi) {
        if (!lo_ || lo > *lo_) lo_ = lo;
        if (!hi_ || hi < *hi_) hi_ = hi;
        for (auto it = c_.begin(); it != c_.end();) {
            if (it->first < *lo_ || it->first > *hi_) it = c_.erase(it);
            else ++it;
        }
    }

    ZLaurent operator-() const {
        ZLaurent r = *this;
        for (auto& [k, v] : r.c_) v = -v;
        return r;
    }

    ZLaurent operator+(const ZLaurent& o) const {
        ZLaurent r;
        r.lo_ = max_opt(lo_, o.lo_);
        r.hi_ = min_opt(hi_, o.hi_);
        for (auto& [k, v] : c_) r.add_term(k, v);
        for (auto& [k, v] : o.c_) r.add_term(k, v);
        return r;
    }
    ZLaurent operator-(const ZLaurent& o) const { return *this + (-o); }
    ZLaurent& operator+=(const ZLaurent& o) { return *this = *this + o; }
    ZLaurent& operator-=(const ZLaurent& o) { return *this = *this - o; }

    ZLaurent operator*(const ZLaurent& o) const {
        ZLaurent r;
        if (c_.empty() && !truncated()) return r;
        if (o.c_.empty() && !o.truncated()) return r;
        if (lo_ || o.lo_) {
            long best = std::numeric_limits<long>::min();
            if (o.lo_) best = std::max(best, long(*o.lo_) + (c_.empty() ? *lo_ : max_exp()));
            if (lo_) best = std::max(best, long(*lo_) + (o.c_.empty() ? *o.lo_ : o.max_exp()));
            if (lo_ && o.lo_) best = std::max(best, long(*lo_) + *o.lo_);
            r.lo_ = int(best);
        }
        if (hi_ || o.hi_) {
            long best = std::numeric_limits<long>::max();
            if (o.hi_) best = std::min(best, long(*o.hi_) + (c_.empty() ? *hi_ : min_exp()));
            if (hi_) best = std::min(best, long(*hi_) + (o.c_.empty() ? *o.hi_ : o.min_exp()));
            if (hi_ && o.hi_) best = std::min(best, long(*hi_) + *o.hi_);
            r.hi_ = int(best);
        }
        for (auto& [ka, va] : c_)
            for (auto& [kb, vb] : o.c_) r.add_term(ka + kb, va * vb);
        return r;
    }
    ZLaurent& operator*=(const ZLaurent& o) { return *this = *this * o; }

    ZLaurent scale(const C& s) const {
        ZLaurent r;
        r.lo_ = lo_;
        r.hi_ = hi_;
        for (auto& [k, v] : c_) r.add_term(k, v * s);
        return r;
    }

    // multiply by z^d
    ZLaurent shift(int d) const {
        ZLaurent r;
        if (lo_) r.lo_ = *lo_ + d;
        if (hi_) r.hi_ = *hi_ + d;
        for (auto& [k, v] : c_) r.c_.emplace(k + d, v);
        return r;
    }

    // apply f to every coefficient (e.g. restriction to a fixed point)
    template <class F>
    auto map(F f) const -> ZLaurent<decltype(f(std::declval<const C&>()))> {
        ZLaurent<decltype(f(std::declval<const C&>()))> r;
        if (lo_) r.set_lo(*lo_);
        if (hi_) r.set_hi(*hi_);
        for (auto& [k, v] : c_) r.add_term(k, f(v));
        return r;
    }

    void set_lo(int lo) { lo_ = lo; }
    void set_hi(int hi) { hi_ = hi; }

    bool operator==(const ZLaurent& o) const {
        return c_ == o.c_ && lo_ == o.lo_ && hi_ == o.hi_;
    }
    bool operator!=(const ZLaurent& o) const { return !(*this == o); }

    // first exponent (descending) where the two disagree on commonly-known
    // coefficients; nullopt when they agree everywhere both are known
    static std::optional<int> first_difference(const ZLaurent& a, const ZLaurent& b) {
        int top = std::numeric_limits<int>::min();
        int bot = std::numeric_limits<int>::max();
        for (auto& s : {a, b}) {
            if (!s.c_.empty()) {
                top = std::max(top, s.max_exp());
                bot = std::min(bot, s.min_exp());
            }
        }
        if (top < bot) return std::nullopt;  // both empty
        for (int k = top; k >= bot; --k) {
            if (!a.known(k) || !b.known(k)) continue;
            if (!(a.coeff(k) == b.coeff(k))) return k;
        }
        return std::nullopt;
    }

    std::string str() const {
        if (c_.empty() && !truncated()) return "0";
        std::string out;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            if (!out.empty()) out += " + ";
            out += "(" + it->second.str() + ")*z^" + std::to_string(it->first);
        }
        if (lo_) out += (out.empty() ? "" : " + ") + std::string("O(z^<") + std::to_string(*lo_) + ")";
        if (hi_) out += " + O(z^>" + std::to_string(*hi_) + ")";
        return out.empty() ? "0" : out;
    }

private:
    static std::optional<int> max_opt(std::optional<int> a, std::optional<int> b) {
        if (!a) return b;
        if (!b) return a;
        return std::max(*a, *b);
    }
    static std::optional<int> min_opt(std::optional<int> a, std::optional<int> b) {
        if (!a) return b;
        if (!b) return a;
        return std::min(*a, *b);
    }

    std::map<int, C> c_;
    std::optional<int> lo_, hi_;
};

// Laurent expansion of (X + c z)^(-e) where X is nilpotent. `xpowers` holds
// X^0, X^1, ... up to (exclusive) the first vanishing power; c must be
// nonzero. Exact unless the window [lo, hi] cuts terms off.
template <class C>
ZLaurent<C> expand_nilpotent_inverse(const std::vector<C>& xpowers, const Rational& c, int e,
                                     int lo, int hi) {
    if (c.is_zero()) throw std::domain_error("expand_nilpotent_inverse: zero z-coefficient");
    if (xpowers.empty()) throw std::invalid_argument("expand_nilpotent_inverse: need X^0");
    ZLaurent<C> r;
    bool cut = false;
    for (std::size_t j = 0; j < xpowers.size(); ++j) {
        Rational coef = binomial(Rational(-e), long(j)) * c.pow(-e - long(j));
        if (coef.is_zero()) continue;  // happens when -e >= 0 and j > -e
        int k = -e - int(j);
        if (k < lo || k > hi) {
            cut = true;
            continue;
        }
        r.add_term(k, xpowers[j] * coef);
    }
    if (cut) r.set_lo(lo);
    return r;
}

}  // namespace fm
