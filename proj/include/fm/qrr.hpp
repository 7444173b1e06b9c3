// Characteristic-class operators that act multiplicatively on cone elements:
// the Euler-twist exponent assembled from Bernoulli numbers and Chern
// characters, and the divisor-shift operator A(mu, y, z). Both are stored as
// exp(E) with E a truncated series in the inverse parameter (1/lambda or
// 1/mu) whose coefficients are Laurent polynomials in z with polynomial
// dependence on y, the divisor symbol and the Chern data.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "fm/paramrat.hpp"
#include "fm/series.hpp"

namespace fm {

// Bernoulli numbers in the convention x/(e^x - 1) = sum_m B_m x^m / m!
// (so B_1 = -1/2); exact, memoized.
Rational bernoulli(int m);

// Stirling-tail constants: s_k(lambda) = s_coefficient(k) * lambda^{-k} with
// s_coefficient(k) = (k-1)! (-1)^k for k >= 1 and 0 for k <= 0.
Rational s_coefficient(int k);
ParamRat s_value(int k, const Poly& lambda);

// Chern characters ch_0..ch_top from a total Chern class list {1, c_1, ...,
// c_rank} via the Newton power-sum recursion (rank = chern.size() - 1).
std::vector<Poly> chern_characters(const std::vector<Poly>& chern, int top);

// A multiplicative operator exp(sum_{n>=1} exponent[n] * param^{-n}),
// truncated at inverse order m_inv. Exponent coefficients are stored as
// rational functions whose denominators are powers of z only.
struct OperatorExpansion {
    enum class Kind { qrr_delta, a_operator };
    Kind kind = Kind::qrr_delta;
    int m_inv = 0;
    // inverse order (>= 1, so the constant term is identically zero) ->
    // coefficient; for a_operator the coefficients involve vars::y() and the
    // divisor symbol vars::xslot(1), both resolved at application time
    std::map<int, ParamRat> exponent;
    // Novikov rescaling: power of the parameter gained per unit of c1(E).d
    // (-1 for the Euler twist, 0 for the divisor shift)
    int rescale_power = 0;

    std::string str() const;
};

// Euler-twist exponent sum_{l,m>=0} s_{l+m-1} (B_m/m!) ch_l (-z)^{m-1} for a
// bundle with Chern character data ch (ch[l] = ch_l, absent entries zero),
// keeping inverse orders 1..m_inv. Throws when some (-z)^{m-1} falls outside
// the window [z_lo, z_hi] (the m = 0 column always needs z_lo <= -1).
OperatorExpansion qrr_delta_exponent(const std::vector<Poly>& ch, int m_inv,
                                     int z_lo, int z_hi);

// Divisor-shift operator for a quotient bundle of rank rank_q:
//   exponent = (rank_q/z) ((mu + y + z/2) log(1 + y/mu) - y)
//            + (zD/z) log(1 + y/mu)
// expanded at mu = infinity, with y = vars::y() and the divisor symbol
// zD = vars::xslot(1) kept formal.
OperatorExpansion a_expand(int rank_q, int m_inv);

// exp of the truncated exponent: inverse orders 0..m_inv, order 0 equal 1
std::map<int, ParamRat> exp_expansion(const OperatorExpansion& op);

// integral pairing of degree keys with c1(E): one weight per base coordinate
// and per k-slot (abelian blocks list every slot, nonabelian blocks one)
struct DegreePairing {
    std::vector<int> base;
    std::vector<std::vector<int>> blocks;

    static DegreePairing zero(const SeriesShape& sh);
    bool fits(const SeriesShape& sh) const;
    int pair(const MultiDeg& d) const;
};

// Multiply F coefficientwise by the operator evaluated at the polynomial
// parameter, then apply the Novikov rescaling param^{rescale_power * c1.d}.
// Every stored key must carry a closed form.
CoeffSeries qrr_apply(const OperatorExpansion& op, const CoeffSeries& F,
                      const Poly& param, const DegreePairing& c1_pairing);

// Divisor-shift application on one abelian slot: per key, y is resolved by
// the k-shift rule to root(level, slot) + k z and the divisor symbol to
// c1_class + (c1.d) z.
CoeffSeries qrr_apply(const OperatorExpansion& op, const CoeffSeries& F,
                      const Poly& param, const DegreePairing& c1_pairing,
                      int level, int slot, const Poly& c1_class);

// Report for the finite-product identity satisfied by the shift-by-kz ratio
// of Euler twists composed with the divisor-shift operator: with H the first
// root variable and mu the inverse parameter,
//
//   exp[ (A-exponent at y = H + kz) - (A-exponent at y = H)
//        + (twist exponent at mu + H + kz) - (twist exponent at mu + H) ]
//     = mu^{-k rank} prod_{c=1..k} prod_eps (mu + H + eps + c z)
//
// as a series in 1/mu, eps running over the Chern roots and the divisor
// symbol resolved to c1. The check compares both sides order by order; the
// product's leading parameter power and the Novikov-rescaling ratio of the
// twists are reported, not asserted.
struct ShiftProductReport {
    std::map<int, ParamRat> difference;  // inverse order -> lhs - rhs
    int orders = 0;                      // compared through this order
    int mu_power = 0;                    // product normalized by mu^{-mu_power}
    std::string rescale_note;
    bool ok = true;
    std::string first_mismatch;  // lowest mismatching order, empty when ok
};

ShiftProductReport shift_product_check(int rank_q,
                                       const std::vector<Poly>& chern_q,
                                       int k, int m_inv);

}  // namespace fm
