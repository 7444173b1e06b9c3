#include "fm/qrr.hpp"

#include <functional>
#include <stdexcept>
#include <utility>

#include "fm/vars.hpp"

namespace fm {

namespace {

Poly zpoly() { return Poly::var(vars::z()); }

Rational factorial(int n) {
    Rational r(1);
    for (int i = 2; i <= n; ++i) r *= Rational(i);
    return r;
}

// binomial(-n, j) = (-1)^j binomial(n + j - 1, j)
Rational binom_neg(int n, int j) {
    Rational r(1);
    for (int i = 0; i < j; ++i) r = r * Rational(n + i) / Rational(i + 1);
    return (j % 2) ? -r : r;
}

// series in the inverse parameter: order -> coefficient, absent means zero
using InvSeries = std::map<int, ParamRat>;

void add_term(InvSeries& s, int n, const ParamRat& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = s.emplace(n, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) s.erase(it);
    }
}

InvSeries mul_trunc(const InvSeries& a, const InvSeries& b, int m_inv) {
    InvSeries out;
    for (const auto& [i, ci] : a) {
        if (i > m_inv) break;
        for (const auto& [j, cj] : b) {
            if (i + j > m_inv) break;
            add_term(out, i + j, ci * cj);
        }
    }
    return out;
}

// exp of a series with no constant part, truncated at m_inv
InvSeries exp_trunc(const InvSeries& e, int m_inv) {
    if (!e.empty() && e.begin()->first < 1)
        throw std::invalid_argument("exp_trunc: exponent has a constant part");
    InvSeries out{{0, ParamRat(1)}};
    InvSeries p{{0, ParamRat(1)}};
    Rational fact(1);
    for (int j = 1; j <= m_inv; ++j) {
        p = mul_trunc(p, e, m_inv);
        if (p.empty()) break;
        fact *= Rational(j);
        Rational inv_fact = fact.inv();
        for (const auto& [n, c] : p) add_term(out, n, c * inv_fact);
    }
    return out;
}

// 1/mu-expansion of sum_n coeff[n] (mu + X)^{-n}, truncated at m_inv
InvSeries expand_shifted_inverse(const InvSeries& coeff, const Poly& X, int m_inv) {
    InvSeries out;
    for (const auto& [n, c] : coeff) {
        Poly xp(Rational(1));
        for (int j = 0; n + j <= m_inv; ++j) {
            add_term(out, n + j, c * ParamRat(xp) * binom_neg(n, j));
            xp = xp * X;
        }
    }
    return out;
}

// total Chern polynomial prod_eps (x + eps) = sum_j c_j x^{rank - j}
Poly chern_poly(const std::vector<Poly>& c, const Poly& x) {
    Poly out;
    Poly xp(Rational(1));
    for (int j = int(c.size()) - 1; j >= 0; --j) {
        out = out + c[j] * xp;
        xp = xp * x;
    }
    return out;
}

// per-key multiplier application shared by both qrr_apply overloads
CoeffSeries apply_multiplier(
    const OperatorExpansion& op, const CoeffSeries& F, const Poly& param,
    const DegreePairing& c1_pairing,
    const std::function<ParamRat(const ParamRat&, const MultiDeg&)>& resolve) {
    if (!c1_pairing.fits(F.shape))
        throw std::invalid_argument("qrr_apply: pairing does not match the series shape");
    InvSeries ex = exp_trunc(op.exponent, op.m_inv);
    CoeffSeries out = CoeffSeries::zero(F.shape, F.ring, F.trunc);
    out.t_exponential = F.t_exponential;
    for (const auto& [d, cl] : F.closed) {
        ParamRat mult;
        for (const auto& [n, c] : ex) {
            ParamRat v = resolve(c, d);
            if (v.is_zero()) continue;
            if (n > 0) v = v * ParamRat::of(Poly(Rational(1)), param.pow(n));
            mult += v;
        }
        int e = op.rescale_power * c1_pairing.pair(d);
        if (e > 0) mult = mult * ParamRat(param.pow(e));
        if (e < 0) mult = mult * ParamRat::of(Poly(Rational(1)), param.pow(-e));
        out.set_closed(d, cl * mult);
    }
    for (const auto& [d, v] : F.coeff)
        if (!F.has_closed(d) && !v.is_zero())
            throw std::runtime_error("qrr_apply: closed form required at " + d.str());
    out.expand_from_closed();
    return out;
}

}  // namespace

Rational bernoulli(int m) {
    if (m < 0) throw std::invalid_argument("bernoulli: negative index");
    static std::vector<Rational> cache{Rational(1)};
    while (int(cache.size()) <= m) {
        // 0 = sum_{j<=n} C(n+1, j) B_j solved for B_n
        int n = int(cache.size());
        Rational acc(0);
        Rational binom(1);
        for (int j = 0; j < n; ++j) {
            if (j > 0) binom = binom * Rational(n + 2 - j) / Rational(j);
            acc += binom * cache[j];
        }
        cache.push_back(-acc / Rational(n + 1));
    }
    return cache[m];
}

Rational s_coefficient(int k) {
    if (k <= 0) return Rational(0);
    Rational r = factorial(k - 1);
    return (k % 2) ? -r : r;
}

ParamRat s_value(int k, const Poly& lambda) {
    if (k <= 0) return ParamRat();
    return ParamRat::of(Poly(s_coefficient(k)), lambda.pow(k));
}

std::vector<Poly> chern_characters(const std::vector<Poly>& chern, int top) {
    if (chern.empty() || !chern[0].is_one())
        throw std::invalid_argument("chern_characters: list must start with 1");
    if (top < 0) throw std::invalid_argument("chern_characters: negative order");
    int rank = int(chern.size()) - 1;
    // Newton: p_l = sum_{j<l} (-1)^{j-1} c_j p_{l-j} + (-1)^{l-1} l c_l
    std::vector<Poly> p(top + 1);
    p[0] = Poly(Rational(rank));
    for (int l = 1; l <= top; ++l) {
        Poly acc;
        for (int j = 1; j <= l && j <= rank; ++j) {
            Poly t = chern[j] * (j == l ? Poly(Rational(l)) : p[l - j]);
            acc = (j % 2) ? acc + t : acc - t;
        }
        p[l] = acc;
    }
    std::vector<Poly> ch(top + 1);
    ch[0] = p[0];
    Rational fact(1);
    for (int l = 1; l <= top; ++l) {
        fact *= Rational(l);
        ch[l] = p[l] * fact.inv();
    }
    return ch;
}

std::string OperatorExpansion::str() const {
    std::string s = kind == Kind::qrr_delta ? "qrr_delta" : "a_operator";
    s += "[m_inv=" + std::to_string(m_inv) +
         ", rescale=" + std::to_string(rescale_power) + "]";
    for (const auto& [n, c] : exponent)
        s += "\n  ^-" + std::to_string(n) + ": " + c.str();
    return s;
}

OperatorExpansion qrr_delta_exponent(const std::vector<Poly>& ch, int m_inv,
                                     int z_lo, int z_hi) {
    if (m_inv < 0) throw std::invalid_argument("qrr_delta_exponent: negative order");
    OperatorExpansion op;
    op.kind = OperatorExpansion::Kind::qrr_delta;
    op.m_inv = m_inv;
    op.rescale_power = -1;
    Poly z = zpoly();
    for (int n = 1; n <= m_inv; ++n) {
        ParamRat acc;
        for (int m = 0; m <= n + 1; ++m) {
            int l = n + 1 - m;
            if (l >= int(ch.size()) || ch[l].is_zero()) continue;
            Rational c = s_coefficient(n) * bernoulli(m) / factorial(m);
            if (m % 2 == 0) c = -c;  // the (-z)^{m-1} sign
            if (c.is_zero()) continue;
            if (m - 1 < z_lo || m - 1 > z_hi)
                throw std::runtime_error(
                    "qrr_delta_exponent: z window cannot hold z^" + std::to_string(m - 1));
            if (m == 0)
                acc += ParamRat::of(ch[l] * c, z);
            else
                acc += ParamRat(ch[l] * c * z.pow(m - 1));
        }
        if (!acc.is_zero()) op.exponent[n] = acc;
    }
    return op;
}

OperatorExpansion a_expand(int rank_q, int m_inv) {
    if (rank_q < 0) throw std::invalid_argument("a_expand: negative rank");
    if (m_inv < 0) throw std::invalid_argument("a_expand: negative order");
    OperatorExpansion op;
    op.kind = OperatorExpansion::Kind::a_operator;
    op.m_inv = m_inv;
    op.rescale_power = 0;
    Poly y = Poly::var(vars::y());
    Poly z = zpoly();
    Poly dq = Poly::var(vars::xslot(1));
    Rational rho(rank_q);
    for (int n = 1; n <= m_inv; ++n) {
        // order-n coefficient of (rho/z)((mu+y+z/2) log(1+y/mu) - y)
        //   + (dq/z) log(1+y/mu), over the common denominator z
        Rational sgn = (n % 2) ? Rational(1) : Rational(-1);  // (-1)^{n+1}
        Poly num = (y.pow(n + 1) * (-sgn / Rational(n + 1)) +
                    (y + z * Rational(1, 2)) * y.pow(n) * (sgn / Rational(n))) *
                       rho +
                   dq * y.pow(n) * (sgn / Rational(n));
        if (num.is_zero()) continue;
        op.exponent[n] = ParamRat::of(num, z);
    }
    return op;
}

std::map<int, ParamRat> exp_expansion(const OperatorExpansion& op) {
    return exp_trunc(op.exponent, op.m_inv);
}

DegreePairing DegreePairing::zero(const SeriesShape& sh) {
    DegreePairing p;
    p.base.assign(sh.base_rank, 0);
    for (int m = 1; m <= sh.levels(); ++m)
        p.blocks.emplace_back(sh.block_size(m), 0);
    return p;
}

bool DegreePairing::fits(const SeriesShape& sh) const {
    if (int(base.size()) != sh.base_rank) return false;
    if (int(blocks.size()) != sh.levels()) return false;
    for (int m = 1; m <= sh.levels(); ++m)
        if (int(blocks[m - 1].size()) != sh.block_size(m)) return false;
    return true;
}

int DegreePairing::pair(const MultiDeg& d) const {
    int acc = 0;
    for (size_t i = 0; i < base.size() && i < d.d_B.size(); ++i)
        acc += base[i] * d.d_B[i];
    for (size_t m = 0; m < blocks.size() && m < d.k.size(); ++m)
        for (size_t i = 0; i < blocks[m].size() && i < d.k[m].size(); ++i)
            acc += blocks[m][i] * d.k[m][i];
    return acc;
}

CoeffSeries qrr_apply(const OperatorExpansion& op, const CoeffSeries& F,
                      const Poly& param, const DegreePairing& c1_pairing) {
    return apply_multiplier(op, F, param, c1_pairing,
                            [](const ParamRat& c, const MultiDeg&) { return c; });
}

CoeffSeries qrr_apply(const OperatorExpansion& op, const CoeffSeries& F,
                      const Poly& param, const DegreePairing& c1_pairing,
                      int level, int slot, const Poly& c1_class) {
    if (op.kind != OperatorExpansion::Kind::a_operator)
        throw std::invalid_argument("qrr_apply: slot form needs a divisor-shift operator");
    if (F.shape.side != Side::abelian)
        throw std::invalid_argument("qrr_apply: slot form needs an abelian series");
    if (level < 1 || level > F.shape.levels() || slot < 1 ||
        slot > F.shape.block_size(level))
        throw std::invalid_argument("qrr_apply: slot out of range");
    Poly z = zpoly();
    Poly root = Poly::var(vars::root(level, slot));
    return apply_multiplier(
        op, F, param, c1_pairing,
        [&](const ParamRat& c, const MultiDeg& d) {
            int k = d.k[level - 1][slot - 1];
            return c.subst({{vars::y(), root + z * Rational(k)},
                            {vars::xslot(1), c1_class + z * Rational(c1_pairing.pair(d))}});
        });
}

ShiftProductReport shift_product_check(int rank_q,
                                       const std::vector<Poly>& chern_q,
                                       int k, int m_inv) {
    if (rank_q < 0 || k < 0 || m_inv < 0)
        throw std::invalid_argument("shift_product_check: negative argument");
    if (int(chern_q.size()) != rank_q + 1 || chern_q.empty() || !chern_q[0].is_one())
        throw std::invalid_argument(
            "shift_product_check: Chern list must be {1, c_1, ..., c_rank}");
    Poly H = Poly::var(vars::root(1, 1));
    Poly z = zpoly();
    Poly X1 = H + z * Rational(k);
    Poly c1 = rank_q >= 1 ? chern_q[1] : Poly();

    // divisor-shift ratio: exponent at y = H + kz minus exponent at y = H,
    // with the divisor symbol resolved to c1
    OperatorExpansion A = a_expand(rank_q, m_inv);
    std::map<VarId, Poly> at1{{vars::y(), X1}, {vars::xslot(1), c1}};
    std::map<VarId, Poly> at0{{vars::y(), H}, {vars::xslot(1), c1}};
    InvSeries E;
    for (const auto& [n, c] : A.exponent) add_term(E, n, c.subst(at1) - c.subst(at0));

    // Euler-twist ratio: parameter mu + H + kz against mu + H
    auto ch = chern_characters(chern_q, m_inv + 1);
    OperatorExpansion D = qrr_delta_exponent(ch, m_inv, -1, m_inv);
    for (const auto& [n, c] : expand_shifted_inverse(D.exponent, X1, m_inv))
        add_term(E, n, c);
    for (const auto& [n, c] : expand_shifted_inverse(D.exponent, H, m_inv))
        add_term(E, n, -c);
    InvSeries lhs = exp_trunc(E, m_inv);

    // the finite product, normalized by its leading parameter power
    Poly mu = Poly::var(vars::mu());
    Poly P(Rational(1));
    for (int c = 1; c <= k; ++c) P = P * chern_poly(chern_q, mu + H + z * Rational(c));
    auto by_mu = P.collect(vars::mu());

    ShiftProductReport rep;
    rep.orders = m_inv;
    rep.mu_power = k * rank_q;
    rep.rescale_note =
        "rescaling ratio ((mu+H)/(mu+H+" + std::to_string(k) +
        "z))^(c1.d) per Novikov degree d: surfaced, not asserted";
    for (int n = 0; n <= m_inv; ++n) {
        ParamRat r;
        if (auto it = lhs.find(n); it != lhs.end()) r = it->second;
        if (auto it = by_mu.find(rep.mu_power - n); it != by_mu.end())
            r -= ParamRat(it->second);
        if (!r.is_zero()) {
            rep.difference[n] = r;
            if (rep.ok) {
                rep.ok = false;
                rep.first_mismatch = "order mu^-" + std::to_string(n);
            }
        }
    }
    return rep;
}

}  // namespace fm
