#include "fm/schur.hpp"

#include <algorithm>
#include <stdexcept>

namespace fm {

Partition Partition::of(std::vector<int> p) {
    for (std::size_t i = 1; i < p.size(); ++i)
        if (p[i] > p[i - 1]) throw std::invalid_argument("Partition: parts must be weakly decreasing");
    while (!p.empty() && p.back() == 0) p.pop_back();
    if (!p.empty() && p.back() < 0) throw std::invalid_argument("Partition: negative part");
    Partition r;
    r.parts = std::move(p);
    return r;
}

int Partition::weight() const {
    int w = 0;
    for (int x : parts) w += x;
    return w;
}

bool Partition::fits(int rows, int cols) const {
    if (length() > rows) return false;
    return parts.empty() || parts[0] <= cols;
}

bool Partition::operator<(const Partition& o) const {
    if (weight() != o.weight()) return weight() < o.weight();
    return parts < o.parts;
}

std::string Partition::str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(parts[i]);
    }
    return s + ")";
}

Partition Partition::parse(const std::string& s) {
    if (s.size() < 2 || s.front() != '(' || s.back() != ')')
        throw std::invalid_argument("Partition: expected (a,b,...)");
    std::vector<int> p;
    std::size_t i = 1;
    while (i < s.size() - 1) {
        std::size_t j = s.find(',', i);
        if (j == std::string::npos || j > s.size() - 1) j = s.size() - 1;
        p.push_back(std::stoi(s.substr(i, j - i)));
        i = j + 1;
    }
    return of(std::move(p));
}

Poly complete_homog(int k, const std::vector<VarId>& roots) {
    if (k < 0) return Poly();
    if (k == 0) return Poly(Rational(1));
    if (roots.empty()) return Poly();
    // h_k(x1..xn) = sum over weakly increasing index words of length k
    Poly acc;
    // iterate over compositions of k into n nonnegative parts
    std::vector<int> comp(roots.size(), 0);
    comp[0] = k;
    while (true) {
        Monomial m = Monomial::one();
        for (std::size_t i = 0; i < roots.size(); ++i)
            if (comp[i] > 0) m = m * Monomial::var(roots[i], comp[i]);
        acc.add_term(Rational(1), m);
        // next composition in colex order
        std::size_t i = 0;
        while (i + 1 < comp.size() && comp[i] == 0) ++i;
        if (i + 1 >= comp.size()) break;
        int head = comp[i];
        comp[i] = 0;
        comp[i + 1] += 1;
        comp[0] = head - 1;
    }
    return acc;
}

Poly schur_poly(const Partition& lambda, const std::vector<VarId>& roots) {
    const int r = int(roots.size());
    const int l = lambda.length();
    if (l > r) return Poly();
    if (l == 0) return Poly(Rational(1));
    // Jacobi-Trudi: det(h_{lambda_i - i + j})_{1<=i,j<=l}
    std::vector<std::vector<Poly>> m(l, std::vector<Poly>(l));
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) m[i][j] = complete_homog(lambda.part(i) - i + j, roots);
    // cofactor expansion (l <= MAX_SLOT, tiny)
    std::vector<int> cols(l);
    for (int j = 0; j < l; ++j) cols[j] = j;
    struct Det {
        const std::vector<std::vector<Poly>>& m;
        Poly run(int row, std::vector<int>& cols) {
            if (cols.empty()) return Poly(Rational(1));
            Poly acc;
            for (std::size_t k = 0; k < cols.size(); ++k) {
                int c = cols[k];
                if (m[row][c].is_zero()) continue;
                std::vector<int> rest;
                rest.reserve(cols.size() - 1);
                for (std::size_t t = 0; t < cols.size(); ++t)
                    if (t != k) rest.push_back(cols[t]);
                Poly sub = run(row + 1, rest);
                Poly term = m[row][c] * sub;
                if (k % 2) acc -= term;
                else acc += term;
            }
            return acc;
        }
    } det{m};
    return det.run(0, cols);
}

namespace {

// exponent vector of the lex-greatest monomial of p in the root variables
// (other variables ignored), together with its full coefficient polynomial
std::pair<std::vector<int>, Poly> lead_in_roots(const Poly& p, const std::vector<VarId>& roots) {
    std::vector<int> best;
    bool have = false;
    for (auto& [m, c] : p.terms()) {
        std::vector<int> e(roots.size(), 0);
        for (std::size_t i = 0; i < roots.size(); ++i) e[i] = m.deg(roots[i]);
        if (!have || e > best) {
            best = e;
            have = true;
        }
    }
    if (!have) return {std::vector<int>(roots.size(), 0), Poly()};
    // collect the coefficient of the root-monomial `best`
    auto is_a_root = [&](VarId v) {
        for (VarId r : roots)
            if (r == v) return true;
        return false;
    };
    Poly coef;
    for (auto& [m, c] : p.terms()) {
        bool match = true;
        for (std::size_t i = 0; i < roots.size(); ++i)
            if (m.deg(roots[i]) != best[i]) { match = false; break; }
        if (!match) continue;
        Monomial rest = Monomial::one();
        for (auto& [v, ex] : m.e)
            if (!is_a_root(v)) rest = rest * Monomial::var(v, ex);
        coef.add_term(c, rest);
    }
    return {best, coef};
}

}  // namespace

std::map<Partition, Poly> schur_reduce_general(const Poly& p, const std::vector<VarId>& roots,
                                               int cols) {
    std::map<Partition, Poly> out;
    Poly rem = p;
    int guard = 0;
    while (!rem.is_zero()) {
        if (++guard > 100000) throw std::runtime_error("schur_reduce: no convergence");
        auto [e, coef] = lead_in_roots(rem, roots);
        // the lex-greatest exponent vector of a symmetric polynomial is
        // weakly decreasing; anything else means p was not symmetric
        for (std::size_t i = 1; i < e.size(); ++i)
            if (e[i] > e[i - 1])
                throw std::invalid_argument("schur_reduce: polynomial not symmetric in roots");
        Partition lam = Partition::of(std::vector<int>(e.begin(), e.end()));
        rem -= coef * schur_poly(lam, roots);
        if (cols < 0 || lam.fits(int(roots.size()), cols)) {
            auto [it, fresh] = out.emplace(lam, coef);
            if (!fresh) it->second += coef;
        }
    }
    for (auto it = out.begin(); it != out.end();) {
        if (it->second.is_zero()) it = out.erase(it);
        else ++it;
    }
    return out;
}

Rational SchurVector::coeff(const Partition& lam) const {
    auto it = entries.find(lam);
    return it == entries.end() ? Rational() : it->second;
}

void SchurVector::add(const Partition& lam, const Rational& c) {
    if (c.is_zero()) return;
    if (!lam.fits(r, n - r)) return;
    auto [it, fresh] = entries.emplace(lam, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) entries.erase(it);
    }
}

SchurVector SchurVector::operator+(const SchurVector& o) const {
    if (r != o.r || n != o.n) throw std::invalid_argument("SchurVector: box mismatch");
    SchurVector out(r, n);
    out.entries = entries;
    for (auto& [lam, c] : o.entries) out.add(lam, c);
    return out;
}

SchurVector SchurVector::operator-() const {
    SchurVector out(r, n);
    for (auto& [lam, c] : entries) out.entries.emplace(lam, -c);
    return out;
}

SchurVector SchurVector::operator*(const SchurVector& o) const {
    if (r != o.r || n != o.n) throw std::invalid_argument("SchurVector: box mismatch");
    SchurVector out(r, n);
    for (auto& [la, ca] : entries)
        for (auto& [lb, cb] : o.entries)
            for (auto& [lam, mult] : lr_product(la, lb, r, n - r)) out.add(lam, ca * cb * mult);
    return out;
}

SchurVector SchurVector::operator*(const Rational& c) const {
    SchurVector out(r, n);
    if (c.is_zero()) return out;
    for (auto& [lam, v] : entries) out.entries.emplace(lam, v * c);
    return out;
}

bool SchurVector::operator==(const SchurVector& o) const {
    return r == o.r && n == o.n && entries == o.entries;
}

std::string SchurVector::str() const {
    if (entries.empty()) return "0";
    std::string s;
    for (auto& [lam, c] : entries) {
        if (!s.empty()) s += " + ";
        s += c.str() + "*s" + lam.str();
    }
    return s;
}

SchurVector schur_reduce(const Poly& f, int r, int n) {
    std::vector<VarId> roots;
    for (int i = 1; i <= r; ++i) roots.push_back(vars::root(1, i));
    SchurVector out(r, n);
    for (auto& [lam, c] : schur_reduce_general(f, roots, n - r)) {
        if (!c.is_constant())
            throw std::invalid_argument("schur_reduce: coefficients must be free of the roots' complement");
        out.add(lam, c.constant_value());
    }
    return out;
}

std::map<Partition, Rational> lr_product(const Partition& mu, const Partition& nu, int rows,
                                         int cols) {
    std::vector<VarId> roots;
    for (int i = 1; i <= rows; ++i) roots.push_back(vars::root(1, i));
    Poly prod = schur_poly(mu, roots) * schur_poly(nu, roots);
    std::map<Partition, Rational> out;
    for (auto& [lam, c] : schur_reduce_general(prod, roots, cols)) {
        if (!c.is_constant()) throw std::runtime_error("lr_product: non-constant coefficient");
        out.emplace(lam, c.constant_value());
    }
    return out;
}

}  // namespace fm
