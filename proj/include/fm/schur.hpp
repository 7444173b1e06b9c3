// Partitions, Schur polynomials in a fixed set of Chern-root variables, and
// the reduction of symmetric polynomials to the Schur basis. Partitions wider
// than the allowed box vanish, which is exactly the multiplication rule of
// the Grassmannian cohomology ring in its Schubert basis.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "fm/poly.hpp"

namespace fm {

struct Partition {
    std::vector<int> parts;  // weakly decreasing, positive entries only

    Partition() = default;
    static Partition of(std::vector<int> p);

    int weight() const;  // |lambda|
    int length() const { return int(parts.size()); }
    int part(int i) const { return i < length() ? parts[i] : 0; }  // 0-based
    bool is_empty() const { return parts.empty(); }
    bool fits(int rows, int cols) const;

    bool operator==(const Partition& o) const { return parts == o.parts; }
    bool operator!=(const Partition& o) const { return parts != o.parts; }
    bool operator<(const Partition& o) const;  // by weight, then lex

    std::string str() const;  // "()", "(2,1)"
    static Partition parse(const std::string& s);
};

// complete homogeneous symmetric polynomial h_k in the given variables
Poly complete_homog(int k, const std::vector<VarId>& roots);

// Schur polynomial s_lambda in the given variables (Jacobi-Trudi determinant);
// zero when lambda has more rows than variables
Poly schur_poly(const Partition& lambda, const std::vector<VarId>& roots);

// Write a polynomial that is symmetric in `roots` (with coefficients free of
// them) as sum c_lambda s_lambda. Partitions with a part exceeding `cols` are
// dropped when cols >= 0. Throws if p is not symmetric in the roots.
std::map<Partition, Poly> schur_reduce_general(const Poly& p, const std::vector<VarId>& roots,
                                               int cols = -1);

// Schur-basis element of H*(Gr(r,n)): partitions inside the r x (n-r) box.
struct SchurVector {
    int r = 0, n = 0;
    std::map<Partition, Rational> entries;

    SchurVector() = default;
    SchurVector(int r_, int n_) : r(r_), n(n_) {}

    bool is_zero() const { return entries.empty(); }
    Rational coeff(const Partition& lam) const;
    void add(const Partition& lam, const Rational& c);

    SchurVector operator+(const SchurVector& o) const;
    SchurVector operator-() const;
    SchurVector operator*(const SchurVector& o) const;  // Littlewood-Richardson, box-truncated
    SchurVector operator*(const Rational& c) const;
    bool operator==(const SchurVector& o) const;
    std::string str() const;
};

// Reduce a symmetric polynomial in the level-1 roots H1_1..H1_r to the
// Schubert basis of Gr(r,n); coefficients must come out constant.
SchurVector schur_reduce(const Poly& f, int r, int n);

// Littlewood-Richardson expansion of s_mu * s_nu restricted to at most
// `rows` rows (and `cols` columns when >= 0), via polynomial reduction.
std::map<Partition, Rational> lr_product(const Partition& mu, const Partition& nu, int rows,
                                         int cols);

}  // namespace fm
