// Independent quantum-cohomology oracles and the cone-membership checks.
//
// The oracles never touch the series constructors: the quantum Pieri rule
// and the divisor-direction quantum differential equation produce small-J
// data straight from Schubert calculus, and the Hirzebruch series comes from
// toric divisor data. The checks consume CoeffSeries output: the Divisor
// Equation and Weyl invariance in the t-specialized bookkeeping, the pole
// locations (C1) and the fixed-point recursion (C2) over a GKM graph, plus a
// scoped base-direction cone test. Every check returns a CheckReport that
// serializes to JSON, so failures carry their location and both values.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "fm/gkm.hpp"
#include "fm/ring.hpp"
#include "fm/schur.hpp"
#include "fm/series.hpp"

namespace fm {

// ------------------------------------------------------------- check reports

struct CheckIssue {
    std::string location;
    std::string expected;
    std::string got;
};

struct CheckReport {
    std::string check;               // machine name of the check
    std::string header;              // conventions the verdict assumes
    bool ok = true;
    std::vector<CheckIssue> issues;  // every located failure
    std::vector<std::string> notes;  // non-fatal observations (skipped keys etc.)

    void fail(std::string location, std::string expected, std::string got);
    void note(std::string s) { notes.push_back(std::move(s)); }
    std::string json() const;
};

// --------------------------------------------------- quantum product oracles

// sigma_1 * sigma_lam on Gr(r,n): the box-adding terms, plus q * sigma_mu
// with mu = (lam_2 - 1, ..., lam_r - 1) exactly when lam_1 = n - r and no
// entry of mu would be negative. Entries are (partition, q power, coeff).
std::vector<std::tuple<Partition, int, Rational>> quantum_pieri_sigma1(int r, int n,
                                                                       const Partition& lam);

// A table ring together with the quantum product by its divisor generator:
// divisor_product[i] expands sigma_1 * basis[i] as (index, q power, coeff).
struct QuantumRing {
    std::shared_ptr<const RingSpec> ring;
    int divisor_index = 0;  // basis index of sigma_1
    std::vector<std::vector<std::tuple<int, int, Rational>>> divisor_product;
};

QuantumRing quantum_ring_grassmann(int r, int n);
QuantumRing quantum_ring_projective(int n);  // basis h^j; h * h^n = q

// Fundamental-solution columns of the divisor-direction quantum differential
// equation, solved by the z^{-1}-depth recursion
//   d * S_{a,d,j} = [ sum_b c_a^b(q) S_b  -  sigma_1 cup S_a ]_{d, j-1},
// with S_{a,0} = phi_a and the q^d part of a column starting at z^{-1}.
struct QdeSolution {
    QuantumRing qr;
    int d_max = 0, z_depth = 0;
    // columns[a][d]: z-exponents in [-z_depth, 0], low side marked truncated
    std::vector<std::vector<ZLaurent<CohClass>>> columns;
};

QdeSolution qde_columns(const QuantumRing& qr, int d_max, int z_depth);

// The unit column as a series on the oracle's own ring. Fiber keys ([;d],
// one nonabelian level) match the flag constructors; base keys ([d;]) are
// for use as a base J-function.
CoeffSeries qde_small_j(const QuantumRing& qr, int d_max, int z_depth, bool base_keys = false);

// Toric series of the Hirzebruch surface P(O + O(-1)) -> P^1 from its four
// boundary divisors (two of class h, one of class H, one of class H - h),
// keyed (d_base; k). Only a = 1 is supported.
CoeffSeries toric_i_hirzebruch(int a, const TruncConfig& tc,
                               std::shared_ptr<const RingSpec> ring);

// ------------------------------------------------------ characterization checks

// z dF/dt = z q dF/dq + H . F in every divisor direction, with the
// t-derivative recomputed from the closed form and the right side from the
// stored expansion; a key where the two representations drift apart fails
// with its degree, direction and z-exponent.
CheckReport check_divisor_equation(const CoeffSeries& F);

// Closed-coefficient invariance of an abelian series under every adjacent
// transposition of each level's roots, applied simultaneously to the root
// variables and the Novikov indices.
CheckReport check_weyl_invariance(const CoeffSeries& F);

// (C1) For every fixed point alpha and stored key, the z-denominator of the
// restriction iota_alpha^* F factors into z-powers, base-nilpotent factors
// (poles at z = 0), and conormal factors a z - rho_{alpha,beta} with beta
// adjacent to alpha; anything left over is reported verbatim.
CheckReport check_pole_locations_C1(const CoeffSeries& F, const GKMGraph& G);

// Recursion coefficients of (C2): entry (alpha, beta, a) multiplies
// iota_beta^* F at z = rho/a (Novikov-shifted by a times the edge class) to
// give the residue of iota_alpha^* F there. Extraction asserts the ratio is
// the same at every degree that determines it.
struct RecursionTable {
    int a_max = 0;
    std::map<std::tuple<int, int, int>, ParamRat> entries;  // (alpha, beta, a)
    std::vector<std::string> undefined;  // no degree supports this entry
};

RecursionTable extract_recursion_table(const CoeffSeries& F, const GKMGraph& G, int a_max,
                                       CheckReport* report = nullptr);

CheckReport check_recursion_C2(const CoeffSeries& F, const GKMGraph& G,
                               const RecursionTable& T);

// first disagreement between two expansions on their commonly known window
struct SeriesDiff {
    MultiDeg key;
    int z_exp = 0;
    std::string basis_label;
    std::string lhs, rhs;
    std::string str() const;
};

std::optional<SeriesDiff> compare_series(const CoeffSeries& A, const CoeffSeries& B);

// (C3), scoped form: at every fixed point and fiber degree the restricted
// coefficients, divided by the base J-function 1/prod_{c<=d}(h+cz)^{dim+1},
// must be one fixed combination sum c_{ij} (d z)^i (h + d z)^j across all
// base degrees d; the c_{ij} may be rational in z. Base dimension 1 or 2;
// gen_degree bounds i + j.
CheckReport check_base_cone_C3(const CoeffSeries& F, const GKMGraph& G, int base_dim,
                               int gen_degree = 2);

}  // namespace fm
