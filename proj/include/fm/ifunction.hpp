// Constructors for the explicit cohomology-valued hypergeometric series
// attached to partial flag bundles and their abelianizations: the Weyl
// modification factor, the Givental-Martin reduction from the abelian to the
// nonabelian quotient, the small toric-fiber series, the flag-bundle series
// driven by a vector-bundle input family, its Grassmann-bundle special form,
// the split-bundle input family, and the mu-twisted variants consumed by the
// operator identities.
//
// Conventions shared by every constructor:
//   * coefficients are assembled as closed rational forms (ParamRat) in the
//     root variables H_i^{(m)}, the base generators, nu, mu and z, and then
//     expanded into the requested coefficient ring via expand_from_closed;
//   * doubly infinite tail products prod_{c<=K} are encoded by their finite
//     ratio against the 0-tail, the only combination the series contain;
//   * products over Chern roots of V or Q are expanded through the supplied
//     Chern classes (or split line data), never through formal roots;
//   * the ambient frame acts as a phantom level l+1 of the flag: rank N,
//     classes nu_j (equivariant) or 0, and degree 0.
#pragma once

#include <map>
#include <memory>
#include <vector>

#include "fm/ring.hpp"
#include "fm/series.hpp"

namespace fm {

// Geometry of one flag-bundle problem: Fl(r_1 < ... < r_l) inside the frame
// O^N of the base, with V -> B of rank n = N - rank Q cut out by the frame.
struct FlagSetup {
    int N = 0;                            // ambient frame rank
    std::vector<int> r;                   // tautological ranks, increasing
    std::shared_ptr<const RingSpec> base; // table model of the base ring
    int base_rank = 0;                    // independent base curve directions
    std::vector<Poly> chern_v;            // c_0..c_n(V), base polynomials
    std::vector<Poly> chern_q;            // c_0..c_{N-n}(Q)
    std::vector<Poly> v_lines;            // c_1(L_j) when V splits (optional)
    bool equivariant = false;             // diagonal torus on the frame
    bool twisted = false;                 // keep the twist parameter symbolic

    int levels() const { return int(r.size()); }
    int rank_v() const { return chern_v.empty() ? 0 : int(chern_v.size()) - 1; }
    int rank_q() const { return chern_q.empty() ? 0 : int(chern_q.size()) - 1; }
};

void validate_setup(const FlagSetup& s);

// prod_m prod_{i != j} of the k-shifted tail ratio in the level-m roots; the
// factor that turns an abelian series into the candidate nonabelian one.
ParamRat hyp_factor(const std::vector<int>& r, const std::vector<std::vector<int>>& k);

// Multiply every abelian coefficient by its hyp_factor, sum the Novikov
// grading down to level sums, and re-express in the nonabelian target ring.
// Requires closed forms; asserts Weyl invariance of the input and that the
// orbit-summed denominators are invertible (no surviving root factors at
// roots -> 0).
CoeffSeries gt_modify(const CoeffSeries& F, std::shared_ptr<const RingSpec> target);

// Small equivariant series of the trivial toric bundle B x FlT: J_B times
// the fiber factors prod (H_i^{(m)} - H_j^{(m+1)} + cz) in tail-ratio form.
CoeffSeries brown_i(const FlagSetup& s, const CoeffSeries& J_B, const TruncConfig& tc,
                    std::shared_ptr<const RingSpec> ring);

// The flag-bundle series: input family evaluated at lambda -> H + kz over a
// V-denominator, cross-level tail ratios, and the Weyl tail ratios.
CoeffSeries main_flag_i(const FlagSetup& s, const LambdaFamily& fam, const TruncConfig& tc,
                        std::shared_ptr<const RingSpec> ring);

// One-level special form with the explicit sign (-1)^{k(r-1)} and the
// ordered-pair factor prod_{i<j}(H_i - H_j + (k_i - k_j)z)/(H_i - H_j);
// kept independent of main_flag_i so their agreement is a real check.
CoeffSeries grassmann_i(const FlagSetup& s, const LambdaFamily& fam, const TruncConfig& tc,
                        std::shared_ptr<const RingSpec> ring);

// A line bundle summand of a split V: its first Chern class as a base
// polynomial plus the pairing with the base curve-class directions.
struct LineData {
    Poly c1;
    std::vector<int> pairing;  // c_1(L) . d per base direction, <= 0
};

// Input family for split V = (+)_j L_j: per base degree d the factor
// prod_j prod_i prod_{c=0}^{-c1(L_j).d - 1} (lambda_i^{(l)} + c1(L_j) - cz)
// times the base J-coefficient.
LambdaFamily oh_split_input(const FlagSetup& s, const std::vector<LineData>& lines,
                            const CoeffSeries& J_B, const TruncConfig& tc);

// mu-twisted series on B x Fl(r_bullet, N): family at lambda -> mu + H + kz,
// numerator over Chern roots of Q against (H + cz)^N, cross-level and Weyl
// tail ratios.
CoeffSeries twisted_F(const FlagSetup& s, const LambdaFamily& fam, const TruncConfig& tc,
                      std::shared_ptr<const RingSpec> ring);

// Abelian counterpart of twisted_F: per-slot Novikov grading and no Weyl
// ratio; lives on the formal coefficient ring.
CoeffSeries f_ab(const FlagSetup& s, const LambdaFamily& fam, const TruncConfig& tc);

}  // namespace fm
