// GKM models of the partial flag variety Fl(r_1..r_l; N) and of its abelian
// quotient FlT: fixed points, tangent weights, Euler classes, and the edge
// data (conormal weight rho and curve class d) that the pole and recursion
// checks consume.
//
// Conventions (validated by the acceptance suite, not assumed):
//   H_i^{(m)} restricts at a fixed point to nu_{composite(i)} with no sign.
//   Tangent weights at alpha are nu_a - nu_b (a the element leaving alpha
//   along the edge, b the one entering), so e(N_alpha) = prod of tangents and
//   the equivariant projective-space denominators restrict to
//   prod(nu_a - nu_j + cz), placing poles at z = rho_{alpha,beta}/c with
//   rho_{alpha,beta} = nu_b - nu_a = -tangent (the conormal weight).
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fm/poly.hpp"

namespace fm {

struct GKMEdge {
    int from = 0, to = 0;
    Poly tangent;        // weight of the orbit's tangent line at `from`
    Poly rho;            // conormal weight = -tangent; pole locations are rho/a
    std::vector<int> d;  // curve class: per level (flag) or per (m,i) slot (toric)
};

struct GKMGraph {
    enum class Variant { flag, toric };

    Variant variant = Variant::flag;
    int N = 0;
    std::vector<int> r;  // strictly increasing, r.back() < N
    int dim = 0;

    std::vector<std::string> labels;
    // flag variant: chains[p][m] = sorted subset A_{m+1} of {1..N} (0-based m)
    std::vector<std::vector<std::vector<int>>> chains;
    // toric variant: maps[p][m][i-1] = phi_m(i) in {1..r_{m+1}}
    std::vector<std::vector<std::vector<int>>> maps;

    std::vector<std::vector<Poly>> tangent;  // per point, size dim
    std::vector<Poly> euler;                 // product of tangents
    std::vector<std::vector<GKMEdge>> edges; // outgoing, per point

    int levels() const { return int(r.size()); }
    int points() const { return int(labels.size()); }
    // length of an edge-class vector: levels() for flag, sum r_m for toric
    int degree_rank() const;

    // restriction assignment of the generator variables H_i^{(m)} at a point
    std::map<VarId, Poly> assignment(int point) const;
    // value of H_i^{(m)} at a point (1-based m, i); level l+1 gives nu_i
    Poly root_value(int point, int m, int i) const;

    int find_label(const std::string& s) const;
};

// Build the graph; variant selects Fl (chains) or FlT (level maps).
std::shared_ptr<const GKMGraph> gkm_data(int N, const std::vector<int>& r,
                                         GKMGraph::Variant variant);

}  // namespace fm
