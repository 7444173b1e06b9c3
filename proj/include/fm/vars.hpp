// Fixed registry of the symbolic variables used across the engine, with the
// canonical total order that normalization and printing rely on:
//
//   nu1 < ... < nu6 < mu < la{m}_{i} < H{m}_{i} < y < c1..c4 < x1..x4 < h < z
//
// nu:  equivariant torus weights of the ambient C^N
// mu:  twist parameter
// la:  per-level equivariant parameters of the input family (level m, slot i)
// H:   formal Chern roots of the tautological bundles (level m, slot i)
// y:   formal argument of the A-operator expansion
// c:   generic symbolic Chern classes (identity checks with unspecified bundles)
// x:   finitely many abstract input-parameter slots
// h:   hyperplane class of a projective base
// z:   the loop variable; deliberately last so denominators sort by it least
#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace fm {

using VarId = int;

namespace vars {

inline constexpr int MAX_NU = 6;     // ambient rank N <= 6
inline constexpr int MAX_LEVEL = 3;  // flag levels m <= 3
inline constexpr int MAX_SLOT = 4;   // per-level slots i <= 4
inline constexpr int MAX_CHERN = 4;
inline constexpr int MAX_X = 4;

inline constexpr int NU0 = 0;
inline constexpr int MU = NU0 + MAX_NU;                       // 6
inline constexpr int LA0 = MU + 1;                            // 7
inline constexpr int H0 = LA0 + MAX_LEVEL * MAX_SLOT;         // 19
inline constexpr int Y = H0 + MAX_LEVEL * MAX_SLOT;           // 31
inline constexpr int C0 = Y + 1;                              // 32
inline constexpr int X0 = C0 + MAX_CHERN;                     // 36
inline constexpr int HBASE = X0 + MAX_X;                      // 40
inline constexpr int Z = HBASE + 1;                           // 41
inline constexpr int COUNT = Z + 1;                           // 42

inline VarId nu(int a) {
    if (a < 1 || a > MAX_NU) throw std::out_of_range("vars::nu index");
    return NU0 + (a - 1);
}
inline VarId mu() { return MU; }
inline VarId lam(int m, int i) {
    if (m < 1 || m > MAX_LEVEL || i < 1 || i > MAX_SLOT) throw std::out_of_range("vars::lam index");
    return LA0 + (m - 1) * MAX_SLOT + (i - 1);
}
inline VarId root(int m, int i) {
    if (m < 1 || m > MAX_LEVEL || i < 1 || i > MAX_SLOT) throw std::out_of_range("vars::root index");
    return H0 + (m - 1) * MAX_SLOT + (i - 1);
}
inline VarId y() { return Y; }
inline VarId chern(int j) {
    if (j < 1 || j > MAX_CHERN) throw std::out_of_range("vars::chern index");
    return C0 + (j - 1);
}
inline VarId xslot(int j) {
    if (j < 1 || j > MAX_X) throw std::out_of_range("vars::xslot index");
    return X0 + (j - 1);
}
inline VarId hbase() { return HBASE; }
inline VarId z() { return Z; }

inline bool is_root(VarId v) { return v >= H0 && v < Y; }
inline bool is_nu(VarId v) { return v >= NU0 && v < MU; }
inline bool is_lam(VarId v) { return v >= LA0 && v < H0; }

inline std::string name(VarId v) {
    if (v < 0 || v >= COUNT) throw std::out_of_range("vars::name");
    if (is_nu(v)) return "nu" + std::to_string(v - NU0 + 1);
    if (v == MU) return "mu";
    if (is_lam(v)) {
        int o = v - LA0;
        return "la" + std::to_string(o / MAX_SLOT + 1) + "_" + std::to_string(o % MAX_SLOT + 1);
    }
    if (is_root(v)) {
        int o = v - H0;
        return "H" + std::to_string(o / MAX_SLOT + 1) + "_" + std::to_string(o % MAX_SLOT + 1);
    }
    if (v == Y) return "y";
    if (v >= C0 && v < X0) return "c" + std::to_string(v - C0 + 1);
    if (v >= X0 && v < HBASE) return "x" + std::to_string(v - X0 + 1);
    if (v == HBASE) return "h";
    return "z";
}

// Inverse of name(); rejects unknown spellings.
VarId parse(const std::string& s);

}  // namespace vars
}  // namespace fm
