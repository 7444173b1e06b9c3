#include "fm/gkm.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace fm {

namespace {

Poly nu_poly(int a) { return Poly::var(vars::nu(a)); }

// all r-subsets of `pool`, each sorted
std::vector<std::vector<int>> subsets_of(const std::vector<int>& pool, int r) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t at) {
        if (int(cur.size()) == r) {
            out.push_back(cur);
            return;
        }
        if (at >= pool.size()) return;
        if (int(pool.size() - at) < r - int(cur.size())) return;
        cur.push_back(pool[at]);
        rec(at + 1);
        cur.pop_back();
        rec(at + 1);
    };
    rec(0);
    return out;
}

void validate_flag_data(int N, const std::vector<int>& r) {
    if (N < 1 || N > vars::MAX_NU) throw std::invalid_argument("gkm_data: N out of range");
    if (r.empty()) throw std::invalid_argument("gkm_data: empty flag");
    for (std::size_t m = 0; m < r.size(); ++m) {
        if (r[m] < 1 || r[m] > vars::MAX_SLOT) throw std::invalid_argument("gkm_data: r out of range");
        if (m + 1 < r.size() && r[m] >= r[m + 1])
            throw std::invalid_argument("gkm_data: r must be strictly increasing");
    }
    if (r.back() >= N) throw std::invalid_argument("gkm_data: need r_l < N");
    if (int(r.size()) > vars::MAX_LEVEL) throw std::invalid_argument("gkm_data: too many levels");
}

std::string flag_label(const std::vector<std::vector<int>>& chain) {
    std::string s;
    for (auto& A : chain) {
        if (!s.empty()) s += "<";
        s += "{";
        for (std::size_t i = 0; i < A.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(A[i]);
        }
        s += "}";
    }
    return s;
}

std::string toric_label(const std::vector<std::vector<int>>& phi) {
    std::string s;
    for (auto& f : phi) {
        s += "[";
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(f[i]);
        }
        s += "]";
    }
    return s;
}

}  // namespace

int GKMGraph::degree_rank() const {
    if (variant == Variant::flag) return levels();
    int s = 0;
    for (int rm : r) s += rm;
    return s;
}

Poly GKMGraph::root_value(int point, int m, int i) const {
    const int l = levels();
    if (m == l + 1) {
        if (i < 1 || i > N) throw std::out_of_range("root_value: ambient slot");
        return nu_poly(i);
    }
    if (m < 1 || m > l || i < 1 || i > r[m - 1]) throw std::out_of_range("root_value: slot");
    if (variant == Variant::flag) return nu_poly(chains[point][m - 1][i - 1]);
    // toric: follow the level maps up to the ambient space
    int idx = i;
    for (int lev = m; lev <= l; ++lev) idx = maps[point][lev - 1][idx - 1];
    return nu_poly(idx);
}

std::map<VarId, Poly> GKMGraph::assignment(int point) const {
    std::map<VarId, Poly> a;
    for (int m = 1; m <= levels(); ++m)
        for (int i = 1; i <= r[m - 1]; ++i) a.emplace(vars::root(m, i), root_value(point, m, i));
    return a;
}

int GKMGraph::find_label(const std::string& s) const {
    for (int p = 0; p < points(); ++p)
        if (labels[p] == s) return p;
    throw std::invalid_argument("GKMGraph: unknown fixed point " + s);
}

std::shared_ptr<const GKMGraph> gkm_data(int N, const std::vector<int>& r,
                                         GKMGraph::Variant variant) {
    validate_flag_data(N, r);
    auto G = std::make_shared<GKMGraph>();
    G->variant = variant;
    G->N = N;
    G->r = r;
    const int l = int(r.size());

    if (variant == GKMGraph::Variant::flag) {
        G->dim = 0;
        for (int m = 1; m <= l; ++m) {
            int next = m < l ? r[m] : N;
            G->dim += r[m - 1] * (next - r[m - 1]);
        }
        // enumerate chains from the top level down
        std::vector<int> ambient(N);
        for (int a = 1; a <= N; ++a) ambient[a - 1] = a;
        std::vector<std::vector<std::vector<int>>> acc = {{}};  // partial chains, top first
        for (int m = l; m >= 1; --m) {
            std::vector<std::vector<std::vector<int>>> next;
            for (auto& partial : acc) {
                const std::vector<int>& pool = partial.empty() ? ambient : partial.front();
                for (auto& A : subsets_of(pool, r[m - 1])) {
                    auto chain = partial;
                    chain.insert(chain.begin(), A);
                    next.push_back(std::move(chain));
                }
            }
            acc = std::move(next);
        }
        std::sort(acc.begin(), acc.end());
        G->chains = std::move(acc);
        for (auto& chain : G->chains) G->labels.push_back(flag_label(chain));

        const int P = G->points();
        if (P > 10000) throw std::runtime_error("gkm_data: fixed-point set too large");
        G->tangent.resize(P);
        G->euler.resize(P);
        G->edges.resize(P);
        for (int p = 0; p < P; ++p) {
            auto& chain = G->chains[p];
            // tangent weights nu_a - nu_b over consecutive levels
            Poly e(Rational(1));
            for (int m = 1; m <= l; ++m) {
                const std::vector<int>& Am = chain[m - 1];
                std::vector<int> up;
                if (m < l) up = chain[m];
                else
                    up = ambient;
                for (int a : Am)
                    for (int b : up) {
                        if (std::find(Am.begin(), Am.end(), b) != Am.end()) continue;
                        Poly w = nu_poly(a) - nu_poly(b);
                        G->tangent[p].push_back(w);
                        e = e * w;
                    }
            }
            G->euler[p] = e;
            // edges: transpositions (a b) that change the chain
            for (int a = 1; a <= N; ++a) {
                for (int b = 1; b <= N; ++b) {
                    if (a == b) continue;
                    // orient: a must be the element leaving (member of the
                    // lowest separating level)
                    bool any_sep = false, a_leaves = false;
                    std::vector<int> sep(l, 0);
                    for (int m = 1; m <= l; ++m) {
                        const auto& Am = chain[m - 1];
                        bool ha = std::find(Am.begin(), Am.end(), a) != Am.end();
                        bool hb = std::find(Am.begin(), Am.end(), b) != Am.end();
                        if (ha != hb) {
                            sep[m - 1] = 1;
                            if (!any_sep) {
                                any_sep = true;
                                a_leaves = ha;
                            }
                        }
                    }
                    if (!any_sep || !a_leaves) continue;
                    // target chain: swap a and b throughout
                    auto target = chain;
                    for (auto& Am : target) {
                        for (int& x : Am) {
                            if (x == a) x = b;
                            else if (x == b) x = a;
                        }
                        std::sort(Am.begin(), Am.end());
                    }
                    int q = int(std::lower_bound(G->chains.begin(), G->chains.end(), target) -
                                G->chains.begin());
                    GKMEdge edge;
                    edge.from = p;
                    edge.to = q;
                    edge.tangent = nu_poly(a) - nu_poly(b);
                    edge.rho = nu_poly(b) - nu_poly(a);
                    edge.d = sep;
                    G->edges[p].push_back(std::move(edge));
                }
            }
        }
        return G;
    }

    // toric variant: tuples of level maps phi_m : {1..r_m} -> {1..r_{m+1}}
    G->dim = 0;
    for (int m = 1; m <= l; ++m) {
        int next = m < l ? r[m] : N;
        G->dim += r[m - 1] * (next - 1);
    }
    std::vector<std::pair<int, int>> slots;  // (level m, slot i), 1-based
    for (int m = 1; m <= l; ++m)
        for (int i = 1; i <= r[m - 1]; ++i) slots.emplace_back(m, i);
    const int S = int(slots.size());
    std::vector<int> radix(S);
    for (int s = 0; s < S; ++s) {
        int m = slots[s].first;
        radix[s] = m < l ? r[m] : N;
    }
    long total = 1;
    for (int s = 0; s < S; ++s) {
        total *= radix[s];
        if (total > 10000) throw std::runtime_error("gkm_data: fixed-point set too large");
    }
    std::vector<int> digit(S, 1);
    for (long count = 0; count < total; ++count) {
        std::vector<std::vector<int>> phi(l);
        for (int s = 0; s < S; ++s) phi[slots[s].first - 1].push_back(digit[s]);
        G->maps.push_back(std::move(phi));
        for (int s = S - 1; s >= 0; --s) {
            if (digit[s] < radix[s]) {
                ++digit[s];
                break;
            }
            digit[s] = 1;
        }
    }
    std::sort(G->maps.begin(), G->maps.end());
    for (auto& phi : G->maps) G->labels.push_back(toric_label(phi));

    const int P = G->points();
    G->tangent.resize(P);
    G->euler.resize(P);
    G->edges.resize(P);
    for (int p = 0; p < P; ++p) {
        Poly e(Rational(1));
        for (int s = 0; s < S; ++s) {
            auto [m, i] = slots[s];
            Poly here = G->root_value(p, m, i);
            for (int j = 1; j <= radix[s]; ++j) {
                if (j == G->maps[p][m - 1][i - 1]) continue;
                Poly w = here - G->root_value(p, m + 1, j);
                G->tangent[p].push_back(w);
                e = e * w;

                GKMEdge edge;
                edge.from = p;
                auto target = G->maps[p];
                target[m - 1][i - 1] = j;
                edge.to = int(std::lower_bound(G->maps.begin(), G->maps.end(), target) -
                              G->maps.begin());
                edge.tangent = w;
                edge.rho = -w;
                // curve class: 1 on every slot whose composite path passes
                // through the changed slot (m,i), including (m,i) itself
                edge.d.assign(S, 0);
                for (int t = 0; t < S; ++t) {
                    auto [mt, it] = slots[t];
                    if (mt > m) continue;
                    int idx = it;
                    bool hits = false;
                    for (int lev = mt; lev <= l; ++lev) {
                        if (lev == m && idx == i) {
                            hits = true;
                            break;
                        }
                        if (lev == l) break;
                        idx = G->maps[p][lev - 1][idx - 1];
                    }
                    if (hits) edge.d[t] = 1;
                }
                G->edges[p].push_back(std::move(edge));
            }
        }
        G->euler[p] = e;
    }
    return G;
}

}  // namespace fm
