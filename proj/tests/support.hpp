#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <epp/graph.hpp>

namespace epp::testing {

/// Random multigraph on vertices 0..n-1 with `edges` edge copies spread over random
/// pairs, each pair capped at `max_mult`.
inline MultiGraph random_multigraph(std::mt19937_64& rng, int n, int edges, int max_mult)
{
    MultiGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex(i);
    if (n < 2) return g;
    std::uniform_int_distribution<int> pick(0, n - 1);
    int placed = 0, attempts = 0;
    while (placed < edges && attempts < edges * 50) {
        ++attempts;
        int a = pick(rng), b = pick(rng);
        if (a == b || g.multiplicity(a, b) >= max_mult) continue;
        g.add_edge(a, b);
        ++placed;
    }
    return g;
}

inline MultiGraph random_connected(std::mt19937_64& rng, int n, int extra, int max_mult)
{
    MultiGraph g;
    g.add_vertex(0);
    for (int i = 1; i < n; ++i) g.add_edge(i, std::uniform_int_distribution<int>(0, i - 1)(rng));
    std::uniform_int_distribution<int> pick(0, n - 1);
    int placed = 0, attempts = 0;
    while (placed < extra && attempts < extra * 50 + 50) {
        ++attempts;
        int a = pick(rng), b = pick(rng);
        if (a == b || g.multiplicity(a, b) >= max_mult) continue;
        g.add_edge(a, b);
        ++placed;
    }
    return g;
}

/// Permutation brute force; independent of the refinement-based canonical form.
inline bool brute_isomorphic(const MultiGraph& a, const MultiGraph& b)
{
    if (a.n() != b.n() || a.m() != b.m()) return false;
    auto va = a.vertices(), vb = b.vertices();
    std::vector<int> perm(vb.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
        bool ok = true;
        for (std::size_t i = 0; i < va.size() && ok; ++i)
            for (std::size_t j = i + 1; j < va.size() && ok; ++j)
                ok = a.multiplicity(va[i], va[j]) == b.multiplicity(vb[perm[i]], vb[perm[j]]);
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

inline MultiGraph disjoint_copies(const MultiGraph& g, int copies)
{
    MultiGraph out;
    const vertex step = g.max_vertex() + 1;
    for (int c = 0; c < copies; ++c) out.absorb(g, c * step);
    return out;
}

} // namespace epp::testing
