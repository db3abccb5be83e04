#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "certificate.hpp"
#include "graph.hpp"
#include "tree_partition.hpp"

namespace epp {

/// n-wall on the n x n grid: every row is a path, and (i, j)-(i+1, j) is an edge when
/// i + j is even. Vertex (i, j) has id i*n + j.
inline MultiGraph wall(int n)
{
    if (n < 2) throw precondition_error("wall: n must be at least 2");
    MultiGraph g;
    auto id = [&](int i, int j) { return i * n + j; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g.add_vertex(id(i, j));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j + 1 < n; ++j) g.add_edge(id(i, j), id(i, j + 1));
    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j < n; ++j)
            if ((i + j) % 2 == 0) g.add_edge(id(i, j), id(i + 1, j));
    return g;
}

/// A path on n vertices plus a dominating vertex n.
inline MultiGraph fan(int n)
{
    if (n < 1) throw precondition_error("fan: n must be positive");
    MultiGraph g = path_graph(n);
    for (int i = 0; i < n; ++i) g.add_edge(n, i);
    return g;
}

namespace detail {

inline void two_edge_paths(MultiGraph& g, vertex a, vertex b, int n, vertex& next)
{
    for (int i = 0; i < n; ++i) {
        g.add_edge(a, next);
        g.add_edge(next, b);
        ++next;
    }
}

} // namespace detail

/// K_{1,n} with every edge replaced by n independent two-edge paths. Centre 0,
/// leaves 1..n.
inline MultiGraph star(int n)
{
    if (n < 1) throw precondition_error("star: n must be positive");
    MultiGraph g;
    vertex next = n + 1;
    for (int i = 1; i <= n; ++i) detail::two_edge_paths(g, 0, i, n, next);
    return g;
}

/// The n-edge path 0..n with every edge replaced by n independent two-edge paths.
inline MultiGraph npath(int n)
{
    if (n < 1) throw precondition_error("npath: n must be positive");
    MultiGraph g;
    vertex next = n + 1;
    for (int i = 0; i < n; ++i) detail::two_edge_paths(g, i, i + 1, n, next);
    return g;
}

/// θ_r and θ_{r'} sharing one vertex (vertex 0).
inline MultiGraph theta_double(int r1, int r2)
{
    if (r1 < 1 || r2 < 1) throw precondition_error("theta_double: multiplicities must be positive");
    MultiGraph g;
    g.add_edge(0, 1, r1);
    g.add_edge(0, 2, r2);
    return g;
}

/// Seeded random multigraph with n vertices and m edges, multiplicity at most max_mult.
inline MultiGraph random_graph(int n, int m, int max_mult, std::uint64_t seed)
{
    if (n < 2 && m > 0) throw precondition_error("random: need two vertices for an edge");
    if (max_mult < 1) throw precondition_error("random: max multiplicity must be positive");
    long long pairs = static_cast<long long>(n) * (n - 1) / 2;
    if (m > pairs * max_mult) throw precondition_error("random: too many edges for n and max multiplicity");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    MultiGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex(i);
    for (int e = 0; e < m;) {
        int a = pick(rng), b = pick(rng);
        if (a == b || g.multiplicity(a, b) >= max_mult) continue;
        g.add_edge(a, b);
        ++e;
    }
    return g;
}

/// A graph with its tree-partition.
struct PartitionedGraph {
    MultiGraph graph;
    RootedTreePartition dec;
};

/// k disjoint triangles, one bag per triangle, bags hanging off the first.
inline PartitionedGraph disjoint_triangles(int k)
{
    if (k < 1) throw precondition_error("disjoint_triangles: k must be positive");
    PartitionedGraph out;
    for (int i = 0; i < k; ++i) {
        int a = 3 * i;
        out.graph.add_edge(a, a + 1);
        out.graph.add_edge(a + 1, a + 2);
        out.graph.add_edge(a + 2, a);
        out.dec.add_node(i, 0, {a, a + 1, a + 2});
    }
    return out;
}

/// A spine path s_0..s_{k-1}, each spine vertex carrying a pendant triangle and
/// `legs` pendant leaves. Bags: {s_i} on a path, triangle pair and leaves as children.
inline PartitionedGraph caterpillar(int k, int legs = 1)
{
    if (k < 1) throw precondition_error("caterpillar: k must be positive");
    PartitionedGraph out;
    int next = k;
    int node = k;
    for (int i = 0; i < k; ++i) {
        out.graph.add_vertex(i);
        if (i > 0) out.graph.add_edge(i - 1, i);
        out.dec.add_node(i, i == 0 ? 0 : i - 1, {i});
        int a = next++, b = next++;
        out.graph.add_edge(i, a);
        out.graph.add_edge(a, b);
        out.graph.add_edge(b, i);
        out.dec.add_node(node++, i, {a, b});
        for (int l = 0; l < legs; ++l) {
            int c = next++;
            out.graph.add_edge(i, c);
            out.dec.add_node(node++, i, {c});
        }
    }
    return out;
}

/// A host with a partitioned protrusion, built so that the reducer has something to do.
struct ProtrusionInstance {
    MultiGraph host;
    PartitionedProtrusion protrusion;
    std::string kind;
};

/// Random instance for H = θ_r (r in {2, 3}) with at most max_n vertices. "path"
/// instances hang a long two-track ladder off a small core; "star" instances hang
/// many small identical gadgets off one root vertex.
inline ProtrusionInstance protrusion_instance(std::mt19937_64& rng, int r, int max_n = 14)
{
    auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    ProtrusionInstance inst;
    MultiGraph& g = inst.host;
    // core: a cycle with an optional chord or doubled edge
    int core = uni(3, 4);
    for (int i = 0; i < core; ++i) g.add_edge(i, (i + 1) % core);
    if (core == 4 && coin(0.5)) g.add_edge(0, 2);
    if (coin(0.3)) g.add_edge(0, 1);
    vertex next = core;
    auto& pp = inst.protrusion;
    pp.t = 2;
    if (coin(0.5)) {
        inst.kind = "path";
        int len = std::min(uni(4, 5), (max_n - core) / 2);
        vertex a = uni(0, core - 1), b = uni(0, core - 1);
        std::vector<vertex> p(len), q(len);
        for (int i = 0; i < len; ++i) {
            p[i] = next++;
            q[i] = next++;
            g.add_vertex(p[i]);
            g.add_vertex(q[i]);
            if (i > 0) {
                g.add_edge(p[i - 1], p[i]);
                g.add_edge(q[i - 1], q[i]);
            }
            pp.dec.add_node(i, i == 0 ? 0 : i - 1, {p[i], q[i]});
        }
        g.add_edge(p[len - 1], q[len - 1]);
        if (r == 3 && coin(0.5)) g.add_edge(p[len - 1], q[len - 1]); // a 2-cycle at the far end
        g.add_edge(p[0], a);
        g.add_edge(q[0], b);
    } else {
        inst.kind = "star";
        vertex root = next++;
        int a = uni(0, core - 1), b = (a + uni(1, core - 1)) % core;
        g.add_edge(root, a);
        g.add_edge(root, b);
        pp.dec.add_node(0, 0, {root});
        int room = max_n - static_cast<int>(g.n());
        int node = 1;
        int kinds = r == 3 ? 3 : 2;
        while (room > 0) {
            int k = uni(0, kinds - 1);
            if (k == 0 || room < 2) { // leaf
                vertex c = next++;
                g.add_edge(root, c);
                pp.dec.add_node(node++, 0, {c});
                room -= 1;
            } else if (k == 1) { // pendant edge of length two
                vertex c = next++, d = next++;
                g.add_edge(root, c);
                g.add_edge(c, d);
                pp.dec.add_node(node, 0, {c});
                pp.dec.add_node(node + 1, node, {d});
                node += 2;
                room -= 2;
            } else { // pendant 2-cycle, θ_3-free
                vertex c = next++;
                g.add_edge(root, c, 2);
                pp.dec.add_node(node++, 0, {c});
                room -= 1;
            }
        }
    }
    for (auto& [u, bag] : pp.dec.bags) pp.region.insert(bag.begin(), bag.end());
    return inst;
}

} // namespace epp
