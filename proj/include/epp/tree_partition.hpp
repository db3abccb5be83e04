#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "boundaried.hpp"
#include "certificate.hpp"

namespace epp {

struct tree_partition_error : precondition_error {
    using precondition_error::precondition_error;
};

/// Rooted tree-partition: the tree is given by parent links (the root is its own
/// parent) and every node carries a bag.
struct RootedTreePartition {
    int root = 0;
    std::map<int, int> parent;
    std::map<int, std::set<vertex>> bags;

    static RootedTreePartition single(const std::set<vertex>& bag)
    {
        RootedTreePartition d;
        d.parent[0] = 0;
        d.bags[0] = bag;
        return d;
    }

    void add_node(int node, int par, std::set<vertex> bag)
    {
        parent[node] = par;
        bags[node] = std::move(bag);
    }

    std::vector<int> nodes() const
    {
        std::vector<int> out;
        for (auto& [u, p] : parent) out.push_back(u);
        return out;
    }

    std::vector<int> children(int u) const
    {
        std::vector<int> out;
        for (auto& [c, p] : parent)
            if (p == u && c != u) out.push_back(c);
        return out;
    }

    std::map<int, std::vector<int>> child_lists() const
    {
        std::map<int, std::vector<int>> out;
        for (auto& [c, p] : parent) {
            out[c];
            if (c != p) out[p].push_back(c);
        }
        return out;
    }

    /// Nodes of T_u in preorder.
    std::vector<int> subtree(int u) const
    {
        auto kids = child_lists();
        std::vector<int> out, stack{u};
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            out.push_back(x);
            auto& ks = kids[x];
            for (auto it = ks.rbegin(); it != ks.rend(); ++it) stack.push_back(*it);
        }
        return out;
    }

    /// V_u: union of the bags of T_u.
    std::set<vertex> below(int u) const
    {
        std::set<vertex> out;
        for (int x : subtree(u)) out.insert(bags.at(x).begin(), bags.at(x).end());
        return out;
    }

    /// Height of every node (leaves have height 0).
    std::map<int, int> heights() const
    {
        auto kids = child_lists();
        std::map<int, int> h;
        auto order = subtree(root);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int best = 0;
            for (int c : kids[*it]) best = std::max(best, h[c] + 1);
            h[*it] = best;
        }
        return h;
    }

    int degree(int u) const
    {
        int d = static_cast<int>(children(u).size());
        return u == root ? d : d + 1;
    }

    bool is_ancestor(int a, int b) const // a is a proper ancestor of b
    {
        while (b != root) {
            b = parent.at(b);
            if (b == a) return true;
        }
        return false;
    }

    std::map<vertex, int> owner() const
    {
        std::map<vertex, int> out;
        for (auto& [u, bag] : bags)
            for (vertex v : bag) out[v] = u;
        return out;
    }

    /// Drops T_u from the tree.
    void remove_subtree(int u)
    {
        for (int x : subtree(u)) {
            parent.erase(x);
            bags.erase(x);
        }
    }

    /// D_u: the part of the partition below u, rooted at u.
    RootedTreePartition restricted(int u) const
    {
        RootedTreePartition d;
        d.root = u;
        for (int x : subtree(u)) d.add_node(x, x == u ? u : parent.at(x), bags.at(x));
        return d;
    }
};

/// Checks that d is a rooted tree-partition of g and returns its width.
inline int tpw_validate(const MultiGraph& g, const RootedTreePartition& d)
{
    if (!d.parent.count(d.root) || d.parent.at(d.root) != d.root) throw tree_partition_error("tree-partition: root " + std::to_string(d.root) + " is not its own parent");
    for (auto& [u, p] : d.parent) {
        if (!d.parent.count(p)) throw tree_partition_error("tree-partition: node " + std::to_string(u) + " has unknown parent " + std::to_string(p));
        if (!d.bags.count(u)) throw tree_partition_error("tree-partition: node " + std::to_string(u) + " has no bag");
    }
    if (d.subtree(d.root).size() != d.parent.size()) throw tree_partition_error("tree-partition: parent links do not form a tree");
    std::map<vertex, int> where;
    for (auto& [u, bag] : d.bags)
        for (vertex v : bag) {
            if (!g.has_vertex(v)) throw tree_partition_error("tree-partition: bag " + std::to_string(u) + " holds unknown vertex " + std::to_string(v));
            if (!where.emplace(v, u).second) throw tree_partition_error("tree-partition: vertex " + std::to_string(v) + " lies in two bags");
        }
    for (vertex v : g.vertices())
        if (!where.count(v)) throw tree_partition_error("tree-partition: vertex " + std::to_string(v) + " is in no bag");

    int width = 0;
    for (auto& [u, bag] : d.bags) width = std::max(width, static_cast<int>(bag.size()));
    std::map<std::pair<int, int>, int> across;
    g.for_each_edge([&](vertex a, vertex b, int mu) {
        int x = where[a], y = where[b];
        if (x == y) return;
        if (d.parent.size() == 1) return;
        bool adjacent = (d.parent.at(x) == y && x != d.root) || (d.parent.at(y) == x && y != d.root);
        if (!adjacent)
            throw tree_partition_error("tree-partition: edge {" + std::to_string(a) + "," + std::to_string(b) + "} joins non-adjacent bags " +
                                       std::to_string(x) + " and " + std::to_string(y));
        across[{std::min(x, y), std::max(x, y)}] += mu;
    });
    for (auto& [f, c] : across) width = std::max(width, c);
    return width;
}

/// Edges of W leaving `region`, one entry per copy, as (inside, outside) in the
/// order the splitting assigns labels 1, 2, ...
inline std::vector<std::pair<vertex, vertex>> crossing_edges(const MultiGraph& w, const std::set<vertex>& region)
{
    std::vector<std::pair<vertex, vertex>> out;
    for (vertex a : region)
        for (auto [b, mu] : w.neighbors(a))
            if (!region.count(b))
                for (int c = 0; c < mu; ++c) out.emplace_back(a, b);
    std::sort(out.begin(), out.end());
    return out;
}

/// A t-partitioned protrusion of a host: the interior `region` of the boundaried
/// graph and a tree-partition of it.
struct PartitionedProtrusion {
    std::set<vertex> region;
    RootedTreePartition dec;
    int t = 1;

    /// The boundaried graph G of the protrusion (labels by splitting order).
    BoundariedGraph boundaried(const MultiGraph& w) const { return split(w, region).first; }
};

inline Verdict verify_protrusion(const MultiGraph& w, const PartitionedProtrusion& p)
{
    if (p.region.empty()) return Verdict::fail("protrusion region is empty");
    for (vertex v : p.region)
        if (!w.has_vertex(v)) return Verdict::fail("protrusion vertex " + std::to_string(v) + " not in host");
    auto cross = crossing_edges(w, p.region);
    if (static_cast<int>(cross.size()) > p.t)
        return Verdict::fail("protrusion has " + std::to_string(cross.size()) + " boundary edges, more than t = " + std::to_string(p.t));
    int width = 0;
    try {
        width = tpw_validate(w.induced(p.region), p.dec);
    } catch (const tree_partition_error& e) {
        return Verdict::fail(e.what());
    }
    if (width > p.t) return Verdict::fail("tree-partition width " + std::to_string(width) + " exceeds t = " + std::to_string(p.t));
    if (!cross.empty()) {
        std::set<vertex> attach;
        for (auto [a, b] : cross) attach.insert(a);
        if (attach != p.dec.bags.at(p.dec.root)) return Verdict::fail("root bag differs from the neighbours of the boundary");
    }
    return Verdict::pass();
}

/// The common vertex and subdivision-edge bound for tree-partitions of width <= t,
/// height <= height_bound and degree <= maxdeg + 1: 2 h t^3 maxdeg^(height_bound+1).
inline long double partition_size_bound(int h, int t, int maxdeg, int height_bound)
{
    return 2.0L * h * std::pow(static_cast<long double>(t), 3) * std::pow(static_cast<long double>(maxdeg), height_bound + 1);
}

inline nlohmann::json to_json(const RootedTreePartition& d)
{
    nlohmann::json nodes = nlohmann::json::array();
    for (auto& [u, p] : d.parent) nodes.push_back({{"node", u}, {"parent", p}, {"bag", std::vector<vertex>(d.bags.at(u).begin(), d.bags.at(u).end())}});
    return {{"root", d.root}, {"nodes", nodes}};
}

inline RootedTreePartition tree_partition_from_json(const nlohmann::json& j)
{
    RootedTreePartition d;
    d.root = j.at("root").get<int>();
    for (auto& n : j.at("nodes")) {
        auto bag = n.at("bag").get<std::vector<vertex>>();
        d.add_node(n.at("node").get<int>(), n.at("parent").get<int>(), std::set<vertex>(bag.begin(), bag.end()));
    }
    return d;
}

} // namespace epp
