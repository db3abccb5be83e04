#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "canonical.hpp"
#include "graph.hpp"

namespace epp {

/// Replaces every maximal path whose internal vertices lie in `s` by a single edge.
/// Surviving vertices keep their ids.
inline MultiGraph dissolve(const MultiGraph& g, const std::set<vertex>& s)
{
    for (vertex v : s) {
        if (!g.has_vertex(v)) throw precondition_error("dissolve: vertex " + std::to_string(v) + " not in graph");
        if (g.degree(v) != 2)
            throw precondition_error("dissolve: vertex " + std::to_string(v) + " has degree " +
                                     std::to_string(g.degree(v)) + ", expected 2");
    }
    MultiGraph out = g;
    for (vertex v : s) {
        const auto& nb = out.neighbors(v);
        if (nb.size() != 2)
            throw precondition_error("dissolve: removing vertex " + std::to_string(v) + " would create a loop");
        auto it = nb.begin();
        vertex a = it->first;
        vertex b = std::next(it)->first;
        out.remove_vertex(v);
        out.add_edge(a, b);
    }
    return out;
}

/// A graph with labelled degree-one boundary vertices.
struct BoundariedGraph {
    MultiGraph graph;
    std::map<vertex, int> labels; // boundary vertex -> label

    std::set<vertex> boundary() const
    {
        std::set<vertex> b;
        for (auto& [v, l] : labels) b.insert(v);
        return b;
    }

    std::set<int> label_set() const
    {
        std::set<int> s;
        for (auto& [v, l] : labels) s.insert(l);
        return s;
    }

    vertex vertex_of(int label) const
    {
        for (auto& [v, l] : labels)
            if (l == label) return v;
        throw std::out_of_range("no boundary label " + std::to_string(label));
    }

    std::vector<vertex> interior() const
    {
        std::vector<vertex> out;
        for (vertex v : graph.vertices())
            if (!labels.count(v)) out.push_back(v);
        return out;
    }

    std::size_t n() const { return graph.n() - labels.size(); }
    std::size_t m() const { return graph.m(); }

    /// The interior neighbour (or boundary partner) of a boundary vertex.
    vertex attachment(vertex b) const { return graph.neighbors(b).begin()->first; }

    /// G \ B, the part that must be H-free for the protrusion machinery.
    MultiGraph interior_graph() const { return graph.without(boundary()); }

    /// Throws if a boundary vertex does not have degree one or labels repeat.
    void validate() const
    {
        std::set<int> seen;
        for (auto& [v, l] : labels) {
            if (!graph.has_vertex(v)) throw precondition_error("boundary vertex " + std::to_string(v) + " missing");
            if (graph.degree(v) != 1)
                throw precondition_error("boundary vertex " + std::to_string(v) + " has degree " +
                                         std::to_string(graph.degree(v)));
            if (!seen.insert(l).second) throw precondition_error("duplicate boundary label " + std::to_string(l));
        }
    }

    BoundariedGraph relabeled(const std::map<int, int>& label_map) const
    {
        BoundariedGraph out{graph, {}};
        for (auto& [v, l] : labels) out.labels[v] = label_map.at(l);
        return out;
    }

    std::string canonical() const { return canonical_form(graph, labels); }
};

inline bool compatible(const BoundariedGraph& a, const BoundariedGraph& b)
{
    return a.label_set() == b.label_set();
}

/// The glued graph g1 (+) g2: matching labels identified, identified vertices dissolved.
/// Interior ids are preserved when the two interiors are disjoint; otherwise the
/// interior of g2 is shifted past the ids of g1.
inline MultiGraph glue(const BoundariedGraph& g1, const BoundariedGraph& g2)
{
    auto l1 = g1.label_set(), l2 = g2.label_set();
    if (l1 != l2) {
        std::string diff;
        for (int l : l1)
            if (!l2.count(l)) diff += " " + std::to_string(l);
        for (int l : l2)
            if (!l1.count(l)) diff += " " + std::to_string(l);
        throw precondition_error("glue: incompatible boundaried graphs, labels differ in:" + diff);
    }
    auto b1 = g1.boundary(), b2 = g2.boundary();
    auto in1 = g1.interior(), in2 = g2.interior();
    std::set<vertex> s1(in1.begin(), in1.end());
    bool clash = false;
    for (vertex v : in2)
        if (s1.count(v)) clash = true;
    vertex top = std::max(g1.graph.max_vertex(), g2.graph.max_vertex()) + 1;
    vertex shift = clash ? top : 0;
    vertex fresh = top + (clash ? g2.graph.max_vertex() + 1 : 0);

    std::map<int, vertex> joint; // label -> identified vertex
    for (int l : l1) joint[l] = fresh++;

    auto map1 = [&](vertex v) { return b1.count(v) ? joint.at(g1.labels.at(v)) : v; };
    auto map2 = [&](vertex v) { return b2.count(v) ? joint.at(g2.labels.at(v)) : v + shift; };

    MultiGraph out;
    for (vertex v : in1) out.add_vertex(v);
    for (vertex v : in2) out.add_vertex(v + shift);
    g1.graph.for_each_edge([&](vertex u, vertex v, int mu) { out.add_edge(map1(u), map1(v), mu); });
    g2.graph.for_each_edge([&](vertex u, vertex v, int mu) { out.add_edge(map2(u), map2(v), mu); });
    std::set<vertex> ids;
    for (auto [l, z] : joint) ids.insert(z);
    return dissolve(out, ids);
}

/// S-splitting of w. Crossing edge copies are subdivided; labels 1..c are assigned in
/// increasing order of (inside endpoint, outside endpoint, copy).
inline std::pair<BoundariedGraph, BoundariedGraph> split(const MultiGraph& w, const std::set<vertex>& s)
{
    if (s.empty()) throw precondition_error("split: S must be non-empty");
    for (vertex v : s)
        if (!w.has_vertex(v)) throw precondition_error("split: vertex " + std::to_string(v) + " not in graph");

    std::vector<std::pair<vertex, vertex>> crossing; // (inside, outside), one per copy
    for (vertex a : s)
        for (auto [b, mu] : w.neighbors(a))
            if (!s.count(b))
                for (int c = 0; c < mu; ++c) crossing.emplace_back(a, b);
    std::sort(crossing.begin(), crossing.end());

    BoundariedGraph in, out;
    for (vertex v : w.vertices()) (s.count(v) ? in : out).graph.add_vertex(v);
    w.for_each_edge([&](vertex u, vertex v, int mu) {
        if (s.count(u) && s.count(v)) in.graph.add_edge(u, v, mu);
        else if (!s.count(u) && !s.count(v)) out.graph.add_edge(u, v, mu);
    });
    vertex fresh = w.max_vertex() + 1;
    int label = 1;
    for (auto [a, b] : crossing) {
        vertex z = fresh++;
        in.graph.add_edge(a, z);
        out.graph.add_edge(b, z);
        in.labels[z] = label;
        out.labels[z] = label;
        ++label;
    }
    return {std::move(in), std::move(out)};
}

} // namespace epp
