#pragma once

#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "certificate.hpp"
#include "subdivision.hpp"

namespace epp {

/// H-vertex -> branch set in the host.
using ModelMap = std::map<vertex, std::set<vertex>>;

/// Edge-disjoint θ_r-subdivisions from a graph with δ(g) >= k·r (degree counts
/// multiplicity). Grows a maximal path from the lowest id; its last vertex v has all of
/// its edges going back into the path. Those edge copies, taken in path order, are cut
/// into k groups of r, and each group together with the subpath it spans gives one
/// witness through v.
inline PackingCert greedy_epack(const MultiGraph& g, int k, int r)
{
    if (k < 1 || r < 1) throw precondition_error("greedy_epack: k and r must be at least 1");
    if (g.empty()) throw precondition_error("greedy_epack: empty graph");
    for (vertex x : g.vertices())
        if (g.degree(x) < k * r)
            throw precondition_error("greedy_epack: vertex " + std::to_string(x) + " has degree " + std::to_string(g.degree(x)) +
                                     " < k*r = " + std::to_string(k * r));

    std::vector<vertex> path{g.vertices().front()};
    std::map<vertex, int> pos{{path.front(), 0}};
    for (;;) {
        vertex next = -1;
        for (auto [y, mu] : g.neighbors(path.back()))
            if (!pos.count(y)) {
                next = y;
                break;
            }
        if (next < 0) break;
        pos[next] = static_cast<int>(path.size());
        path.push_back(next);
    }
    const vertex v = path.back();

    // one slot per edge copy at v, ordered by position of the far end on the path
    std::vector<vertex> slots;
    for (vertex w : path)
        if (w != v)
            for (int c = 0; c < g.multiplicity(v, w); ++c) slots.push_back(w);

    PackingCert out;
    out.mode = Mode::e;
    for (int i = 0; i < k; ++i) {
        vertex first = slots[i * r], last = slots[(i + 1) * r - 1];
        MultiGraph sub;
        sub.add_vertex(v);
        for (int p = pos[first]; p < pos[last]; ++p) sub.add_edge(path[p], path[p + 1]);
        for (int j = i * r; j < (i + 1) * r; ++j) sub.add_edge(v, slots[j]);
        out.witnesses.push_back(witness_from_subgraph(sub, {v}));
    }
    normalize_copies(out);
    return out;
}

struct DegreePartition {
    std::vector<std::set<vertex>> parts;
    int r = 0;
    int moves = 0;   // improving single-vertex moves
    int repairs = 0; // empty-part repairs
};

namespace detail {

inline int neighbours_in(const MultiGraph& g, vertex v, const std::set<vertex>& part)
{
    int c = 0;
    for (auto [y, mu] : g.neighbors(v)) c += part.count(y) ? 1 : 0;
    return c;
}

/// A small vertex set of `part` whose induced graph has minimum simple degree >= r:
/// shrink the r-core one vertex at a time until no single removal leaves a core.
inline std::set<vertex> small_core(const MultiGraph& g, const std::set<vertex>& part, int r)
{
    auto core_of = [&](std::set<vertex> s) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto it = s.begin(); it != s.end();) {
                if (neighbours_in(g, *it, s) < r) {
                    it = s.erase(it);
                    changed = true;
                } else {
                    ++it;
                }
            }
        }
        return s;
    };
    std::set<vertex> x = core_of(part);
    for (bool shrunk = true; shrunk;) {
        shrunk = false;
        for (vertex u : std::vector<vertex>(x.begin(), x.end())) {
            std::set<vertex> trial = x;
            trial.erase(u);
            trial = core_of(trial);
            if (!trial.empty()) {
                x = std::move(trial);
                shrunk = true;
                break;
            }
        }
    }
    return x;
}

} // namespace detail

/// k parts each inducing simple minimum degree >= r, for δ_simple(g) >= k(r+1)-1.
/// Local search from a round-robin start: a vertex with fewer than r neighbours in its
/// own part moves to a part holding at least r+2 of its neighbours.
inline DegreePartition degree_partition(const MultiGraph& g, int k, int r)
{
    if (k < 1 || r < 0) throw precondition_error("degree_partition: need k >= 1 and r >= 0");
    if (static_cast<int>(g.n()) < k) throw precondition_error("degree_partition: fewer vertices than parts");
    for (vertex x : g.vertices())
        if (g.simple_degree(x) < k * (r + 1) - 1)
            throw precondition_error("degree_partition: vertex " + std::to_string(x) + " has " + std::to_string(g.simple_degree(x)) +
                                     " neighbours < k(r+1)-1 = " + std::to_string(k * (r + 1) - 1));

    DegreePartition out;
    out.r = r;
    out.parts.assign(k, {});
    std::map<vertex, int> where;
    {
        int i = 0;
        for (vertex x : g.vertices()) {
            where[x] = i % k;
            out.parts[i % k].insert(x);
            ++i;
        }
    }

    auto settle = [&]() {
        std::deque<vertex> queue;
        std::set<vertex> queued;
        for (vertex x : g.vertices()) {
            queue.push_back(x);
            queued.insert(x);
        }
        while (!queue.empty()) {
            vertex x = queue.front();
            queue.pop_front();
            queued.erase(x);
            const int home = where[x];
            if (detail::neighbours_in(g, x, out.parts[home]) >= r) continue;
            std::vector<int> count(k, 0);
            for (auto [y, mu] : g.neighbors(x)) ++count[where[y]];
            int target = -1;
            for (int j = 0; j < k; ++j)
                if (j != home && count[j] >= r + 2) {
                    target = j;
                    break;
                }
            if (target < 0) throw std::logic_error("degree_partition: no target part despite the degree bound");
            out.parts[home].erase(x);
            out.parts[target].insert(x);
            where[x] = target;
            ++out.moves;
            for (auto [y, mu] : g.neighbors(x))
                if (queued.insert(y).second) queue.push_back(y);
        }
    };

    settle();
    // a part can run empty; split a small r-core off the largest part and settle again
    for (int round = 0; round <= static_cast<int>(g.n()); ++round) {
        int empty = -1, largest = 0;
        for (int i = 0; i < k; ++i) {
            if (out.parts[i].empty() && empty < 0) empty = i;
            if (out.parts[i].size() > out.parts[largest].size()) largest = i;
        }
        if (empty < 0) return out;
        std::set<vertex> core = detail::small_core(g, out.parts[largest], r);
        if (core.empty() || core.size() == out.parts[largest].size())
            throw std::runtime_error("degree_partition: cannot repair an empty part");
        for (vertex x : core) {
            out.parts[largest].erase(x);
            out.parts[empty].insert(x);
            where[x] = empty;
        }
        ++out.repairs;
        settle();
    }
    throw std::runtime_error("degree_partition: empty part persists after repairs");
}

inline Verdict verify_partition(const MultiGraph& g, const DegreePartition& p)
{
    std::set<vertex> seen;
    for (std::size_t i = 0; i < p.parts.size(); ++i) {
        if (p.parts[i].empty()) return Verdict::fail("part " + std::to_string(i) + " is empty");
        for (vertex x : p.parts[i]) {
            if (!g.has_vertex(x)) return Verdict::fail("vertex " + std::to_string(x) + " not in graph");
            if (!seen.insert(x).second) return Verdict::fail("vertex " + std::to_string(x) + " in two parts");
            if (detail::neighbours_in(g, x, p.parts[i]) < p.r)
                return Verdict::fail("vertex " + std::to_string(x) + " has inner degree below " + std::to_string(p.r));
        }
    }
    if (seen.size() != g.n()) return Verdict::fail("parts do not cover V(G)");
    return Verdict::pass();
}

/// k vertex-disjoint θ_r-subdivisions for δ_simple(g) >= k(r+1)-1.
inline PackingCert vpack_from_degree(const MultiGraph& g, int k, int r)
{
    if (r < 1) throw precondition_error("vpack_from_degree: r must be at least 1");
    DegreePartition p = degree_partition(g, k, r);
    PackingCert out;
    out.mode = Mode::v;
    for (auto& part : p.parts) out.witnesses.push_back(greedy_epack(g.induced(part), 1, r).witnesses.front());
    return out;
}

/// Checks that `model` is an h-minor model in w: non-empty, disjoint, connected branch
/// sets and enough host edges between branch sets for every edge copy of h.
inline Verdict verify_model(const MultiGraph& w, const MultiGraph& h, const ModelMap& model)
{
    std::map<vertex, vertex> owner;
    for (vertex a : h.vertices()) {
        auto it = model.find(a);
        if (it == model.end() || it->second.empty()) return Verdict::fail("branch set of " + std::to_string(a) + " is empty");
        for (vertex x : it->second) {
            if (!w.has_vertex(x)) return Verdict::fail("branch set of " + std::to_string(a) + " uses missing vertex " + std::to_string(x));
            if (!owner.emplace(x, a).second)
                return Verdict::fail("branch set of " + std::to_string(a) + " overlaps branch set of " + std::to_string(owner[x]));
        }
        if (!w.induced(it->second).connected()) return Verdict::fail("branch set of " + std::to_string(a) + " is not connected");
    }
    std::map<std::pair<vertex, vertex>, int> between;
    w.for_each_edge([&](vertex x, vertex y, int mu) {
        auto ox = owner.find(x), oy = owner.find(y);
        if (ox != owner.end() && oy != owner.end() && ox->second != oy->second) between[ordered(ox->second, oy->second)] += mu;
    });
    Verdict out;
    h.for_each_edge([&](vertex a, vertex b, int mu) {
        if (out && between[{a, b}] < mu)
            out = Verdict::fail("branch set of " + std::to_string(a) + " has " + std::to_string(between[{a, b}]) + " edges to branch set of " +
                                std::to_string(b) + ", needs " + std::to_string(mu));
    });
    return out;
}

/// Re-routes a packing of h into w through the model: every h-edge copy becomes its own
/// host edge and each branch set contributes the part of a BFS spanning tree joining
/// the attachment points. For r <= 3 the result is trimmed to a θ_r-subdivision.
inline PackingCert lift_packing(const MultiGraph& w, const MultiGraph& h, const ModelMap& model, const PackingCert& cert, int r)
{
    if (auto v = verify_model(w, h, model); !v) throw precondition_error("lift_packing: " + v.reason);

    std::map<vertex, vertex> owner;
    for (auto& [a, set] : model)
        for (vertex x : set) owner[x] = a;
    std::map<std::pair<vertex, vertex>, std::vector<EdgeOcc>> host_edges; // h-pair -> host copies
    w.for_each_edge([&](vertex x, vertex y, int mu) {
        auto ox = owner.find(x), oy = owner.find(y);
        if (ox == owner.end() || oy == owner.end() || ox->second == oy->second) return;
        for (int c = 0; c < mu; ++c) host_edges[ordered(ox->second, oy->second)].emplace_back(x, y, c);
    });
    std::map<std::pair<vertex, vertex>, int> used; // host edge copies taken by earlier witnesses

    // Steiner tree in one branch set: grow from the first terminal by shortest paths,
    // preferring edges with spare copies; falls back to any edge of the set
    auto connect = [&](const std::set<vertex>& set, const std::set<vertex>& ts, MultiGraph& sub) {
        std::set<vertex> tree{*ts.begin()};
        std::map<std::pair<vertex, vertex>, int> mine;
        for (vertex t : ts) {
            if (tree.count(t)) continue;
            for (int strict = 1; strict >= 0; --strict) {
                std::map<vertex, vertex> par;
                std::deque<vertex> q;
                for (vertex x : tree) {
                    par[x] = x;
                    q.push_back(x);
                }
                while (!q.empty() && !par.count(t)) {
                    vertex x = q.front();
                    q.pop_front();
                    for (auto [y, mu] : w.neighbors(x)) {
                        if (!set.count(y) || par.count(y)) continue;
                        auto key = ordered(x, y);
                        if (strict && used[key] + mine[key] >= mu) continue;
                        par[y] = x;
                        q.push_back(y);
                    }
                }
                if (!par.count(t)) continue;
                for (vertex x = t; par[x] != x; x = par[x]) {
                    sub.add_edge(x, par[x]);
                    ++mine[ordered(x, par[x])];
                    tree.insert(x);
                }
                break;
            }
        }
    };

    PackingCert src = cert;
    normalize_copies(src);
    PackingCert out;
    out.mode = cert.mode;
    const HCollection theta = HCollection::theta(r);
    for (auto& hw : src.witnesses) {
        MultiGraph sub;
        std::map<vertex, std::set<vertex>> terminals;
        for (vertex a : hw.vertex_set()) terminals[a];
        for (auto& e : hw.edges()) {
            auto& list = host_edges[{e.u, e.v}];
            if (e.copy >= static_cast<int>(list.size())) throw precondition_error("lift_packing: witness uses an edge copy the model lacks");
            const EdgeOcc& he = list[e.copy];
            sub.add_edge(he.u, he.v);
            terminals[owner[he.u]].insert(he.u);
            terminals[owner[he.v]].insert(he.v);
        }
        for (auto& [a, ts] : terminals) {
            if (ts.empty()) sub.add_vertex(*model.at(a).begin());
            else connect(model.at(a), ts, sub);
        }
        SubdivisionWitness lifted;
        if (r <= 3) {
            auto found = find_subdivision(sub, theta);
            if (!found) throw std::logic_error("lift_packing: lifted subgraph lost its subdivision");
            lifted = std::move(*found);
        } else {
            lifted = witness_from_subgraph(sub);
        }
        for (auto [e, c] : lifted.edge_usage()) used[e] += c;
        out.witnesses.push_back(std::move(lifted));
    }
    // witnesses that share a branch set may overlap on tree edges; keep each one
    // valid on its own and leave the overlap for the caller's verifier
    std::map<std::pair<vertex, vertex>, int> usage;
    bool fits = true;
    for (auto& x : out.witnesses)
        for (auto [e, c] : x.edge_usage()) fits = fits && (usage[e] += c) <= w.multiplicity(e.first, e.second);
    if (fits) normalize_copies(out);
    else
        for (auto& x : out.witnesses) normalize_copies(x);
    return out;
}

} // namespace epp
