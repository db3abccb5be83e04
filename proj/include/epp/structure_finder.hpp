#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "degree_packing.hpp"
#include "reduce.hpp"
#include "subdivision.hpp"
#include "tree_partition.hpp"

namespace epp {

struct ProtrusionFound {
    PartitionedProtrusion protrusion;
};

/// A minor model of `minor` in the host; min_degree is the declared simple minimum degree.
struct DenseMinor {
    ModelMap model;
    MultiGraph minor;
    int min_degree = 0;
};

struct Exhausted {
    std::string reason;
};

using StructureCertificate = std::variant<SmallSubdivision, ProtrusionFound, DenseMinor>;
using StructureOutcome = std::variant<SmallSubdivision, ProtrusionFound, DenseMinor, Exhausted>;

struct StructureParams {
    int r = 2;
    int w = 2;
    int z = 3;
    int degree_target = 1;
};

struct FinderOptions {
    int cut_seeds = 8; // BFS-extremal pairs tried for edge-cuts
    int oracle_cap = default_oracle_cap;
};

inline Verdict verify_structure(const MultiGraph& host, const StructureCertificate& cert, const StructureParams& p)
{
    if (auto* s = std::get_if<SmallSubdivision>(&cert)) {
        if (auto v = verify_witness(host, s->witness, HCollection::theta(p.r)); !v) return v;
        if (static_cast<int>(s->witness.edge_count()) > p.z)
            return Verdict::fail("subdivision has " + std::to_string(s->witness.edge_count()) + " edges, budget is " + std::to_string(p.z));
        return Verdict::pass();
    }
    if (auto* f = std::get_if<ProtrusionFound>(&cert)) {
        auto& pp = f->protrusion;
        if (pp.t != 2 * p.r - 2) return Verdict::fail("protrusion width parameter is not 2r-2");
        if (auto v = verify_protrusion(host, pp); !v) return v;
        if (!host.induced(pp.region).connected()) return Verdict::fail("protrusion is not connected");
        if (static_cast<int>(pp.region.size()) <= p.w)
            return Verdict::fail("protrusion has " + std::to_string(pp.region.size()) + " vertices, needs more than " + std::to_string(p.w));
        return Verdict::pass();
    }
    auto& d = std::get<DenseMinor>(cert);
    if (auto v = verify_model(host, d.minor, d.model); !v) return v;
    if (d.minor.empty()) return Verdict::fail("minor is empty");
    if (d.minor.min_simple_degree() < d.min_degree)
        return Verdict::fail("minor has minimum degree " + std::to_string(d.minor.min_simple_degree()) + ", declared " +
                             std::to_string(d.min_degree));
    if (d.min_degree < p.degree_target)
        return Verdict::fail("declared degree " + std::to_string(d.min_degree) + " is below the target " + std::to_string(p.degree_target));
    return Verdict::pass();
}

inline nlohmann::json to_json(const StructureCertificate& cert)
{
    if (auto* s = std::get_if<SmallSubdivision>(&cert))
        return {{"kind", "subdivision"}, {"edges", s->witness.edge_count()}, {"branch", s->witness.branch_map}};
    if (auto* f = std::get_if<ProtrusionFound>(&cert))
        return {{"kind", "protrusion"},
                {"region", std::vector<vertex>(f->protrusion.region.begin(), f->protrusion.region.end())},
                {"t", f->protrusion.t},
                {"partition", to_json(f->protrusion.dec)}};
    auto& d = std::get<DenseMinor>(cert);
    nlohmann::json model = nlohmann::json::object();
    for (auto& [a, set] : d.model) model[std::to_string(a)] = std::vector<vertex>(set.begin(), set.end());
    return {{"kind", "dense_minor"}, {"min_degree", d.min_degree}, {"minor_vertices", d.minor.n()}, {"model", model}};
}

namespace detail {

/// A θ_r-subdivision with at most z edges, if one exists. Branch pairs are limited to
/// distance z/r; each pair gets r disjoint paths of least total length.
inline std::optional<SubdivisionWitness> bounded_theta(const MultiGraph& g, int r, int z, int oracle_cap = default_oracle_cap)
{
    if (r <= 3 && theta_free_small_r(g, r)) return std::nullopt;
    if (r == 2) {
        auto c = short_cycle(g, z);
        if (!c) return std::nullopt;
        return cycle_witness(*c);
    }
    const int radius = z / r;
    for (vertex a : g.vertices()) {
        if (g.degree(a) < r) continue;
        std::map<vertex, int> dist{{a, 0}};
        std::deque<vertex> q{a};
        while (!q.empty()) {
            vertex x = q.front();
            q.pop_front();
            if (dist[x] == radius) continue;
            for (auto [y, mu] : g.neighbors(x))
                if (dist.emplace(y, dist[x] + 1).second) q.push_back(y);
        }
        for (auto [b, d] : dist) {
            if (b <= a || g.degree(b) < r) continue;
            auto p = disjoint_paths(g, a, b, r);
            if (!p) continue;
            int len = 0;
            for (auto& path : *p) len += static_cast<int>(path.size()) - 1;
            if (len <= z) return theta_witness_from_paths(r, *p);
        }
    }
    // for r >= 4 some minimal models are not θ_r-subdivisions; those are only searched
    // at oracle scale
    if (r >= 4 && static_cast<int>(g.n()) <= oracle_cap) return find_subdivision(g, HCollection::theta(r), {z, oracle_cap});
    return std::nullopt;
}

/// Contracted graph kept as simple adjacency with multiplicities plus branch sets.
struct Contraction {
    std::map<vertex, std::map<vertex, int>> adj;
    std::map<vertex, std::set<vertex>> branch;

    explicit Contraction(const MultiGraph& g)
    {
        for (vertex v : g.vertices()) {
            adj[v];
            branch[v] = {v};
            for (auto [u, mu] : g.neighbors(v)) adj[v][u] = mu;
        }
    }

    MultiGraph graph() const
    {
        MultiGraph h;
        for (auto& [v, nb] : adj) {
            h.add_vertex(v);
            for (auto [u, mu] : nb)
                if (v < u) h.add_edge(v, u, mu);
        }
        return h;
    }

    int degree(vertex v) const { return static_cast<int>(adj.at(v).size()); }

    /// Merges v into u.
    void contract(vertex v, vertex u)
    {
        for (auto [x, mu] : adj[v]) {
            adj[x].erase(v);
            if (x == u) continue;
            adj[u][x] += mu;
            adj[x][u] += mu;
        }
        adj.erase(v);
        branch[u].insert(branch[v].begin(), branch[v].end());
        branch.erase(v);
    }
};

/// Greedy contraction: a vertex of least degree is merged into the neighbour it shares
/// fewest neighbours with (then least degree, then smallest id). Calls `step` on every
/// contracted graph, the input included; stops when `step` returns true or one vertex
/// is left.
inline void contract_greedily(const MultiGraph& g, const std::function<bool(const Contraction&)>& step)
{
    Contraction c(g);
    std::set<std::pair<int, vertex>> order;
    for (auto& [v, nb] : c.adj) order.insert({static_cast<int>(nb.size()), v});
    while (!step(c) && c.adj.size() > 1) {
        vertex v = order.begin()->second;
        vertex best = -1;
        std::tuple<int, int, vertex> key{};
        for (auto [u, mu] : c.adj[v]) {
            int common = 0;
            for (auto [x, m2] : c.adj[v])
                if (x != u && c.adj[u].count(x)) ++common;
            std::tuple<int, int, vertex> k{common, c.degree(u), u};
            if (best < 0 || k < key) {
                best = u;
                key = k;
            }
        }
        if (best < 0) break; // isolated, cannot happen on connected input
        std::set<vertex> touched{best};
        for (auto [x, mu] : c.adj[v]) touched.insert(x);
        for (vertex x : touched) order.erase({c.degree(x), x});
        order.erase({c.degree(v), v});
        c.contract(v, best);
        for (vertex x : touched) order.insert({c.degree(x), x});
    }
}

inline std::optional<DenseMinor> dense_minor(const MultiGraph& g, int target)
{
    std::optional<DenseMinor> out;
    contract_greedily(g, [&](const Contraction& c) {
        if (static_cast<int>(c.adj.size()) <= target) return true; // too few vertices left
        for (auto& [v, nb] : c.adj)
            if (static_cast<int>(nb.size()) < target) return false;
        DenseMinor d;
        d.minor = c.graph();
        d.model = c.branch;
        d.min_degree = d.minor.min_simple_degree();
        out = std::move(d);
        return true;
    });
    return out;
}

/// Tree-partition of g[region] grown from `root_bag`: the children of a node are the
/// components of what is left below it, each with the neighbours of the parent bag as
/// its bag.
inline RootedTreePartition layered_partition(const MultiGraph& g, const std::set<vertex>& region, const std::set<vertex>& root_bag)
{
    RootedTreePartition d;
    d.add_node(0, 0, root_bag);
    struct Job {
        int node;
        std::set<vertex> comp;
    };
    std::vector<Job> jobs{{0, region}};
    int next = 1;
    while (!jobs.empty()) {
        Job job = std::move(jobs.back());
        jobs.pop_back();
        const auto& bag = d.bags.at(job.node);
        std::set<vertex> rest;
        for (vertex v : job.comp)
            if (!bag.count(v)) rest.insert(v);
        if (rest.empty()) continue;
        for (auto& comp : g.induced(rest).components()) {
            std::set<vertex> cs(comp.begin(), comp.end()), child;
            for (vertex y : cs)
                for (auto [x, mu] : g.neighbors(y))
                    if (bag.count(x)) {
                        child.insert(y);
                        break;
                    }
            if (child.empty()) throw std::logic_error("layered_partition: region is not connected");
            d.add_node(next, job.node, child);
            jobs.push_back({next++, std::move(cs)});
        }
    }
    return d;
}

struct CutSides {
    std::set<vertex> a_side; // reachable from a in the residual graph
    std::set<vertex> b_side; // can reach b in the residual graph
};

/// Minimum a-b edge cut if its value is at most `limit` (unit capacity per edge copy),
/// as the smallest a side and the smallest b side.
inline std::optional<CutSides> small_cut(const MultiGraph& g, vertex a, vertex b, int limit)
{
    std::map<std::pair<vertex, vertex>, int> flow; // flow[(x,y)] = -flow[(y,x)]
    auto residual = [&](vertex x, vertex y) { return g.multiplicity(x, y) - flow[{x, y}]; };
    for (int f = 0;; ++f) {
        std::map<vertex, vertex> par{{a, a}};
        std::deque<vertex> q{a};
        while (!q.empty() && !par.count(b)) {
            vertex x = q.front();
            q.pop_front();
            for (auto [y, mu] : g.neighbors(x))
                if (!par.count(y) && residual(x, y) > 0) {
                    par[y] = x;
                    q.push_back(y);
                }
        }
        if (!par.count(b)) {
            CutSides out;
            for (auto& [v, p] : par) out.a_side.insert(v);
            std::deque<vertex> back{b};
            out.b_side.insert(b);
            while (!back.empty()) {
                vertex x = back.front();
                back.pop_front();
                for (auto [y, mu] : g.neighbors(x))
                    if (!out.b_side.count(y) && residual(y, x) > 0) {
                        out.b_side.insert(y);
                        back.push_back(y);
                    }
            }
            return out;
        }
        if (f == limit) return std::nullopt;
        for (vertex y = b; y != a; y = par[y]) {
            ++flow[{par[y], y}];
            --flow[{y, par[y]}];
        }
    }
}

inline vertex farthest(const MultiGraph& g, vertex s)
{
    std::map<vertex, int> dist{{s, 0}};
    std::deque<vertex> q{s};
    vertex last = s;
    while (!q.empty()) {
        vertex x = q.front();
        q.pop_front();
        last = x;
        for (auto [y, mu] : g.neighbors(x))
            if (dist.emplace(y, dist[x] + 1).second) q.push_back(y);
    }
    return last;
}

/// Checks a candidate region and builds its tree-partition.
inline std::optional<PartitionedProtrusion> try_region(const MultiGraph& g, const std::set<vertex>& region, int t, int w,
                                                       std::optional<vertex> root = std::nullopt)
{
    if (static_cast<int>(region.size()) <= w) return std::nullopt;
    auto cross = crossing_edges(g, region);
    if (static_cast<int>(cross.size()) > t) return std::nullopt;
    if (!g.induced(region).connected()) return std::nullopt;
    std::set<vertex> root_bag;
    for (auto [a, b] : cross) root_bag.insert(a);
    if (root_bag.empty()) root_bag = {root.value_or(*region.begin())};
    if (static_cast<int>(root_bag.size()) > t) return std::nullopt;
    PartitionedProtrusion pp{region, layered_partition(g, region, root_bag), t};
    if (!verify_protrusion(g, pp)) return std::nullopt;
    return pp;
}

inline std::optional<PartitionedProtrusion> find_protrusion(const MultiGraph& g, int t, int w, const FinderOptions& opt)
{
    const vertex first = g.vertices().front();
    const vertex far = farthest(g, first);
    for (vertex root : {first, far})
        if (auto pp = try_region(g, g.vertex_set(), t, w, root)) return pp;
    // nested cuts between BFS-extremal pairs; the smaller side is tried first
    auto vs = g.vertices();
    std::set<std::pair<vertex, vertex>> tried;
    for (int s = 0; s < opt.cut_seeds && s < static_cast<int>(vs.size()); ++s) {
        vertex a = farthest(g, vs[s]), b = farthest(g, a);
        if (a == b || !tried.insert(ordered(a, b)).second) continue;
        auto cut = small_cut(g, a, b, t);
        if (!cut) continue;
        std::vector<std::set<vertex>> parts{cut->a_side, cut->b_side}, cands;
        for (int i = 0; i < 2; ++i) {
            std::set<vertex> other;
            for (vertex v : vs)
                if (!parts[i].count(v)) other.insert(v);
            parts.push_back(std::move(other));
        }
        for (auto& part : parts)
            for (auto& comp : g.induced(part).components()) cands.emplace_back(comp.begin(), comp.end());
        std::sort(cands.begin(), cands.end(), [](auto& x, auto& y) { return x.size() != y.size() ? x.size() < y.size() : x < y; });
        for (auto& region : cands)
            if (auto pp = try_region(g, region, t, w)) return pp;
    }
    return std::nullopt;
}

} // namespace detail

/// Small θ_r-subdivision, large (2r-2)-partitioned protrusion or dense minor model in a
/// connected graph. A host that is itself dense enough is returned as its own minor
/// before anything else is searched.
inline StructureOutcome find_structure(const MultiGraph& w_graph, int r, int w, int z, int degree_target, const FinderOptions& opt = {})
{
    if (r < 2) throw precondition_error("find_structure: r must be at least 2");
    if (z <= r) throw precondition_error("find_structure: z must exceed r");
    if (degree_target < 1) throw precondition_error("find_structure: degree target must be positive");
    if (w_graph.empty() || !w_graph.connected()) throw precondition_error("find_structure: graph must be connected and non-empty");

    if (static_cast<int>(w_graph.n()) > degree_target && w_graph.min_simple_degree() >= degree_target) {
        DenseMinor d;
        d.minor = w_graph;
        for (vertex v : w_graph.vertices()) d.model[v] = {v};
        d.min_degree = w_graph.min_simple_degree();
        return d;
    }
    if (auto m = detail::bounded_theta(w_graph, r, z, opt.oracle_cap)) return SmallSubdivision{*m};
    if (auto d = detail::dense_minor(w_graph, degree_target)) return *d;
    if (auto pp = detail::find_protrusion(w_graph, 2 * r - 2, w, opt)) return ProtrusionFound{*pp};
    return Exhausted{"no subdivision within " + std::to_string(z) + " edges, no minor of degree " + std::to_string(degree_target) +
                     ", no protrusion found"};
}

} // namespace epp
