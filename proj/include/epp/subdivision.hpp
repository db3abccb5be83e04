#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "certificate.hpp"
#include "graph.hpp"
#include "minor.hpp"

namespace epp {

/// Guard for the exponential search routes.
inline constexpr int default_oracle_cap = 16;

struct oracle_guard_error : precondition_error {
    using precondition_error::precondition_error;
};

inline void check_cap(const MultiGraph& g, int cap, const char* what)
{
    if (static_cast<int>(g.n()) > cap)
        throw oracle_guard_error(std::string(what) + ": graph has " + std::to_string(g.n()) + " vertices, oracle cap is " + std::to_string(cap));
}

// ---------------------------------------------------------------------------------
// Blocks (2-connected components; a pair with multiplicity >= 2 counts as a cycle).

struct Block {
    std::vector<vertex> vertices;
    std::vector<std::pair<std::pair<vertex, vertex>, int>> edges; // pair -> multiplicity

    long long cycle_rank() const
    {
        long long m = 0;
        for (auto& e : edges) m += e.second;
        return m - static_cast<long long>(vertices.size()) + 1;
    }
};

inline std::vector<Block> blocks(const MultiGraph& g)
{
    std::vector<Block> out;
    std::map<vertex, int> disc, low;
    int timer = 0;
    std::vector<std::pair<vertex, vertex>> estack;
    for (vertex root : g.vertices()) {
        if (disc.count(root)) continue;
        // iterative DFS: (vertex, parent, neighbour iterator)
        struct Frame {
            vertex v, parent;
            MultiGraph::adjacency::const_iterator it;
        };
        std::vector<Frame> st;
        disc[root] = low[root] = timer++;
        st.push_back({root, -1, g.neighbors(root).begin()});
        while (!st.empty()) {
            auto& f = st.back();
            if (f.it != g.neighbors(f.v).end()) {
                auto [y, mu] = *f.it;
                ++f.it;
                if (!disc.count(y)) {
                    estack.emplace_back(f.v, y);
                    disc[y] = low[y] = timer++;
                    st.push_back({y, f.v, g.neighbors(y).begin()});
                } else if (y != f.parent && disc[y] < disc[f.v]) {
                    estack.emplace_back(f.v, y);
                    low[f.v] = std::min(low[f.v], disc[y]);
                } else if (y == f.parent && mu >= 2) {
                    low[f.v] = std::min(low[f.v], disc[y]);
                }
                continue;
            }
            vertex v = f.v, p = f.parent;
            st.pop_back();
            if (p < 0) continue;
            low[p] = std::min(low[p], low[v]);
            if (low[v] >= disc[p]) {
                Block b;
                std::set<vertex> vs;
                std::map<std::pair<vertex, vertex>, int> es;
                while (!estack.empty()) {
                    auto e = estack.back();
                    estack.pop_back();
                    vs.insert(e.first);
                    vs.insert(e.second);
                    es[ordered(e.first, e.second)] = g.multiplicity(e.first, e.second);
                    if (e == std::pair{p, v}) break;
                }
                b.vertices.assign(vs.begin(), vs.end());
                b.edges.assign(es.begin(), es.end());
                out.push_back(std::move(b));
            }
        }
    }
    return out;
}

inline MultiGraph block_graph(const Block& b)
{
    MultiGraph g;
    for (auto& [e, mu] : b.edges) g.add_edge(e.first, e.second, mu);
    return g;
}

inline long long cycle_rank(const MultiGraph& g)
{
    return static_cast<long long>(g.m()) - static_cast<long long>(g.n()) + static_cast<long long>(g.components().size());
}

/// Θ_r-freeness for r <= 3 in linear time: every block has cycle rank below r-1.
inline bool theta_free_small_r(const MultiGraph& g, int r)
{
    if (r < 1 || r > 3) throw precondition_error("theta_free_small_r needs 1 <= r <= 3");
    if (r == 1) return g.m() == 0;
    if (r == 2) return cycle_rank(g) == 0;
    for (auto& b : blocks(g))
        if (b.cycle_rank() >= 2) return false;
    return true;
}

// ---------------------------------------------------------------------------------
// r internally vertex-disjoint a-b paths of minimum total length (min-cost flow on the
// vertex-split graph).

inline std::optional<std::vector<std::vector<vertex>>> disjoint_paths(const MultiGraph& g, vertex a, vertex b, int r,
                                                                      const std::set<vertex>* allowed = nullptr)
{
    if (a == b || r < 1 || !g.has_vertex(a) || !g.has_vertex(b)) return std::nullopt;
    auto ok = [&](vertex x) { return !allowed || allowed->count(x); };
    std::vector<vertex> vs;
    for (vertex v : g.vertices())
        if (ok(v) || v == a || v == b) vs.push_back(v);
    std::map<vertex, int> idx;
    for (std::size_t i = 0; i < vs.size(); ++i) idx[vs[i]] = static_cast<int>(i);
    const int N = 2 * static_cast<int>(vs.size());
    struct Arc {
        int to, cap, cost, rev, orig;
    };
    std::vector<std::vector<Arc>> adj(N);
    auto add = [&](int u, int v, int cap, int cost) {
        adj[u].push_back({v, cap, cost, static_cast<int>(adj[v].size()), cap});
        adj[v].push_back({u, 0, -cost, static_cast<int>(adj[u].size()) - 1, 0});
    };
    auto in = [&](vertex x) { return 2 * idx[x]; };
    auto out = [&](vertex x) { return 2 * idx[x] + 1; };
    for (vertex x : vs) add(in(x), out(x), (x == a || x == b) ? r : 1, 0);
    g.for_each_edge([&](vertex u, vertex v, int mu) {
        if (!idx.count(u) || !idx.count(v)) return;
        add(out(u), in(v), mu, 1);
        add(out(v), in(u), mu, 1);
    });
    const int s = out(a), t = in(b);
    int flow = 0;
    const int INF = std::numeric_limits<int>::max() / 4;
    while (flow < r) {
        std::vector<int> dist(N, INF), pv(N, -1), pe(N, -1);
        std::vector<char> inq(N, 0);
        std::deque<int> q{s};
        dist[s] = 0;
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            inq[u] = 0;
            for (int i = 0; i < static_cast<int>(adj[u].size()); ++i) {
                auto& e = adj[u][i];
                if (e.cap > 0 && dist[u] + e.cost < dist[e.to]) {
                    dist[e.to] = dist[u] + e.cost;
                    pv[e.to] = u;
                    pe[e.to] = i;
                    if (!inq[e.to]) {
                        inq[e.to] = 1;
                        q.push_back(e.to);
                    }
                }
            }
        }
        if (dist[t] == INF) return std::nullopt;
        for (int v = t; v != s; v = pv[v]) {
            auto& e = adj[pv[v]][pe[v]];
            e.cap -= 1;
            adj[v][e.rev].cap += 1;
        }
        ++flow;
    }
    std::vector<std::map<int, int>> used(N);
    for (int u = 0; u < N; ++u)
        for (auto& e : adj[u])
            if (e.orig > 0 && e.orig > e.cap) used[u][e.to] += e.orig - e.cap;
    std::vector<std::vector<vertex>> paths;
    for (int k = 0; k < r; ++k) {
        std::vector<vertex> p{a};
        int cur = s;
        while (cur != t) {
            int nxt = -1;
            for (auto& [to, c] : used[cur])
                if (c > 0) {
                    nxt = to;
                    break;
                }
            if (nxt < 0) return std::nullopt;
            --used[cur][nxt];
            // arc out(u)->in(v): arrive at v
            vertex v = vs[nxt / 2];
            p.push_back(v);
            if (nxt == t) break;
            // internal arc in(v)->out(v)
            --used[nxt][nxt + 1];
            cur = nxt + 1;
        }
        paths.push_back(std::move(p));
    }
    return paths;
}

inline SubdivisionWitness theta_witness_from_paths(int r, const std::vector<std::vector<vertex>>& paths)
{
    SubdivisionWitness w;
    w.pattern = theta_graph(r);
    w.branch_map = {paths.front().front(), paths.front().back()};
    for (auto& p : paths) {
        WitnessPath wp;
        wp.from = 0;
        wp.to = 1;
        wp.vertices = p;
        wp.copies.assign(p.size() - 1, 0);
        w.paths.push_back(std::move(wp));
    }
    normalize_copies(w);
    return w;
}

/// Smallest θ_r-subdivision with branch vertices a and b.
inline std::optional<SubdivisionWitness> theta_witness_at(const MultiGraph& g, vertex a, vertex b, int r)
{
    auto p = disjoint_paths(g, a, b, r);
    if (!p) return std::nullopt;
    return theta_witness_from_paths(r, *p);
}

// ---------------------------------------------------------------------------------
// Cycles.

/// Some cycle of length <= budget, found by depth-limited BFS from each vertex of the
/// 2-core in id order; the first hit is returned. budget < 0 means unbounded.
inline std::optional<std::vector<vertex>> short_cycle(const MultiGraph& g, int budget = -1, bool shortest = false)
{
    // 2-core
    std::map<vertex, int> deg;
    std::vector<vertex> stack;
    std::set<vertex> dead;
    for (vertex v : g.vertices()) {
        deg[v] = g.degree(v);
        if (deg[v] <= 1) stack.push_back(v);
    }
    while (!stack.empty()) {
        vertex v = stack.back();
        stack.pop_back();
        if (!dead.insert(v).second) continue;
        for (auto [y, mu] : g.neighbors(v))
            if (!dead.count(y) && (deg[y] -= mu) <= 1) stack.push_back(y);
    }
    // parallel edges are 2-cycles
    std::optional<std::vector<vertex>> best;
    bool found2 = false;
    g.for_each_edge([&](vertex u, vertex v, int mu) {
        if (!found2 && mu >= 2) {
            best = std::vector<vertex>{u, v};
            found2 = true;
        }
    });
    if (found2) return (budget < 0 || budget >= 2) ? best : std::nullopt;
    int limit = budget < 0 ? std::numeric_limits<int>::max() : budget;
    for (vertex s : g.vertices()) {
        if (dead.count(s)) continue;
        std::map<vertex, vertex> parent;
        std::map<vertex, int> depth;
        std::deque<vertex> q{s};
        parent[s] = -1;
        depth[s] = 0;
        bool done = false;
        while (!q.empty() && !done) {
            vertex x = q.front();
            q.pop_front();
            if (2 * depth[x] + 1 > limit) break;
            for (auto [y, mu] : g.neighbors(x)) {
                if (dead.count(y) || y == parent[x]) continue;
                if (!depth.count(y)) {
                    parent[y] = x;
                    depth[y] = depth[x] + 1;
                    q.push_back(y);
                    continue;
                }
                // non-tree edge x-y closes a cycle through the lowest common ancestor
                std::vector<vertex> px{x}, py{y};
                vertex a = x, b = y;
                while (a != b) {
                    if (depth[a] >= depth[b]) {
                        a = parent[a];
                        px.push_back(a);
                    } else {
                        b = parent[b];
                        py.push_back(b);
                    }
                }
                py.pop_back();
                std::reverse(px.begin(), px.end()); // lca .. x
                std::vector<vertex> cyc = px;
                cyc.insert(cyc.end(), py.begin(), py.end()); // y .. child of lca
                if (static_cast<int>(cyc.size()) <= limit && (!best || cyc.size() < best->size())) best = cyc;
                done = true;
                break;
            }
        }
        if (best && !shortest) return best;
        if (best) limit = std::min<int>(limit, static_cast<int>(best->size()) - 1);
    }
    return best;
}

inline SubdivisionWitness cycle_witness(const std::vector<vertex>& cyc)
{
    MultiGraph sub;
    if (cyc.size() == 2) sub.add_edge(cyc[0], cyc[1], 2);
    else
        for (std::size_t i = 0; i < cyc.size(); ++i) sub.add_edge(cyc[i], cyc[(i + 1) % cyc.size()]);
    std::set<vertex> forced{cyc[0], cyc[cyc.size() / 2]};
    return witness_from_subgraph(sub, forced);
}

// ---------------------------------------------------------------------------------
// θ_r subdivisions.

/// A minimal subgraph containing θ_r as a minor, built from a minor model by taking
/// spanning trees of both sides, r crossing edges, and pruning useless leaves.
inline MultiGraph model_subgraph(const MultiGraph& g, const ThetaModel& m, int r)
{
    MultiGraph sub;
    int need = r;
    std::set<vertex> terminals;
    g.for_each_edge([&](vertex u, vertex v, int mu) {
        if (need <= 0) return;
        bool cross = (m.left.count(u) && m.right.count(v)) || (m.left.count(v) && m.right.count(u));
        if (!cross) return;
        int take = std::min(mu, need);
        sub.add_edge(u, v, take);
        need -= take;
        terminals.insert(u);
        terminals.insert(v);
    });
    auto tree_into = [&](const std::set<vertex>& side) {
        vertex root = *side.begin();
        std::map<vertex, vertex> parent{{root, -1}};
        std::deque<vertex> q{root};
        while (!q.empty()) {
            vertex x = q.front();
            q.pop_front();
            for (auto [y, mu] : g.neighbors(x))
                if (side.count(y) && !parent.count(y)) {
                    parent[y] = x;
                    q.push_back(y);
                }
        }
        // keep only tree paths between terminals on this side
        std::set<vertex> keep;
        std::vector<vertex> ts;
        for (vertex t : terminals)
            if (side.count(t)) ts.push_back(t);
        if (ts.empty()) return;
        // union of root paths, then strip non-terminal leaves
        MultiGraph tree;
        for (vertex t : ts) {
            tree.add_vertex(t);
            for (vertex x = t; parent[x] >= 0; x = parent[x])
                if (!tree.multiplicity(x, parent[x])) tree.add_edge(x, parent[x]);
        }
        bool changed = true;
        while (changed) {
            changed = false;
            for (vertex v : tree.vertices())
                if (tree.degree(v) <= 1 && !std::count(ts.begin(), ts.end(), v) && tree.n() > 1) {
                    tree.remove_vertex(v);
                    changed = true;
                }
        }
        tree.for_each_edge([&](vertex u, vertex v, int) { sub.add_edge(u, v); });
        for (vertex v : tree.vertices()) sub.add_vertex(v);
    };
    tree_into(m.left);
    tree_into(m.right);
    return sub;
}

/// Removes edges (one copy at a time) and vertices while θ_r stays a minor.
inline MultiGraph minimize_theta_subgraph(MultiGraph sub, int r)
{
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto e : sub.edge_occurrences()) {
            MultiGraph t = sub;
            t.remove_edge(e.u, e.v);
            for (vertex x : {e.u, e.v})
                if (t.degree(x) == 0) t.remove_vertex(x);
            if (has_theta_minor_exhaustive(t, r)) {
                sub = std::move(t);
                changed = true;
                break;
            }
        }
    }
    return sub;
}

/// Smallest θ_r-subdivision over all branch pairs (r <= 3, polynomial), or the first
/// one within `budget` edges when `first_fit` is set.
inline std::optional<SubdivisionWitness> smallest_theta_pair_witness(const MultiGraph& g, int r, int budget = -1, bool first_fit = false)
{
    std::optional<SubdivisionWitness> best;
    std::size_t best_size = budget < 0 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(budget);
    auto vs = g.vertices();
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (g.degree(vs[i]) < r) continue;
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
            if (g.degree(vs[j]) < r) continue;
            auto p = disjoint_paths(g, vs[i], vs[j], r);
            if (!p) continue;
            std::size_t len = 0;
            for (auto& x : *p) len += x.size() - 1;
            if (len <= best_size && (!best || len < best->edge_count())) {
                best = theta_witness_from_paths(r, *p);
                best_size = len;
                if (first_fit) return best;
            }
        }
    }
    return best;
}

struct SearchOptions {
    std::optional<int> edge_budget;
    int oracle_cap = default_oracle_cap;
};

namespace detail {

/// Routes the pattern edges of `pat` under branch map `bm` as internally disjoint paths
/// in g (backtracking), total length <= budget.
inline bool route_pattern(const MultiGraph& g, const MultiGraph& pat, const std::vector<vertex>& bm, int budget,
                          SubdivisionWitness& out)
{
    std::vector<std::pair<int, int>> jobs;
    pat.for_each_edge([&](vertex a, vertex b, int mu) {
        for (int c = 0; c < mu; ++c) jobs.emplace_back(a, b);
    });
    std::set<vertex> branch(bm.begin(), bm.end());
    std::set<vertex> used_internal;
    std::map<std::pair<vertex, vertex>, int> used_edges;
    std::vector<std::vector<vertex>> routes(jobs.size());
    int spent = 0;
    std::function<bool(std::size_t)> go = [&](std::size_t j) -> bool {
        if (j == jobs.size()) return true;
        vertex s = bm[jobs[j].first], t = bm[jobs[j].second];
        std::vector<vertex> path{s};
        std::set<vertex> on{s};
        std::function<bool()> dfs = [&]() -> bool {
            vertex x = path.back();
            for (auto [y, mu] : g.neighbors(x)) {
                auto key = ordered(x, y);
                if (used_edges[key] >= mu) continue;
                if (y == t) {
                    if (spent + 1 > budget) continue;
                    ++used_edges[key];
                    ++spent;
                    path.push_back(y);
                    routes[j] = path;
                    if (go(j + 1)) return true;
                    path.pop_back();
                    --spent;
                    --used_edges[key];
                    continue;
                }
                if (branch.count(y) || used_internal.count(y) || on.count(y)) continue;
                if (spent + 2 > budget) continue;
                ++used_edges[key];
                ++spent;
                used_internal.insert(y);
                on.insert(y);
                path.push_back(y);
                if (dfs()) return true;
                path.pop_back();
                on.erase(y);
                used_internal.erase(y);
                --spent;
                --used_edges[key];
            }
            return false;
        };
        return dfs();
    };
    if (!go(0)) return false;
    out = SubdivisionWitness{};
    out.pattern = pat;
    out.branch_map = bm;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        WitnessPath p;
        p.from = jobs[j].first;
        p.to = jobs[j].second;
        p.vertices = routes[j];
        p.copies.assign(routes[j].size() - 1, 0);
        out.paths.push_back(std::move(p));
    }
    normalize_copies(out);
    return true;
}

/// Pattern with vertices renumbered 0..p-1.
inline MultiGraph dense_pattern(const MultiGraph& m)
{
    std::map<vertex, int> id;
    for (vertex v : m.vertices()) id[v] = static_cast<int>(id.size());
    MultiGraph p;
    for (auto [v, i] : id) p.add_vertex(i);
    m.for_each_edge([&](vertex a, vertex b, int mu) { p.add_edge(id[a], id[b], mu); });
    return p;
}

inline std::optional<SubdivisionWitness> explicit_search(const MultiGraph& g, const HCollection& H, int budget)
{
    std::optional<SubdivisionWitness> best;
    for (auto& member : H.members) {
        MultiGraph pat = dense_pattern(member);
        int p = static_cast<int>(pat.n());
        if (p > static_cast<int>(g.n())) continue;
        auto hosts = g.vertices();
        std::vector<vertex> bm(p);
        std::vector<char> taken(hosts.size(), 0);
        std::function<void(int)> assign = [&](int i) {
            if (i == p) {
                int cap = best ? static_cast<int>(best->edge_count()) - 1 : budget;
                SubdivisionWitness w;
                if (cap >= static_cast<int>(pat.m()) && route_pattern(g, pat, bm, cap, w)) best = std::move(w);
                return;
            }
            for (std::size_t h = 0; h < hosts.size(); ++h) {
                if (taken[h] || g.degree(hosts[h]) < pat.degree(i)) continue;
                taken[h] = 1;
                bm[i] = hosts[h];
                assign(i + 1);
                taken[h] = 0;
            }
        };
        assign(0);
    }
    return best;
}

} // namespace detail

/// Finds an H-subdivision (with at most `edge_budget` edges when given). θ_r with r <= 3
/// goes through polynomial routes; everything else is exhaustive and size-guarded.
inline std::optional<SubdivisionWitness> find_subdivision(const MultiGraph& g, const HCollection& H, SearchOptions opt = {})
{
    const int budget = opt.edge_budget.value_or(std::numeric_limits<int>::max() / 4);
    if (H.is_theta() && H.theta_r <= 3) {
        const int r = H.theta_r;
        if (r == 1) {
            std::optional<SubdivisionWitness> out;
            if (budget < 1) return out;
            g.for_each_edge([&](vertex u, vertex v, int) {
                if (!out) out = theta_witness_from_paths(1, {{u, v}});
            });
            return out;
        }
        if (theta_free_small_r(g, r)) return std::nullopt;
        if (r == 2) {
            auto c = short_cycle(g, opt.edge_budget ? budget : -1, true);
            if (!c) return std::nullopt;
            return cycle_witness(*c);
        }
        return smallest_theta_pair_witness(g, r, opt.edge_budget ? budget : -1);
    }
    check_cap(g, opt.oracle_cap, "find_subdivision");
    if (H.is_theta()) {
        const int r = H.theta_r;
        std::optional<SubdivisionWitness> best;
        for_each_theta_model(g, r, [&](const ThetaModel& m) {
            MultiGraph sub = minimize_theta_subgraph(model_subgraph(g, m, r), r);
            auto w = witness_from_subgraph(sub);
            if (static_cast<int>(w.edge_count()) <= budget && (!best || w.edge_count() < best->edge_count())) best = std::move(w);
            return false;
        });
        return best;
    }
    return detail::explicit_search(g, H, budget);
}

/// True iff g has no H-subdivision.
inline bool is_h_free(const MultiGraph& g, const HCollection& H, int oracle_cap = default_oracle_cap)
{
    if (H.is_theta() && H.theta_r <= 3) return theta_free_small_r(g, H.theta_r);
    if (H.is_theta()) {
        check_cap(g, oracle_cap, "is_h_free");
        return !has_theta_minor_exhaustive(g, H.theta_r);
    }
    return !find_subdivision(g, H, {std::nullopt, oracle_cap});
}

/// θ_r minor test with the size guard of the oracle layer.
inline bool has_theta_minor(const MultiGraph& g, int r, int oracle_cap = default_oracle_cap)
{
    if (r < 1) throw precondition_error("has_theta_minor: r must be at least 1");
    if (r <= 3) return !theta_free_small_r(g, r);
    check_cap(g, oracle_cap, "has_theta_minor");
    return has_theta_minor_exhaustive(g, r);
}

inline Verdict verify_certificate(const MultiGraph& host, const SubdivisionWitness& w, const HCollection& H)
{
    return verify_witness(host, w, H);
}

inline Verdict verify_certificate(const MultiGraph& host, const PackingCert& p, const HCollection& H)
{
    return verify_packing_structure(host, p, H);
}

inline Verdict verify_certificate(const MultiGraph& host, const CoverCert& c, const HCollection& H, int oracle_cap = default_oracle_cap)
{
    Verdict status;
    MultiGraph rest = apply_cover(host, c, &status);
    if (!status) return status;
    try {
        if (!is_h_free(rest, H, oracle_cap)) return Verdict::fail("host minus cover still contains an H-subdivision");
    } catch (const oracle_guard_error& e) {
        return Verdict::fail(e.what());
    }
    return Verdict::pass();
}

} // namespace epp
