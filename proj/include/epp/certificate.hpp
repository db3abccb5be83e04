#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "canonical.hpp"
#include "graph.hpp"
#include "minor.hpp"

namespace epp {

/// A finite collection of connected pattern graphs. `theta(r)` stands for the family
/// of minimal graphs having θ_r as a minor; membership of a pattern is then decided by
/// the minor test rather than by an explicit list.
struct HCollection {
    std::vector<MultiGraph> members;
    int theta_r = 0;

    static HCollection theta(int r)
    {
        if (r < 1) throw precondition_error("theta family needs r >= 1");
        HCollection h;
        h.theta_r = r;
        h.members.push_back(theta_graph(r));
        return h;
    }

    static HCollection of(std::vector<MultiGraph> ms)
    {
        for (auto& m : ms)
            if (m.empty() || !m.connected()) throw precondition_error("H members must be non-empty and connected");
        HCollection h;
        h.members = std::move(ms);
        return h;
    }

    bool is_theta() const { return theta_r > 0; }

    /// h = m(H), the total edge count of the members.
    int h() const
    {
        int s = 0;
        for (auto& m : members) s += static_cast<int>(m.m());
        return s;
    }

    int max_member_vertices() const
    {
        std::size_t best = 0;
        for (auto& m : members) best = std::max(best, m.n());
        return static_cast<int>(best);
    }

    bool accepts_pattern(const MultiGraph& pattern) const
    {
        if (pattern.empty() || !pattern.connected()) return false;
        if (is_theta()) return has_theta_minor_exhaustive(pattern, theta_r);
        auto cf = canonical_form(pattern);
        for (auto& m : members)
            if (m.n() == pattern.n() && m.m() == pattern.m() && canonical_form(m) == cf) return true;
        return false;
    }

    std::string name() const
    {
        if (is_theta()) return "theta" + std::to_string(theta_r);
        return "explicit(" + std::to_string(members.size()) + ")";
    }
};

struct WitnessPath {
    int from = 0; // pattern vertex
    int to = 0;
    std::vector<vertex> vertices;
    std::vector<int> copies; // copy index of each traversed edge

    auto operator<=>(const WitnessPath&) const = default;
};

/// An H-subdivision: pattern vertex i sits at host vertex branch_map[i]; each pattern
/// edge copy is realised by one host path.
struct SubdivisionWitness {
    MultiGraph pattern;
    std::vector<vertex> branch_map;
    std::vector<WitnessPath> paths;

    std::set<vertex> vertex_set() const
    {
        std::set<vertex> s(branch_map.begin(), branch_map.end());
        for (auto& p : paths) s.insert(p.vertices.begin(), p.vertices.end());
        return s;
    }

    std::vector<EdgeOcc> edges() const
    {
        std::vector<EdgeOcc> out;
        for (auto& p : paths)
            for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i)
                out.emplace_back(p.vertices[i], p.vertices[i + 1], p.copies[i]);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Edge usage per unordered pair.
    std::map<std::pair<vertex, vertex>, int> edge_usage() const
    {
        std::map<std::pair<vertex, vertex>, int> u;
        for (auto& p : paths)
            for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) ++u[ordered(p.vertices[i], p.vertices[i + 1])];
        return u;
    }

    std::size_t edge_count() const
    {
        std::size_t k = 0;
        for (auto& p : paths) k += p.vertices.size() - 1;
        return k;
    }

    MultiGraph as_graph() const
    {
        MultiGraph g;
        for (vertex v : vertex_set()) g.add_vertex(v);
        for (auto [e, c] : edge_usage()) g.add_edge(e.first, e.second, c);
        return g;
    }

    std::vector<vertex> branch_vertices() const { return branch_map; }
};

struct PackingCert {
    Mode mode = Mode::v;
    std::vector<SubdivisionWitness> witnesses;

    std::size_t size() const { return witnesses.size(); }
};

struct CoverCert {
    Mode mode = Mode::v;
    std::vector<vertex> vertices;
    std::vector<EdgeOcc> edges;

    std::size_t size() const { return mode == Mode::v ? vertices.size() : edges.size(); }
};

/// Elements of A_x(M) for a witness: its vertices, or its edge copies.
inline std::size_t element_count(const SubdivisionWitness& w, Mode x)
{
    return x == Mode::v ? w.vertex_set().size() : w.edge_count();
}

/// Renumbers edge copies so that no two paths of the whole packing share a copy of a
/// pair. Requires the total usage of each pair to fit its multiplicity.
inline void normalize_copies(std::vector<SubdivisionWitness*> ws)
{
    std::map<std::pair<vertex, vertex>, int> next;
    for (auto* w : ws)
        for (auto& p : w->paths)
            for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) p.copies[i] = next[ordered(p.vertices[i], p.vertices[i + 1])]++;
}

inline void normalize_copies(SubdivisionWitness& w) { normalize_copies(std::vector<SubdivisionWitness*>{&w}); }

inline void normalize_copies(PackingCert& p)
{
    std::vector<SubdivisionWitness*> ws;
    for (auto& w : p.witnesses) ws.push_back(&w);
    normalize_copies(ws);
}

/// Builds a witness from a subgraph of the host. Branch vertices are the vertices of
/// degree other than two plus `forced`; pure cycles and closed paths get extra branch
/// vertices so the pattern stays loopless. Copies are numbered 0.. per pair.
inline SubdivisionWitness witness_from_subgraph(const MultiGraph& sub, std::set<vertex> forced = {})
{
    std::set<vertex> branch = std::move(forced);
    for (vertex v : sub.vertices())
        if (sub.degree(v) != 2) branch.insert(v);
    for (auto& comp : sub.components()) {
        bool any = false;
        for (vertex v : comp) any = any || branch.count(v);
        if (!any) branch.insert(comp.front());
    }

    for (;;) {
        std::map<std::pair<vertex, vertex>, int> used;
        std::vector<std::pair<std::pair<vertex, vertex>, std::vector<vertex>>> traced;
        vertex promote = -1;
        for (vertex b : branch) {
            for (auto [nb0, mu] : sub.neighbors(b)) {
                while (used[ordered(b, nb0)] < sub.multiplicity(b, nb0)) {
                    std::vector<vertex> path{b, nb0};
                    ++used[ordered(b, nb0)];
                    vertex prev = b, cur = nb0;
                    while (!branch.count(cur)) {
                        vertex nxt = -1;
                        for (auto [y, m2] : sub.neighbors(cur)) {
                            int avail = sub.multiplicity(cur, y) - used[ordered(cur, y)];
                            if (avail > 0 && (y != prev || avail > 0)) {
                                nxt = y;
                                break;
                            }
                        }
                        if (nxt < 0) break; // cannot happen for degree-two interior vertices
                        ++used[ordered(cur, nxt)];
                        prev = cur;
                        cur = nxt;
                        path.push_back(cur);
                    }
                    if (path.front() == path.back()) {
                        promote = path[path.size() / 2];
                        break;
                    }
                    traced.push_back({{b, cur}, std::move(path)});
                }
                if (promote >= 0) break;
            }
            if (promote >= 0) break;
        }
        if (promote >= 0) {
            branch.insert(promote);
            continue;
        }
        SubdivisionWitness w;
        std::map<vertex, int> index;
        for (vertex b : branch) {
            index[b] = static_cast<int>(w.branch_map.size());
            w.branch_map.push_back(b);
            w.pattern.add_vertex(index[b]);
        }
        for (auto& [ends, path] : traced) {
            WitnessPath p;
            p.from = index[ends.first];
            p.to = index[ends.second];
            p.vertices = path;
            p.copies.assign(path.size() - 1, 0);
            w.pattern.add_edge(p.from, p.to);
            w.paths.push_back(std::move(p));
        }
        normalize_copies(w);
        return w;
    }
}

/// Outcome of a certificate check; converts to bool, carries the first failure.
struct Verdict {
    bool ok = true;
    std::string reason;

    explicit operator bool() const { return ok; }
    static Verdict pass() { return {}; }
    static Verdict fail(std::string why) { return {false, std::move(why)}; }
};

/// Structural check of a witness against the host and H (pattern membership included).
inline Verdict verify_witness(const MultiGraph& host, const SubdivisionWitness& w, const HCollection& H)
{
    const auto p = w.branch_map.size();
    if (w.pattern.n() != p) return Verdict::fail("pattern has " + std::to_string(w.pattern.n()) + " vertices but branch map has " + std::to_string(p));
    for (std::size_t i = 0; i < p; ++i)
        if (!w.pattern.has_vertex(static_cast<vertex>(i))) return Verdict::fail("pattern vertices must be 0..p-1");
    std::set<vertex> images;
    for (vertex b : w.branch_map) {
        if (!host.has_vertex(b)) return Verdict::fail("branch vertex " + std::to_string(b) + " not in host");
        if (!images.insert(b).second) return Verdict::fail("branch map not injective at " + std::to_string(b));
    }
    std::map<std::pair<vertex, vertex>, int> pattern_edges;
    std::set<vertex> internal_seen;
    std::set<EdgeOcc> occ_seen;
    for (auto& path : w.paths) {
        if (path.from < 0 || path.to < 0 || static_cast<std::size_t>(path.from) >= p || static_cast<std::size_t>(path.to) >= p || path.from == path.to)
            return Verdict::fail("path has invalid pattern endpoints");
        ++pattern_edges[ordered(path.from, path.to)];
        if (path.vertices.size() < 2 || path.copies.size() + 1 != path.vertices.size()) return Verdict::fail("malformed path");
        if (path.vertices.front() != w.branch_map[path.from] || path.vertices.back() != w.branch_map[path.to])
            return Verdict::fail("path endpoints are not the branch images of its pattern edge");
        std::set<vertex> on_path;
        for (std::size_t i = 0; i < path.vertices.size(); ++i) {
            vertex x = path.vertices[i];
            if (!on_path.insert(x).second) return Verdict::fail("path revisits vertex " + std::to_string(x));
            if (i > 0 && i + 1 < path.vertices.size()) {
                if (images.count(x)) return Verdict::fail("internal vertex " + std::to_string(x) + " is a branch vertex");
                if (!internal_seen.insert(x).second) return Verdict::fail("internal vertex " + std::to_string(x) + " shared by two paths");
            }
        }
        for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
            EdgeOcc e(path.vertices[i], path.vertices[i + 1], path.copies[i]);
            int mu = host.multiplicity(e.u, e.v);
            if (e.copy < 0 || e.copy >= mu)
                return Verdict::fail("edge {" + std::to_string(e.u) + "," + std::to_string(e.v) + "} copy " + std::to_string(e.copy) + " not in host");
            if (!occ_seen.insert(e).second) return Verdict::fail("edge copy used twice in one witness");
        }
    }
    std::map<std::pair<vertex, vertex>, int> declared;
    w.pattern.for_each_edge([&](vertex a, vertex b, int mu) { declared[{a, b}] = mu; });
    if (declared != pattern_edges) return Verdict::fail("paths do not realise the pattern edges");
    if (!H.accepts_pattern(w.pattern)) return Verdict::fail("pattern is not a member of " + H.name());
    return Verdict::pass();
}

inline Verdict verify_packing_structure(const MultiGraph& host, const PackingCert& cert, const HCollection& H)
{
    std::set<vertex> used_v;
    std::set<EdgeOcc> used_e;
    for (std::size_t i = 0; i < cert.witnesses.size(); ++i) {
        auto& w = cert.witnesses[i];
        if (auto v = verify_witness(host, w, H); !v) return Verdict::fail("witness " + std::to_string(i) + ": " + v.reason);
        if (cert.mode == Mode::v) {
            for (vertex x : w.vertex_set())
                if (!used_v.insert(x).second) return Verdict::fail("witnesses share vertex " + std::to_string(x));
        } else {
            for (auto& e : w.edges())
                if (!used_e.insert(e).second)
                    return Verdict::fail("witnesses share edge {" + std::to_string(e.u) + "," + std::to_string(e.v) + "} copy " + std::to_string(e.copy));
        }
    }
    return Verdict::pass();
}

/// host minus the cover's elements; also validates that the elements exist.
inline MultiGraph apply_cover(const MultiGraph& host, const CoverCert& c, Verdict* status = nullptr)
{
    MultiGraph g = host;
    auto fail = [&](std::string why) {
        if (status) *status = Verdict::fail(std::move(why));
    };
    if (status) *status = Verdict::pass();
    if (c.mode == Mode::v) {
        std::set<vertex> seen;
        for (vertex v : c.vertices) {
            if (!host.has_vertex(v)) fail("cover vertex " + std::to_string(v) + " not in host");
            if (!seen.insert(v).second) fail("cover repeats vertex " + std::to_string(v));
            g.remove_vertex(v);
        }
    } else {
        std::set<EdgeOcc> seen;
        for (auto& e : c.edges) {
            if (e.copy < 0 || e.copy >= host.multiplicity(e.u, e.v)) {
                fail("cover edge copy not in host");
                continue;
            }
            if (!seen.insert(e).second) {
                fail("cover repeats an edge copy");
                continue;
            }
            g.remove_edge(e.u, e.v);
        }
    }
    return g;
}

// JSON -----------------------------------------------------------------------------

inline nlohmann::json graph_to_json(const MultiGraph& g)
{
    nlohmann::json edges = nlohmann::json::array();
    g.for_each_edge([&](vertex u, vertex v, int mu) { edges.push_back({u, v, mu}); });
    return {{"vertices", g.vertices()}, {"edges", edges}};
}

inline MultiGraph graph_from_json(const nlohmann::json& j)
{
    MultiGraph g;
    for (auto& v : j.at("vertices")) g.add_vertex(v.get<vertex>());
    for (auto& e : j.at("edges")) g.add_edge(e.at(0).get<vertex>(), e.at(1).get<vertex>(), e.at(2).get<int>());
    return g;
}

inline nlohmann::json to_json(const SubdivisionWitness& w)
{
    nlohmann::json paths = nlohmann::json::array();
    for (auto& p : w.paths) paths.push_back({{"ends", {p.from, p.to}}, {"vertices", p.vertices}, {"copies", p.copies}});
    return {{"pattern", graph_to_json(w.pattern)}, {"branch_map", w.branch_map}, {"paths", paths}};
}

inline SubdivisionWitness witness_from_json(const nlohmann::json& j)
{
    SubdivisionWitness w;
    w.pattern = graph_from_json(j.at("pattern"));
    w.branch_map = j.at("branch_map").get<std::vector<vertex>>();
    for (auto& p : j.at("paths")) {
        WitnessPath wp;
        wp.from = p.at("ends").at(0).get<int>();
        wp.to = p.at("ends").at(1).get<int>();
        wp.vertices = p.at("vertices").get<std::vector<vertex>>();
        wp.copies = p.at("copies").get<std::vector<int>>();
        w.paths.push_back(std::move(wp));
    }
    return w;
}

inline nlohmann::json to_json(const PackingCert& p)
{
    nlohmann::json el = nlohmann::json::array();
    for (auto& w : p.witnesses) el.push_back(to_json(w));
    return {{"mode", to_string(p.mode)}, {"elements", el}};
}

inline PackingCert packing_from_json(const nlohmann::json& j)
{
    PackingCert p;
    p.mode = parse_mode(j.at("mode").get<std::string>());
    for (auto& w : j.at("elements")) p.witnesses.push_back(witness_from_json(w));
    return p;
}

inline nlohmann::json to_json(const CoverCert& c)
{
    nlohmann::json el = nlohmann::json::array();
    if (c.mode == Mode::v)
        for (vertex v : c.vertices) el.push_back(v);
    else
        for (auto& e : c.edges) el.push_back({e.u, e.v, e.copy});
    return {{"mode", to_string(c.mode)}, {"elements", el}};
}

inline CoverCert cover_from_json(const nlohmann::json& j)
{
    CoverCert c;
    c.mode = parse_mode(j.at("mode").get<std::string>());
    for (auto& e : j.at("elements")) {
        if (c.mode == Mode::v) c.vertices.push_back(e.get<vertex>());
        else c.edges.emplace_back(e.at(0).get<vertex>(), e.at(1).get<vertex>(), e.at(2).get<int>());
    }
    return c;
}

} // namespace epp
