#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "boundaried.hpp"
#include "certificate.hpp"
#include "subdivision.hpp"

namespace epp {

using PairBag = std::map<std::pair<vertex, vertex>, int>; // pair -> copies

/// Elements removed from a boundaried graph: interior vertices (v) or edge copies (e).
struct ElementSet {
    std::set<vertex> vertices;
    PairBag edges;

    int size(Mode x) const
    {
        if (x == Mode::v) return static_cast<int>(vertices.size());
        int s = 0;
        for (auto& [p, c] : edges) s += c;
        return s;
    }
};

inline void check_folio_family(const HCollection& H)
{
    if (H.is_theta() && H.theta_r >= 4)
        throw precondition_error("folio: theta family with r >= 4 is not materialised; pass explicit members");
    if (H.is_theta() && H.theta_r < 2) throw precondition_error("folio: theta_1 is not 2-edge-connected");
}

/// κ(J, L): J with every interior vertex outside L dissolved. Empty when a non-L
/// interior vertex has degree other than 2, dissolving would make a loop, or some
/// component carries no boundary vertex.
inline std::optional<BoundariedGraph> compress_partial(const BoundariedGraph& j, const std::set<vertex>& branch)
{
    std::set<vertex> drop;
    for (vertex v : j.interior()) {
        if (branch.count(v)) continue;
        if (j.graph.degree(v) != 2) return std::nullopt;
        drop.insert(v);
    }
    BoundariedGraph k;
    try {
        k.graph = dissolve(j.graph, drop);
    } catch (const precondition_error&) {
        return std::nullopt;
    }
    k.labels = j.labels;
    for (auto& comp : k.graph.components()) {
        bool touches = false;
        for (vertex v : comp)
            if (k.labels.count(v)) touches = true;
        if (!touches) return std::nullopt;
    }
    return k;
}

/// Whether the compressed partial structure k extends to an H-subdivision through
/// some gluing partner. Decided by matching its branch vertices into a member.
inline bool extendable(const BoundariedGraph& k, const HCollection& H)
{
    check_folio_family(H);
    if (k.graph.empty() || k.labels.empty()) return false;
    std::vector<vertex> ell = k.interior();
    int pass_through = 0;
    k.graph.for_each_edge([&](vertex a, vertex b, int mu) {
        if (k.labels.count(a) && k.labels.count(b)) pass_through += mu;
    });
    int ll_total = 0;
    for (std::size_t i = 0; i < ell.size(); ++i)
        for (std::size_t j = i + 1; j < ell.size(); ++j) ll_total += k.graph.multiplicity(ell[i], ell[j]);

    for (auto& hm : H.members) {
        if (ell.size() > hm.n()) continue;
        if (pass_through > 0 && static_cast<int>(hm.m()) - ll_total < 1) continue;
        std::vector<vertex> hv = hm.vertices();
        std::vector<vertex> phi(ell.size());
        std::set<vertex> taken;
        std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
            if (i == ell.size()) return true;
            for (vertex c : hv) {
                if (taken.count(c) || hm.degree(c) != k.graph.degree(ell[i])) continue;
                bool ok = true;
                for (std::size_t j = 0; j < i && ok; ++j)
                    if (k.graph.multiplicity(ell[i], ell[j]) > hm.multiplicity(c, phi[j])) ok = false;
                if (!ok) continue;
                phi[i] = c;
                taken.insert(c);
                if (go(i + 1)) return true;
                taken.erase(c);
            }
            return false;
        };
        if (go(0)) return true;
    }
    return false;
}

inline bool is_partial_subdivision(const BoundariedGraph& j, const std::set<vertex>& branch, const HCollection& H)
{
    for (vertex v : branch)
        if (!j.graph.has_vertex(v) || j.labels.count(v)) return false;
    auto k = compress_partial(j, branch);
    return k && extendable(*k, H);
}

/// Searches for a branch set L making j a partial H-subdivision and returns κ(j, L).
/// Vertices of degree other than 2 are always in L; degree-2 vertices join L only
/// when some member has degree-2 vertices.
inline std::optional<BoundariedGraph> partial_subdivision_test(const BoundariedGraph& j, const HCollection& H, int t,
                                                               int size_cap = 40)
{
    check_folio_family(H);
    if (static_cast<int>(j.graph.n()) > size_cap) throw oracle_guard_error("partial_subdivision_test: input too large");
    if (static_cast<int>(j.labels.size()) > t) return std::nullopt;
    bool has_deg2 = false;
    int max_n = H.max_member_vertices();
    for (auto& hm : H.members)
        for (vertex v : hm.vertices())
            if (hm.degree(v) == 2) has_deg2 = true;
    std::set<vertex> branch;
    std::vector<vertex> optional;
    for (vertex v : j.interior()) {
        if (j.graph.degree(v) != 2) branch.insert(v);
        else if (has_deg2) optional.push_back(v);
    }
    std::optional<BoundariedGraph> found;
    std::function<void(std::size_t)> go = [&](std::size_t i) {
        if (found || static_cast<int>(branch.size()) > max_n) return;
        if (i == optional.size()) {
            auto k = compress_partial(j, branch);
            if (k && extendable(*k, H)) found = k;
            return;
        }
        go(i + 1);
        branch.insert(optional[i]);
        go(i + 1);
        branch.erase(optional[i]);
    };
    go(0);
    return found;
}

namespace detail {

/// Brute-force check for θ_r: glue j to every subgraph of a gadget (a clique of size
/// 2 + #labels plus one hub per label) and look for a θ_r-subdivision containing j
/// whose branch vertices inside j are exactly `branch`.
inline bool gadget_extendable(const BoundariedGraph& j, const std::set<vertex>& branch, int r)
{
    if (r < 2) throw precondition_error("gadget_extendable: needs r >= 2");
    auto labels = j.label_set();
    int q = 2 + static_cast<int>(labels.size());
    vertex base = j.graph.max_vertex() + 1;
    std::map<int, vertex> hub;
    std::vector<std::pair<vertex, vertex>> optional_edges;
    for (int a = 0; a < q; ++a)
        for (int b = a + 1; b < q; ++b) optional_edges.emplace_back(base + a, base + b);
    vertex next = base + q;
    for (int l : labels) {
        hub[l] = next++;
        for (int a = 0; a < q; ++a) optional_edges.emplace_back(hub[l], base + a);
    }
    if (optional_edges.size() > 24) throw precondition_error("gadget_extendable: gadget too large");

    MultiGraph fixed;
    std::set<vertex> jint;
    for (vertex v : j.interior()) jint.insert(v);
    auto map_b = [&](vertex v) { return j.labels.count(v) ? hub.at(j.labels.at(v)) : v; };
    j.graph.for_each_edge([&](vertex a, vertex b, int mu) { fixed.add_edge(map_b(a), map_b(b), mu); });

    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << optional_edges.size()); ++mask) {
        MultiGraph x = fixed;
        for (std::size_t i = 0; i < optional_edges.size(); ++i)
            if (mask >> i & 1) x.add_edge(optional_edges[i].first, optional_edges[i].second);
        if (!x.connected()) continue;
        std::set<vertex> high;
        bool ok = true;
        for (vertex v : x.vertices()) {
            int d = x.degree(v);
            if (d == 2) continue;
            if (d != r || r == 2) ok = false;
            high.insert(v);
        }
        if (!ok) continue;
        if (r == 2) {
            if (branch.size() <= 2) return true; // x is one cycle
            continue;
        }
        if (high.size() != 2) continue;
        std::set<vertex> inside;
        for (vertex v : high)
            if (jint.count(v)) inside.insert(v);
        if (inside != branch) continue;
        std::set<vertex> rest;
        for (vertex v : x.vertices())
            if (!high.count(v)) rest.insert(v);
        MultiGraph c;
        try {
            c = dissolve(x, rest);
        } catch (const precondition_error&) {
            continue;
        }
        if (c.n() == 2 && c.multiplicity(*high.begin(), *high.rbegin()) == r) return true;
    }
    return false;
}

inline BoundariedGraph partial_from_bag(const BoundariedGraph& g, const PairBag& bag)
{
    BoundariedGraph j;
    for (auto& [p, c] : bag)
        if (c > 0) j.graph.add_edge(p.first, p.second, c);
    for (auto& [v, l] : g.labels)
        if (j.graph.has_vertex(v)) j.labels[v] = l;
    return j;
}

} // namespace detail

/// One partial H-subdivision (J, L) inside a boundaried graph.
struct FolioItem {
    PairBag edges; // J, in the coordinates of the boundaried graph
    std::set<vertex> vertices;
    std::set<vertex> branch;
    std::string key; // canonical form of κ(J, L)
};

/// The canonical key of (J, L) given by its edges, or nothing when (J, L) is not a
/// partial subdivision.
inline std::optional<std::string> partial_key(const BoundariedGraph& g, const PairBag& edges, const std::set<vertex>& branch,
                                              const HCollection& H)
{
    auto j = detail::partial_from_bag(g, edges);
    if (j.labels.empty()) return std::nullopt;
    for (vertex v : branch)
        if (!j.graph.has_vertex(v) || j.labels.count(v)) return std::nullopt;
    auto k = compress_partial(j, branch);
    if (!k || !extendable(*k, H)) return std::nullopt;
    return canonical_form(k->graph, k->labels);
}

/// Signatures for y = 0..rho in both modes; each is a set of μ̂ keys.
struct Folio {
    std::vector<std::set<std::string>> sig[2];

    std::string key() const
    {
        std::string out;
        for (int x = 0; x < 2; ++x)
            for (std::size_t y = 0; y < sig[x].size(); ++y) {
                out += x == 0 ? "v" : "e";
                out += std::to_string(y) + "{";
                for (auto& s : sig[x][y]) out += "<" + s + ">";
                out += "}";
            }
        return out;
    }

    bool operator==(const Folio& o) const { return sig[0] == o.sig[0] && sig[1] == o.sig[1]; }
};

struct FolioOptions {
    int interior_cap = 12; // largest interior handled
    std::size_t item_cap = 20000;
};

/// Everything computed about one boundaried graph: items, folio and representatives
/// used when lifting solutions back through a replacement.
struct FolioTable {
    BoundariedGraph g;
    HCollection H;
    int rho = 0;
    std::vector<FolioItem> items;
    Folio folio;
    std::map<std::string, std::vector<int>> collections[2];       // at S = ∅: collection key -> items
    std::vector<std::map<std::string, ElementSet>> reps[2];        // per y: μ̂ key -> a realising S

    static int idx(Mode x) { return x == Mode::v ? 0 : 1; }

    bool survives(const FolioItem& it, Mode x, const ElementSet& s) const
    {
        if (x == Mode::v) {
            for (vertex v : it.vertices)
                if (s.vertices.count(v)) return false;
            return true;
        }
        for (auto& [p, c] : it.edges) {
            auto f = s.edges.find(p);
            if (f != s.edges.end() && c + f->second > g.graph.multiplicity(p.first, p.second)) return false;
        }
        return true;
    }

    /// All collections of pairwise x-disjoint surviving items, keyed canonically.
    std::map<std::string, std::vector<int>> collections_after(Mode x, const ElementSet& s) const
    {
        std::vector<int> alive;
        for (std::size_t i = 0; i < items.size(); ++i)
            if (survives(items[i], x, s)) alive.push_back(static_cast<int>(i));
        std::map<std::string, std::vector<int>> out;
        std::vector<int> chosen;
        std::set<vertex> used_v;
        PairBag used_e = x == Mode::e ? s.edges : PairBag{};
        std::function<void(std::size_t)> go = [&](std::size_t from) {
            std::vector<std::string> ks;
            for (int i : chosen) ks.push_back(items[i].key);
            std::sort(ks.begin(), ks.end());
            std::string key;
            for (auto& k : ks) key += "[" + k + "]";
            out.emplace(key, chosen);
            for (std::size_t a = from; a < alive.size(); ++a) {
                const auto& it = items[alive[a]];
                bool ok = true;
                if (x == Mode::v) {
                    for (vertex v : it.vertices)
                        if (used_v.count(v)) ok = false;
                } else {
                    for (auto& [p, c] : it.edges) {
                        auto f = used_e.find(p);
                        if (f != used_e.end() && f->second + c > g.graph.multiplicity(p.first, p.second)) ok = false;
                    }
                }
                if (!ok) continue;
                chosen.push_back(alive[a]);
                if (x == Mode::v)
                    used_v.insert(it.vertices.begin(), it.vertices.end());
                else
                    for (auto& [p, c] : it.edges) used_e[p] += c;
                go(a + 1);
                if (x == Mode::v)
                    for (vertex v : it.vertices) used_v.erase(v);
                else
                    for (auto& [p, c] : it.edges) used_e[p] -= c;
                chosen.pop_back();
            }
        };
        go(0);
        return out;
    }

    std::string mu_hat_key(Mode x, const ElementSet& s) const
    {
        std::string out;
        for (auto& [k, v] : collections_after(x, s)) out += "{" + k + "}";
        return out;
    }
};

namespace detail {

inline std::vector<FolioItem> enumerate_items(const BoundariedGraph& g, const HCollection& H, const FolioOptions& opt)
{
    std::set<int> member_degrees;
    int max_deg = 0, max_mult = 1, max_n = 0;
    bool has_deg2 = false;
    for (auto& hm : H.members) {
        max_n = std::max(max_n, static_cast<int>(hm.n()));
        for (vertex v : hm.vertices()) {
            member_degrees.insert(hm.degree(v));
            max_deg = std::max(max_deg, hm.degree(v));
            if (hm.degree(v) == 2) has_deg2 = true;
        }
        hm.for_each_edge([&](vertex, vertex, int mu) { max_mult = std::max(max_mult, mu); });
    }
    max_deg = std::max(max_deg, 2);

    // Vertex order: BFS from the boundary so that vertices complete early.
    std::map<vertex, int> pos;
    std::vector<vertex> queue;
    for (auto& [b, l] : g.labels) {
        pos[b] = static_cast<int>(queue.size());
        queue.push_back(b);
    }
    for (std::size_t i = 0; i < queue.size(); ++i)
        for (auto [w, mu] : g.graph.neighbors(queue[i]))
            if (!pos.count(w)) {
                pos[w] = static_cast<int>(queue.size());
                queue.push_back(w);
            }
    for (vertex v : g.graph.vertices())
        if (!pos.count(v)) {
            pos[v] = static_cast<int>(queue.size());
            queue.push_back(v);
        }

    struct P {
        vertex a, b;
        int mu;
    };
    std::vector<P> pairs;
    g.graph.for_each_edge([&](vertex a, vertex b, int mu) { pairs.push_back({a, b, std::min(mu, max_mult)}); });
    std::sort(pairs.begin(), pairs.end(), [&](const P& p, const P& q) {
        auto kp = std::pair{std::max(pos[p.a], pos[p.b]), std::min(pos[p.a], pos[p.b])};
        auto kq = std::pair{std::max(pos[q.a], pos[q.b]), std::min(pos[q.a], pos[q.b])};
        return kp < kq;
    });
    std::map<vertex, int> last;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        last[pairs[i].a] = static_cast<int>(i);
        last[pairs[i].b] = static_cast<int>(i);
    }
    std::vector<std::vector<vertex>> completes(pairs.size());
    for (auto [v, i] : last) completes[i].push_back(v);

    auto degree_ok = [&](vertex v, int d) {
        if (d == 0 || g.labels.count(v)) return true;
        return d == 2 || member_degrees.count(d) > 0;
    };

    std::vector<FolioItem> items;
    std::map<vertex, int> deg;
    PairBag bag;
    std::unordered_map<std::string, bool> ext_cache;

    auto emit = [&]() {
        if (bag.empty()) return;
        auto j = partial_from_bag(g, bag);
        if (j.labels.empty()) return;
        std::set<vertex> forced;
        std::vector<vertex> optional;
        for (vertex v : j.interior()) {
            if (j.graph.degree(v) != 2) forced.insert(v);
            else if (has_deg2) optional.push_back(v);
        }
        if (static_cast<int>(forced.size()) > max_n) return;
        std::set<vertex> all;
        for (auto& [p, c] : bag) {
            all.insert(p.first);
            all.insert(p.second);
        }
        std::function<void(std::size_t, std::set<vertex>&)> choose = [&](std::size_t i, std::set<vertex>& branch) {
            if (i == optional.size()) {
                auto k = compress_partial(j, branch);
                if (!k) return;
                std::string key = canonical_form(k->graph, k->labels);
                auto it = ext_cache.find(key);
                if (it == ext_cache.end()) it = ext_cache.emplace(key, extendable(*k, H)).first;
                if (!it->second) return;
                items.push_back({bag, all, branch, key});
                if (items.size() > opt.item_cap) throw oracle_guard_error("folio: more than " + std::to_string(opt.item_cap) + " partial subdivisions");
                return;
            }
            choose(i + 1, branch);
            if (static_cast<int>(branch.size()) < max_n) {
                branch.insert(optional[i]);
                choose(i + 1, branch);
                branch.erase(optional[i]);
            }
        };
        std::set<vertex> branch = forced;
        choose(0, branch);
    };

    std::function<void(std::size_t)> go = [&](std::size_t i) {
        if (i == pairs.size()) {
            emit();
            return;
        }
        auto& p = pairs[i];
        for (int c = 0; c <= p.mu; ++c) {
            if (c > 0) {
                if (!g.labels.count(p.a) && deg[p.a] + c > max_deg) break;
                if (!g.labels.count(p.b) && deg[p.b] + c > max_deg) break;
                bag[{std::min(p.a, p.b), std::max(p.a, p.b)}] = c;
            }
            deg[p.a] += c;
            deg[p.b] += c;
            bool ok = true;
            for (vertex v : completes[i])
                if (!degree_ok(v, deg[v])) ok = false;
            if (ok) go(i + 1);
            deg[p.a] -= c;
            deg[p.b] -= c;
        }
        bag.erase({std::min(p.a, p.b), std::max(p.a, p.b)});
    };
    go(0);
    return items;
}

template <class F>
void for_each_element_set(const BoundariedGraph& g, Mode x, int y, F&& f)
{
    ElementSet s;
    if (x == Mode::v) {
        auto in = g.interior();
        std::function<void(std::size_t, int)> go = [&](std::size_t i, int left) {
            if (left == 0) {
                f(s);
                return;
            }
            for (std::size_t a = i; a + left <= in.size(); ++a) {
                s.vertices.insert(in[a]);
                go(a + 1, left - 1);
                s.vertices.erase(in[a]);
            }
        };
        go(0, y);
        return;
    }
    std::vector<std::pair<std::pair<vertex, vertex>, int>> pairs;
    g.graph.for_each_edge([&](vertex a, vertex b, int mu) { pairs.push_back({{a, b}, mu}); });
    std::function<void(std::size_t, int)> go = [&](std::size_t i, int left) {
        if (left == 0) {
            f(s);
            return;
        }
        if (i == pairs.size()) return;
        auto [p, mu] = pairs[i];
        for (int c = std::min(mu, left); c >= 0; --c) {
            if (c > 0) s.edges[p] = c;
            else s.edges.erase(p);
            go(i + 1, left - c);
        }
        s.edges.erase(p);
    };
    go(0, y);
}

} // namespace detail

inline FolioTable folio_table(const BoundariedGraph& g, const HCollection& H, int rho, FolioOptions opt = {})
{
    check_folio_family(H);
    g.validate();
    if (static_cast<int>(g.n()) > opt.interior_cap)
        throw oracle_guard_error("folio: interior has " + std::to_string(g.n()) + " vertices, cap is " + std::to_string(opt.interior_cap));
    FolioTable t;
    t.g = g;
    t.H = H;
    t.rho = rho;
    t.items = detail::enumerate_items(g, H, opt);
    for (Mode x : {Mode::v, Mode::e}) {
        int xi = FolioTable::idx(x);
        t.collections[xi] = t.collections_after(x, {});
        t.folio.sig[xi].assign(rho + 1, {});
        t.reps[xi].assign(rho + 1, {});
        for (int y = 0; y <= rho; ++y)
            detail::for_each_element_set(g, x, y, [&](const ElementSet& s) {
                std::string k = t.mu_hat_key(x, s);
                t.folio.sig[xi][y].insert(k);
                t.reps[xi][y].emplace(k, s);
            });
    }
    return t;
}

inline Folio folio(const BoundariedGraph& g, const HCollection& H, int rho, FolioOptions opt = {})
{
    return folio_table(g, H, rho, opt).folio;
}

inline nlohmann::json to_json(const Folio& f)
{
    nlohmann::json j;
    for (int x = 0; x < 2; ++x) {
        nlohmann::json ys = nlohmann::json::array();
        for (auto& sig : f.sig[x]) ys.push_back(std::vector<std::string>(sig.begin(), sig.end()));
        j[x == 0 ? "v" : "e"] = ys;
    }
    return j;
}

/// Whether g is H-free, with parallel edges capped at h first.
inline bool interior_h_free(const BoundariedGraph& g, const HCollection& H)
{
    return is_h_free(g.interior_graph().capped(std::max(1, H.h())), H);
}

/// Compatible, both H-free and equal folios.
inline bool equivalent(const BoundariedGraph& a, const BoundariedGraph& b, const HCollection& H, int rho, FolioOptions opt = {})
{
    if (!compatible(a, b)) return false;
    if (!interior_h_free(a, H) || !interior_h_free(b, H)) return false;
    return folio(a, H, rho, opt) == folio(b, H, rho, opt);
}

} // namespace epp
