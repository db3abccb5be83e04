#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "certificate.hpp"
#include "graph.hpp"
#include "minor.hpp"
#include "subdivision.hpp"

namespace epp {

struct OracleOptions {
    int oracle_cap = default_oracle_cap;
    std::size_t witness_limit = 400000;
};

struct PackResult {
    int value = 0;
    PackingCert cert;
};

struct CoverResult {
    int value = 0;
    CoverCert cert;
};

namespace detail {

using EdgeBag = std::map<std::pair<vertex, vertex>, int>; // pair -> copies used

inline MultiGraph graph_of(const EdgeBag& bag)
{
    MultiGraph g;
    for (auto& [e, c] : bag)
        if (c > 0) g.add_edge(e.first, e.second, c);
    return g;
}

/// Witness in `sub` (which is known to contain one), with a pattern from H.
inline SubdivisionWitness witness_in(const MultiGraph& sub, const HCollection& H, int cap)
{
    if (H.is_theta() && H.theta_r <= 3) {
        auto w = find_subdivision(sub, H, {std::nullopt, cap});
        if (!w) throw std::logic_error("witness_in: no subdivision in a containing subgraph");
        return *w;
    }
    if (H.is_theta()) {
        // sub is edge-minimal; its dissolution is the pattern
        auto w = witness_from_subgraph(sub);
        if (H.accepts_pattern(w.pattern)) return w;
    }
    auto w = find_subdivision(sub, H, {std::nullopt, std::max<int>(cap, static_cast<int>(sub.n()))});
    if (!w) throw std::logic_error("witness_in: no subdivision in a containing subgraph");
    return *w;
}

/// Simple a-b paths whose internal vertices avoid a and b.
inline std::vector<std::vector<vertex>> simple_paths(const MultiGraph& g, vertex a, vertex b, std::size_t limit)
{
    std::vector<std::vector<vertex>> out;
    std::vector<vertex> path{a};
    std::set<vertex> on{a};
    std::function<void()> dfs = [&]() {
        vertex x = path.back();
        for (auto [y, mu] : g.neighbors(x)) {
            if (y == b) {
                path.push_back(b);
                out.push_back(path);
                path.pop_back();
                if (out.size() > limit) throw oracle_guard_error("oracle: too many paths to enumerate");
                continue;
            }
            if (on.count(y)) continue;
            on.insert(y);
            path.push_back(y);
            dfs();
            path.pop_back();
            on.erase(y);
        }
    };
    dfs();
    return out;
}

/// Every edge-minimal H-subdivision of g as a bag of pair usages.
inline std::vector<EdgeBag> minimal_edge_witnesses(const MultiGraph& g, const HCollection& H, const OracleOptions& opt)
{
    std::set<EdgeBag> found;
    if (H.is_theta() && H.theta_r == 1) {
        g.for_each_edge([&](vertex u, vertex v, int) { found.insert(EdgeBag{{{u, v}, 1}}); });
    } else if (H.is_theta() && H.theta_r == 2) {
        g.for_each_edge([&](vertex u, vertex v, int mu) {
            if (mu >= 2) found.insert(EdgeBag{{{u, v}, 2}});
        });
        // cycles of length >= 3: start at the minimum vertex, walk over larger ids
        for (vertex s : g.vertices()) {
            std::vector<vertex> path{s};
            std::set<vertex> on{s};
            std::function<void()> dfs = [&]() {
                vertex x = path.back();
                for (auto [y, mu] : g.neighbors(x)) {
                    if (y == s && path.size() >= 3) {
                        EdgeBag bag;
                        for (std::size_t i = 0; i < path.size(); ++i) ++bag[ordered(path[i], path[(i + 1) % path.size()])];
                        found.insert(bag);
                        if (found.size() > opt.witness_limit) throw oracle_guard_error("oracle: too many cycles");
                        continue;
                    }
                    if (y < s || on.count(y)) continue;
                    on.insert(y);
                    path.push_back(y);
                    dfs();
                    path.pop_back();
                    on.erase(y);
                }
            };
            dfs();
        }
    } else if (H.is_theta() && H.theta_r == 3) {
        auto vs = g.vertices();
        for (std::size_t i = 0; i < vs.size(); ++i) {
            vertex a = vs[i];
            if (g.degree(a) < 3) continue;
            for (std::size_t j = i + 1; j < vs.size(); ++j) {
                vertex b = vs[j];
                if (g.degree(b) < 3) continue;
                auto paths = simple_paths(g, a, b, opt.witness_limit);
                const int direct = g.multiplicity(a, b);
                std::vector<std::set<vertex>> inner(paths.size());
                for (std::size_t p = 0; p < paths.size(); ++p) inner[p] = std::set<vertex>(paths[p].begin() + 1, paths[p].end() - 1);
                auto disjoint = [&](std::size_t p, std::size_t q) {
                    for (vertex x : inner[p])
                        if (inner[q].count(x)) return false;
                    return true;
                };
                auto is_direct = [&](std::size_t p) { return paths[p].size() == 2; };
                for (std::size_t p = 0; p < paths.size(); ++p)
                    for (std::size_t q = p; q < paths.size(); ++q) {
                        if (q == p && !is_direct(p)) continue;
                        if (q != p && !disjoint(p, q)) continue;
                        for (std::size_t s = q; s < paths.size(); ++s) {
                            if (s == q && !is_direct(s)) continue;
                            if (s != q && (!disjoint(p, s) || !disjoint(q, s))) continue;
                            int d = int(is_direct(p)) + int(is_direct(q)) + int(is_direct(s));
                            if (d > direct) continue;
                            EdgeBag bag;
                            for (auto idx : {p, q, s})
                                for (std::size_t e = 0; e + 1 < paths[idx].size(); ++e) ++bag[ordered(paths[idx][e], paths[idx][e + 1])];
                            found.insert(bag);
                            if (found.size() > opt.witness_limit) throw oracle_guard_error("oracle: too many witnesses");
                        }
                    }
            }
        }
    } else {
        // exhaustive over sub-multisets; tiny graphs only
        std::vector<std::pair<std::pair<vertex, vertex>, int>> pairs;
        g.for_each_edge([&](vertex u, vertex v, int mu) { pairs.push_back({{u, v}, mu}); });
        double space = 1;
        for (auto& p : pairs) space *= p.second + 1;
        if (space > 1 << 20) throw oracle_guard_error("oracle: edge-subset space too large for exhaustive witness enumeration");
        std::vector<int> cnt(pairs.size(), 0);
        auto contains = [&](const std::vector<int>& c) {
            EdgeBag bag;
            for (std::size_t i = 0; i < c.size(); ++i)
                if (c[i]) bag[pairs[i].first] = c[i];
            MultiGraph sub = graph_of(bag);
            return !sub.empty() && !is_h_free(sub, H, std::max<int>(opt.oracle_cap, static_cast<int>(sub.n())));
        };
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            if (i == pairs.size()) {
                if (!contains(cnt)) return;
                for (std::size_t k = 0; k < cnt.size(); ++k) {
                    if (!cnt[k]) continue;
                    --cnt[k];
                    bool still = contains(cnt);
                    ++cnt[k];
                    if (still) return;
                }
                EdgeBag bag;
                for (std::size_t k = 0; k < cnt.size(); ++k)
                    if (cnt[k]) bag[pairs[k].first] = cnt[k];
                found.insert(bag);
                return;
            }
            for (int c = 0; c <= pairs[i].second; ++c) {
                cnt[i] = c;
                rec(i + 1);
            }
            cnt[i] = 0;
        };
        rec(0);
    }
    return {found.begin(), found.end()};
}

/// Pieces on which pack and cover add up: blocks for θ_r (r >= 2) in edge mode,
/// connected components otherwise.
inline std::vector<MultiGraph> independent_pieces(const MultiGraph& g, const HCollection& H, Mode x)
{
    std::vector<MultiGraph> out;
    if (x == Mode::e && H.is_theta() && H.theta_r >= 2) {
        for (auto& b : blocks(g))
            if (b.cycle_rank() >= 1) out.push_back(block_graph(b));
        return out;
    }
    for (auto& comp : g.components()) {
        MultiGraph c = g.induced(std::set<vertex>(comp.begin(), comp.end()));
        if (c.m() > 0 || H.max_member_vertices() <= 1) out.push_back(std::move(c));
    }
    return out;
}

/// Vertices that can lie on a minimal subdivision: the 2-core for θ_r with r >= 2.
inline MultiGraph prune_for_vertex_mode(const MultiGraph& g, const HCollection& H)
{
    if (!(H.is_theta() && H.theta_r >= 2)) return g;
    MultiGraph c = g;
    bool changed = true;
    while (changed) {
        changed = false;
        for (vertex v : c.vertices())
            if (c.degree(v) <= 1) {
                c.remove_vertex(v);
                changed = true;
            }
    }
    return c;
}

// vertex mode ------------------------------------------------------------------------

struct VertexFamily {
    std::vector<vertex> ids;        // bit i <-> ids[i]
    std::vector<std::uint64_t> sets; // minimal vertex sets containing a subdivision
};

inline VertexFamily minimal_vertex_sets(const MultiGraph& g, const HCollection& H, const OracleOptions& opt)
{
    VertexFamily fam;
    fam.ids = g.vertices();
    if (fam.ids.size() > 62) throw oracle_guard_error("oracle: component too large");
    std::map<vertex, int> bit;
    for (std::size_t i = 0; i < fam.ids.size(); ++i) bit[fam.ids[i]] = static_cast<int>(i);
    const int cap = std::max<int>(opt.oracle_cap, static_cast<int>(g.n()));
    std::unordered_map<std::uint64_t, bool> memo;
    auto to_set = [&](std::uint64_t m) {
        std::set<vertex> s;
        for (std::size_t i = 0; i < fam.ids.size(); ++i)
            if (m >> i & 1) s.insert(fam.ids[i]);
        return s;
    };
    auto contains = [&](std::uint64_t m) {
        auto it = memo.find(m);
        if (it != memo.end()) return it->second;
        bool c = !is_h_free(g.induced(to_set(m)), H, cap);
        memo[m] = c;
        return c;
    };
    detail::for_each_connected_set(g, [&](const std::set<vertex>& s) {
        std::uint64_t m = 0;
        for (vertex v : s) m |= std::uint64_t{1} << bit[v];
        if (!contains(m)) return false;
        for (vertex v : s)
            if (contains(m & ~(std::uint64_t{1} << bit[v]))) return false;
        fam.sets.push_back(m);
        if (fam.sets.size() > opt.witness_limit) throw oracle_guard_error("oracle: too many minimal vertex sets");
        return false;
    });
    return fam;
}

} // namespace detail

inline PackResult exact_pack(const MultiGraph& g, const HCollection& H, Mode x, OracleOptions opt = {})
{
    PackResult res;
    res.cert.mode = x;
    std::vector<SubdivisionWitness> ws;
    const MultiGraph base = x == Mode::v ? detail::prune_for_vertex_mode(g, H) : g;
    for (auto& piece : detail::independent_pieces(base, H, x)) {
        check_cap(piece, opt.oracle_cap, "exact_pack");
        if (x == Mode::v) {
            auto fam = detail::minimal_vertex_sets(piece, H, opt);
            if (fam.sets.empty()) continue;
            // branching order: degree descending, id ascending
            std::vector<int> order(fam.ids.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return piece.degree(fam.ids[a]) > piece.degree(fam.ids[b]); });
            std::unordered_map<std::uint64_t, std::pair<int, std::uint64_t>> memo; // mask -> (value, chosen set or 0)
            std::function<int(std::uint64_t)> f = [&](std::uint64_t mask) -> int {
                auto it = memo.find(mask);
                if (it != memo.end()) return it->second.first;
                std::uint64_t live = 0;
                for (auto s : fam.sets)
                    if ((s & mask) == s) live |= s;
                if (!live) return memo[mask] = {0, 0}, 0;
                int v = -1;
                for (int i : order)
                    if (live >> i & 1) {
                        v = i;
                        break;
                    }
                std::uint64_t vb = std::uint64_t{1} << v;
                int best = f(mask & ~vb);
                std::uint64_t pick = 0;
                for (auto s : fam.sets)
                    if ((s & mask) == s && (s & vb)) {
                        int val = 1 + f(mask & ~s);
                        if (val > best) {
                            best = val;
                            pick = s;
                        }
                    }
                memo[mask] = {best, pick};
                return best;
            };
            std::uint64_t mask = fam.ids.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << fam.ids.size()) - 1;
            int val = f(mask);
            res.value += val;
            // replay choices
            while (true) {
                auto [v2, pick] = memo.at(mask);
                if (v2 == 0) break;
                if (pick) {
                    std::set<vertex> s;
                    for (std::size_t i = 0; i < fam.ids.size(); ++i)
                        if (pick >> i & 1) s.insert(fam.ids[i]);
                    ws.push_back(detail::witness_in(piece.induced(s), H, opt.oracle_cap));
                    mask &= ~pick;
                } else {
                    std::uint64_t live = 0;
                    for (auto s : fam.sets)
                        if ((s & mask) == s) live |= s;
                    int v = -1;
                    for (int i : order)
                        if (live >> i & 1) {
                            v = i;
                            break;
                        }
                    mask &= ~(std::uint64_t{1} << v);
                }
            }
        } else {
            auto wit = detail::minimal_edge_witnesses(piece, H, opt);
            if (wit.empty()) continue;
            std::vector<std::pair<vertex, vertex>> pairs;
            std::vector<int> mult;
            piece.for_each_edge([&](vertex u, vertex v, int mu) {
                pairs.push_back({u, v});
                mult.push_back(mu);
            });
            std::map<std::pair<vertex, vertex>, int> pidx;
            for (std::size_t i = 0; i < pairs.size(); ++i) pidx[pairs[i]] = static_cast<int>(i);
            std::vector<std::vector<std::pair<int, int>>> W; // witness -> (pair index, count)
            for (auto& bag : wit) {
                std::vector<std::pair<int, int>> w;
                for (auto& [e, c] : bag) w.emplace_back(pidx.at(e), c);
                W.push_back(std::move(w));
            }
            auto fits = [&](const std::string& st, std::size_t wi) {
                for (auto [p, c] : W[wi])
                    if (static_cast<int>(st[p]) < c) return false;
                return true;
            };
            const long long r1 = H.is_theta() && H.theta_r >= 2 ? H.theta_r - 1 : 0;
            auto upper = [&](const std::string& st) -> long long {
                if (!r1) return std::numeric_limits<long long>::max();
                MultiGraph t;
                for (std::size_t i = 0; i < pairs.size(); ++i)
                    if (st[i]) t.add_edge(pairs[i].first, pairs[i].second, st[i]);
                return cycle_rank(t) / r1;
            };
            std::unordered_map<std::string, std::pair<int, int>> memo; // state -> (value, witness or -1)
            std::function<int(const std::string&)> f = [&](const std::string& st) -> int {
                auto it = memo.find(st);
                if (it != memo.end()) return it->second.first;
                int p = -1;
                for (std::size_t wi = 0; wi < W.size() && p < 0; ++wi)
                    if (fits(st, wi)) p = W[wi].front().first;
                if (p < 0 || upper(st) == 0) return memo[st] = {0, -1}, 0;
                std::string less = st;
                --less[p];
                int best = f(less), pick = -1;
                long long ub = upper(st);
                for (std::size_t wi = 0; wi < W.size() && best < ub; ++wi) {
                    if (!fits(st, wi)) continue;
                    bool has = false;
                    for (auto [q, c] : W[wi]) has = has || q == p;
                    if (!has) continue;
                    std::string rest = st;
                    for (auto [q, c] : W[wi]) rest[q] = static_cast<char>(rest[q] - c);
                    int val = 1 + f(rest);
                    if (val > best) {
                        best = val;
                        pick = static_cast<int>(wi);
                    }
                }
                memo[st] = {best, pick};
                return best;
            };
            std::string st(pairs.size(), 0);
            for (std::size_t i = 0; i < pairs.size(); ++i) st[i] = static_cast<char>(mult[i]);
            res.value += f(st);
            while (true) {
                auto [val, pick] = memo.at(st);
                if (val == 0) break;
                if (pick >= 0) {
                    detail::EdgeBag bag;
                    for (auto [q, c] : W[pick]) {
                        bag[pairs[q]] = c;
                        st[q] = static_cast<char>(st[q] - c);
                    }
                    ws.push_back(detail::witness_in(detail::graph_of(bag), H, opt.oracle_cap));
                } else {
                    int p = -1;
                    for (std::size_t wi = 0; wi < W.size() && p < 0; ++wi)
                        if (fits(st, wi)) p = W[wi].front().first;
                    --st[p];
                }
            }
        }
    }
    res.cert.witnesses = std::move(ws);
    normalize_copies(res.cert);
    return res;
}

inline CoverResult exact_cover(const MultiGraph& g, const HCollection& H, Mode x, OracleOptions opt = {})
{
    CoverResult res;
    res.cert.mode = x;
    const MultiGraph base = x == Mode::v ? detail::prune_for_vertex_mode(g, H) : g;
    std::map<std::pair<vertex, vertex>, int> removed;
    for (auto& piece : detail::independent_pieces(base, H, x)) {
        check_cap(piece, opt.oracle_cap, "exact_cover");
        if (x == Mode::v) {
            auto fam = detail::minimal_vertex_sets(piece, H, opt);
            if (fam.sets.empty()) continue;
            auto sets = fam.sets;
            std::sort(sets.begin(), sets.end(), [](auto a, auto b) { return std::popcount(a) < std::popcount(b); });
            std::vector<int> weight(fam.ids.size());
            for (std::size_t i = 0; i < fam.ids.size(); ++i) weight[i] = piece.degree(fam.ids[i]);
            std::uint64_t best_hit = 0;
            int best = static_cast<int>(fam.ids.size()) + 1;
            auto lower = [&](std::uint64_t hit) {
                std::uint64_t used = 0;
                int lb = 0;
                for (auto s : sets)
                    if (!(s & hit) && !(s & used)) {
                        used |= s;
                        ++lb;
                    }
                return lb;
            };
            std::function<void(std::uint64_t, int)> go = [&](std::uint64_t hit, int size) {
                if (size + lower(hit) >= best) return;
                std::uint64_t open = 0;
                for (auto s : sets)
                    if (!(s & hit)) {
                        open = s;
                        break;
                    }
                if (!open) {
                    best = size;
                    best_hit = hit;
                    return;
                }
                std::vector<int> cand;
                for (std::size_t i = 0; i < fam.ids.size(); ++i)
                    if (open >> i & 1) cand.push_back(static_cast<int>(i));
                std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) { return weight[a] > weight[b]; });
                for (int i : cand) go(hit | (std::uint64_t{1} << i), size + 1);
            };
            go(0, 0);
            res.value += best;
            for (std::size_t i = 0; i < fam.ids.size(); ++i)
                if (best_hit >> i & 1) res.cert.vertices.push_back(fam.ids[i]);
        } else {
            MultiGraph work = piece;
            // a pair with multiplicity >= r is itself a θ_r: the surplus copies are forced
            if (H.is_theta() && H.theta_r >= 1) {
                std::vector<std::tuple<vertex, vertex, int>> forced;
                work.for_each_edge([&](vertex u, vertex v, int mu) {
                    if (mu >= H.theta_r) forced.emplace_back(u, v, mu - H.theta_r + 1);
                });
                for (auto [u, v, c] : forced) {
                    work.remove_edge(u, v, c);
                    removed[ordered(u, v)] += c;
                    res.value += c;
                }
            }
            auto wit = detail::minimal_edge_witnesses(work, H, opt);
            if (wit.empty()) continue;
            std::vector<std::pair<vertex, vertex>> pairs;
            std::vector<int> mult;
            work.for_each_edge([&](vertex u, vertex v, int mu) {
                pairs.push_back({u, v});
                mult.push_back(mu);
            });
            std::map<std::pair<vertex, vertex>, int> pidx;
            for (std::size_t i = 0; i < pairs.size(); ++i) pidx[pairs[i]] = static_cast<int>(i);
            std::vector<std::vector<std::pair<int, int>>> W;
            for (auto& bag : wit) {
                std::vector<std::pair<int, int>> w;
                for (auto& [e, c] : bag) w.emplace_back(pidx.at(e), c);
                W.push_back(std::move(w));
            }
            std::sort(W.begin(), W.end(), [](auto& a, auto& b) { return a.size() < b.size(); });
            auto fits = [&](const std::vector<int>& st, const std::vector<std::pair<int, int>>& w) {
                for (auto [p, c] : w)
                    if (st[p] < c) return false;
                return true;
            };
            auto lower = [&](const std::vector<int>& st) {
                std::vector<int> t = st;
                int lb = 0;
                for (auto& w : W)
                    if (fits(t, w)) {
                        for (auto [p, c] : w) t[p] -= c;
                        ++lb;
                    }
                return lb;
            };
            std::vector<int> best_state;
            int best = 0;
            for (int m : mult) best += m;
            best += 1;
            std::set<std::pair<std::vector<int>, int>> failed;
            std::function<void(std::vector<int>&, int)> go = [&](std::vector<int>& st, int spent) {
                if (spent + lower(st) >= best) return;
                const std::vector<std::pair<int, int>>* open = nullptr;
                for (auto& w : W)
                    if (fits(st, w)) {
                        open = &w;
                        break;
                    }
                if (!open) {
                    best = spent;
                    best_state = st;
                    return;
                }
                if (failed.count({st, best - spent})) return;
                for (auto [p, c] : *open) {
                    int need = st[p] - c + 1;
                    st[p] -= need;
                    go(st, spent + need);
                    st[p] += need;
                }
                failed.insert({st, best - spent});
            };
            std::vector<int> st = mult;
            go(st, 0);
            res.value += best;
            for (std::size_t i = 0; i < pairs.size(); ++i)
                if (int c = mult[i] - best_state[i]; c > 0) removed[pairs[i]] += c;
        }
    }
    for (auto& [e, c] : removed)
        for (int k = 0; k < c; ++k) res.cert.edges.emplace_back(e.first, e.second, k);
    return res;
}

} // namespace epp
