#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "folio.hpp"
#include "oracles.hpp"
#include "tree_partition.hpp"

namespace epp {

// Closed forms of the counting constants. Only f_modbv and f_intersect are explicit;
// the others depend on the class count f_eqclass, which we never compute.
inline long double f_modbv(int h, int t) { return static_cast<long double>(t) * h; }
inline long double f_intersect(int h, int t)
{
    long double b = f_modbv(h, t);
    return b + b * b * h;
}
inline long double f_maxdeg(int h, int t, long double eqclass) { return eqclass * f_intersect(h, t); }
inline long double f_newred(int h, int t, long double eqclass)
{
    return 2.0L * h * std::pow(static_cast<long double>(t), 3) * std::pow(f_maxdeg(h, t, eqclass), eqclass + 1);
}

/// Thresholds standing in for the class-count constants. Zero means "derive".
struct ReductionConfig {
    int height_bound = 3; // f_eqclass stand-in: lpth looks at nodes of this height
    int intersect = 0;    // f_intersect stand-in; 0 -> h
    int maxdeg = 0;       // 0 -> height_bound * intersect
    int threshold = 0;    // reduce needs more protrusion vertices than this
    int child_cap = 12;   // folio scale for the children handled by bdg
    FolioOptions folio;
    int oracle_cap = default_oracle_cap;

    int intersect_for(const HCollection& H) const { return intersect > 0 ? intersect : std::max(1, H.h()); }
    int maxdeg_for(const HCollection& H) const { return maxdeg > 0 ? maxdeg : height_bound * intersect_for(H); }
};

struct SmallSubdivision {
    SubdivisionWitness witness;
};

/// What is needed to carry packings and covers of the reduced host back.
struct LiftRecipe {
    enum class Kind { deletion, replacement };
    Kind kind = Kind::deletion;
    std::set<vertex> removed; // vertices of W missing from W'
    HCollection H;
    // replacement only
    std::set<vertex> v_region, w_region;
    std::map<int, std::pair<vertex, vertex>> v_cross; // label -> (inside V_v, outside) in W
    std::map<int, std::pair<vertex, vertex>> w_cross; // label -> (inside V_w, outside) in W'
    std::shared_ptr<const FolioTable> v_table, w_table;
};

struct ReducedHost {
    MultiGraph host;
    PartitionedProtrusion protrusion;
    LiftRecipe recipe;
};

/// Neither reduction applies with the configured thresholds.
struct Irreducible {
    std::string reason;
};

using ReduceOutcome = std::variant<SmallSubdivision, ReducedHost, Irreducible>;

namespace detail {

inline std::map<int, std::pair<vertex, vertex>> cross_by_label(const BoundariedGraph& side)
{
    std::map<int, std::pair<vertex, vertex>> out;
    for (auto& [z, l] : side.labels) out[l] = {side.attachment(z), -1};
    return out;
}

class FolioCache {
public:
    const Folio& get(const BoundariedGraph& g, const HCollection& H, int rho, const FolioOptions& opt)
    {
        std::string key = H.name() + "/" + std::to_string(rho) + "/" + g.canonical();
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, folio(g, H, rho, opt)).first;
        return it->second;
    }

private:
    std::unordered_map<std::string, Folio> cache_;
};

inline std::optional<SubdivisionWitness> capped_subdivision(const MultiGraph& g, const HCollection& H, int cap)
{
    MultiGraph c = g.capped(std::max(1, H.h()));
    if (is_h_free(c, H, cap)) return std::nullopt;
    return find_subdivision(c, H, {std::nullopt, cap});
}

/// Child boundary labelled by its outside endpoint, so siblings that attach the same
/// way get the same labels.
inline BoundariedGraph child_view(const MultiGraph& w, const std::set<vertex>& region)
{
    auto [in, out] = split(w, region);
    std::map<vertex, int> seen;
    std::map<int, int> relabel;
    std::vector<std::pair<vertex, int>> order; // (outside endpoint, old label)
    for (auto& [z, l] : out.labels) order.push_back({out.attachment(z), l});
    std::sort(order.begin(), order.end());
    for (auto& [o, l] : order) relabel[l] = (o + 1) * 64 + (++seen[o]);
    return in.relabeled(relabel);
}

inline PartitionedProtrusion after_deletion(const PartitionedProtrusion& pp, int v)
{
    PartitionedProtrusion out = pp;
    for (vertex x : pp.dec.below(v)) out.region.erase(x);
    out.dec.remove_subtree(v);
    return out;
}

} // namespace detail

/// High-degree reduction at node u: scan the children, stop at a subdivision inside one
/// of them or delete a child whose class has intersect + 2 members.
inline ReduceOutcome reduce_high_degree(const PartitionedProtrusion& pp, const MultiGraph& host, int u, const HCollection& H,
                                        const ReductionConfig& cfg = {})
{
    const int rho = pp.t;
    auto kids = pp.dec.children(u);
    const int maxdeg = cfg.maxdeg_for(H);
    if (static_cast<int>(kids.size()) <= maxdeg)
        throw precondition_error("reduce_high_degree: node " + std::to_string(u) + " has " + std::to_string(kids.size()) +
                                 " children, needs more than " + std::to_string(maxdeg));
    std::map<int, std::set<vertex>> below;
    for (int v : kids) {
        below[v] = pp.dec.below(v);
        if (static_cast<int>(below[v].size()) > cfg.child_cap)
            throw precondition_error("reduce_high_degree: child " + std::to_string(v) + " exceeds the folio scale");
    }
    const int needed = cfg.intersect_for(H) + 2;
    detail::FolioCache cache;
    std::map<std::string, int> counter;
    bool u_checked = false;
    for (int v : kids) {
        if (below[v].empty()) continue;
        MultiGraph gv = host.induced(below[v]);
        if (auto m = detail::capped_subdivision(gv, H, cfg.oracle_cap)) return SmallSubdivision{*m};
        auto view = detail::child_view(host, below[v]);
        std::string cls;
        {
            auto ls = view.label_set();
            for (int l : ls) cls += std::to_string(l) + ",";
            cls += "|" + cache.get(view, H, rho, cfg.folio).key();
        }
        if (++counter[cls] < needed) continue;
        if (!u_checked) {
            auto gu = host.induced(pp.dec.below(u));
            if (auto m = detail::capped_subdivision(gu, H, cfg.oracle_cap)) return SmallSubdivision{*m};
            u_checked = true;
        }
        ReducedHost out;
        out.host = host.without(below[v]);
        out.protrusion = detail::after_deletion(pp, v);
        out.recipe.kind = LiftRecipe::Kind::deletion;
        out.recipe.removed = below[v];
        out.recipe.H = H;
        return out;
    }
    return Irreducible{"no class of children of node " + std::to_string(u) + " reached " + std::to_string(needed) + " members"};
}

/// Long-path reduction below u: two nested nodes v, w on a deepest path with equivalent
/// boundaried graphs; G_v is replaced by G_w.
inline ReduceOutcome reduce_long_path(const PartitionedProtrusion& pp, const MultiGraph& host, int u, const HCollection& H,
                                      const ReductionConfig& cfg = {})
{
    const int rho = pp.t;
    auto heights = pp.dec.heights();
    if (heights.at(u) < cfg.height_bound)
        throw precondition_error("reduce_long_path: node " + std::to_string(u) + " has height " + std::to_string(heights.at(u)) +
                                 ", needs " + std::to_string(cfg.height_bound));
    auto vu = pp.dec.below(u);
    if (auto m = detail::capped_subdivision(host.induced(vu), H, cfg.oracle_cap)) return SmallSubdivision{*m};

    std::vector<int> path{u};
    while (heights.at(path.back()) > 0) {
        int best = -1;
        for (int c : pp.dec.children(path.back()))
            if (heights.at(c) + 1 == heights.at(path.back()) && (best < 0 || c < best)) best = c;
        path.push_back(best);
    }
    const bool rooted = !crossing_edges(host, pp.region).empty();
    detail::FolioCache cache;
    for (std::size_t i = 0; i < path.size(); ++i) {
        int v = path[i];
        if (rooted && v == pp.dec.root) continue;
        auto rv = pp.dec.below(v);
        if (static_cast<int>(rv.size()) > cfg.folio.interior_cap) continue;
        auto gv = split(host, rv).first;
        auto lv = gv.label_set();
        const Folio& fv = cache.get(gv, H, rho, cfg.folio);
        for (std::size_t j = path.size(); j-- > i + 1;) {
            int w = path[j];
            auto rw = pp.dec.below(w);
            if (rw.size() == rv.size()) continue;
            auto gw = split(host, rw).first;
            auto lw = gw.label_set();
            if (lw.size() != lv.size()) continue;
            std::vector<int> target(lv.begin(), lv.end());
            std::vector<int> source(lw.begin(), lw.end());
            std::sort(target.begin(), target.end());
            do {
                std::map<int, int> sigma;
                for (std::size_t a = 0; a < source.size(); ++a) sigma[source[a]] = target[a];
                auto gws = gw.relabeled(sigma);
                if (!(cache.get(gws, H, rho, cfg.folio) == fv)) continue;

                auto outside = split(host, rv).second;
                ReducedHost out;
                out.host = glue(outside, gws);
                auto& rec = out.recipe;
                rec.kind = LiftRecipe::Kind::replacement;
                rec.H = H;
                rec.v_region = rv;
                rec.w_region = rw;
                for (vertex x : rv)
                    if (!rw.count(x)) rec.removed.insert(x);
                std::map<int, vertex> far; // label -> outside endpoint
                for (auto& [z, l] : outside.labels) far[l] = outside.attachment(z);
                for (auto& [z, l] : gv.labels) rec.v_cross[l] = {gv.attachment(z), far.at(l)};
                for (auto& [z, l] : gws.labels) rec.w_cross[l] = {gws.attachment(z), far.at(l)};
                rec.v_table = std::make_shared<FolioTable>(folio_table(gv, H, rho, cfg.folio));
                rec.w_table = std::make_shared<FolioTable>(folio_table(gws, H, rho, cfg.folio));

                out.protrusion = pp;
                for (vertex x : rec.removed) out.protrusion.region.erase(x);
                auto sub = pp.dec.restricted(w);
                int parent = v == pp.dec.root ? w : pp.dec.parent.at(v);
                out.protrusion.dec.remove_subtree(v);
                for (auto& [node, par] : sub.parent) out.protrusion.dec.add_node(node, node == w ? parent : par, sub.bags.at(node));
                if (v == pp.dec.root) out.protrusion.dec.root = w;
                return out;
            } while (std::next_permutation(target.begin(), target.end()));
        }
    }
    return Irreducible{"no equivalent nested pair below node " + std::to_string(u)};
}

/// Reduce-or-find on a partitioned protrusion of `host`.
inline ReduceOutcome reduce(const PartitionedProtrusion& pp, const MultiGraph& host, const HCollection& H, const ReductionConfig& cfg = {})
{
    if (static_cast<int>(pp.region.size()) <= cfg.threshold)
        throw precondition_error("reduce: protrusion has " + std::to_string(pp.region.size()) + " vertices, threshold is " +
                                 std::to_string(cfg.threshold));
    auto heights = pp.dec.heights();
    const int maxdeg = cfg.maxdeg_for(H);
    int pick = -1;
    for (auto& [node, ht] : heights)
        if (static_cast<int>(pp.dec.children(node).size()) > maxdeg && ht <= cfg.height_bound - 1 && (pick < 0 || ht < heights.at(pick))) pick = node;
    std::string why;
    if (pick >= 0) {
        auto r = reduce_high_degree(pp, host, pick, H, cfg);
        if (!std::holds_alternative<Irreducible>(r)) return r;
        why = std::get<Irreducible>(r).reason + "; ";
    }
    for (auto& [node, ht] : heights) {
        if (ht != cfg.height_bound) continue;
        auto r = reduce_long_path(pp, host, node, H, cfg);
        if (!std::holds_alternative<Irreducible>(r)) return r;
        why += std::get<Irreducible>(r).reason + "; ";
    }
    return Irreducible{why.empty() ? "no node of high degree or of height " + std::to_string(cfg.height_bound) : why};
}

namespace detail {

/// For every W' copy of an edge between V_w and F, the labels realising it.
inline std::map<std::pair<vertex, vertex>, std::vector<int>> glued_labels(const LiftRecipe& rec)
{
    std::map<std::pair<vertex, vertex>, std::vector<int>> out;
    for (auto& [l, e] : rec.w_cross) out[ordered(e.first, e.second)].push_back(l);
    return out;
}

inline vertex boundary_vertex(const FolioTable& t, int label) { return t.g.vertex_of(label); }

} // namespace detail

/// Carries an x-packing of the reduced host back to the original host.
inline PackingCert lift_packing(const LiftRecipe& rec, const MultiGraph& original, const PackingCert& reduced)
{
    if (rec.kind == LiftRecipe::Kind::deletion) return reduced;
    const Mode x = reduced.mode;
    const int xi = FolioTable::idx(x);
    auto glued = detail::glued_labels(rec);
    std::map<std::pair<vertex, vertex>, std::size_t> glued_next;

    struct Piece {
        std::size_t witness;
        PairBag edges;
        std::string key;
    };
    std::vector<Piece> pieces;
    PackingCert out;
    out.mode = x;
    std::vector<MultiGraph> outside_parts(reduced.size());
    std::vector<std::set<vertex>> forced(reduced.size());
    for (std::size_t i = 0; i < reduced.size(); ++i) {
        const auto& m = reduced.witnesses[i];
        PairBag inner;
        MultiGraph rest;
        bool touches = false;
        for (auto [p, c] : m.edge_usage()) {
            bool a_in = rec.w_region.count(p.first), b_in = rec.w_region.count(p.second);
            if (!a_in && !b_in) {
                rest.add_edge(p.first, p.second, c);
                continue;
            }
            touches = true;
            if (a_in && b_in) {
                inner[p] += c;
                continue;
            }
            vertex in = a_in ? p.first : p.second;
            auto& ls = glued.at(p);
            for (int k = 0; k < c; ++k) {
                std::size_t& nx = glued_next[p];
                if (nx >= ls.size()) throw std::logic_error("lift_packing: glued edge used more often than it exists");
                vertex z = detail::boundary_vertex(*rec.w_table, ls[nx++]);
                inner[ordered(in, z)] += 1;
            }
        }
        for (vertex b : m.branch_map)
            if (!rec.w_region.count(b)) forced[i].insert(b);
        outside_parts[i] = rest;
        if (!touches) {
            out.witnesses.push_back(m);
            continue;
        }
        std::set<vertex> branch;
        for (vertex b : m.branch_map)
            if (rec.w_region.count(b)) branch.insert(b);
        auto key = partial_key(rec.w_table->g, inner, branch, rec.H);
        if (!key) throw std::logic_error("lift_packing: a witness meets the replaced part in a non-partial structure");
        pieces.push_back({i, inner, *key});
    }
    if (pieces.empty()) return reduced;

    std::vector<std::string> keys;
    for (auto& p : pieces) keys.push_back(p.key);
    std::sort(keys.begin(), keys.end());
    std::string ckey;
    for (auto& k : keys) ckey += "[" + k + "]";
    auto found = rec.v_table->collections[xi].find(ckey);
    if (found == rec.v_table->collections[xi].end()) throw std::logic_error("lift_packing: no equivalent collection on the original side");
    std::vector<int> pool = found->second;

    for (auto& p : pieces) {
        auto it = std::find_if(pool.begin(), pool.end(), [&](int idx) { return rec.v_table->items[idx].key == p.key; });
        const FolioItem& item = rec.v_table->items[*it];
        pool.erase(it);
        MultiGraph sub = outside_parts[p.witness];
        for (auto& [e, c] : item.edges) {
            vertex a = e.first, b = e.second;
            auto map = [&](vertex q) -> vertex { return q; };
            if (rec.v_table->g.labels.count(a)) std::swap(a, b);
            if (rec.v_table->g.labels.count(b)) {
                auto [inside, far] = rec.v_cross.at(rec.v_table->g.labels.at(b));
                sub.add_edge(inside, far, c);
            } else {
                sub.add_edge(map(a), map(b), c);
            }
        }
        std::set<vertex> force = forced[p.witness];
        force.insert(item.branch.begin(), item.branch.end());
        for (auto it2 = force.begin(); it2 != force.end();)
            it2 = sub.has_vertex(*it2) ? std::next(it2) : force.erase(it2);
        SubdivisionWitness wnew = witness_from_subgraph(sub, force);
        if (!rec.H.accepts_pattern(wnew.pattern)) wnew = detail::witness_in(sub, rec.H, std::max<int>(default_oracle_cap, sub.n()));
        out.witnesses.push_back(std::move(wnew));
    }
    std::map<std::pair<vertex, vertex>, int> usage;
    for (auto& w : out.witnesses)
        for (auto [p, c] : w.edge_usage()) usage[p] += c;
    bool fits = true;
    for (auto [p, c] : usage)
        if (c > original.multiplicity(p.first, p.second)) fits = false;
    if (fits) normalize_copies(out);
    else
        for (auto& w : out.witnesses) normalize_copies(w);
    return out;
}

/// Cover elements as a vertex set (v) or pair multiset (e).
inline ElementSet elements_of(const CoverCert& c)
{
    ElementSet s;
    if (c.mode == Mode::v) s.vertices.insert(c.vertices.begin(), c.vertices.end());
    else
        for (auto& e : c.edges) s.edges[e.pair()] += 1;
    return s;
}

inline CoverCert cover_from_elements(Mode x, const ElementSet& s)
{
    CoverCert c;
    c.mode = x;
    if (x == Mode::v) c.vertices.assign(s.vertices.begin(), s.vertices.end());
    else
        for (auto& [p, k] : s.edges)
            for (int i = 0; i < k; ++i) c.edges.emplace_back(p.first, p.second, i);
    return c;
}

/// Carries an x-cover of the reduced host back to the original host.
inline ElementSet lift_cover_elements(const LiftRecipe& rec, Mode x, const ElementSet& reduced)
{
    if (rec.kind == LiftRecipe::Kind::deletion) return reduced;
    const int xi = FolioTable::idx(x);
    const FolioTable& wt = *rec.w_table;
    const FolioTable& vt = *rec.v_table;
    ElementSet kept, local; // local: in the coordinates of the replacing graph
    if (x == Mode::v) {
        for (vertex v : reduced.vertices) (rec.w_region.count(v) ? local.vertices : kept.vertices).insert(v);
        if (static_cast<int>(local.vertices.size()) > wt.rho) {
            local.vertices.clear();
            for (auto& [l, e] : rec.w_cross) local.vertices.insert(e.first);
        }
    } else {
        auto glued = detail::glued_labels(rec);
        for (auto& [p, c] : reduced.edges) {
            bool a_in = rec.w_region.count(p.first), b_in = rec.w_region.count(p.second);
            if (!a_in && !b_in) kept.edges[p] += c;
            else if (a_in && b_in) local.edges[p] += c;
            else {
                vertex in = a_in ? p.first : p.second;
                auto& ls = glued.at(p);
                for (int k = 0; k < c && k < static_cast<int>(ls.size()); ++k) local.edges[ordered(in, detail::boundary_vertex(wt, ls[k]))] += 1;
            }
        }
        if (local.size(x) > wt.rho) {
            local.edges.clear();
            for (auto& [z, l] : wt.g.labels) local.edges[ordered(z, wt.g.attachment(z))] += 1;
        }
    }
    const int y = local.size(x);
    std::string key = wt.mu_hat_key(x, local);
    auto it = vt.reps[xi].at(y).find(key);
    if (it == vt.reps[xi][y].end()) throw std::logic_error("lift_cover: no equal signature on the original side");
    const ElementSet& s = it->second;
    if (x == Mode::v) kept.vertices.insert(s.vertices.begin(), s.vertices.end());
    else
        for (auto& [p, c] : s.edges) {
            vertex a = p.first, b = p.second;
            if (vt.g.labels.count(a)) std::swap(a, b);
            if (vt.g.labels.count(b)) {
                auto [inside, far] = rec.v_cross.at(vt.g.labels.at(b));
                kept.edges[ordered(inside, far)] += c;
            } else {
                kept.edges[p] += c;
            }
        }
    return kept;
}

inline CoverCert lift_cover(const LiftRecipe& rec, const CoverCert& reduced)
{
    return cover_from_elements(reduced.mode, lift_cover_elements(rec, reduced.mode, elements_of(reduced)));
}

/// Drops bags emptied by deletions; their children move to the nearest kept ancestor.
inline RootedTreePartition prune_empty_bags(RootedTreePartition d)
{
    for (;;) {
        int drop = -1;
        for (auto& [u, bag] : d.bags)
            if (bag.empty() && d.bags.size() > 1) {
                drop = u;
                break;
            }
        if (drop < 0) return d;
        auto kids = d.children(drop);
        if (drop == d.root) {
            int nr = kids.front();
            for (int c : kids) d.parent[c] = nr;
            d.parent[nr] = nr;
            d.root = nr;
        } else {
            for (int c : kids) d.parent[c] = d.parent.at(drop);
        }
        d.parent.erase(drop);
        d.bags.erase(drop);
    }
}

struct TpwCoverResult {
    CoverCert cover;
    int progress_steps = 0; // |P|
    int reductions = 0;
    std::size_t residual_vertices = 0;
    bool exact_residual = false;
    std::string stop_reason;
};

/// Cover for a graph with a tree-partition of width t: alternate reductions and
/// deletions of small subdivisions until at most `residual` vertices remain, cover the
/// rest, and carry everything back through the recorded recipes.
inline TpwCoverResult bounded_tpw_cover(const MultiGraph& g, const RootedTreePartition& d, const HCollection& H, Mode x,
                                        ReductionConfig cfg = {}, int residual = 10)
{
    int t = tpw_validate(g, d);
    struct Step {
        bool progress;
        ElementSet deleted;
        LiftRecipe recipe;
    };
    std::vector<Step> steps;
    MultiGraph w = g;
    PartitionedProtrusion pp{g.vertex_set(), prune_empty_bags(d), std::max(1, t)};
    TpwCoverResult res;
    cfg.threshold = 0;
    while (static_cast<int>(w.n()) > residual) {
        if (pp.dec.bags.empty()) break;
        ReduceOutcome r = reduce(pp, w, H, cfg);
        if (auto* s = std::get_if<SmallSubdivision>(&r)) {
            ElementSet del;
            if (x == Mode::v) {
                del.vertices = s->witness.vertex_set();
                w = w.without(del.vertices);
                for (auto& [u, bag] : pp.dec.bags)
                    for (vertex v : del.vertices) bag.erase(v);
                for (vertex v : del.vertices) pp.region.erase(v);
                pp.dec = prune_empty_bags(pp.dec);
            } else {
                del.edges = s->witness.edge_usage();
                for (auto [p, c] : del.edges) w.remove_edge(p.first, p.second, c);
            }
            steps.push_back({true, del, {}});
            ++res.progress_steps;
        } else if (auto* rh = std::get_if<ReducedHost>(&r)) {
            steps.push_back({false, {}, rh->recipe});
            w = rh->host;
            pp = rh->protrusion;
            pp.dec = prune_empty_bags(pp.dec);
            ++res.reductions;
        } else {
            res.stop_reason = std::get<Irreducible>(r).reason;
            break;
        }
    }
    res.residual_vertices = w.n();
    ElementSet cover;
    if (static_cast<int>(w.n()) <= cfg.oracle_cap) {
        cover = elements_of(exact_cover(w, H, x, {cfg.oracle_cap}).cert);
        res.exact_residual = true;
    } else if (x == Mode::v) {
        cover.vertices = w.vertex_set();
    } else {
        w.for_each_edge([&](vertex a, vertex b, int mu) { cover.edges[{a, b}] += mu; });
    }
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        if (it->progress) {
            cover.vertices.insert(it->deleted.vertices.begin(), it->deleted.vertices.end());
            for (auto& [p, c] : it->deleted.edges) cover.edges[p] += c;
        } else {
            cover = lift_cover_elements(it->recipe, x, cover);
        }
    }
    res.cover = cover_from_elements(x, cover);
    return res;
}

} // namespace epp
