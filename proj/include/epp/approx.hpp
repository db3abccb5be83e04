#pragma once

#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "degree_packing.hpp"
#include "reduce.hpp"
#include "structure_finder.hpp"

namespace epp {

/// Raised when the driver runs out of options on a graph above oracle scale.
struct exhausted_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exponent form of the subdivision budget before rounding.
inline double z_exact(int r, int w, int k)
{
    return 2.0 * r * (w - 1) * std::log2(static_cast<double>(k) * (r + 1) * (r - 1)) + 5.0 * r;
}

inline int z_budget(int r, int w, int k)
{
    if (r < 2 || w < 2 || k < 1) throw precondition_error("z_budget: needs r >= 2, w >= 2, k >= 1");
    return static_cast<int>(std::ceil(z_exact(r, w, k) - 1e-9));
}

/// Per-log-k size of the subdivisions the pump can emit: z_budget(k) <= appx * log2 k
/// for every k >= 2, with one unit of slack for the rounding.
inline int appx(int r, int w) { return z_budget(r, w, 2) + 1; }

/// Covering budget appx * max(1, k log2 k).
inline double cover_budget(int r, int w, int k)
{
    return appx(r, w) * std::max(1.0, k * std::log2(static_cast<double>(std::max(k, 1))));
}

struct ApproxOptions {
    int w = 2; // protrusion size threshold of the structure finder and the reducer
    ReductionConfig reduce;
    FinderOptions finder;
    int oracle_cap = default_oracle_cap;
    bool verify = true;
};

struct DenseMinorFound {
    DenseMinor dense;
};

using PumpOutcome = std::variant<SmallSubdivision, ReducedHost, DenseMinorFound, Exhausted>;

namespace detail {

/// True or false when θ_r-freeness of g can be decided, nullopt otherwise.
inline std::optional<bool> theta_free(const MultiGraph& g, int r, int cap)
{
    if (r <= 3) return theta_free_small_r(g, r);
    for (auto& comp : g.components()) {
        if (comp.size() < 2) continue;
        MultiGraph c = g.induced(std::set<vertex>(comp.begin(), comp.end()));
        if (static_cast<int>(c.n()) > cap) return std::nullopt;
        if (has_theta_minor_exhaustive(c, r)) return false;
    }
    return true;
}

} // namespace detail

/// One round of reduce-or-progress on every component in turn. The mode does not steer
/// the round: replacements preserve both the v- and e-values.
inline PumpOutcome pump(const MultiGraph& host, [[maybe_unused]] Mode x, int r, int k, const ApproxOptions& opt = {})
{
    if (r < 2) throw precondition_error("pump: r must be at least 2");
    if (k < 1) throw precondition_error("pump: k must be positive");
    const int w = std::max(2, opt.w);
    const int z = z_budget(r, w, k);
    const int target = k * (r + 1);
    const auto H = HCollection::theta(r);
    ReductionConfig cfg = opt.reduce;
    cfg.threshold = w;
    // components that may hold a subdivision go first
    std::vector<std::set<vertex>> comps, later;
    for (auto& c : host.components()) {
        std::set<vertex> cs(c.begin(), c.end());
        MultiGraph sub = host.induced(cs);
        if (sub.m() == 0) continue;
        auto free = detail::theta_free(sub, r, opt.oracle_cap);
        (free && *free ? later : comps).push_back(std::move(cs));
    }
    comps.insert(comps.end(), later.begin(), later.end());
    std::string why;
    for (auto& cs : comps) {
        MultiGraph sub = host.induced(cs);
        auto out = find_structure(sub, r, w, z, target, opt.finder);
        if (auto* s = std::get_if<SmallSubdivision>(&out)) return *s;
        if (auto* d = std::get_if<DenseMinor>(&out)) return DenseMinorFound{*d};
        if (auto* e = std::get_if<Exhausted>(&out)) {
            why += e->reason + "; ";
            continue;
        }
        auto& pp = std::get<ProtrusionFound>(out).protrusion;
        try {
            auto red = reduce(pp, host, H, cfg);
            if (auto* rh = std::get_if<ReducedHost>(&red)) return *rh;
            if (auto* s = std::get_if<SmallSubdivision>(&red)) {
                if (static_cast<int>(s->witness.edge_count()) <= z) return *s;
                why += "reducer found a subdivision above the budget; ";
                continue;
            }
            why += std::get<Irreducible>(red).reason + "; ";
        } catch (const precondition_error& e) { // includes the folio size guard
            why += std::string("reducer gave up: ") + e.what() + "; ";
        }
    }
    return Exhausted{why.empty() ? "no component with edges" : why};
}

struct TraceEvent {
    enum class Kind { progress, reduce, win, fallback };
    Kind kind;
    int size = 0;    // edges of the subdivision, vertices removed, or vertices of the minor
    int n_after = 0; // vertices left
};

inline const char* to_string(TraceEvent::Kind k)
{
    switch (k) {
    case TraceEvent::Kind::progress: return "progress";
    case TraceEvent::Kind::reduce: return "reduce";
    case TraceEvent::Kind::win: return "win";
    case TraceEvent::Kind::fallback: return "fallback";
    }
    return "?";
}

struct ApproxOutcome {
    bool packing = false;
    bool win_shortcut = false; // packing known to exist, not built
    PackingCert pack;
    CoverCert cover;
    std::vector<TraceEvent> trace;
    int k = 0;
    double budget = 0; // covering size bound
    bool verified = false;
    bool within_budget = true;
};

namespace detail {

struct LoopStep {
    bool progress = false;
    SubdivisionWitness witness;
    ElementSet deleted;
    LiftRecipe recipe;
    MultiGraph before; // graph the reduction was applied to
};

inline ElementSet footprint(const SubdivisionWitness& m, Mode x)
{
    ElementSet del;
    if (x == Mode::v) del.vertices = m.vertex_set();
    else del.edges = m.edge_usage();
    return del;
}

inline MultiGraph remove_elements(MultiGraph g, const ElementSet& del)
{
    if (!del.vertices.empty()) g = g.without(del.vertices);
    for (auto [p, c] : del.edges) g.remove_edge(p.first, p.second, c);
    return g;
}

inline PackingCert unwind_packing(const std::vector<LoopStep>& steps, PackingCert q, bool add_progress)
{
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        if (it->progress) {
            if (add_progress) q.witnesses.push_back(it->witness);
        } else {
            q = lift_packing(it->recipe, it->before, q);
        }
    }
    return q;
}

inline CoverCert unwind_cover(const std::vector<LoopStep>& steps, Mode x)
{
    ElementSet c;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        if (it->progress) {
            c.vertices.insert(it->deleted.vertices.begin(), it->deleted.vertices.end());
            for (auto& [p, n] : it->deleted.edges) c.edges[p] += n;
        } else {
            c = lift_cover_elements(it->recipe, x, c);
        }
    }
    return cover_from_elements(x, c);
}

/// A cycle with at most z edges found by breadth-first search from s, or none when the
/// ball searched is a tree. The ball only shrinks under deletions, so a vertex that
/// finds nothing keeps finding nothing.
inline std::optional<std::vector<vertex>> local_cycle(const MultiGraph& g, vertex s, int z)
{
    if (z < 2 || !g.has_vertex(s)) return std::nullopt;
    std::unordered_map<vertex, vertex> parent{{s, s}};
    std::unordered_map<vertex, int> depth{{s, 0}};
    std::deque<vertex> q{s};
    while (!q.empty()) {
        vertex x = q.front();
        q.pop_front();
        if (2 * depth[x] + 2 > z) break;
        for (auto [y, mu] : g.neighbors(x)) {
            if (mu >= 2) return std::vector<vertex>{x, y};
            if (y == parent[x] && x != s) continue;
            auto it = depth.find(y);
            if (it == depth.end()) {
                parent[y] = x;
                depth[y] = depth[x] + 1;
                q.push_back(y);
                continue;
            }
            std::vector<vertex> px{x}, py{y};
            vertex a = x, b = y;
            while (a != b) {
                if (depth[a] >= depth[b]) px.push_back(a = parent[a]);
                else py.push_back(b = parent[b]);
            }
            py.pop_back();
            px.insert(px.end(), py.rbegin(), py.rend());
            return px;
        }
    }
    return std::nullopt;
}

/// Packing of size k from a dense minor in g.
inline PackingCert win_packing(const MultiGraph& g, const DenseMinor& d, Mode x, int r, int k)
{
    const auto H = HCollection::theta(r);
    if (x == Mode::e) {
        auto lifted = lift_packing(g, d.minor, d.model, greedy_epack(d.minor, k, r), r);
        if (verify_certificate(g, lifted, H)) return lifted;
        // edge-disjoint witnesses sharing branch sets can collide inside them; vertex-
        // disjoint ones cannot
    }
    auto lifted = lift_packing(g, d.minor, d.model, vpack_from_degree(d.minor, k, r), r);
    lifted.mode = x;
    return lifted;
}

inline ApproxOutcome run_loop(const MultiGraph& host, Mode x, int r, int k, const ApproxOptions& opt, bool build_win)
{
    if (r < 2) throw precondition_error("pack_or_cover: r must be at least 2");
    if (k < 1) throw precondition_error("pack_or_cover: k must be positive");
    const auto H = HCollection::theta(r);
    const int w = std::max(2, opt.w);
    ApproxOutcome out;
    out.k = k;
    out.budget = cover_budget(r, w, k);
    std::vector<LoopStep> steps;
    MultiGraph g = host;
    int found = 0;
    bool swept = false; // no cycle left that the local search can see
    auto progress = [&](const SubdivisionWitness& m, TraceEvent::Kind kind) {
        LoopStep s;
        s.progress = true;
        s.witness = m;
        s.deleted = footprint(m, x);
        g = remove_elements(std::move(g), s.deleted);
        steps.push_back(std::move(s));
        out.trace.push_back({kind, static_cast<int>(m.edge_count()), static_cast<int>(g.n())});
        ++found;
    };
    for (;;) {
        if (found == k) {
            out.packing = true;
            PackingCert q;
            q.mode = x;
            out.pack = unwind_packing(steps, q, true);
            break;
        }
        if (r == 2 && !swept) {
            // cheap Progress steps first: any cycle within the budget qualifies. Components
            // dense enough for a Win are left to the finder.
            const int z = z_budget(r, w, k);
            const int target = k * (r + 1);
            std::set<vertex> dense;
            for (auto& c : g.components()) {
                int low = std::numeric_limits<int>::max();
                for (vertex v : c) low = std::min(low, g.simple_degree(v));
                if (low >= target && static_cast<int>(c.size()) > target) dense.insert(c.begin(), c.end());
            }
            for (vertex s : g.vertices()) {
                if (dense.count(s)) continue;
                while (found < k) {
                    auto c = local_cycle(g, s, z);
                    if (!c) break;
                    progress(cycle_witness(*c), TraceEvent::Kind::progress);
                }
                if (found == k) break;
            }
            swept = true;
            continue;
        }
        auto free = theta_free(g, r, opt.oracle_cap);
        if (free && *free) {
            out.cover = unwind_cover(steps, x);
            break;
        }
        PumpOutcome p = pump(g, x, r, k, opt);
        if (auto* s = std::get_if<SmallSubdivision>(&p)) {
            progress(s->witness, TraceEvent::Kind::progress);
        } else if (auto* rh = std::get_if<ReducedHost>(&p)) {
            LoopStep s;
            s.recipe = rh->recipe;
            s.before = g;
            int removed = static_cast<int>(g.n() - rh->host.n());
            g = rh->host;
            swept = false;
            steps.push_back(std::move(s));
            out.trace.push_back({TraceEvent::Kind::reduce, removed, static_cast<int>(g.n())});
        } else if (auto* d = std::get_if<DenseMinorFound>(&p)) {
            out.trace.push_back({TraceEvent::Kind::win, static_cast<int>(d->dense.minor.n()), static_cast<int>(g.n())});
            out.packing = true;
            if (!build_win) {
                out.win_shortcut = true;
                return out;
            }
            out.pack = unwind_packing(steps, win_packing(g, d->dense, x, r, k), false);
            break;
        } else {
            const auto& why = std::get<Exhausted>(p).reason;
            if (static_cast<int>(g.n()) > opt.oracle_cap) throw exhausted_error("pack_or_cover: " + why);
            auto m = find_subdivision(g, H, {std::nullopt, opt.oracle_cap});
            if (!m) throw std::logic_error("pack_or_cover: graph is not free but holds no subdivision");
            progress(*m, TraceEvent::Kind::fallback);
        }
    }
    if (out.packing) {
        normalize_copies(out.pack);
        out.pack.mode = x;
    }
    if (!out.packing) out.within_budget = static_cast<double>(out.cover.size()) <= out.budget;
    if (opt.verify) {
        Verdict v = out.packing ? verify_certificate(host, out.pack, H) : Verdict::pass();
        if (!out.packing) {
            if (r <= 3 || static_cast<int>(host.n()) <= opt.oracle_cap) v = verify_certificate(host, out.cover, H, opt.oracle_cap);
            else v = Verdict::fail("cover not checkable above oracle scale");
        }
        out.verified = static_cast<bool>(v);
        if (!v && v.reason.find("oracle scale") == std::string::npos)
            throw std::logic_error(std::string("pack_or_cover produced an invalid certificate: ") + v.reason);
    }
    return out;
}

} // namespace detail

/// A verified x-packing of k θ_r-subdivisions or an x-covering within the budget.
inline ApproxOutcome pack_or_cover(const MultiGraph& host, Mode x, int r, int k, const ApproxOptions& opt = {})
{
    return detail::run_loop(host, x, r, k, opt, true);
}

struct ExistsResult {
    int bit = 1;
    ApproxOutcome outcome;
};

/// 0 when a packing of size k exists, 1 when a covering within the budget exists.
inline ExistsResult exists_bit(const MultiGraph& host, Mode x, int r, int k, const ApproxOptions& opt = {})
{
    ExistsResult res;
    res.outcome = detail::run_loop(host, x, r, k, opt, false);
    res.bit = res.outcome.packing ? 0 : 1;
    return res;
}

struct ApproxResult {
    int k0 = 1;
    double value = 0; // appx * max(1, k0 log2 k0)
    int appx_r = 0;
    std::vector<std::pair<int, int>> probes; // (k, bit) in evaluation order
    std::optional<ApproxOutcome> lower;      // the outcome at k0 - 1 (a packing)
    ApproxOutcome upper;                     // the outcome at k0 (a covering)
};

/// Binary search for the flip point of exists_bit on [1, n] (v) or [1, m] (e).
inline ApproxResult approximate(const MultiGraph& host, Mode x, int r, const ApproxOptions& opt = {})
{
    if (r < 2) throw precondition_error("approximate: r must be at least 2");
    ApproxResult res;
    const int w = std::max(2, opt.w);
    res.appx_r = appx(r, w);
    int hi = std::max(1, static_cast<int>(x == Mode::v ? host.n() : host.m()));
    auto hi_out = exists_bit(host, x, r, hi, opt);
    res.probes.push_back({hi, hi_out.bit});
    if (hi_out.bit != 1) throw std::logic_error("approximate: a packing larger than the graph allows was reported");
    res.upper = std::move(hi_out.outcome);
    int lo = 0; // bit(0) = 0: the empty packing
    while (hi - lo > 1) {
        int mid = lo + (hi - lo) / 2;
        auto o = exists_bit(host, x, r, mid, opt);
        res.probes.push_back({mid, o.bit});
        if (o.bit == 1) {
            hi = mid;
            res.upper = std::move(o.outcome);
        } else {
            lo = mid;
            res.lower = std::move(o.outcome);
        }
    }
    // both ends of the flip were evaluated, so bit(k0 - 1) = 0 and bit(k0) = 1 hold as
    // computed even where the predicate is not monotone
    res.k0 = hi;
    res.value = cover_budget(r, w, res.k0);
    return res;
}

inline nlohmann::json to_json(const ApproxOutcome& o)
{
    nlohmann::json trace = nlohmann::json::array();
    for (auto& e : o.trace) trace.push_back({{"kind", to_string(e.kind)}, {"size", e.size}, {"n_after", e.n_after}});
    nlohmann::json j{{"k", o.k}, {"budget", o.budget}, {"verified", o.verified}, {"trace", trace}};
    if (o.packing) {
        j["result"] = "packing";
        j["size"] = o.win_shortcut ? o.k : static_cast<int>(o.pack.size());
        j["built"] = !o.win_shortcut;
    } else {
        j["result"] = "covering";
        j["size"] = o.cover.size();
    }
    return j;
}

} // namespace epp
