#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "graph.hpp"

namespace epp {

/// Two disjoint connected vertex sets joined by at least r edges (a θ_r minor model).
struct ThetaModel {
    std::set<vertex> left;
    std::set<vertex> right;
    int crossing = 0;
};

namespace detail {

/// Enumerates every connected vertex subset exactly once (ESU-style extension with
/// exclusive neighbourhoods). Stops early when f returns true.
template <class F>
bool for_each_connected_set(const MultiGraph& g, F&& f)
{
    std::set<vertex> current;
    bool stop = false;
    auto closed_nbhd_contains = [&](vertex u) {
        if (current.count(u)) return true;
        for (auto [x, mu] : g.neighbors(u))
            if (current.count(x)) return true;
        return false;
    };
    std::function<void(vertex, std::vector<vertex>)> extend = [&](vertex seed, std::vector<vertex> ext) {
        while (!ext.empty() && !stop) {
            vertex w = ext.back();
            ext.pop_back();
            std::vector<vertex> next = ext;
            for (auto [u, mu] : g.neighbors(w)) {
                if (u <= seed || u == w) continue;
                if (closed_nbhd_contains(u)) continue;
                if (std::find(next.begin(), next.end(), u) == next.end()) next.push_back(u);
            }
            current.insert(w);
            if (f(current)) stop = true;
            else extend(seed, next);
            current.erase(w);
        }
    };
    for (vertex s : g.vertices()) {
        current = {s};
        if (f(current)) return true;
        std::vector<vertex> ext;
        for (auto [x, mu] : g.neighbors(s))
            if (x > s) ext.push_back(x);
        extend(s, ext);
        if (stop) return true;
    }
    return false;
}

} // namespace detail

/// Every θ_r minor model (A, C) where C is a whole component of g - A; calls f on each.
/// Stops when f returns true.
template <class F>
bool for_each_theta_model(const MultiGraph& g, int r, F&& f)
{
    return detail::for_each_connected_set(g, [&](const std::set<vertex>& a) {
        std::set<vertex> seen(a.begin(), a.end());
        for (vertex s : g.vertices()) {
            if (seen.count(s)) continue;
            std::set<vertex> comp{s};
            std::vector<vertex> stack{s};
            seen.insert(s);
            int cross = 0;
            while (!stack.empty()) {
                vertex x = stack.back();
                stack.pop_back();
                for (auto [y, mu] : g.neighbors(x)) {
                    if (a.count(y)) cross += mu;
                    else if (seen.insert(y).second) {
                        comp.insert(y);
                        stack.push_back(y);
                    }
                }
            }
            if (cross >= r && f(ThetaModel{a, comp, cross})) return true;
        }
        return false;
    });
}

/// Exhaustive test whether θ_r is a minor of g (definitional route: two disjoint
/// connected sets with at least r edges between them).
inline bool has_theta_minor_exhaustive(const MultiGraph& g, int r)
{
    if (r < 1) throw precondition_error("has_theta_minor: r must be at least 1");
    if (r == 1) return g.m() > 0;
    return for_each_theta_model(g, r, [](const ThetaModel&) { return true; });
}

inline std::optional<ThetaModel> find_theta_model(const MultiGraph& g, int r)
{
    std::optional<ThetaModel> out;
    for_each_theta_model(g, r, [&](const ThetaModel& m) {
        out = m;
        return true;
    });
    return out;
}

} // namespace epp
