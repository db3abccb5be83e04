#pragma once

#include <map>
#include <string>
#include <vector>

#include "graph.hpp"

namespace epp {

namespace detail {

class Canonizer {
public:
    Canonizer(const MultiGraph& g, const std::map<vertex, int>& fixed)
    {
        ids_ = g.vertices();
        n_ = static_cast<int>(ids_.size());
        std::map<vertex, int> index;
        for (int i = 0; i < n_; ++i) index[ids_[i]] = i;
        adj_.assign(n_, std::vector<int>(n_, 0));
        nbrs_.assign(n_, {});
        g.for_each_edge([&](vertex u, vertex v, int mu) {
            int a = index[u], b = index[v];
            adj_[a][b] = adj_[b][a] = mu;
            nbrs_[a].push_back(b);
            nbrs_[b].push_back(a);
        });
        label_.assign(n_, 0);
        for (auto [v, lab] : fixed)
            if (auto it = index.find(v); it != index.end()) label_[it->second] = lab + 1;
    }

    std::string run()
    {
        std::vector<long long> colors(n_);
        for (int i = 0; i < n_; ++i) colors[i] = label_[i];
        auto c = refine(rank(colors));
        best_.clear();
        search(c);
        return "n" + std::to_string(n_) + ":" + best_;
    }

private:
    static std::vector<int> rank(const std::vector<long long>& keys)
    {
        std::vector<long long> sorted = keys;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        std::vector<int> out(keys.size());
        for (std::size_t i = 0; i < keys.size(); ++i)
            out[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), keys[i]) - sorted.begin());
        return out;
    }

    std::vector<int> refine(std::vector<int> c) const
    {
        for (;;) {
            using sig_t = std::pair<int, std::vector<std::pair<int, int>>>;
            std::vector<sig_t> sig(n_);
            for (int i = 0; i < n_; ++i) {
                sig[i].first = c[i];
                for (int j : nbrs_[i]) sig[i].second.emplace_back(c[j], adj_[i][j]);
                std::sort(sig[i].second.begin(), sig[i].second.end());
            }
            std::vector<sig_t> distinct = sig;
            std::sort(distinct.begin(), distinct.end());
            distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
            std::vector<int> next(n_);
            for (int i = 0; i < n_; ++i)
                next[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), sig[i]) - distinct.begin());
            int before = c.empty() ? 0 : *std::max_element(c.begin(), c.end());
            int after = next.empty() ? 0 : *std::max_element(next.begin(), next.end());
            c = std::move(next);
            if (after == before) return c;
        }
    }

    void search(const std::vector<int>& c)
    {
        // smallest colour class with more than one member
        std::vector<int> count(n_, 0);
        for (int x : c) ++count[x];
        int target = -1;
        for (int col = 0; col < n_; ++col)
            if (count[col] > 1) {
                target = col;
                break;
            }
        if (target < 0) {
            std::vector<int> order(n_);
            for (int i = 0; i < n_; ++i) order[c[i]] = i;
            std::string s;
            for (int i = 0; i < n_; ++i) s += std::to_string(label_[order[i]]) + ",";
            s += "|";
            for (int i = 0; i < n_; ++i)
                for (int j = i + 1; j < n_; ++j) {
                    int mu = adj_[order[i]][order[j]];
                    if (mu) s += std::to_string(i) + "-" + std::to_string(j) + "x" + std::to_string(mu) + ";";
                }
            if (best_.empty() || s < best_) best_ = s;
            return;
        }
        std::vector<int> tried;
        for (int v = 0; v < n_; ++v) {
            if (c[v] != target) continue;
            // twins are swapped by an automorphism that fixes the colouring
            bool twin = false;
            for (int u : tried) twin = twin || twins(u, v);
            if (twin) continue;
            tried.push_back(v);
            std::vector<long long> keys(n_);
            for (int i = 0; i < n_; ++i) keys[i] = 2LL * c[i] + ((c[i] == target && i != v) ? 1 : 0);
            search(refine(rank(keys)));
        }
    }

    bool twins(int u, int v) const
    {
        if (label_[u] != label_[v]) return false;
        for (int i = 0; i < n_; ++i)
            if (i != u && i != v && adj_[u][i] != adj_[v][i]) return false;
        return true;
    }

    std::vector<vertex> ids_;
    int n_ = 0;
    std::vector<std::vector<int>> adj_;
    std::vector<std::vector<int>> nbrs_;
    std::vector<int> label_;
    std::string best_;
};

} // namespace detail

/// Isomorphism-invariant string for small multigraphs. Vertices in `fixed` keep
/// their label as an identity (they are only mapped onto equally-labelled vertices).
inline std::string canonical_form(const MultiGraph& g, const std::map<vertex, int>& fixed = {})
{
    return detail::Canonizer(g, fixed).run();
}

inline bool isomorphic(const MultiGraph& a, const MultiGraph& b)
{
    if (a.n() != b.n() || a.m() != b.m()) return false;
    return canonical_form(a) == canonical_form(b);
}

} // namespace epp
