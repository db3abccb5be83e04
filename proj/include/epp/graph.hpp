#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace epp {

using vertex = int;

/// Raised when an operation is called outside its documented precondition.
struct precondition_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Disjointness mode: vertex-disjoint packings / vertex covers, or the edge versions.
enum class Mode { v, e };

inline const char* to_string(Mode x) { return x == Mode::v ? "v" : "e"; }

inline Mode parse_mode(const std::string& s)
{
    if (s == "v") return Mode::v;
    if (s == "e") return Mode::e;
    throw std::invalid_argument("mode must be 'v' or 'e', got '" + s + "'");
}

/// One copy of a (possibly parallel) edge. Copies of a pair are indexed 0..mult-1.
struct EdgeOcc {
    vertex u = 0;
    vertex v = 0;
    int copy = 0;

    EdgeOcc() = default;
    EdgeOcc(vertex a, vertex b, int c = 0) : u(std::min(a, b)), v(std::max(a, b)), copy(c) {}

    std::pair<vertex, vertex> pair() const { return {u, v}; }
    auto operator<=>(const EdgeOcc&) const = default;
};

inline std::pair<vertex, vertex> ordered(vertex a, vertex b)
{
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

/// Undirected loopless multigraph over stable integer vertex ids.
///
/// Degrees count multiplicity; `simple_degree` counts distinct neighbours.
class MultiGraph {
public:
    using adjacency = std::map<vertex, int>;

    MultiGraph() = default;

    static MultiGraph with_vertices(const std::vector<vertex>& vs)
    {
        MultiGraph g;
        for (vertex v : vs) g.add_vertex(v);
        return g;
    }

    void add_vertex(vertex v)
    {
        if (v < 0) throw std::invalid_argument("vertex ids must be non-negative");
        adj_.try_emplace(v);
    }

    void add_edge(vertex a, vertex b, int mult = 1)
    {
        if (a == b) throw std::invalid_argument("loop at vertex " + std::to_string(a));
        if (mult <= 0) throw std::invalid_argument("edge multiplicity must be positive");
        add_vertex(a);
        add_vertex(b);
        adj_[a][b] += mult;
        adj_[b][a] += mult;
        m_ += static_cast<std::size_t>(mult);
    }

    /// Removes `count` copies of {a,b}; removing more copies than exist is an error.
    void remove_edge(vertex a, vertex b, int count = 1)
    {
        int have = multiplicity(a, b);
        if (count > have)
            throw std::invalid_argument("edge {" + std::to_string(a) + "," + std::to_string(b) +
                                        "} has only " + std::to_string(have) + " copies");
        if (count <= 0) return;
        auto dec = [&](vertex x, vertex y) {
            auto& nb = adj_.at(x);
            if ((nb[y] -= count) == 0) nb.erase(y);
        };
        dec(a, b);
        dec(b, a);
        m_ -= static_cast<std::size_t>(count);
    }

    void remove_vertex(vertex v)
    {
        auto it = adj_.find(v);
        if (it == adj_.end()) return;
        for (auto [w, mu] : it->second) {
            adj_[w].erase(v);
            m_ -= static_cast<std::size_t>(mu);
        }
        adj_.erase(it);
    }

    bool has_vertex(vertex v) const { return adj_.count(v) != 0; }

    int multiplicity(vertex a, vertex b) const
    {
        auto it = adj_.find(a);
        if (it == adj_.end()) return 0;
        auto jt = it->second.find(b);
        return jt == it->second.end() ? 0 : jt->second;
    }

    std::size_t n() const { return adj_.size(); }
    std::size_t m() const { return m_; }
    bool empty() const { return adj_.empty(); }

    const adjacency& neighbors(vertex v) const
    {
        auto it = adj_.find(v);
        if (it == adj_.end()) throw std::out_of_range("no vertex " + std::to_string(v));
        return it->second;
    }

    int degree(vertex v) const
    {
        int d = 0;
        for (auto [w, mu] : neighbors(v)) d += mu;
        return d;
    }

    int simple_degree(vertex v) const { return static_cast<int>(neighbors(v).size()); }

    int min_degree() const
    {
        if (adj_.empty()) return 0;
        int best = degree(adj_.begin()->first);
        for (auto& [v, nb] : adj_) best = std::min(best, degree(v));
        return best;
    }

    int min_simple_degree() const
    {
        if (adj_.empty()) return 0;
        int best = static_cast<int>(adj_.begin()->second.size());
        for (auto& [v, nb] : adj_) best = std::min(best, static_cast<int>(nb.size()));
        return best;
    }

    std::vector<vertex> vertices() const
    {
        std::vector<vertex> out;
        out.reserve(adj_.size());
        for (auto& [v, nb] : adj_) out.push_back(v);
        return out;
    }

    std::set<vertex> vertex_set() const
    {
        std::set<vertex> out;
        for (auto& [v, nb] : adj_) out.insert(v);
        return out;
    }

    vertex max_vertex() const { return adj_.empty() ? -1 : adj_.rbegin()->first; }

    /// Calls f(u, v, mult) once per unordered pair with u < v.
    template <class F>
    void for_each_edge(F&& f) const
    {
        for (auto& [u, nb] : adj_)
            for (auto [v, mu] : nb)
                if (u < v) f(u, v, mu);
    }

    std::vector<EdgeOcc> edge_occurrences() const
    {
        std::vector<EdgeOcc> out;
        out.reserve(m_);
        for_each_edge([&](vertex u, vertex v, int mu) {
            for (int c = 0; c < mu; ++c) out.emplace_back(u, v, c);
        });
        return out;
    }

    std::size_t distinct_edges() const
    {
        std::size_t k = 0;
        for_each_edge([&](vertex, vertex, int) { ++k; });
        return k;
    }

    MultiGraph induced(const std::set<vertex>& keep) const
    {
        MultiGraph g;
        for (vertex v : keep)
            if (has_vertex(v)) g.add_vertex(v);
        for_each_edge([&](vertex u, vertex v, int mu) {
            if (keep.count(u) && keep.count(v)) g.add_edge(u, v, mu);
        });
        return g;
    }

    MultiGraph without(const std::set<vertex>& drop) const
    {
        MultiGraph g = *this;
        for (vertex v : drop) g.remove_vertex(v);
        return g;
    }

    /// Every multiplicity clipped to at most `cap`.
    MultiGraph capped(int cap) const
    {
        MultiGraph g;
        for (auto& [v, nb] : adj_) g.add_vertex(v);
        for_each_edge([&](vertex u, vertex v, int mu) { g.add_edge(u, v, std::min(mu, cap)); });
        return g;
    }

    /// Connected components, each sorted, listed by smallest vertex.
    std::vector<std::vector<vertex>> components() const
    {
        std::vector<std::vector<vertex>> out;
        std::set<vertex> seen;
        for (auto& [s, nb0] : adj_) {
            if (seen.count(s)) continue;
            std::vector<vertex> comp{s}, stack{s};
            seen.insert(s);
            while (!stack.empty()) {
                vertex x = stack.back();
                stack.pop_back();
                for (auto [y, mu] : adj_.at(x))
                    if (seen.insert(y).second) {
                        comp.push_back(y);
                        stack.push_back(y);
                    }
            }
            std::sort(comp.begin(), comp.end());
            out.push_back(std::move(comp));
        }
        return out;
    }

    bool connected() const { return adj_.size() <= 1 || components().size() == 1; }

    /// Vertex-disjoint union; vertices of `other` are shifted by `offset`.
    void absorb(const MultiGraph& other, vertex offset = 0)
    {
        for (auto& [v, nb] : other.adj_) add_vertex(v + offset);
        other.for_each_edge([&](vertex u, vertex v, int mu) { add_edge(u + offset, v + offset, mu); });
    }

    bool operator==(const MultiGraph& o) const { return adj_ == o.adj_; }

private:
    std::map<vertex, adjacency> adj_;
    std::size_t m_ = 0;
};

/// Reads the edge-list format: `u v [mult]` per line, `#` comments, blank lines ignored.
/// A line with a single id declares an isolated vertex.
inline MultiGraph read_edge_list(std::istream& in)
{
    MultiGraph g;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<long long> tok;
        std::string word;
        while (ls >> word) {
            std::size_t used = 0;
            long long x = 0;
            try {
                x = std::stoll(word, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != word.size() || x < 0)
                throw std::invalid_argument("line " + std::to_string(lineno) + ": bad token '" + word + "'");
            tok.push_back(x);
        }
        if (tok.empty()) continue;
        if (tok.size() == 1) {
            g.add_vertex(static_cast<vertex>(tok[0]));
            continue;
        }
        if (tok.size() > 3) throw std::invalid_argument("line " + std::to_string(lineno) + ": too many fields");
        int mult = tok.size() == 3 ? static_cast<int>(tok[2]) : 1;
        if (tok[0] == tok[1]) throw std::invalid_argument("line " + std::to_string(lineno) + ": loop edge");
        if (mult <= 0) throw std::invalid_argument("line " + std::to_string(lineno) + ": multiplicity must be positive");
        g.add_edge(static_cast<vertex>(tok[0]), static_cast<vertex>(tok[1]), mult);
    }
    return g;
}

inline MultiGraph parse_edge_list(const std::string& text)
{
    std::istringstream in(text);
    return read_edge_list(in);
}

inline void write_edge_list(std::ostream& out, const MultiGraph& g)
{
    out << "# n=" << g.n() << " m=" << g.m() << "\n";
    std::set<vertex> touched;
    g.for_each_edge([&](vertex u, vertex v, int mu) {
        touched.insert(u);
        touched.insert(v);
        out << u << ' ' << v;
        if (mu != 1) out << ' ' << mu;
        out << '\n';
    });
    for (vertex v : g.vertices())
        if (!touched.count(v)) out << v << '\n';
}

/// Two vertices joined by r parallel edges.
inline MultiGraph theta_graph(int r, vertex a = 0, vertex b = 1)
{
    MultiGraph g;
    g.add_vertex(a);
    g.add_vertex(b);
    if (r > 0) g.add_edge(a, b, r);
    return g;
}

inline MultiGraph cycle_graph(int n)
{
    MultiGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex(i);
    if (n == 2) g.add_edge(0, 1, 2);
    else if (n >= 3)
        for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
}

inline MultiGraph path_graph(int n)
{
    MultiGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex(i);
    for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    return g;
}

inline MultiGraph complete_graph(int n)
{
    MultiGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex(i);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
    return g;
}

} // namespace epp
