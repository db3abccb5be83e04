#include <gtest/gtest.h>

#include <random>

#include <epp/boundaried.hpp>
#include <epp/canonical.hpp>
#include <epp/certificate.hpp>
#include <epp/minor.hpp>
#include <epp/oracles.hpp>
#include <epp/subdivision.hpp>

#include "support.hpp"

using namespace epp;
using epp::testing::brute_isomorphic;

namespace {

// dissolve by walking edge occurrences; written separately from the library routine
MultiGraph dissolve_by_occurrences(const MultiGraph& g, const std::set<vertex>& s)
{
    std::vector<std::pair<vertex, vertex>> occ;
    g.for_each_edge([&](vertex u, vertex v, int mu) {
        for (int i = 0; i < mu; ++i) occ.emplace_back(u, v);
    });
    for (vertex x : s) {
        std::vector<std::size_t> at;
        for (std::size_t i = 0; i < occ.size(); ++i)
            if (occ[i].first == x || occ[i].second == x) at.push_back(i);
        auto other = [&](std::size_t i) { return occ[i].first == x ? occ[i].second : occ[i].first; };
        vertex a = other(at[0]), b = other(at[1]);
        occ.erase(occ.begin() + static_cast<long>(at[1]));
        occ.erase(occ.begin() + static_cast<long>(at[0]));
        occ.emplace_back(a, b);
    }
    MultiGraph out;
    for (vertex v : g.vertices())
        if (!s.count(v)) out.add_vertex(v);
    for (auto [a, b] : occ) out.add_edge(a, b);
    return out;
}

BoundariedGraph pendant(vertex inner, vertex b, int label)
{
    BoundariedGraph g;
    g.graph.add_edge(inner, b);
    g.labels[b] = label;
    return g;
}

} // namespace

TEST(Dissolve, PathBaseCase)
{
    MultiGraph g = path_graph(3);
    MultiGraph d = dissolve(g, {1});
    EXPECT_EQ(d.n(), 2u);
    EXPECT_EQ(d.multiplicity(0, 2), 1);
}

TEST(Dissolve, TriangleGivesDoubleEdge)
{
    MultiGraph d = dissolve(cycle_graph(3), {1});
    EXPECT_EQ(d.vertices(), (std::vector<vertex>{0, 2}));
    EXPECT_EQ(d.multiplicity(0, 2), 2);
    EXPECT_EQ(d, dissolve_by_occurrences(cycle_graph(3), {1}));
}

TEST(Dissolve, EmptySetIsIdentity)
{
    MultiGraph g = complete_graph(4);
    EXPECT_EQ(dissolve(g, {}), g);
}

TEST(Dissolve, RejectsWrongDegree)
{
    EXPECT_THROW(dissolve(complete_graph(4), {0}), precondition_error);
    EXPECT_THROW(dissolve(cycle_graph(2), {0}), precondition_error); // would make a loop
}

TEST(Dissolve, MatchesOccurrenceWalkOnRandomGraphs)
{
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int it = 0; it < 300; ++it) {
        MultiGraph g = epp::testing::random_multigraph(rng, 8, 10, 2);
        std::set<vertex> s;
        for (vertex v : g.vertices())
            if (g.degree(v) == 2 && g.simple_degree(v) == 2 && rng() % 2) s.insert(v);
        MultiGraph expect;
        try {
            expect = dissolve_by_occurrences(g, s);
        } catch (...) {
            continue;
        }
        try {
            EXPECT_EQ(dissolve(g, s), expect);
            ++checked;
        } catch (const precondition_error&) {
            // sequential dissolution closed a loop; the walk above would have produced one too
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(Glue, TwoPendantEdges)
{
    MultiGraph w = glue(pendant(0, 10, 1), pendant(1, 11, 1));
    EXPECT_EQ(w.n(), 2u);
    EXPECT_EQ(w.m(), 1u);
    EXPECT_EQ(w.multiplicity(0, 1), 1);
}

TEST(Glue, FigureOneExample)
{
    // left graph: interior a=1 (top), c=2 (left top), d=3 (left bottom), e=4 (bottom);
    // boundary labels shifted by one relative to the figure (labels must be positive)
    BoundariedGraph g1;
    g1.graph.add_edge(100, 1);
    g1.graph.add_edge(1, 2);
    g1.graph.add_edge(2, 3);
    g1.graph.add_edge(3, 4);
    g1.graph.add_edge(4, 103);
    g1.graph.add_edge(101, 1);
    g1.graph.add_edge(102, 4);
    g1.graph.add_edge(4, 2);
    g1.labels = {{100, 1}, {101, 2}, {102, 3}, {103, 4}};
    BoundariedGraph g2;
    g2.graph.add_edge(202, 201);
    g2.graph.add_edge(200, 5);
    g2.graph.add_edge(5, 203);
    g2.labels = {{200, 1}, {201, 2}, {202, 3}, {203, 4}};
    g1.validate();
    g2.validate();
    MultiGraph w = glue(g1, g2);

    MultiGraph pictured; // right-hand graph of the figure
    for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 0}, {0, 3}, {3, 2}, {2, 4}, {4, 3}}) pictured.add_edge(a, b);
    EXPECT_EQ(w.n(), 5u);
    EXPECT_EQ(w.m(), 7u);
    EXPECT_TRUE(brute_isomorphic(w, pictured));
    EXPECT_TRUE(isomorphic(w, pictured));
}

TEST(Glue, IncompatibleNamesLabels)
{
    try {
        glue(pendant(0, 10, 1), pendant(1, 11, 2));
        FAIL();
    } catch (const precondition_error& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find(" 1"), std::string::npos);
        EXPECT_NE(msg.find(" 2"), std::string::npos);
    }
}

TEST(Glue, CapOfPendantEdgesKeepsGraph)
{
    std::mt19937_64 rng(5);
    for (int it = 0; it < 60; ++it) {
        MultiGraph w = epp::testing::random_connected(rng, 6, 3, 2);
        std::set<vertex> s;
        for (vertex v : w.vertices())
            if (rng() % 2) s.insert(v);
        if (s.empty()) s.insert(0);
        auto [gs, gc] = split(w, s);
        BoundariedGraph cap;
        vertex fresh = 1000;
        for (auto& [b, l] : gs.labels) {
            cap.graph.add_edge(fresh, b);
            cap.labels[b] = l;
            ++fresh;
        }
        MultiGraph glued = glue(gs, cap);
        // expected: gs with boundary vertices kept as plain pendant vertices
        MultiGraph expect = gs.graph;
        EXPECT_TRUE(brute_isomorphic(glued, expect));
    }
}

TEST(Split, SingleEdge)
{
    MultiGraph w;
    w.add_edge(0, 1);
    auto [a, b] = split(w, {0});
    EXPECT_EQ(a.labels.size(), 1u);
    EXPECT_EQ(a.label_set(), b.label_set());
    EXPECT_EQ(a.n(), 1u);
    EXPECT_EQ(b.n(), 1u);
    a.validate();
    b.validate();
}

TEST(Split, K4OneVertex)
{
    auto [a, b] = split(complete_graph(4), {0});
    EXPECT_EQ(a.labels.size(), 3u);
    EXPECT_EQ(a.graph.degree(0), 3);
    EXPECT_EQ(a.n(), 1u);
    EXPECT_TRUE(isomorphic(glue(a, b), complete_graph(4)));
}

TEST(Split, WholeVertexSet)
{
    MultiGraph w = complete_graph(4);
    auto [a, b] = split(w, w.vertex_set());
    EXPECT_TRUE(a.labels.empty());
    EXPECT_EQ(a.graph, w);
    EXPECT_TRUE(b.graph.empty());
}

TEST(Split, EmptyRejected)
{
    EXPECT_THROW(split(complete_graph(3), {}), precondition_error);
}

TEST(Split, LabelsFollowInsideThenOutsideOrder)
{
    MultiGraph w;
    w.add_edge(0, 5);
    w.add_edge(0, 3);
    w.add_edge(1, 2);
    auto [in, out] = split(w, {0, 1});
    std::vector<std::pair<vertex, vertex>> by_label(4);
    for (auto& [b, l] : in.labels) by_label[l] = {in.attachment(b), out.attachment(b)};
    EXPECT_EQ(by_label[1], (std::pair<vertex, vertex>{0, 3}));
    EXPECT_EQ(by_label[2], (std::pair<vertex, vertex>{0, 5}));
    EXPECT_EQ(by_label[3], (std::pair<vertex, vertex>{1, 2}));
}

TEST(GlueProperties, RoundTripSymmetryAndCounts)
{
    std::mt19937_64 rng(2024);
    for (int it = 0; it < 200; ++it) {
        int n = 2 + static_cast<int>(rng() % 9);
        MultiGraph w = epp::testing::random_multigraph(rng, n, static_cast<int>(rng() % (2 * n)), 3);
        std::set<vertex> s;
        for (vertex v : w.vertices())
            if (rng() % 2) s.insert(v);
        if (s.empty()) s.insert(w.vertices().front());
        auto [a, b] = split(w, s);
        a.validate();
        b.validate();
        MultiGraph g1 = glue(a, b), g2 = glue(b, a);
        EXPECT_EQ(canonical_form(g1), canonical_form(w));
        EXPECT_EQ(canonical_form(g1), canonical_form(g2));
        EXPECT_EQ(g1.n(), a.n() + b.n());
        std::size_t crossing = a.labels.size();
        EXPECT_EQ(g1.m(), a.m() + b.m() - crossing);
        if (n <= 7) {
            EXPECT_TRUE(brute_isomorphic(g1, w));
        }
    }
}

TEST(Canonical, AgreesWithPermutationBruteForce)
{
    std::mt19937_64 rng(99);
    for (int it = 0; it < 300; ++it) {
        MultiGraph a = epp::testing::random_multigraph(rng, 6, 7, 2);
        MultiGraph b = epp::testing::random_multigraph(rng, 6, 7, 2);
        EXPECT_EQ(isomorphic(a, b), brute_isomorphic(a, b));
    }
}

TEST(Canonical, RelabelledCopiesMatch)
{
    std::mt19937_64 rng(7);
    for (int it = 0; it < 100; ++it) {
        MultiGraph a = epp::testing::random_multigraph(rng, 9, 14, 3);
        std::vector<int> perm(9);
        std::iota(perm.begin(), perm.end(), 20);
        std::shuffle(perm.begin(), perm.end(), rng);
        MultiGraph b;
        for (vertex v : a.vertices()) b.add_vertex(perm[v]);
        a.for_each_edge([&](vertex u, vertex v, int mu) { b.add_edge(perm[u], perm[v], mu); });
        EXPECT_EQ(canonical_form(a), canonical_form(b));
    }
}

TEST(ConnectedSets, CountMatchesSubsetEnumeration)
{
    std::mt19937_64 rng(3);
    for (int it = 0; it < 40; ++it) {
        MultiGraph g = epp::testing::random_multigraph(rng, 8, 9, 2);
        std::set<std::set<vertex>> seen;
        std::size_t calls = 0;
        detail::for_each_connected_set(g, [&](const std::set<vertex>& s) {
            ++calls;
            seen.insert(s);
            return false;
        });
        std::size_t brute = 0;
        auto vs = g.vertices();
        for (unsigned mask = 1; mask < (1u << vs.size()); ++mask) {
            std::set<vertex> s;
            for (std::size_t i = 0; i < vs.size(); ++i)
                if (mask >> i & 1) s.insert(vs[i]);
            if (g.induced(s).connected()) ++brute;
        }
        EXPECT_EQ(calls, seen.size()) << "a set was produced twice";
        EXPECT_EQ(seen.size(), brute);
    }
}

TEST(EdgeList, ParseAndWrite)
{
    MultiGraph g = parse_edge_list("# comment\n0 1\n1 2 3\n\n7\n");
    EXPECT_EQ(g.n(), 4u);
    EXPECT_EQ(g.m(), 4u);
    EXPECT_EQ(g.multiplicity(1, 2), 3);
    std::ostringstream out;
    write_edge_list(out, g);
    EXPECT_EQ(parse_edge_list(out.str()), g);
    EXPECT_THROW(parse_edge_list("0 0\n"), std::invalid_argument);
    EXPECT_THROW(parse_edge_list("0 x\n"), std::invalid_argument);
    EXPECT_THROW(parse_edge_list("0 1 0\n"), std::invalid_argument);
}

TEST(VerifyCertificate, CycleAsThetaTwo)
{
    MultiGraph c5 = cycle_graph(5);
    SubdivisionWitness w;
    w.pattern = theta_graph(2);
    w.branch_map = {0, 2};
    w.paths = {{0, 1, {0, 1, 2}, {0, 0}}, {0, 1, {0, 4, 3, 2}, {0, 0, 0}}};
    auto H = HCollection::theta(2);
    EXPECT_TRUE(verify_certificate(c5, w, H));
    // sharing an internal vertex must fail
    SubdivisionWitness bad = w;
    bad.paths[1] = {0, 1, {0, 1, 2}, {0, 0}};
    EXPECT_FALSE(verify_certificate(c5, bad, H));
}

TEST(VerifyCertificate, CoverOfCycle)
{
    CoverCert c{Mode::v, {3}, {}};
    EXPECT_TRUE(verify_certificate(cycle_graph(5), c, HCollection::theta(2)));
    CoverCert none{Mode::v, {}, {}};
    auto v = verify_certificate(cycle_graph(5), none, HCollection::theta(2));
    EXPECT_FALSE(v);
    EXPECT_FALSE(v.reason.empty());
}

TEST(VerifyCertificate, TwoTrianglesInK4AreNotEdgeDisjoint)
{
    auto tri = [](vertex a, vertex b, vertex c) { return cycle_witness({a, b, c}); };
    PackingCert p{Mode::e, {tri(0, 1, 2), tri(0, 1, 3)}};
    normalize_copies(p);
    EXPECT_FALSE(verify_certificate(complete_graph(4), p, HCollection::theta(2)));
    PackingCert q{Mode::e, {tri(0, 1, 2), tri(0, 2, 3)}};
    EXPECT_FALSE(verify_certificate(complete_graph(4), q, HCollection::theta(2)));
}

TEST(Json, CertificatesRoundTrip)
{
    auto H = HCollection::theta(2);
    auto res = exact_pack(epp::testing::disjoint_copies(cycle_graph(3), 2), H, Mode::v);
    auto j = to_json(res.cert);
    EXPECT_TRUE(j.contains("mode"));
    EXPECT_TRUE(j.contains("elements"));
    EXPECT_TRUE(j["elements"][0].contains("pattern"));
    EXPECT_TRUE(j["elements"][0].contains("branch_map"));
    EXPECT_TRUE(j["elements"][0].contains("paths"));
    auto back = packing_from_json(j);
    EXPECT_EQ(to_json(back), j);
    CoverCert c{Mode::e, {}, {EdgeOcc(0, 1, 0)}};
    EXPECT_EQ(to_json(cover_from_json(to_json(c))), to_json(c));
}
