#include <gtest/gtest.h>

#include <random>

#include <epp/structure_finder.hpp>

#include "support.hpp"

using namespace epp;

namespace {

MultiGraph petersen()
{
    MultiGraph g;
    for (int i = 0; i < 5; ++i) {
        g.add_edge(i, (i + 1) % 5);
        g.add_edge(i, i + 5);
        g.add_edge(5 + i, 5 + (i + 2) % 5);
    }
    return g;
}

// A path 0..len-1 with a pendant star of `leaves` leaves on every third vertex.
MultiGraph hairy_path(int len, int leaves)
{
    MultiGraph g = path_graph(len);
    vertex next = len;
    for (int i = 0; i < len; i += 3)
        for (int l = 0; l < leaves; ++l) g.add_edge(i, next++);
    return g;
}

void expect_sound(const MultiGraph& g, const StructureOutcome& out, const StructureParams& p)
{
    if (std::holds_alternative<Exhausted>(out)) return;
    StructureCertificate cert = std::visit(
        [](auto&& x) -> StructureCertificate {
            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Exhausted>) throw std::logic_error("unreachable");
            else return x;
        },
        out);
    auto v = verify_structure(g, cert, p);
    EXPECT_TRUE(v) << v.reason;
}

} // namespace

TEST(StructureFinder, ThetaIsItsOwnWitness)
{
    for (int r : {2, 3, 4, 5}) {
        auto out = find_structure(theta_graph(r), r, 2, r + 1, 10);
        ASSERT_TRUE(std::holds_alternative<SmallSubdivision>(out)) << r;
        EXPECT_EQ(std::get<SmallSubdivision>(out).witness.edge_count(), static_cast<std::size_t>(r));
    }
}

TEST(StructureFinder, CliqueIsItsOwnDenseMinor)
{
    auto out = find_structure(complete_graph(7), 2, 2, 17, 6);
    ASSERT_TRUE(std::holds_alternative<DenseMinor>(out));
    auto& d = std::get<DenseMinor>(out);
    EXPECT_EQ(d.min_degree, 6);
    for (auto& [a, set] : d.model) EXPECT_EQ(set, std::set<vertex>{a});
    expect_sound(complete_graph(7), out, {2, 2, 17, 6});
}

TEST(StructureFinder, HairyPathGivesProtrusion)
{
    auto g = hairy_path(12, 2);
    ASSERT_TRUE(is_h_free(g, HCollection::theta(2)));
    StructureParams p{2, 5, 17, 3};
    auto out = find_structure(g, p.r, p.w, p.z, p.degree_target);
    ASSERT_TRUE(std::holds_alternative<ProtrusionFound>(out));
    expect_sound(g, out, p);
    EXPECT_EQ(std::get<ProtrusionFound>(out).protrusion.region.size(), g.n());
}

TEST(StructureFinder, CutOffProtrusion)
{
    // K5 joined by two edges to a long path: the path side is the protrusion
    MultiGraph g = complete_graph(5);
    for (int i = 5; i < 15; ++i) g.add_edge(i, i + 1);
    g.add_edge(0, 5);
    g.add_edge(1, 15);
    // with r = 2 the triangles of K5 fit the budget
    ASSERT_TRUE(std::holds_alternative<SmallSubdivision>(find_structure(g, 2, 4, 3, 5)));
    // θ_3 needs five edges in K5, and degree 6 is out of reach
    StructureParams q{3, 4, 4, 6};
    auto out = find_structure(g, q.r, q.w, q.z, q.degree_target);
    ASSERT_TRUE(std::holds_alternative<ProtrusionFound>(out));
    auto& pp = std::get<ProtrusionFound>(out).protrusion;
    EXPECT_FALSE(pp.region.count(2));
    expect_sound(g, out, q);
}

TEST(StructureFinder, HighGirthCubicGraphIsExhausted)
{
    auto out = find_structure(petersen(), 2, 2, 4, 5);
    EXPECT_TRUE(std::holds_alternative<Exhausted>(out));
}

TEST(StructureFinder, Preconditions)
{
    EXPECT_THROW(find_structure(theta_graph(2), 1, 2, 3, 1), precondition_error);
    EXPECT_THROW(find_structure(theta_graph(2), 2, 2, 2, 1), precondition_error);
    EXPECT_THROW(find_structure(theta_graph(2), 2, 2, 3, 0), precondition_error);
    MultiGraph two;
    two.add_edge(0, 1);
    two.add_edge(2, 3);
    EXPECT_THROW(find_structure(two, 2, 2, 3, 1), precondition_error);
}

TEST(StructureFinder, VerifierRejectsForgeries)
{
    auto g = complete_graph(5);
    DenseMinor d;
    d.minor = g;
    for (vertex v : g.vertices()) d.model[v] = {v};
    d.min_degree = 5; // K5 has degree 4
    EXPECT_FALSE(verify_structure(g, d, {2, 2, 17, 4}));
    d.min_degree = 4;
    EXPECT_TRUE(verify_structure(g, d, {2, 2, 17, 4}));
    EXPECT_FALSE(verify_structure(g, d, {2, 2, 17, 5}));
    SmallSubdivision s{cycle_witness({0, 1, 2, 3, 4})};
    EXPECT_TRUE(verify_structure(g, s, {2, 2, 5, 1}));
    EXPECT_FALSE(verify_structure(g, s, {2, 2, 4, 1}));
    ProtrusionFound f{PartitionedProtrusion{{0, 1}, RootedTreePartition::single({0, 1}), 2}};
    EXPECT_FALSE(verify_structure(g, f, {2, 1, 5, 1})); // six boundary edges
}

TEST(StructureFinder, JsonExport)
{
    auto out = find_structure(complete_graph(5), 2, 2, 17, 4);
    auto j = to_json(std::get<DenseMinor>(out));
    EXPECT_EQ(j["kind"], "dense_minor");
    EXPECT_EQ(j["min_degree"], 4);
}

// Every certificate the finder emits passes its verifier.
TEST(StructureFinder, SoundOnRandomGraphs)
{
    std::mt19937_64 rng(2024);
    int kinds[3] = {0, 0, 0};
    for (int trial = 0; trial < 300; ++trial) {
        int n = std::uniform_int_distribution<int>(3, 50)(rng);
        int extra = std::uniform_int_distribution<int>(0, n)(rng);
        auto g = epp::testing::random_connected(rng, n, extra, 2);
        StructureParams p;
        p.r = 2 + trial % 3;
        p.w = std::uniform_int_distribution<int>(2, 8)(rng);
        p.z = std::uniform_int_distribution<int>(p.r + 1, 3 * p.r + 6)(rng);
        p.degree_target = std::uniform_int_distribution<int>(2, 6)(rng);
        auto out = find_structure(g, p.r, p.w, p.z, p.degree_target);
        expect_sound(g, out, p);
        if (out.index() < 3) ++kinds[out.index()];
    }
    EXPECT_GT(kinds[0], 10);
    EXPECT_GT(kinds[1], 5);
    EXPECT_GT(kinds[2], 5);
}

// On θ_r-free graphs no subdivision comes back; when one within budget exists it is found.
TEST(StructureFinder, SmallSubdivisionMatchesOracle)
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 240; ++trial) {
        int r = 2 + trial % 3;
        int n = std::uniform_int_distribution<int>(3, 10)(rng);
        auto g = epp::testing::random_connected(rng, n, std::uniform_int_distribution<int>(0, 6)(rng), 3);
        int z = std::uniform_int_distribution<int>(r + 1, 12)(rng);
        auto best = find_subdivision(g, HCollection::theta(r));
        bool within = best && static_cast<int>(best->edge_count()) <= z;
        auto out = find_structure(g, r, 2, z, static_cast<int>(n) + 1); // target out of reach: no dense shortcut
        EXPECT_EQ(std::holds_alternative<SmallSubdivision>(out), within) << "trial " << trial << " r=" << r << " z=" << z;
        if (!best) {
            EXPECT_FALSE(std::holds_alternative<SmallSubdivision>(out));
        }
    }
}

TEST(StructureFinder, PlantedSubdivisionIsFound)
{
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 60; ++trial) {
        int r = 2 + trial % 3;
        // random tree plus r paths of length two between two tree vertices
        int n = std::uniform_int_distribution<int>(10, 40)(rng);
        auto g = epp::testing::random_connected(rng, n, 0, 1);
        vertex a = 0, b = n - 1, next = n;
        for (int i = 0; i < r; ++i) {
            g.add_edge(a, next);
            g.add_edge(next++, b);
        }
        auto out = find_structure(g, r, 2, 2 * r, n + r + 5);
        ASSERT_TRUE(std::holds_alternative<SmallSubdivision>(out)) << trial;
        EXPECT_LE(std::get<SmallSubdivision>(out).witness.edge_count(), static_cast<std::size_t>(2 * r));
    }
}

// Every step of the contraction sequence is a valid minor model and shrinks the graph.
TEST(StructureFinder, ContractionKeepsValidModels)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        auto g = epp::testing::random_connected(rng, 20, 25, 2);
        std::size_t last = g.n() + 1;
        detail::contract_greedily(g, [&](const detail::Contraction& c) {
            EXPECT_EQ(c.adj.size() + 1, last);
            last = c.adj.size();
            auto v = verify_model(g, c.graph(), c.branch);
            EXPECT_TRUE(v) << v.reason;
            return false;
        });
        EXPECT_EQ(last, 1u);
    }
}

TEST(StructureFinder, DenseMinorFromContraction)
{
    // a subdivided K6: no vertex has degree 5, but contracting the subdivisions restores it
    MultiGraph g;
    vertex next = 6;
    for (int a = 0; a < 6; ++a)
        for (int b = a + 1; b < 6; ++b) {
            g.add_edge(a, next);
            g.add_edge(next++, b);
        }
    auto out = find_structure(g, 5, 2, 6, 5);
    ASSERT_TRUE(std::holds_alternative<DenseMinor>(out));
    expect_sound(g, out, {5, 2, 6, 5});
}

TEST(StructureFinder, MinCutSide)
{
    // two triangles joined by one edge
    MultiGraph g = cycle_graph(3);
    g.add_edge(3, 4);
    g.add_edge(4, 5);
    g.add_edge(5, 3);
    g.add_edge(2, 3);
    auto cut = detail::small_cut(g, 0, 5, 2);
    ASSERT_TRUE(cut);
    EXPECT_EQ(cut->a_side, (std::set<vertex>{0, 1, 2}));
    EXPECT_EQ(cut->b_side, (std::set<vertex>{3, 4, 5}));
    EXPECT_FALSE(detail::small_cut(complete_graph(5), 0, 1, 3));
}
