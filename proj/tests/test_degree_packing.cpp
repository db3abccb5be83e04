#include <gtest/gtest.h>

#include <deque>
#include <random>

#include <epp/degree_packing.hpp>
#include <epp/oracles.hpp>

#include "support.hpp"

using namespace epp;

namespace {

std::set<vertex> common_vertices(const SubdivisionWitness& a, const SubdivisionWitness& b)
{
    std::set<vertex> out;
    auto va = a.vertex_set();
    for (vertex x : b.vertex_set())
        if (va.count(x)) out.insert(x);
    return out;
}

// Dense random multigraph: complete-ish on n vertices plus random extra copies.
MultiGraph dense_random(std::mt19937_64& rng, int n, double p, int extra)
{
    MultiGraph g;
    std::bernoulli_distribution keep(p);
    for (int i = 0; i < n; ++i) g.add_vertex(i);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (keep(rng)) g.add_edge(i, j);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int e = 0; e < extra; ++e) {
        int a = pick(rng), b = pick(rng);
        if (a != b) g.add_edge(a, b);
    }
    return g;
}

// Voronoi cells around random seeds give connected, disjoint branch sets.
std::pair<MultiGraph, ModelMap> random_model(std::mt19937_64& rng, const MultiGraph& w, int seeds)
{
    auto vs = w.vertices();
    std::shuffle(vs.begin(), vs.end(), rng);
    std::map<vertex, vertex> owner;
    std::deque<vertex> q;
    for (int i = 0; i < seeds && i < static_cast<int>(vs.size()); ++i) {
        owner[vs[i]] = i;
        q.push_back(vs[i]);
    }
    while (!q.empty()) {
        vertex x = q.front();
        q.pop_front();
        for (auto [y, mu] : w.neighbors(x))
            if (!owner.count(y)) {
                owner[y] = owner[x];
                q.push_back(y);
            }
    }
    ModelMap model;
    for (auto [x, a] : owner) model[a].insert(x);
    MultiGraph h;
    for (auto& [a, s] : model) h.add_vertex(a);
    w.for_each_edge([&](vertex x, vertex y, int mu) {
        if (owner.count(x) && owner.count(y) && owner[x] != owner[y]) h.add_edge(owner[x], owner[y], mu);
    });
    return {h, model};
}

} // namespace

TEST(GreedyEpack, K5TwoCyclesThroughOneVertex)
{
    MultiGraph g = complete_graph(5);
    auto p = greedy_epack(g, 2, 2);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p.mode, Mode::e);
    EXPECT_TRUE(verify_certificate(g, p, HCollection::theta(2))) << verify_certificate(g, p, HCollection::theta(2)).reason;
    // path 0..4 ends at 4; groups {0,1} and {2,3}
    EXPECT_EQ(common_vertices(p.witnesses[0], p.witnesses[1]), (std::set<vertex>{4}));
    EXPECT_EQ(p.witnesses[0].vertex_set(), (std::set<vertex>{0, 1, 4}));
    EXPECT_EQ(p.witnesses[1].vertex_set(), (std::set<vertex>{2, 3, 4}));
}

TEST(GreedyEpack, CompleteGraphSingleWitness)
{
    for (int r = 1; r <= 5; ++r) {
        MultiGraph g = complete_graph(r + 1);
        auto p = greedy_epack(g, 1, r);
        ASSERT_EQ(p.size(), 1u);
        EXPECT_TRUE(verify_certificate(g, p, HCollection::theta(r))) << "r=" << r;
        EXPECT_EQ(p.witnesses[0].vertex_set().size(), static_cast<std::size_t>(r + 1));
    }
}

TEST(GreedyEpack, CycleIsItsOwnWitness)
{
    for (int n = 3; n <= 9; ++n) {
        MultiGraph g = cycle_graph(n);
        auto p = greedy_epack(g, 1, 2);
        ASSERT_EQ(p.size(), 1u);
        EXPECT_TRUE(verify_certificate(g, p, HCollection::theta(2)));
        EXPECT_EQ(p.witnesses[0].edge_count(), static_cast<std::size_t>(n));
    }
}

TEST(GreedyEpack, ParallelEdgesCountTowardDegree)
{
    MultiGraph g = theta_graph(6);
    auto p = greedy_epack(g, 3, 2);
    ASSERT_EQ(p.size(), 3u);
    EXPECT_TRUE(verify_certificate(g, p, HCollection::theta(2)));
    auto q = greedy_epack(g, 2, 3);
    EXPECT_TRUE(verify_certificate(g, q, HCollection::theta(3)));
}

TEST(GreedyEpack, PreconditionNamesVertex)
{
    MultiGraph g = complete_graph(5);
    g.add_edge(0, 7);
    try {
        greedy_epack(g, 2, 2);
        FAIL() << "expected precondition_error";
    } catch (const precondition_error& e) {
        EXPECT_NE(std::string(e.what()).find("vertex 7"), std::string::npos) << e.what();
    }
    EXPECT_THROW(greedy_epack(g, 0, 2), precondition_error);
}

TEST(GreedyEpack, RandomDenseGraphsVerify)
{
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int it = 0; it < 300; ++it) {
        int n = 5 + it % 20;
        MultiGraph g = dense_random(rng, n, 0.6, n);
        int r = 1 + it % 4;
        int k = g.min_degree() / r;
        if (k < 1) continue;
        auto p = greedy_epack(g, k, r);
        ASSERT_EQ(p.size(), static_cast<std::size_t>(k));
        ASSERT_TRUE(verify_certificate(g, p, HCollection::theta(r))) << verify_certificate(g, p, HCollection::theta(r)).reason;
        // all witnesses meet at the path end
        std::set<vertex> all = p.witnesses[0].vertex_set();
        for (auto& w : p.witnesses) {
            std::set<vertex> keep;
            for (vertex x : w.vertex_set())
                if (all.count(x)) keep.insert(x);
            all = keep;
        }
        EXPECT_GE(all.size(), 1u);
        ++checked;
    }
    EXPECT_GT(checked, 200);
}

TEST(GreedyEpack, SimpleGraphIntersectionsAreExactlyTheEndVertex)
{
    std::mt19937_64 rng(12);
    for (int it = 0; it < 200; ++it) {
        int n = 6 + it % 15;
        MultiGraph g = dense_random(rng, n, 0.7, 0);
        int r = 2 + it % 2;
        int k = g.min_degree() / r;
        if (k < 2) continue;
        auto p = greedy_epack(g, k, r);
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t j = i + 1; j < p.size(); ++j) EXPECT_EQ(common_vertices(p.witnesses[i], p.witnesses[j]).size(), 1u);
    }
}

TEST(DegreePartition, CompleteGraphBalanced)
{
    for (int k = 1; k <= 4; ++k)
        for (int r = 0; r <= 3; ++r) {
            MultiGraph g = complete_graph(k * (r + 1));
            auto p = degree_partition(g, k, r);
            EXPECT_TRUE(verify_partition(g, p)) << verify_partition(g, p).reason << " k=" << k << " r=" << r;
            EXPECT_LE(p.moves, static_cast<int>(g.m()));
        }
}

TEST(DegreePartition, K5TwoParts)
{
    MultiGraph g = complete_graph(5);
    auto p = degree_partition(g, 2, 1);
    ASSERT_TRUE(verify_partition(g, p));
    for (auto& part : p.parts) EXPECT_GE(part.size(), 2u);
}

TEST(DegreePartition, K5EveryLocalOptimumFeasible)
{
    // enumerate all 2-partitions; any with a vertex of inner degree 0 admits an
    // improving move, so local optima are feasible
    MultiGraph g = complete_graph(5);
    for (unsigned mask = 1; mask < 31; ++mask) {
        std::set<vertex> a, b;
        for (int v = 0; v < 5; ++v) (mask >> v & 1 ? a : b).insert(v);
        bool feasible = true, improvable = false;
        for (int v = 0; v < 5; ++v) {
            auto& home = a.count(v) ? a : b;
            auto& other = a.count(v) ? b : a;
            int inner = static_cast<int>(home.size()) - 1;
            if (inner < 1) {
                feasible = false;
                if (static_cast<int>(other.size()) >= 3) improvable = true;
            }
        }
        EXPECT_TRUE(feasible || improvable) << mask;
    }
}

TEST(DegreePartition, SinglePartIsWholeGraph)
{
    MultiGraph g = cycle_graph(7);
    auto p = degree_partition(g, 1, 1);
    ASSERT_EQ(p.parts.size(), 1u);
    EXPECT_EQ(p.parts[0], g.vertex_set());
    EXPECT_EQ(p.moves, 0);
}

TEST(DegreePartition, PreconditionUsesSimpleDegree)
{
    // θ_10 has multiplicity degree 10 but one neighbour per vertex
    EXPECT_THROW(degree_partition(theta_graph(10), 2, 1), precondition_error);
    EXPECT_THROW(degree_partition(complete_graph(4), 2, 2), precondition_error);
}

TEST(DegreePartition, RandomGraphsMovesBoundedAndFeasible)
{
    std::mt19937_64 rng(13);
    int checked = 0;
    for (int it = 0; it < 300; ++it) {
        int n = 8 + it % 40;
        MultiGraph g = dense_random(rng, n, 0.5 + 0.4 * ((it % 5) / 4.0), 0);
        int r = it % 4;
        int k = (g.min_simple_degree() + 1) / (r + 1);
        if (k < 1 || k > static_cast<int>(g.n())) continue;
        auto p = degree_partition(g, k, r);
        ASSERT_TRUE(verify_partition(g, p)) << verify_partition(g, p).reason;
        EXPECT_LE(p.moves, static_cast<int>(g.m()));
        ++checked;
    }
    EXPECT_GT(checked, 200);
}

TEST(VpackFromDegree, CompleteGraphs)
{
    MultiGraph k6 = complete_graph(6);
    auto p = vpack_from_degree(k6, 2, 2);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p.mode, Mode::v);
    EXPECT_TRUE(verify_certificate(k6, p, HCollection::theta(2)));

    auto q = vpack_from_degree(k6, 2, 1);
    ASSERT_EQ(q.size(), 2u);
    EXPECT_TRUE(verify_certificate(k6, q, HCollection::theta(1)));
    for (auto& w : q.witnesses) EXPECT_EQ(w.edge_count(), 1u);

    auto one = vpack_from_degree(k6, 1, 3);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_TRUE(verify_certificate(k6, one, HCollection::theta(3)));
}

TEST(VpackFromDegree, RandomGraphsExactlyKDisjoint)
{
    std::mt19937_64 rng(14);
    for (int it = 0; it < 200; ++it) {
        int n = 8 + it % 30;
        MultiGraph g = dense_random(rng, n, 0.75, 0);
        int r = 1 + it % 3;
        int k = (g.min_simple_degree() + 1) / (r + 1);
        if (k < 1) continue;
        auto p = vpack_from_degree(g, k, r);
        ASSERT_EQ(p.size(), static_cast<std::size_t>(k));
        ASSERT_TRUE(verify_certificate(g, p, HCollection::theta(r))) << verify_certificate(g, p, HCollection::theta(r)).reason;
    }
}

TEST(LiftPacking, IdentityModelKeepsCertificate)
{
    MultiGraph g = complete_graph(5);
    auto p = greedy_epack(g, 2, 2);
    ModelMap id;
    for (vertex v : g.vertices()) id[v] = {v};
    auto lifted = lift_packing(g, g, id, p, 2);
    ASSERT_EQ(lifted.size(), 2u);
    EXPECT_TRUE(verify_certificate(g, lifted, HCollection::theta(2)));
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(lifted.witnesses[i].edges(), p.witnesses[i].edges());
}

TEST(LiftPacking, TriangleModelInSixCycle)
{
    MultiGraph c6 = cycle_graph(6);
    MultiGraph tri = complete_graph(3);
    ModelMap model{{0, {0, 1}}, {1, {2, 3}}, {2, {4, 5}}};
    auto p = greedy_epack(tri, 1, 2);
    auto lifted = lift_packing(c6, tri, model, p, 2);
    ASSERT_EQ(lifted.size(), 1u);
    EXPECT_TRUE(verify_certificate(c6, lifted, HCollection::theta(2)));
    EXPECT_EQ(lifted.witnesses[0].vertex_set().size(), 6u);
}

TEST(LiftPacking, DoubleEdgeModelInSixCycle)
{
    MultiGraph c6 = cycle_graph(6);
    MultiGraph th = theta_graph(2);
    ModelMap model{{0, {0, 1, 2}}, {1, {3, 4, 5}}};
    PackingCert p;
    p.mode = Mode::e;
    p.witnesses.push_back(*find_subdivision(th, HCollection::theta(2)));
    auto lifted = lift_packing(c6, th, model, p, 2);
    ASSERT_EQ(lifted.size(), 1u);
    EXPECT_TRUE(verify_certificate(c6, lifted, HCollection::theta(2)));
    EXPECT_EQ(lifted.witnesses[0].edge_count(), 6u);
}

TEST(LiftPacking, EmptyPacking)
{
    MultiGraph g = cycle_graph(4);
    ModelMap id;
    for (vertex v : g.vertices()) id[v] = {v};
    PackingCert p;
    EXPECT_EQ(lift_packing(g, g, id, p, 2).size(), 0u);
}

TEST(LiftPacking, InvalidModelNamesBranchSet)
{
    MultiGraph c6 = cycle_graph(6);
    MultiGraph tri = complete_graph(3);
    ModelMap split{{0, {0, 2}}, {1, {1, 3}}, {2, {4, 5}}};
    try {
        lift_packing(c6, tri, split, PackingCert{}, 2);
        FAIL() << "expected precondition_error";
    } catch (const precondition_error& e) {
        EXPECT_NE(std::string(e.what()).find("branch set of 0"), std::string::npos) << e.what();
    }
    ModelMap thin{{0, {0, 1}}, {1, {2, 3}}, {2, {4}}};
    EXPECT_THROW(lift_packing(c6, tri, thin, PackingCert{}, 2), precondition_error);
}

TEST(LiftPacking, RandomVertexModelsPreserveDisjointness)
{
    std::mt19937_64 rng(15);
    int lifted_any = 0;
    for (int it = 0; it < 150; ++it) {
        MultiGraph w = epp::testing::random_connected(rng, 18 + it % 12, 20 + it % 25, 1);
        auto [h, model] = random_model(rng, w, 6 + it % 5);
        ASSERT_TRUE(verify_model(w, h, model));
        int r = 2 + it % 2;
        auto packed = exact_pack(h, HCollection::theta(r), Mode::v);
        auto lifted = lift_packing(w, h, model, packed.cert, r);
        ASSERT_EQ(lifted.size(), packed.cert.size());
        ASSERT_TRUE(verify_certificate(w, lifted, HCollection::theta(r))) << verify_certificate(w, lifted, HCollection::theta(r)).reason;
        lifted_any += lifted.size() > 0;
    }
    EXPECT_GT(lifted_any, 50);
}

TEST(LiftPacking, RandomEdgeModelsGiveValidWitnesses)
{
    // each lifted witness is valid; witnesses sharing a branch set may collide on its
    // edges, so disjointness is only guaranteed when they share no h-vertex
    std::mt19937_64 rng(16);
    int disjoint = 0, total = 0;
    for (int it = 0; it < 150; ++it) {
        MultiGraph w = epp::testing::random_connected(rng, 18 + it % 12, 20 + it % 25, 2);
        auto [quotient, model] = random_model(rng, w, 4 + it % 2);
        MultiGraph h = quotient.capped(2); // still a minor model, keeps the oracle small
        int r = 2 + it % 2;
        auto packed = exact_pack(h, HCollection::theta(r), Mode::e);
        auto lifted = lift_packing(w, h, model, packed.cert, r);
        ASSERT_EQ(lifted.size(), packed.cert.size());
        for (auto& x : lifted.witnesses) ASSERT_TRUE(verify_certificate(w, x, HCollection::theta(r)));
        bool apart = true;
        for (std::size_t i = 0; i < packed.cert.size(); ++i)
            for (std::size_t j = i + 1; j < packed.cert.size(); ++j)
                apart = apart && common_vertices(packed.cert.witnesses[i], packed.cert.witnesses[j]).empty();
        bool ok = static_cast<bool>(verify_certificate(w, lifted, HCollection::theta(r)));
        if (apart) {
            EXPECT_TRUE(ok) << it;
        }
        if (packed.cert.size() > 1) {
            ++total;
            disjoint += ok;
        }
    }
    RecordProperty("edge_disjoint_lifts", std::to_string(disjoint) + "/" + std::to_string(total));
    EXPECT_GT(total, 0);
}
