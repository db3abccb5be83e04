#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include <epp/oracles.hpp>

#include "support.hpp"

using namespace epp;

namespace {

// Brute force over edge-occurrence subsets, independent of the oracle's witness
// enumeration: a subset is a witness when it has a θ_r minor (definitional test) and
// dropping any single occurrence destroys it.
struct Brute {
    std::vector<EdgeOcc> occ;
    std::vector<unsigned> edge_witnesses;
    std::vector<std::set<vertex>> vertex_witnesses;

    MultiGraph sub(unsigned mask) const
    {
        MultiGraph g;
        for (std::size_t i = 0; i < occ.size(); ++i)
            if (mask >> i & 1) g.add_edge(occ[i].u, occ[i].v);
        return g;
    }

    Brute(const MultiGraph& g, int r)
    {
        occ = g.edge_occurrences();
        for (unsigned mask = 1; mask < (1u << occ.size()); ++mask) {
            if (!has_theta_minor_exhaustive(sub(mask), r)) continue;
            bool minimal = true;
            for (std::size_t i = 0; i < occ.size() && minimal; ++i)
                if ((mask >> i & 1) && has_theta_minor_exhaustive(sub(mask & ~(1u << i)), r)) minimal = false;
            if (minimal) edge_witnesses.push_back(mask);
        }
        for (unsigned w : edge_witnesses) vertex_witnesses.push_back(sub(w).vertex_set());
    }

    int pack_e(std::size_t from = 0, unsigned used = 0) const
    {
        int best = 0;
        for (std::size_t i = from; i < edge_witnesses.size(); ++i)
            if (!(edge_witnesses[i] & used)) best = std::max(best, 1 + pack_e(i + 1, used | edge_witnesses[i]));
        return best;
    }

    int pack_v(std::size_t from = 0, std::set<vertex> used = {}) const
    {
        int best = 0;
        for (std::size_t i = from; i < vertex_witnesses.size(); ++i) {
            bool clash = false;
            for (vertex x : vertex_witnesses[i]) clash = clash || used.count(x);
            if (clash) continue;
            auto u2 = used;
            u2.insert(vertex_witnesses[i].begin(), vertex_witnesses[i].end());
            best = std::max(best, 1 + pack_v(i + 1, u2));
        }
        return best;
    }
};

int brute_cover_v(const MultiGraph& g, int r)
{
    auto vs = g.vertices();
    int best = static_cast<int>(vs.size());
    for (unsigned mask = 0; mask < (1u << vs.size()); ++mask) {
        int k = std::popcount(mask);
        if (k >= best) continue;
        std::set<vertex> drop;
        for (std::size_t i = 0; i < vs.size(); ++i)
            if (mask >> i & 1) drop.insert(vs[i]);
        if (!has_theta_minor_exhaustive(g.without(drop), r)) best = k;
    }
    return best;
}

int brute_cover_e(const MultiGraph& g, int r)
{
    auto occ = g.edge_occurrences();
    int best = static_cast<int>(occ.size());
    for (unsigned mask = 0; mask < (1u << occ.size()); ++mask) {
        int k = std::popcount(mask);
        if (k >= best) continue;
        MultiGraph h = g;
        for (std::size_t i = 0; i < occ.size(); ++i)
            if (mask >> i & 1) h.remove_edge(occ[i].u, occ[i].v);
        if (!has_theta_minor_exhaustive(h, r)) best = k;
    }
    return best;
}

} // namespace

TEST(FindSubdivision, CycleIsThetaTwo)
{
    auto H = HCollection::theta(2);
    auto w = find_subdivision(cycle_graph(7), H);
    ASSERT_TRUE(w);
    EXPECT_EQ(w->branch_map.size(), 2u);
    EXPECT_EQ(w->paths.size(), 2u);
    EXPECT_EQ(w->edge_count(), 7u);
    EXPECT_TRUE(verify_certificate(cycle_graph(7), *w, H));
}

TEST(FindSubdivision, TreesAreFree)
{
    std::mt19937_64 rng(1);
    for (int it = 0; it < 20; ++it) {
        MultiGraph t = epp::testing::random_connected(rng, 12, 0, 1);
        EXPECT_FALSE(find_subdivision(t, HCollection::theta(2)));
    }
}

TEST(FindSubdivision, K4HasThetaThreeOnAdjacentPair)
{
    auto H = HCollection::theta(3);
    auto w = find_subdivision(complete_graph(4), H);
    ASSERT_TRUE(w);
    EXPECT_EQ(w->paths.size(), 3u);
    EXPECT_EQ(complete_graph(4).multiplicity(w->branch_map[0], w->branch_map[1]), 1);
    EXPECT_TRUE(verify_certificate(complete_graph(4), *w, H));
}

TEST(FindSubdivision, BudgetIsRespected)
{
    auto H = HCollection::theta(2);
    EXPECT_FALSE(find_subdivision(cycle_graph(7), H, {6, default_oracle_cap}));
    EXPECT_TRUE(find_subdivision(cycle_graph(7), H, {7, default_oracle_cap}));
}

TEST(FindSubdivision, GuardOnExhaustiveRoutes)
{
    EXPECT_THROW(find_subdivision(complete_graph(17), HCollection::theta(4)), oracle_guard_error);
    EXPECT_THROW(has_theta_minor(complete_graph(17), 4), oracle_guard_error);
    // polynomial routes carry no guard
    EXPECT_TRUE(find_subdivision(complete_graph(17), HCollection::theta(3)));
}

TEST(FindSubdivision, ExplicitCollection)
{
    auto H = HCollection::of({complete_graph(4)});
    MultiGraph g = complete_graph(4);
    g.remove_edge(0, 1);
    g.add_edge(0, 4);
    g.add_edge(4, 1); // subdivided K4
    auto w = find_subdivision(g, H);
    ASSERT_TRUE(w);
    EXPECT_TRUE(verify_certificate(g, *w, H));
    EXPECT_FALSE(find_subdivision(cycle_graph(6), H));
}

TEST(HasThetaMinor, Examples)
{
    for (int r = 1; r <= 5; ++r) EXPECT_TRUE(has_theta_minor(theta_graph(r), r));
    EXPECT_TRUE(has_theta_minor(cycle_graph(6), 2));
    EXPECT_FALSE(has_theta_minor(cycle_graph(6), 3));
    EXPECT_TRUE(has_theta_minor(complete_graph(4), 3));
    EXPECT_THROW(has_theta_minor(cycle_graph(3), 0), precondition_error);
}

TEST(HasThetaMinor, AgreesWithSubdivisionSearch)
{
    std::mt19937_64 rng(17);
    for (int it = 0; it < 150; ++it) {
        int n = 2 + static_cast<int>(rng() % 8);
        MultiGraph g = epp::testing::random_multigraph(rng, n, static_cast<int>(rng() % (2 * n + 1)), 3);
        for (int r = 1; r <= 4; ++r) {
            auto H = HCollection::theta(r);
            bool minor = has_theta_minor_exhaustive(g, r);
            auto w = find_subdivision(g, H);
            EXPECT_EQ(minor, w.has_value()) << "r=" << r;
            if (w) {
                EXPECT_TRUE(verify_certificate(g, *w, H)) << verify_certificate(g, *w, H).reason;
            }
        }
    }
}

TEST(Blocks, RankTestMatchesExhaustiveMinorForThetaThree)
{
    std::mt19937_64 rng(23);
    for (int it = 0; it < 300; ++it) {
        int n = 2 + static_cast<int>(rng() % 8);
        MultiGraph g = epp::testing::random_multigraph(rng, n, static_cast<int>(rng() % (2 * n + 1)), 3);
        EXPECT_EQ(theta_free_small_r(g, 3), !has_theta_minor_exhaustive(g, 3));
        EXPECT_EQ(theta_free_small_r(g, 2), !has_theta_minor_exhaustive(g, 2));
    }
}

TEST(ExactOracles, ThreeTriangles)
{
    MultiGraph g = epp::testing::disjoint_copies(cycle_graph(3), 3);
    auto H = HCollection::theta(2);
    auto p = exact_pack(g, H, Mode::v);
    auto c = exact_cover(g, H, Mode::v);
    EXPECT_EQ(p.value, 3);
    EXPECT_EQ(c.value, 3);
    EXPECT_TRUE(verify_certificate(g, p.cert, H));
    EXPECT_TRUE(verify_certificate(g, c.cert, H));
}

TEST(ExactOracles, K4EdgeMode)
{
    auto H = HCollection::theta(2);
    auto p = exact_pack(complete_graph(4), H, Mode::e);
    auto c = exact_cover(complete_graph(4), H, Mode::e);
    EXPECT_EQ(p.value, 1);
    EXPECT_EQ(c.value, 3);
    EXPECT_TRUE(verify_certificate(complete_graph(4), c.cert, H));
}

TEST(ExactOracles, Edgeless)
{
    MultiGraph g = MultiGraph::with_vertices({0, 1, 2});
    for (int r = 1; r <= 3; ++r)
        for (Mode x : {Mode::v, Mode::e}) {
            EXPECT_EQ(exact_pack(g, HCollection::theta(r), x).value, 0);
            EXPECT_EQ(exact_cover(g, HCollection::theta(r), x).value, 0);
        }
}

TEST(ExactOracles, FrozenSmallValues)
{
    // values cross-checked against the subset brute force below
    auto t2 = HCollection::theta(2), t3 = HCollection::theta(3);
    // K5 = two triangles through one vertex plus the 4-cycle on the rest
    EXPECT_EQ(exact_pack(complete_graph(5), t2, Mode::e).value, 3);
    EXPECT_EQ(exact_pack(complete_graph(6), t2, Mode::v).value, 2);
    EXPECT_EQ(exact_cover(complete_graph(5), t2, Mode::v).value, 3);
    EXPECT_EQ(exact_pack(complete_graph(4), t3, Mode::e).value, 1);
    EXPECT_EQ(exact_cover(complete_graph(4), t3, Mode::v).value, 1);
    EXPECT_EQ(exact_cover(complete_graph(4), t3, Mode::e).value, 2);
    EXPECT_EQ(exact_cover(theta_graph(5), t3, Mode::e).value, 3);
    EXPECT_EQ(exact_pack(theta_graph(7), t3, Mode::e).value, 2);
}

TEST(ExactOracles, EdgeCoverOfCyclesIsCycleRank)
{
    std::mt19937_64 rng(5);
    auto H = HCollection::theta(2);
    for (int it = 0; it < 80; ++it) {
        int n = 3 + static_cast<int>(rng() % 9);
        MultiGraph g = epp::testing::random_multigraph(rng, n, n + static_cast<int>(rng() % n), 2);
        auto c = exact_cover(g, H, Mode::e);
        EXPECT_EQ(c.value, cycle_rank(g));
        EXPECT_TRUE(verify_certificate(g, c.cert, H));
    }
}

TEST(ExactOracles, AgreeWithSubsetBruteForce)
{
    std::mt19937_64 rng(41);
    int done = 0;
    for (int it = 0; it < 400 && done < 60; ++it) {
        int n = 3 + static_cast<int>(rng() % 4);
        MultiGraph g = epp::testing::random_multigraph(rng, n, 4 + static_cast<int>(rng() % 5), 3);
        if (g.m() > 10) continue;
        for (int r : {2, 3}) {
            auto H = HCollection::theta(r);
            Brute b(g, r);
            EXPECT_EQ(exact_pack(g, H, Mode::e).value, b.pack_e()) << "r=" << r;
            EXPECT_EQ(exact_pack(g, H, Mode::v).value, b.pack_v()) << "r=" << r;
            EXPECT_EQ(exact_cover(g, H, Mode::v).value, brute_cover_v(g, r)) << "r=" << r;
            EXPECT_EQ(exact_cover(g, H, Mode::e).value, brute_cover_e(g, r)) << "r=" << r;
        }
        ++done;
    }
    EXPECT_GE(done, 40);
}

TEST(ExactOracles, InequalityChainAndCertificates)
{
    std::mt19937_64 rng(77);
    for (int it = 0; it < 120; ++it) {
        int n = 3 + static_cast<int>(rng() % 10);
        MultiGraph g = epp::testing::random_multigraph(rng, n, n + static_cast<int>(rng() % (n + 1)), 3);
        for (int r : {2, 3}) {
            auto H = HCollection::theta(r);
            auto pv = exact_pack(g, H, Mode::v), pe = exact_pack(g, H, Mode::e);
            auto cv = exact_cover(g, H, Mode::v), ce = exact_cover(g, H, Mode::e);
            EXPECT_LE(pv.value, pe.value);
            EXPECT_LE(cv.value, ce.value);
            EXPECT_LE(pv.value, cv.value);
            EXPECT_LE(pe.value, ce.value);
            for (auto* p : {&pv, &pe}) {
                EXPECT_EQ(static_cast<int>(p->cert.size()), p->value);
                auto v = verify_certificate(g, p->cert, H);
                EXPECT_TRUE(v) << v.reason;
            }
            for (auto* c : {&cv, &ce}) {
                EXPECT_EQ(static_cast<int>(c->cert.size()), c->value);
                EXPECT_TRUE(verify_certificate(g, c->cert, H));
            }
        }
    }
}

TEST(ExactOracles, DeletionIsMonotone)
{
    std::mt19937_64 rng(8);
    auto H = HCollection::theta(2);
    for (int it = 0; it < 60; ++it) {
        MultiGraph g = epp::testing::random_multigraph(rng, 9, 13, 2);
        vertex v = static_cast<vertex>(rng() % 9);
        MultiGraph h = g.without({v});
        for (Mode x : {Mode::v, Mode::e}) {
            EXPECT_LE(exact_pack(h, H, x).value, exact_pack(g, H, x).value);
            EXPECT_LE(exact_cover(h, H, x).value, exact_cover(g, H, x).value);
        }
        auto occ = g.edge_occurrences();
        if (occ.empty()) continue;
        MultiGraph k = g;
        k.remove_edge(occ[0].u, occ[0].v);
        for (Mode x : {Mode::v, Mode::e}) {
            EXPECT_LE(exact_pack(k, H, x).value, exact_pack(g, H, x).value);
            EXPECT_LE(exact_cover(k, H, x).value, exact_cover(g, H, x).value);
        }
    }
}

TEST(ExactOracles, GuardRejectsLargeInstances)
{
    EXPECT_THROW(exact_pack(complete_graph(17), HCollection::theta(2), Mode::v), oracle_guard_error);
    OracleOptions opt;
    opt.oracle_cap = 20;
    EXPECT_NO_THROW(exact_cover(cycle_graph(18), HCollection::theta(2), Mode::v, opt));
}
