#include <catch2/catch_amalgamated.hpp>

#include "scnet/lifting.hpp"
#include "scnet/swl.hpp"
#include "test_util.hpp"

using namespace scnet;

TEST_CASE("SWL separates the triangle-count witness pair")
{
    SimplicialComplex a = clique_lift(builtin_fixture("c6"), 2);
    SimplicialComplex b = clique_lift(builtin_fixture("two_c3"), 2);
    SwlResult res = swl_refine(a, b);
    REQUIRE(res.verdict.distinguished);
    CHECK(res.verdict.witness_dimension == 2);
    CHECK(res.verdict.witness_iteration == 0);
}

TEST_CASE("SWL separates Rook 4x4 from Shrikhande at the 3-lift")
{
    SimplicialComplex a = clique_lift(builtin_fixture("rook4x4"), 3);
    SimplicialComplex b = clique_lift(builtin_fixture("shrikhande"), 3);
    SwlResult res = swl_refine(a, b);
    REQUIRE(res.verdict.distinguished);
    CHECK(res.verdict.witness_dimension == 3);
    CHECK(res.verdict.witness_iteration == 0);
}

TEST_CASE("SWL does not separate Decalin from Bicyclopentyl")
{
    SimplicialComplex a = clique_lift(builtin_fixture("decalin"), 2);
    SimplicialComplex b = clique_lift(builtin_fixture("bicyclopentyl"), 2);
    for (const SwlVariant& variant : {SwlVariant::full(), SwlVariant::sparse()}) {
        SwlResult res = swl_refine(a, b, variant);
        CHECK_FALSE(res.verdict.distinguished);
    }
}

TEST_CASE("classical WL verdicts")
{
    WlResult regular = wl_refine(builtin_fixture("c6"), builtin_fixture("two_c3"));
    CHECK_FALSE(regular.verdict.distinguished);

    WlResult degrees = wl_refine(complete_graph(3), path_graph(3));
    REQUIRE(degrees.verdict.distinguished);
    CHECK(degrees.verdict.witness_iteration == 1);

    WlResult sr = wl_refine(builtin_fixture("rook4x4"), builtin_fixture("shrikhande"));
    CHECK_FALSE(sr.verdict.distinguished);

    // identical graphs are never distinguished
    WlResult same = wl_refine(builtin_fixture("rook4x4"), builtin_fixture("rook4x4"));
    CHECK_FALSE(same.verdict.distinguished);
}

TEST_CASE("stable partitions of symmetric complexes")
{
    Colouring k4 = stable_partition(clique_lift(complete_graph(4), 3));
    for (const auto& level : k4.colours) {
        REQUIRE(!level.empty());
        for (int c : level)
            CHECK(c == level.front());
    }

    Colouring p3 = stable_partition(clique_lift(path_graph(3), 2));
    std::set<int> vertex_colours(p3.colours[0].begin(), p3.colours[0].end());
    CHECK(vertex_colours.size() == 2);
}

TEST_CASE("refinement is monotone")
{
    Rng rng(60601);
    for (int trial = 0; trial < 10; ++trial) {
        SimplicialComplex k = testutil::random_complex(rng);
        SimplicialComplex k2 = testutil::random_complex(rng);
        for (int t = 1; t <= 3; ++t) {
            SwlResult prev = swl_refine(k, k2, SwlVariant::full(), t);
            SwlResult next = swl_refine(k, k2, SwlVariant::full(), t + 1);
            // equal colours after t+1 iterations imply equal colours after t
            auto check_pairwise = [&](const Colouring& ct, const Colouring& ct1) {
                for (int d = 0; d < static_cast<int>(ct.colours.size()); ++d)
                    for (std::size_t i = 0; i < ct.colours[d].size(); ++i)
                        for (std::size_t j = i + 1; j < ct.colours[d].size(); ++j)
                            if (ct1.colours[d][i] == ct1.colours[d][j])
                                REQUIRE(ct.colours[d][i] == ct.colours[d][j]);
            };
            check_pairwise(prev.first, next.first);
            check_pairwise(prev.second, next.second);
        }
    }
}

TEST_CASE("relabelled complexes give identical histogram sequences")
{
    Rng rng(424243);
    for (int trial = 0; trial < 15; ++trial) {
        Graph g = testutil::random_graph(rng, 9, 0.4);
        Graph h = permute_graph(g, testutil::random_permutation(rng, g.n));
        SimplicialComplex kg = clique_lift(g, 3);
        SimplicialComplex kh = clique_lift(h, 3);
        for (const SwlVariant& variant : {SwlVariant::full(), SwlVariant::sparse()}) {
            SwlResult res = swl_refine(kg, kh, variant);
            REQUIRE_FALSE(res.verdict.distinguished);
        }
    }
}

TEST_CASE("SWL on clique lifts subsumes WL")
{
    Rng rng(171717);
    int wl_hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Graph g1 = testutil::random_graph(rng, 8, 0.4);
        Graph g2 = testutil::random_graph(rng, 8, 0.4);
        WlResult wl = wl_refine(g1, g2);
        if (!wl.verdict.distinguished)
            continue;
        ++wl_hits;
        SwlResult swl = swl_refine(clique_lift(g1, 3), clique_lift(g2, 3));
        REQUIRE(swl.verdict.distinguished);
    }
    // the corpus actually exercises the implication
    CHECK(wl_hits > 50);
}

TEST_CASE("strictness witnesses")
{
    // WL fails / SWL succeeds
    CHECK_FALSE(wl_refine(builtin_fixture("c6"), builtin_fixture("two_c3"))
                    .verdict.distinguished);
    CHECK(swl_refine(clique_lift(builtin_fixture("c6"), 2),
                     clique_lift(builtin_fixture("two_c3"), 2))
              .verdict.distinguished);

    CHECK_FALSE(wl_refine(builtin_fixture("rook4x4"), builtin_fixture("shrikhande"))
                    .verdict.distinguished);
    CHECK(swl_refine(clique_lift(builtin_fixture("rook4x4"), 3),
                     clique_lift(builtin_fixture("shrikhande"), 3))
              .verdict.distinguished);
}

TEST_CASE("sparse refinement matches full refinement at the fixed point")
{
    Rng rng(515151);
    int done = 0;
    while (done < 100) {
        SimplicialComplex k = testutil::random_complex(rng, 9, 0.45);
        if (k.total_size() > 30 || k.total_size() == 0)
            continue;
        ++done;
        Colouring full = stable_partition(k, SwlVariant::full());
        Colouring sparse = stable_partition(k, SwlVariant::sparse());
        REQUIRE(partition_classes(full) == partition_classes(sparse));
        REQUIRE(sparse.iterations <= 2 * full.iterations + 1);
    }
}
