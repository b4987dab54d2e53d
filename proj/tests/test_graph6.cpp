#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "scnet/graph6.hpp"
#include "scnet/lifting.hpp"
#include "test_util.hpp"

using namespace scnet;

TEST_CASE("graph6 decoding of hand-checked records")
{
    Graph single = parse_graph6("@");
    CHECK(single.n == 1);
    CHECK(single.edges.empty());

    Graph k2 = parse_graph6("A_");
    CHECK(k2.n == 2);
    REQUIRE(k2.edges.size() == 1);
    CHECK(k2.edges[0] == std::make_pair(0, 1));

    Graph k4 = parse_graph6("C~");
    CHECK(k4.n == 4);
    CHECK(k4.edges.size() == 6);

    Graph with_header = parse_graph6(">>graph6<<A_");
    CHECK(with_header.n == 2);
    CHECK(with_header.edges.size() == 1);
}

TEST_CASE("graph6 error reporting")
{
    CHECK_THROWS_WITH(parse_graph6(std::string("C") + char(20)),
                      Catch::Matchers::ContainsSubstring("offset 1"));
    CHECK_THROWS_WITH(parse_graph6("C"), Catch::Matchers::ContainsSubstring("truncated"));
    CHECK_THROWS_WITH(parse_graph6("~??"), Catch::Matchers::ContainsSubstring("long-form"));
}

TEST_CASE("graph6 round-trips random graphs")
{
    Rng rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(20));
        Graph g = testutil::random_graph(rng, n, rng.uniform(0.0, 1.0));
        Graph back = parse_graph6(serialize_graph6(g));
        REQUIRE(back.n == g.n);
        REQUIRE(back.edges == g.edges);
    }
}

TEST_CASE("family files load in order with line diagnostics")
{
    const std::string path = "family_test.g6";
    {
        std::ofstream out(path);
        out << serialize_graph6(builtin_fixture("rook4x4")) << "\n";
        out << serialize_graph6(builtin_fixture("shrikhande")) << "\n";
    }
    auto graphs = load_family(path);
    REQUIRE(graphs.size() == 2);
    for (const Graph& g : graphs) {
        CHECK(g.n == 16);
        CHECK(g.edges.size() == 48);
        for (int deg : g.degrees())
            CHECK(deg == 6);
    }

    {
        std::ofstream out(path);
        out << "A_\nnot-a-valid-record-\x19\n";
    }
    CHECK_THROWS_WITH(load_family(path), Catch::Matchers::ContainsSubstring(":2"));

    {
        std::ofstream out(path);
    }
    CHECK(load_family(path).empty());
    std::remove(path.c_str());
}

TEST_CASE("builtin fixtures have the documented structure")
{
    Graph rook = builtin_fixture("rook4x4");
    CHECK(rook.n == 16);
    CHECK(count_cliques(rook, 3) == 32);
    CHECK(count_cliques(rook, 4) == 8);

    Graph shrik = builtin_fixture("shrikhande");
    CHECK(shrik.n == 16);
    CHECK(count_cliques(shrik, 3) == 32);
    CHECK(count_cliques(shrik, 4) == 0);

    CHECK(is_strongly_regular(rook, 6, 2, 2));
    CHECK(is_strongly_regular(shrik, 6, 2, 2));

    Graph decalin = builtin_fixture("decalin");
    CHECK(decalin.n == 10);
    CHECK(decalin.edges.size() == 11);
    CHECK(count_cliques(decalin, 3) == 0);
    auto deg = decalin.degrees();
    CHECK(std::count(deg.begin(), deg.end(), 3) == 2);
    CHECK(std::count(deg.begin(), deg.end(), 2) == 8);

    Graph bicyc = builtin_fixture("bicyclopentyl");
    CHECK(bicyc.n == 10);
    CHECK(bicyc.edges.size() == 11);
    CHECK(count_cliques(bicyc, 3) == 0);

    CHECK_THROWS_AS(builtin_fixture("petersen"), std::invalid_argument);
}

TEST_CASE("decoded SR(16,6,2,2) records satisfy strong regularity")
{
    for (const char* name : {"rook4x4", "shrikhande"}) {
        Graph g = parse_graph6(serialize_graph6(builtin_fixture(name)));
        CHECK(is_strongly_regular(g, 6, 2, 2));
    }
}
