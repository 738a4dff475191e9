#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "flowroots/casegen.hpp"
#include "flowroots/cliques.hpp"
#include "flowroots/harness.hpp"
#include "oracles.hpp"

using namespace flowroots;

namespace {

std::set<std::vector<int>> as_set(const CliqueStructure& cs) { return {cs.cliques.begin(), cs.cliques.end()}; }

const Graph& fixture(const char* name) { return paper_fixture(name).graph; }

}  // namespace

TEST_CASE("graph normalisation") {
    const Graph g(3, {{2, 1}, {1, 2}, {3, 2}});
    CHECK(g.edges() == std::vector<std::pair<int, int>>{{1, 2}, {2, 3}});
    CHECK(g.adjacent(2, 1));
    CHECK(!g.adjacent(1, 3));
    CHECK(g.neighbors(2) == std::vector<int>{1, 3});
    CHECK(g.connected());
    CHECK(!Graph(3, {{1, 2}}).connected());
    CHECK_THROWS_AS(Graph(3, {{1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(Graph(3, {{1, 4}}), std::invalid_argument);
}

TEST_CASE("edge list parsing") {
    std::istringstream in("# comment\n1 2\n2 3  # trailing\n\nnodes 5\n");
    const Graph g = parse_edge_list(in);
    CHECK(g.num_nodes() == 5);
    CHECK(g.edges().size() == 2);
    std::istringstream bad("1 x\n");
    CHECK_THROWS((void)parse_edge_list(bad));
}

TEST_CASE("star cliques") {
    const auto cs = maximal_cliques(fixture("fig2a"));
    CHECK(as_set(cs) == std::set<std::vector<int>>{{1, 2}, {1, 3}, {1, 4}, {1, 5}});
    CHECK(cs.signature == std::vector<int>{2, 2, 2, 2});
    CHECK(cs.avg_size == doctest::Approx(2.0));
}

TEST_CASE("two triangles sharing an edge") {
    const auto cs = maximal_cliques(fixture("fig3a"));
    CHECK(as_set(cs) == std::set<std::vector<int>>{{1, 2, 3}, {2, 3, 4}});
    CHECK(cs.signature == std::vector<int>{3, 3});
    const auto cg = clique_graph(cs);
    REQUIRE(cg.edges.size() == 1);
    CHECK(cg.edges[0].shared == 2);
}

TEST_CASE("complete graphs are one clique") {
    for (int n = 2; n <= 7; ++n) {
        const auto cs = maximal_cliques(complete_graph(n));
        REQUIRE(cs.m() == 1);
        CHECK(cs.signature == std::vector<int>{n});
        CHECK(cs.avg_size == doctest::Approx(n));
    }
    CHECK(signature_key(maximal_cliques(complete_graph(4))) == "4");
}

TEST_CASE("trees have average clique size two") {
    Rng rng(8);
    for (int n = 2; n <= 9; ++n) {
        const Graph t(n, random_spanning_tree(n, rng));
        CHECK(maximal_cliques(t).avg_size == doctest::Approx(2.0));
    }
}

TEST_CASE("clique graph shared counts") {
    const auto g5a = clique_graph(maximal_cliques(fixture("fig5a")));
    REQUIRE(g5a.edges.size() == 1);
    CHECK(g5a.edges[0].shared == 3);

    const auto cs4 = maximal_cliques(fixture("fig4"));
    const auto g4 = clique_graph(cs4);
    CHECK(g4.num_cliques == 5);
    for (const auto& e : g4.edges) {
        const bool both_triangles = cs4.cliques[static_cast<std::size_t>(e.a)].size() == 3 &&
                                    cs4.cliques[static_cast<std::size_t>(e.b)].size() == 3;
        CHECK(e.shared == (both_triangles ? 2 : 1));
    }
    // the two triangles are linked, and every edge clique touches one of them
    CHECK(std::count_if(g4.edges.begin(), g4.edges.end(), [](const CliqueEdge& e) { return e.shared == 2; }) == 1);
}

TEST_CASE("signature keys") {
    CHECK(signature_key(maximal_cliques(fixture("fig2b"))) == "3x2");
    CHECK(signature_key(maximal_cliques(fixture("fig4"))) == "3x3x2x2x2");
    CHECK(signature_key(std::vector<int>{2, 4, 3}) == "4x3x2");
}

TEST_CASE("classification of the reference topologies") {
    CHECK(classify(fixture("fig2c")).kind == TopologyKind::BlockNetwork);
    CHECK(classify(fixture("fig3b")).kind == TopologyKind::EdgeSharedTree);
    CHECK(classify(fixture("fig4")).kind == TopologyKind::MixedBlockEdgeTree);
    for (const char* name : {"fig5a", "fig5b", "fig5c"}) {
        const auto tc = classify(fixture(name));
        CHECK(tc.kind == TopologyKind::Unclassified);
        CHECK(!tc.reason.empty());
    }
    CHECK(classify(complete_graph(5)).kind == TopologyKind::BlockNetwork);
}

TEST_CASE("a plain cycle is not a block network") {
    // four 2-cliques forming one block with a cycle of single-bus sharing
    const auto tc = classify(Graph(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}}));
    CHECK(tc.kind == TopologyKind::Unclassified);
}

TEST_CASE("blocks and articulation points") {
    const Graph g = fixture("fig4");
    auto blocks = biconnected_components(g);
    std::sort(blocks.begin(), blocks.end());
    CHECK(blocks == std::vector<std::vector<int>>{{1, 2}, {2, 3, 5, 7}, {3, 4}, {5, 6}});
    CHECK(articulation_points(g) == std::vector<int>{2, 3, 5});
    CHECK(articulation_points(complete_graph(4)).empty());
}

TEST_CASE("Bron-Kerbosch agrees with brute force") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = rng.uniform_int(1, 9);
        const Graph g = oracle::random_graph(n, rng.uniform(0.1, 0.9), rng);
        const auto cs = maximal_cliques(g);
        auto expected = oracle::brute_force_cliques(g);
        CHECK(as_set(cs) == expected);
        // every edge is covered
        for (auto [u, v] : g.edges()) {
            const bool covered = std::any_of(cs.cliques.begin(), cs.cliques.end(), [&](const std::vector<int>& c) {
                return std::binary_search(c.begin(), c.end(), u) && std::binary_search(c.begin(), c.end(), v);
            });
            CHECK(covered);
        }
    }
}

TEST_CASE("classification is invariant under relabelling") {
    Rng rng(77);
    std::vector<Graph> graphs;
    for (const auto& f : paper_fixtures()) graphs.push_back(f.graph);
    for (int i = 0; i < 40; ++i) graphs.push_back(oracle::random_connected_graph(rng.uniform_int(3, 8), 0.45, rng));
    for (const auto& g : graphs) {
        const auto base = classify(g);
        for (int k = 0; k < 5; ++k) {
            std::vector<int> perm(static_cast<std::size_t>(g.num_nodes()));
            std::iota(perm.begin(), perm.end(), 1);
            for (std::size_t i = perm.size(); i > 1; --i)
                std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
            const auto other = classify(oracle::relabel(g, perm));
            CHECK(other.kind == base.kind);
            CHECK(other.structure.signature == base.structure.signature);
        }
    }
}
