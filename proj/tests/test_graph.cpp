#include "oracles.hpp"
#include "shp/graph.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace shp;

TEST_CASE("six-vertex example has 3 queries, 6 data vertices, 10 edges") {
    const BipartiteGraph g = build_graph(oracle::six_vertex());
    CHECK(g.num_queries() == 3);
    CHECK(g.num_data() == 6);
    CHECK(g.num_edges() == 10);
    CHECK(g.max_query_degree() == 4);
    const auto q1 = g.query_neighbors(1);
    CHECK(std::vector<DataId>(q1.begin(), q1.end()) == std::vector<DataId>{0, 1, 2, 3});
    const auto v3 = g.data_neighbors(3);
    CHECK(std::vector<QueryId>(v3.begin(), v3.end()) == std::vector<QueryId>{1, 2});
}

TEST_CASE("degree-one queries are removed and their data vertices kept isolated") {
    EdgeList e;
    e.edges = {{7, 1}};
    const BipartiteGraph g = build_graph(e);
    CHECK(g.num_queries() == 0);
    CHECK(g.num_data() == 1);
    CHECK(g.data_degree(0) == 0);
    CHECK(g.data_name(0) == "1");
}

TEST_CASE("duplicate edges collapse before the degree filter") {
    EdgeList e;
    e.edges = {{0, 1}, {0, 1}, {0, 2}};
    const BipartiteGraph g = build_graph(e);
    CHECK(g.num_queries() == 1);
    CHECK(g.query_degree(0) == 2);
    CHECK(g.num_edges() == 2);
}

TEST_CASE("empty edge list is rejected") {
    CHECK_THROWS_AS(build_graph(EdgeList{}), ValidationError);
}

TEST_CASE("dense ids follow ascending external ids") {
    EdgeList e;
    e.edges = {{50, 900}, {50, -3}, {10, 900}, {10, 12}};
    const BipartiteGraph g = build_graph(e);
    CHECK(g.query_name(0) == "10");
    CHECK(g.query_name(1) == "50");
    CHECK(g.data_name(0) == "-3");
    CHECK(g.data_name(1) == "12");
    CHECK(g.data_name(2) == "900");
    const auto idx = g.data_ids().index();
    CHECK(idx.at("900") == 2);
}

TEST_CASE("labeled ids keep their names") {
    EdgeList e;
    e.query_labels = {"qa", "qb"};
    e.data_labels = {"x", "y", "z"};
    e.edges = {{0, 0}, {0, 1}, {1, 1}, {1, 2}};
    const BipartiteGraph g = build_graph(e);
    CHECK(g.query_name(1) == "qb");
    CHECK(g.data_name(2) == "z");
}

TEST_CASE("adjacency is mutually consistent and degrees sum to |E|") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const BipartiteGraph g = build_graph(oracle::random_edges(40, 60, 7, seed));
        std::uint64_t qsum = 0;
        std::uint64_t dsum = 0;
        for (QueryId q = 0; q < g.num_queries(); ++q) {
            const auto nb = g.query_neighbors(q);
            CHECK(nb.size() >= 2);
            CHECK(std::is_sorted(nb.begin(), nb.end()));
            CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
            qsum += nb.size();
            for (DataId v : nb) {
                const auto back = g.data_neighbors(v);
                CHECK(std::binary_search(back.begin(), back.end(), q));
            }
        }
        for (DataId v = 0; v < g.num_data(); ++v) {
            const auto nb = g.data_neighbors(v);
            CHECK(std::is_sorted(nb.begin(), nb.end()));
            dsum += nb.size();
        }
        CHECK(qsum == g.num_edges());
        CHECK(dsum == g.num_edges());
    }
}

TEST_CASE("build_graph is idempotent on its own edges") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        EdgeList e = oracle::random_edges(30, 20, 5, seed);
        e.edges.emplace_back(99, 3); // a degree-one query that gets dropped
        const BipartiteGraph g = build_graph(e);
        const BipartiteGraph again = build_graph(g.to_edge_list());
        CHECK(again == g);
    }
}
