#include "doctest.h"

#include <random>
#include <set>

#include "gclp/dataset.hpp"
#include "gclp/errors.hpp"
#include "oracles.hpp"

using namespace gclp;

namespace {

GraphDomain random_graph_with_edges(Index n, Index e, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::set<NodePair> chosen;
    std::uniform_int_distribution<Index> node(0, n - 1);
    while (chosen.size() < e) {
        const Index a = node(rng), b = node(rng);
        if (a != b) { chosen.insert(NodePair(a, b)); }
    }
    return GraphDomain(n, {chosen.begin(), chosen.end()});
}

NodeIdMap numbered_ids(Index n) {
    std::vector<std::string> t;
    for (Index i = 0; i < n; ++i) { t.push_back("v" + std::to_string(i)); }
    return NodeIdMap(t);
}

}  // namespace

TEST_CASE("split sizes follow the ten percent rule") {
    const auto g = random_graph_with_edges(332, 2126, 1);
    const auto ds = split_dataset(g, 0.1, 5);
    const auto tp = pairs_with_label(ds.test, 1);
    CHECK(tp.size() == 213);
    CHECK(pairs_with_label(ds.test, 0).size() == 213);
    CHECK(pairs_with_label(ds.train, 1).size() == 2126 - 213);
    CHECK(pairs_with_label(ds.train, 0).size() == 2126 - 213);
    CHECK(ds.observed_graph.node_count() == 332);
    CHECK(ds.observed_graph.edge_count() == 2126 - 213);
    CHECK(ds.test.front().label == 1);
    CHECK(ds.test.back().label == 0);
}

TEST_CASE("split invariants") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = random_graph_with_edges(60 + seed * 10, 150, seed);
        const auto ds = split_dataset(g, 0.15, seed);
        std::set<NodePair> positives;
        for (const auto& p : pairs_with_label(ds.train, 1)) { CHECK(positives.insert(p).second); }
        for (const auto& p : pairs_with_label(ds.test, 1)) { CHECK(positives.insert(p).second); }
        CHECK(std::vector<NodePair>(positives.begin(), positives.end()) == g.edges());

        std::set<NodePair> negatives;
        for (const auto& p : pairs_with_label(ds.train, 0)) { CHECK(negatives.insert(p).second); }
        for (const auto& p : pairs_with_label(ds.test, 0)) { CHECK(negatives.insert(p).second); }
        for (const auto& p : negatives) { CHECK_FALSE(g.has_edge(p.first, p.second)); }
        for (const auto& p : pairs_with_label(ds.test, 1)) { CHECK_FALSE(ds.observed_graph.has_edge(p.first, p.second)); }
    }
}

TEST_CASE("degenerate and infeasible splits") {
    const auto g = random_graph_with_edges(30, 40, 2);
    const auto none = split_dataset(g, 0.0, 1);
    CHECK(none.test.empty());
    CHECK(none.observed_graph.edges() == g.edges());
    CHECK(none.train.size() == 80);

    CHECK_THROWS_AS(split_dataset(GraphDomain(3, {}), 0.1, 1), DataError);
    CHECK_THROWS_AS(split_dataset(g, 1.0, 1), std::invalid_argument);
    // K4 minus nothing has no non-edges at all.
    const GraphDomain k4(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    CHECK_THROWS_AS(split_dataset(k4, 0.2, 1), DataError);
    // Dense graphs go through the enumeration branch.
    const GraphDomain near_full(5, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {3, 4}});
    CHECK_THROWS_AS(split_dataset(near_full, 0.2, 1), DataError);
    const auto dense = split_dataset(random_graph_with_edges(12, 30, 3), 0.1, 4);
    CHECK(dense.train.size() + dense.test.size() == 60);
}

TEST_CASE("split determinism") {
    const auto g = random_graph_with_edges(200, 500, 3);
    const auto a = split_dataset(g, 0.1, 42);
    const auto b = split_dataset(g, 0.1, 42);
    const auto c = split_dataset(g, 0.1, 43);
    CHECK(pairs_with_label(a.test, 1) == pairs_with_label(b.test, 1));
    CHECK(pairs_with_label(a.train, 0) == pairs_with_label(b.train, 0));
    CHECK(pairs_with_label(a.test, 1) != pairs_with_label(c.test, 1));
}

TEST_CASE("manifest round trip") {
    const auto g = random_graph_with_edges(40, 90, 4);
    const auto ids = numbered_ids(40);
    const auto ds = split_dataset(g, 0.1, 8);
    const auto text = split_manifest_json(ds, ids);
    CHECK(text == split_manifest_json(ds, ids));
    const auto back = split_from_manifest_json(text, g, ids);
    CHECK(back.seed == 8);
    CHECK(back.test_fraction == 0.1);
    CHECK(back.observed_graph.edges() == ds.observed_graph.edges());
    CHECK(pairs_with_label(back.test, 1) == pairs_with_label(ds.test, 1));
    CHECK(pairs_with_label(back.test, 0) == pairs_with_label(ds.test, 0));
    CHECK(pairs_with_label(back.train, 0) == pairs_with_label(ds.train, 0));
    CHECK_THROWS_AS(split_from_manifest_json("{\"format\": \"other\"}", g, ids), DataError);
    CHECK_THROWS_AS(split_from_manifest_json("not json", g, ids), DataError);
}

TEST_CASE("split from parts validates pairs") {
    const GraphDomain g(5, {{0, 1}, {1, 2}, {2, 3}});
    CHECK_THROWS_AS(dataset_from_parts(g, {{0, 4}}, {}, {}, 0, 0.1), DataError);
    CHECK_THROWS_AS(dataset_from_parts(g, {{0, 1}}, {{1, 2}}, {}, 0, 0.1), DataError);
    CHECK_THROWS_AS(dataset_from_parts(g, {{0, 1}}, {{0, 4}}, {{0, 4}}, 0, 0.1), DataError);
    const auto ok = dataset_from_parts(g, {{0, 1}}, {{0, 4}}, {{1, 4}, {0, 3}}, 0, 0.1);
    CHECK(ok.observed_graph.edge_count() == 2);
    CHECK(ok.train.size() == 4);
}

TEST_CASE("dataset statistics") {
    const auto s = dataset_stats(GraphDomain(2, {{0, 1}}));
    CHECK(s.nodes == 2);
    CHECK(s.edges == 1);
    CHECK(s.average_degree == 1.0);
    CHECK(dataset_stats(random_graph_with_edges(332, 2126, 9)).average_degree == doctest::Approx(12.81).epsilon(1e-3));
    CHECK(dataset_stats(random_graph_with_edges(4941, 6594, 9)).average_degree == doctest::Approx(2.67).epsilon(1e-3));
}
