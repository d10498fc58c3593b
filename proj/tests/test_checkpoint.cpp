#include "doctest.h"

#include <random>

#include "gclp/checkpoint.hpp"
#include "gclp/errors.hpp"
#include "oracles.hpp"

using namespace gclp;

namespace {

NodeIdMap numbered_ids(Index n) {
    std::vector<std::string> t;
    for (Index i = 0; i < n; ++i) { t.push_back("n" + std::to_string(i)); }
    return NodeIdMap(t);
}

}  // namespace

TEST_CASE("fingerprint") {
    const GraphDomain a(4, {{0, 1}, {1, 2}});
    const GraphDomain b(4, {{1, 2}, {0, 1}});
    const GraphDomain c(4, {{0, 1}, {1, 3}});
    CHECK(fingerprint(a) == fingerprint(b));
    CHECK_FALSE(fingerprint(a) == fingerprint(c));
    CHECK(fingerprint(a).hash.size() == 16);
}

TEST_CASE("checkpoint round trip reproduces predictions bit for bit") {
    std::mt19937_64 rng(4);
    const auto g = oracle::to_graph(25, oracle::random_edges(25, 0.2, rng));
    const FeatureMatrix x(oracle::random_matrix(25, 3, rng));
    auto model = initialize_model(g, x, {}, 17);
    std::vector<LabelledPair> data;
    for (Index i = 0; i < 25; ++i) {
        for (Index j = i + 1; j < 25; ++j) { data.push_back({{i, j}, g.has_edge(i, j) ? 1 : 0}); }
    }
    TrainingConfig cfg;
    cfg.max_epochs = 5;
    cfg.learning_rate = 0.05;
    cfg.seed = 17;
    const auto result = train(model, data, cfg);

    const auto ids = numbered_ids(25);
    const auto text = checkpoint_to_json(make_checkpoint(model, ids, cfg, 0.1, result.final_elbo, result.epochs_run, 17));
    const auto cp = checkpoint_from_json(text);
    CHECK(checkpoint_to_json(cp) == text);
    CHECK(cp.seed == 17);
    CHECK(cp.epochs_run == 5);
    CHECK(cp.final_elbo == result.final_elbo);
    CHECK(cp.training.learning_rate == 0.05);

    const auto restored = restore_model(cp, g, x, ids);
    std::vector<NodePair> pairs;
    for (const auto& d : data) { pairs.push_back(d.pair); }
    const auto p1 = model.predict(pairs);
    const auto p2 = restored.predict(pairs);
    CHECK(p1.mean == p2.mean);
    CHECK(p1.variance == p2.variance);

    CHECK_THROWS_AS(restore_model(cp, oracle::to_graph(25, {{0, 1}}), x, ids), DataError);
    CHECK_THROWS_AS(restore_model(cp, g, x, numbered_ids(24)), DataError);
}

TEST_CASE("malformed checkpoints") {
    CHECK_THROWS_AS(checkpoint_from_json("{}"), DataError);
    CHECK_THROWS_AS(checkpoint_from_json("[1, 2"), DataError);
    CHECK_THROWS_AS(checkpoint_from_json(R"({"format": "gclp-checkpoint", "format_version": 99})"), DataError);
}
