#include "gclp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "gclp/errors.hpp"
#include "json.hpp"

namespace gclp {

namespace {

std::vector<NodePair> sample_non_edges(const GraphDomain& g, Index count, std::mt19937_64& rng) {
    const Index n = g.node_count();
    const Index all_pairs = n * (n - (n > 0 ? 1 : 0)) / 2;
    const Index available = all_pairs - g.edge_count();
    if (count > available) {
        throw DataError("negative sampling needs " + std::to_string(count) + " non-adjacent pairs but only " +
                        std::to_string(available) + " exist");
    }
    std::vector<NodePair> out;
    out.reserve(count);
    if (2 * count <= available) {
        std::uniform_int_distribution<Index> pick(0, n - 1);
        std::set<NodePair> taken;
        while (out.size() < count) {
            const Index a = pick(rng);
            const Index b = pick(rng);
            if (a == b || g.has_edge(a, b)) { continue; }
            const NodePair p(a, b);
            if (taken.insert(p).second) { out.push_back(p); }
        }
    } else {
        std::vector<NodePair> candidates;
        candidates.reserve(available);
        for (Index a = 0; a < n; ++a) {
            for (Index b = a + 1; b < n; ++b) {
                if (!g.has_edge(a, b)) { candidates.emplace_back(a, b); }
            }
        }
        std::shuffle(candidates.begin(), candidates.end(), rng);
        out.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(count));
    }
    return out;
}

void append(std::vector<LabelledPair>& out, const std::vector<NodePair>& pairs, int label) {
    for (const auto& p : pairs) { out.push_back({p, label}); }
}

}  // namespace

LinkDataset dataset_from_parts(const GraphDomain& full_graph, const std::vector<NodePair>& test_positive,
                               const std::vector<NodePair>& test_negative, const std::vector<NodePair>& train_negative,
                               std::uint64_t seed, double test_fraction) {
    std::set<NodePair> held_out;
    for (const auto& p : test_positive) {
        if (!full_graph.has_edge(p.first, p.second)) {
            throw DataError("test positive (" + std::to_string(p.first) + ", " + std::to_string(p.second) +
                            ") is not an edge of the graph");
        }
        if (!held_out.insert(p).second) { throw DataError("duplicate test positive"); }
    }
    std::set<NodePair> negatives;
    for (const auto* list : {&test_negative, &train_negative}) {
        for (const auto& p : *list) {
            if (p.second >= full_graph.node_count() || full_graph.has_edge(p.first, p.second)) {
                throw DataError("negative pair (" + std::to_string(p.first) + ", " + std::to_string(p.second) +
                                ") is an edge or out of range");
            }
            if (!negatives.insert(p).second) { throw DataError("negative pair listed twice"); }
        }
    }
    std::vector<NodePair> train_positive;
    for (const auto& e : full_graph.edges()) {
        if (!held_out.contains(e)) { train_positive.push_back(e); }
    }
    LinkDataset ds;
    ds.observed_graph = GraphDomain(full_graph.node_count(), train_positive);
    append(ds.train, train_positive, 1);
    append(ds.train, train_negative, 0);
    append(ds.test, test_positive, 1);
    append(ds.test, test_negative, 0);
    ds.seed = seed;
    ds.test_fraction = test_fraction;
    return ds;
}

LinkDataset split_dataset(const GraphDomain& full_graph, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction >= 0.0 && test_fraction < 1.0)) { throw std::invalid_argument("test fraction must lie in [0, 1)"); }
    const Index n_edges = full_graph.edge_count();
    if (n_edges == 0) { throw DataError("cannot split a graph without edges"); }
    const auto n_test = static_cast<Index>(std::ceil(test_fraction * static_cast<double>(n_edges) - 1e-9));
    if (n_test >= n_edges) { throw DataError("test split would leave no training edges"); }

    std::mt19937_64 rng(seed);
    std::vector<Index> order(n_edges);
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<NodePair> test_positive;
    for (Index i = 0; i < n_test; ++i) { test_positive.push_back(full_graph.edges()[order[i]]); }
    std::sort(test_positive.begin(), test_positive.end());

    const auto negatives = sample_non_edges(full_graph, n_edges, rng);
    const std::vector<NodePair> test_negative(negatives.begin(), negatives.begin() + static_cast<std::ptrdiff_t>(n_test));
    const std::vector<NodePair> train_negative(negatives.begin() + static_cast<std::ptrdiff_t>(n_test), negatives.end());
    return dataset_from_parts(full_graph, test_positive, test_negative, train_negative, seed, test_fraction);
}

std::vector<NodePair> pairs_with_label(const std::vector<LabelledPair>& data, int label) {
    std::vector<NodePair> out;
    for (const auto& lp : data) {
        if (lp.label == label) { out.push_back(lp.pair); }
    }
    return out;
}

namespace {

nlohmann::json tokens_of(const std::vector<NodePair>& pairs, const NodeIdMap& ids) {
    auto arr = nlohmann::json::array();
    for (const auto& p : pairs) { arr.push_back({ids.token(p.first), ids.token(p.second)}); }
    return arr;
}

std::vector<NodePair> pairs_of(const nlohmann::json& arr, const NodeIdMap& ids) {
    std::vector<NodePair> out;
    for (const auto& item : arr) {
        if (!item.is_array() || item.size() != 2) { throw DataError("split manifest pair must be a 2-element array"); }
        out.emplace_back(ids.at(item[0].get<std::string>()), ids.at(item[1].get<std::string>()));
    }
    return out;
}

}  // namespace

std::string split_manifest_json(const LinkDataset& ds, const NodeIdMap& ids) {
    nlohmann::ordered_json doc;
    doc["format"] = "gclp-split";
    doc["version"] = 1;
    doc["seed"] = ds.seed;
    doc["test_fraction"] = ds.test_fraction;
    doc["node_count"] = ds.observed_graph.node_count();
    doc["test_positive"] = tokens_of(pairs_with_label(ds.test, 1), ids);
    doc["test_negative"] = tokens_of(pairs_with_label(ds.test, 0), ids);
    doc["train_negative"] = tokens_of(pairs_with_label(ds.train, 0), ids);
    return doc.dump(1) + "\n";
}

LinkDataset split_from_manifest_json(const std::string& text, const GraphDomain& full_graph, const NodeIdMap& ids) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
        if (doc.at("format") != "gclp-split") { throw DataError("not a split manifest"); }
        return dataset_from_parts(full_graph, pairs_of(doc.at("test_positive"), ids),
                                  pairs_of(doc.at("test_negative"), ids), pairs_of(doc.at("train_negative"), ids),
                                  doc.at("seed").get<std::uint64_t>(), doc.at("test_fraction").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed split manifest: ") + e.what());
    }
}

DatasetStats dataset_stats(const GraphDomain& g) {
    DatasetStats s{g.node_count(), g.edge_count(), 0.0};
    if (s.nodes > 0) { s.average_degree = 2.0 * static_cast<double>(s.edges) / static_cast<double>(s.nodes); }
    return s;
}

}  // namespace gclp
