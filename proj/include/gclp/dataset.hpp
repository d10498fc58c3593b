#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gclp/graph.hpp"
#include "gclp/io.hpp"
#include "gclp/svgp.hpp"

namespace gclp {

/// Train/test link-prediction split. The observed graph keeps every node of the
/// full graph but only the training positives as edges.
struct LinkDataset {
    GraphDomain observed_graph;
    std::vector<LabelledPair> train;  // positives first, then negatives
    std::vector<LabelledPair> test;   // positives first, then negatives
    std::uint64_t seed{0};
    double test_fraction{0.1};
};

/// Holds out ceil(test_fraction * E) random edges as test positives and pairs both splits with an
/// equal number of non-edges, sampled uniformly without replacement across the two splits.
/// Throws DataError if the graph has too few non-edges.
LinkDataset split_dataset(const GraphDomain& full_graph, double test_fraction, std::uint64_t seed);

/// Rebuilds a split from its held-out edges and sampled negatives.
LinkDataset dataset_from_parts(const GraphDomain& full_graph, const std::vector<NodePair>& test_positive,
                               const std::vector<NodePair>& test_negative, const std::vector<NodePair>& train_negative,
                               std::uint64_t seed, double test_fraction);

/// Split manifest JSON with node tokens, so external tools can share the split.
std::string split_manifest_json(const LinkDataset& ds, const NodeIdMap& ids);
LinkDataset split_from_manifest_json(const std::string& text, const GraphDomain& full_graph, const NodeIdMap& ids);

struct DatasetStats {
    Index nodes{0};
    Index edges{0};
    double average_degree{0.0};
};

DatasetStats dataset_stats(const GraphDomain& g);

std::vector<NodePair> pairs_with_label(const std::vector<LabelledPair>& data, int label);

}  // namespace gclp
