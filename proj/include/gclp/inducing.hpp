#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gclp/graph.hpp"
#include "gclp/node_kernels.hpp"

namespace gclp {

/// Random connected inducing graph with one inducing point per node.
/// The topology is frozen once built; only the features are trained.
struct InducingStructure {
    GraphDomain graph;
    FeatureMatrix features;
    std::vector<NodePair> edges;  // equals graph.edges(); inducing variables live on these
};

/// Connected simple graph with exactly n_nodes nodes and n_edges edges.
/// Draws a uniform spanning tree by random walk, then adds distinct non-tree edges uniformly.
/// Throws std::invalid_argument unless n_nodes - 1 <= n_edges <= n_nodes (n_nodes - 1) / 2.
GraphDomain sample_connected_er(Index n_nodes, Index n_edges, std::uint64_t seed);

/// floor(N / 2) nodes (at least 2) and twice as many edges, clamped to the feasible range.
std::pair<Index, Index> default_inducing_sizes(const GraphDomain& input_graph);

/// Rows drawn from x (without replacement when possible) plus Gaussian noise of
/// noise_scale times the per-dimension standard deviation.
FeatureMatrix initialize_inducing_features(const FeatureMatrix& x, Index n_rows, std::uint64_t seed,
                                           double noise_scale = 0.01);

InducingStructure build_inducing_structure(const FeatureMatrix& x, Index n_nodes, Index n_edges, std::uint64_t seed);

}  // namespace gclp
