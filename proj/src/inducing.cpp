#include "gclp/inducing.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace gclp {

GraphDomain sample_connected_er(Index n_nodes, Index n_edges, std::uint64_t seed) {
    if (n_nodes < 1) { throw std::invalid_argument("inducing graph needs at least one node"); }
    const Index max_edges = n_nodes * (n_nodes - 1) / 2;
    if (n_edges + 1 < n_nodes || n_edges > max_edges) {
        throw std::invalid_argument("cannot build a connected simple graph with " + std::to_string(n_nodes) +
                                    " nodes and " + std::to_string(n_edges) + " edges (need " +
                                    std::to_string(n_nodes - 1) + ".." + std::to_string(max_edges) + ")");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Index> pick(0, n_nodes - 1);

    // Aldous-Broder: the first-entrance edges of a random walk form a uniform spanning tree.
    std::set<NodePair> edges;
    std::vector<bool> visited(n_nodes, false);
    Index current = pick(rng);
    visited[current] = true;
    Index remaining = n_nodes - 1;
    while (remaining > 0) {
        Index next = pick(rng);
        while (next == current) { next = pick(rng); }
        if (!visited[next]) {
            visited[next] = true;
            edges.emplace(current, next);
            --remaining;
        }
        current = next;
    }

    const Index extra = n_edges - edges.size();
    if (extra > 0) {
        if (2 * n_edges > max_edges) {
            // Dense target: enumerate the complement and take a random prefix.
            std::vector<NodePair> candidates;
            for (Index a = 0; a < n_nodes; ++a) {
                for (Index b = a + 1; b < n_nodes; ++b) {
                    if (!edges.contains(NodePair(a, b))) { candidates.emplace_back(a, b); }
                }
            }
            std::shuffle(candidates.begin(), candidates.end(), rng);
            edges.insert(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(extra));
        } else {
            while (edges.size() < n_edges) {
                const Index a = pick(rng);
                const Index b = pick(rng);
                if (a != b) { edges.emplace(a, b); }
            }
        }
    }
    return GraphDomain(n_nodes, std::vector<NodePair>(edges.begin(), edges.end()));
}

std::pair<Index, Index> default_inducing_sizes(const GraphDomain& input_graph) {
    const Index nodes = std::max<Index>(2, input_graph.node_count() / 2);
    const Index max_edges = nodes * (nodes - 1) / 2;
    const Index edges = std::max(nodes - 1, std::min(2 * nodes, max_edges));
    return {nodes, edges};
}

FeatureMatrix initialize_inducing_features(const FeatureMatrix& x, Index n_rows, std::uint64_t seed,
                                           double noise_scale) {
    if (x.rows() == 0) { throw std::invalid_argument("cannot initialize inducing features from an empty feature matrix"); }
    std::mt19937_64 rng(seed);
    std::vector<Index> chosen;
    chosen.reserve(n_rows);
    if (n_rows <= x.rows()) {
        std::vector<Index> order(x.rows());
        std::iota(order.begin(), order.end(), Index{0});
        std::shuffle(order.begin(), order.end(), rng);
        chosen.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_rows));
    } else {
        std::uniform_int_distribution<Index> pick(0, x.rows() - 1);
        for (Index r = 0; r < n_rows; ++r) { chosen.push_back(pick(rng)); }
    }
    Eigen::MatrixXd z = x.select_rows(chosen).values();

    const Eigen::RowVectorXd mean = x.values().colwise().mean();
    const Eigen::RowVectorXd sd =
        ((x.values().rowwise() - mean).array().square().colwise().sum() / static_cast<double>(x.rows())).sqrt();
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        for (Eigen::Index d = 0; d < z.cols(); ++d) { z(r, d) += noise_scale * sd[d] * normal(rng); }
    }
    return FeatureMatrix(std::move(z));
}

InducingStructure build_inducing_structure(const FeatureMatrix& x, Index n_nodes, Index n_edges, std::uint64_t seed) {
    std::seed_seq seq{seed, std::uint64_t{0x1d0c}};
    std::array<std::uint64_t, 2> streams{};
    seq.generate(streams.begin(), streams.end());
    GraphDomain graph = sample_connected_er(n_nodes, n_edges, streams[0]);
    FeatureMatrix features = initialize_inducing_features(x, n_nodes, streams[1]);
    std::vector<NodePair> edges = graph.edges();
    return {std::move(graph), std::move(features), std::move(edges)};
}

}  // namespace gclp
