#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace gclp {

using Index = std::size_t;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Unordered node pair stored canonically with first < second.
struct NodePair {
    Index first{0};
    Index second{0};

    NodePair() = default;
    /// Canonicalizes the order; throws std::invalid_argument on a self-pair.
    NodePair(Index a, Index b);

    friend bool operator==(const NodePair&, const NodePair&) = default;
    friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

/// Immutable undirected simple graph.
///
/// Edges are kept sorted in canonical order. The symmetric normalized
/// convolution matrix D~^{-1/2} (A + I) D~^{-1/2} is built once at construction
/// and can be shared between threads.
class GraphDomain {
public:
    GraphDomain() = default;

    /// Throws DataError on self-loops, duplicate edges or out-of-range endpoints.
    GraphDomain(Index node_count, std::vector<NodePair> edges);

    [[nodiscard]] Index node_count() const noexcept { return node_count_; }
    [[nodiscard]] Index edge_count() const noexcept { return edges_.size(); }
    [[nodiscard]] const std::vector<NodePair>& edges() const noexcept { return edges_; }
    [[nodiscard]] Index degree(Index node) const { return neighbors_.at(node).size(); }
    [[nodiscard]] const std::vector<Index>& neighbors(Index node) const { return neighbors_.at(node); }
    [[nodiscard]] bool has_edge(Index a, Index b) const;

    [[nodiscard]] SparseMatrix adjacency() const;
    [[nodiscard]] Eigen::MatrixXd dense_adjacency() const;
    [[nodiscard]] const SparseMatrix& normalized_convolution() const noexcept { return normalized_; }

private:
    Index node_count_{0};
    std::vector<NodePair> edges_;
    std::vector<std::vector<Index>> neighbors_;
    SparseMatrix normalized_;
};

/// Convolution depth K and the per-step interpolation weights lambda_k in [0, 1].
///
/// Step k applies lambda_k * S + (1 - lambda_k) * I. The optimizer works on
/// logits; this type always carries the constrained weights.
class ConvolutionConfig {
public:
    ConvolutionConfig() = default;
    explicit ConvolutionConfig(std::vector<double> weights);

    static ConvolutionConfig from_logits(const Eigen::VectorXd& logits);
    static ConvolutionConfig full(Index depth);  // every lambda_k = 1

    [[nodiscard]] Index depth() const noexcept { return weights_.size(); }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
    [[nodiscard]] Eigen::VectorXd logits() const;

private:
    std::vector<double> weights_;
};

double logistic(double x);
double logit(double p);

SparseMatrix normalized_convolution_matrix(const GraphDomain& g);

/// Row-stochastic D~^{-1} (A + I).
SparseMatrix asymmetric_convolution_matrix(const GraphDomain& g);

/// Dense product S_1 S_2 ... S_K; identity for K = 0.
Eigen::MatrixXd interpolated_convolution_product(const GraphDomain& g, const ConvolutionConfig& cfg);

/// Applies the interpolated convolution to the right of a row block: rows * S_1 ... S_K.
/// All factors are symmetric polynomials in S, so this equals (S_1...S_K rows^T)^T.
Eigen::MatrixXd convolve_rows(const GraphDomain& g, const ConvolutionConfig& cfg, Eigen::MatrixXd rows);

/// Derivative of rows * S_1 ... S_K with respect to lambda_k: rows * (S - I) * prod_{j != k} S_j.
Eigen::MatrixXd convolve_rows_derivative(const GraphDomain& g, const ConvolutionConfig& cfg,
                                         const Eigen::MatrixXd& rows, Index k);

/// g^T (D - A) g, evaluated as the half sum over ordered adjacent pairs.
double dirichlet_norm(const GraphDomain& g, const Eigen::Ref<const Eigen::VectorXd>& signal);

/// Graph Laplacian D - A.
SparseMatrix laplacian(const GraphDomain& g);

/// Nodes at BFS distance exactly 1..max_d from center; entry d-1 holds distance d.
std::vector<std::vector<Index>> geodesic_distance_classes(const GraphDomain& g, Index center, Index max_d);

/// BFS distances from center, -1 where unreachable.
std::vector<long> bfs_distances(const GraphDomain& g, Index center);

/// Union of the depth-hop closed neighbourhoods of the seeds, sorted ascending.
std::vector<Index> preimage_nodes(const GraphDomain& g, const std::vector<Index>& seeds, Index depth);

bool is_connected(const GraphDomain& g);

}  // namespace gclp
