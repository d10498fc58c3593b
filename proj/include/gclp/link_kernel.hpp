#pragma once

#include <vector>

#include <Eigen/Core>

#include "gclp/graph.hpp"
#include "gclp/node_kernels.hpp"

namespace gclp {

/// K_ii' K_jj' + K_ij' K_ji' for node-level covariance K between input nodes.
double link_cov_input_input(const Eigen::MatrixXd& khat, NodePair e1, NodePair e2);

/// Same product form with the one-sided convolved cross kernel P K_XZ (input rows, inducing columns).
double link_cov_input_inducing(const Eigen::MatrixXd& cross, NodePair input_edge, NodePair inducing_edge);

/// Same product form over the unconvolved inducing kernel K_ZZ.
double link_cov_inducing_inducing(const Eigen::MatrixXd& kzz, NodePair e1, NodePair e2);

/// C[r, c] = G[i_r, i'_c] G[j_r, j'_c] + G[i_r, j'_c] G[j_r, i'_c] for node-level block G.
Eigen::MatrixXd pair_product_kernel(const Eigen::MatrixXd& node_block, const std::vector<NodePair>& row_pairs,
                                    const std::vector<NodePair>& col_pairs);

/// Adjoint of pair_product_kernel with respect to the node-level block.
Eigen::MatrixXd pair_product_kernel_backward(const Eigen::MatrixXd& node_block, const std::vector<NodePair>& row_pairs,
                                             const std::vector<NodePair>& col_pairs, const Eigen::MatrixXd& adjoint);

/// Node-level blocks for the endpoints of a batch of input pairs.
///
/// Only the rows of the convolution product belonging to batch endpoints are
/// formed, and only the columns within the pre-image of those endpoints are kept.
struct ConvolvedBatch {
    std::vector<Index> endpoints;    // unique endpoint nodes, ascending
    std::vector<Index> preimage;     // closed depth-K neighbourhood of the endpoints, ascending
    std::vector<NodePair> slots;     // batch pairs re-indexed into `endpoints`
    Eigen::MatrixXd rows;            // P[endpoints, preimage]
    Eigen::MatrixXd x_pre;           // X[preimage]
    Eigen::MatrixXd k_pre;           // K(x_pre, x_pre)
    Eigen::MatrixXd k_pre_z;         // K(x_pre, Z)
    Eigen::MatrixXd cross;           // rows * k_pre_z, endpoints x inducing nodes
    Eigen::MatrixXd khat;            // rows * k_pre * rows^T, endpoints x endpoints
};

ConvolvedBatch convolve_batch(const GraphDomain& g, const ConvolutionConfig& cfg, const KernelParams& params,
                              const FeatureMatrix& x, const Eigen::MatrixXd& z, const std::vector<NodePair>& batch);

/// Prior self-covariance C((i,j),(i,j)) = K_ii K_jj + K_ij^2 for every batch pair.
Eigen::VectorXd batch_prior_diagonal(const ConvolvedBatch& cb);

struct LinkGram {
    Eigen::MatrixXd cross_block;     // B x M
    Eigen::MatrixXd inducing_gram;   // M x M, without jitter
    Eigen::VectorXd batch_diag;      // B
};

enum class AssemblyPath {
    preimage,  // restricted rows and pre-image columns
    full,      // dense convolution over the whole graph
};

LinkGram assemble_link_gram(const GraphDomain& g, const ConvolutionConfig& cfg, const KernelParams& params,
                            const FeatureMatrix& x, const FeatureMatrix& z, const std::vector<NodePair>& inducing_edges,
                            const std::vector<NodePair>& batch, AssemblyPath path = AssemblyPath::preimage);

}  // namespace gclp
