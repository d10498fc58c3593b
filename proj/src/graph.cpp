#include "gclp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

#include "gclp/errors.hpp"

namespace gclp {

NodePair::NodePair(Index a, Index b) : first(std::min(a, b)), second(std::max(a, b)) {
    if (a == b) { throw std::invalid_argument("node pair must join two distinct nodes (got " + std::to_string(a) + ")"); }
}

GraphDomain::GraphDomain(Index node_count, std::vector<NodePair> edges)
    : node_count_(node_count), edges_(std::move(edges)), neighbors_(node_count) {
    std::sort(edges_.begin(), edges_.end());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto& [a, b] = edges_[e];
        if (a == b) { throw DataError("self-loop on node " + std::to_string(a)); }
        if (b >= node_count_) {
            throw DataError("edge (" + std::to_string(a) + ", " + std::to_string(b) + ") references a node outside [0, " +
                            std::to_string(node_count_) + ")");
        }
        if (e > 0 && edges_[e - 1] == edges_[e]) {
            throw DataError("duplicate edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
        }
        neighbors_[a].push_back(b);
        neighbors_[b].push_back(a);
    }
    for (auto& nb : neighbors_) { std::sort(nb.begin(), nb.end()); }

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(node_count_ + 2 * edges_.size());
    std::vector<double> inv_sqrt_deg(node_count_);
    for (Index i = 0; i < node_count_; ++i) {
        inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(neighbors_[i].size() + 1));
    }
    for (Index i = 0; i < node_count_; ++i) {
        triplets.emplace_back(i, i, inv_sqrt_deg[i] * inv_sqrt_deg[i]);
        for (Index j : neighbors_[i]) { triplets.emplace_back(i, j, inv_sqrt_deg[i] * inv_sqrt_deg[j]); }
    }
    normalized_.resize(static_cast<Eigen::Index>(node_count_), static_cast<Eigen::Index>(node_count_));
    normalized_.setFromTriplets(triplets.begin(), triplets.end());
    normalized_.makeCompressed();
}

bool GraphDomain::has_edge(Index a, Index b) const {
    if (a >= node_count_ || b >= node_count_) { return false; }
    const auto& nb = neighbors_[a];
    return std::binary_search(nb.begin(), nb.end(), b);
}

SparseMatrix GraphDomain::adjacency() const {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(2 * edges_.size());
    for (const auto& [a, b] : edges_) {
        triplets.emplace_back(a, b, 1.0);
        triplets.emplace_back(b, a, 1.0);
    }
    SparseMatrix adj(static_cast<Eigen::Index>(node_count_), static_cast<Eigen::Index>(node_count_));
    adj.setFromTriplets(triplets.begin(), triplets.end());
    return adj;
}

Eigen::MatrixXd GraphDomain::dense_adjacency() const { return Eigen::MatrixXd(adjacency()); }

double logistic(double x) {
    if (x >= 0) { return 1.0 / (1.0 + std::exp(-x)); }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double p) {
    if (!(p > 0.0 && p < 1.0)) { throw std::invalid_argument("logit is defined on (0, 1), got " + std::to_string(p)); }
    return std::log(p) - std::log1p(-p);
}

ConvolutionConfig::ConvolutionConfig(std::vector<double> weights) : weights_(std::move(weights)) {
    for (double w : weights_) {
        if (!(w >= 0.0 && w <= 1.0)) {
            throw std::invalid_argument("convolution weight outside [0, 1]: " + std::to_string(w));
        }
    }
}

ConvolutionConfig ConvolutionConfig::from_logits(const Eigen::VectorXd& logits) {
    std::vector<double> w(static_cast<std::size_t>(logits.size()));
    for (Eigen::Index k = 0; k < logits.size(); ++k) { w[static_cast<std::size_t>(k)] = logistic(logits[k]); }
    return ConvolutionConfig(std::move(w));
}

ConvolutionConfig ConvolutionConfig::full(Index depth) { return ConvolutionConfig(std::vector<double>(depth, 1.0)); }

Eigen::VectorXd ConvolutionConfig::logits() const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(weights_.size()));
    for (std::size_t k = 0; k < weights_.size(); ++k) { out[static_cast<Eigen::Index>(k)] = logit(weights_[k]); }
    return out;
}

SparseMatrix normalized_convolution_matrix(const GraphDomain& g) { return g.normalized_convolution(); }

SparseMatrix asymmetric_convolution_matrix(const GraphDomain& g) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (Index i = 0; i < g.node_count(); ++i) {
        const double inv = 1.0 / static_cast<double>(g.degree(i) + 1);
        triplets.emplace_back(i, i, inv);
        for (Index j : g.neighbors(i)) { triplets.emplace_back(i, j, inv); }
    }
    const auto n = static_cast<Eigen::Index>(g.node_count());
    SparseMatrix out(n, n);
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

namespace {

// rows <- rows * (w S + (1 - w) I)
void apply_step(const SparseMatrix& s, double w, Eigen::MatrixXd& rows) {
    if (w == 0.0) { return; }
    Eigen::MatrixXd smoothed = rows * s;
    if (w == 1.0) {
        rows = std::move(smoothed);
    } else {
        rows = w * smoothed + (1.0 - w) * rows;
    }
}

}  // namespace

Eigen::MatrixXd interpolated_convolution_product(const GraphDomain& g, const ConvolutionConfig& cfg) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    return convolve_rows(g, cfg, Eigen::MatrixXd::Identity(n, n));
}

Eigen::MatrixXd convolve_rows(const GraphDomain& g, const ConvolutionConfig& cfg, Eigen::MatrixXd rows) {
    if (rows.cols() != static_cast<Eigen::Index>(g.node_count())) {
        throw std::invalid_argument("row block width does not match the node count");
    }
    for (double w : cfg.weights()) { apply_step(g.normalized_convolution(), w, rows); }
    return rows;
}

Eigen::MatrixXd convolve_rows_derivative(const GraphDomain& g, const ConvolutionConfig& cfg,
                                         const Eigen::MatrixXd& rows, Index k) {
    if (k >= cfg.depth()) { throw std::out_of_range("convolution step index out of range"); }
    Eigen::MatrixXd out = rows;
    for (Index j = 0; j < cfg.depth(); ++j) {
        if (j != k) { apply_step(g.normalized_convolution(), cfg.weights()[j], out); }
    }
    Eigen::MatrixXd smoothed = out * g.normalized_convolution();
    return smoothed - out;
}

double dirichlet_norm(const GraphDomain& g, const Eigen::Ref<const Eigen::VectorXd>& signal) {
    if (signal.size() != static_cast<Eigen::Index>(g.node_count())) {
        throw std::invalid_argument("signal length " + std::to_string(signal.size()) + " does not match node count " +
                                    std::to_string(g.node_count()));
    }
    // Each undirected edge appears twice in the ordered double sum, cancelling the 1/2.
    double total = 0.0;
    for (const auto& [a, b] : g.edges()) {
        const double diff = signal[static_cast<Eigen::Index>(a)] - signal[static_cast<Eigen::Index>(b)];
        total += diff * diff;
    }
    return total;
}

SparseMatrix laplacian(const GraphDomain& g) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (Index i = 0; i < g.node_count(); ++i) {
        triplets.emplace_back(i, i, static_cast<double>(g.degree(i)));
        for (Index j : g.neighbors(i)) { triplets.emplace_back(i, j, -1.0); }
    }
    const auto n = static_cast<Eigen::Index>(g.node_count());
    SparseMatrix out(n, n);
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

std::vector<long> bfs_distances(const GraphDomain& g, Index center) {
    if (center >= g.node_count()) { throw std::out_of_range("center node out of range"); }
    std::vector<long> dist(g.node_count(), -1);
    std::deque<Index> queue{center};
    dist[center] = 0;
    while (!queue.empty()) {
        const Index u = queue.front();
        queue.pop_front();
        for (Index v : g.neighbors(u)) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

std::vector<std::vector<Index>> geodesic_distance_classes(const GraphDomain& g, Index center, Index max_d) {
    const auto dist = bfs_distances(g, center);
    std::vector<std::vector<Index>> classes(max_d);
    for (Index v = 0; v < g.node_count(); ++v) {
        if (dist[v] >= 1 && static_cast<Index>(dist[v]) <= max_d) {
            classes[static_cast<Index>(dist[v]) - 1].push_back(v);
        }
    }
    return classes;
}

std::vector<Index> preimage_nodes(const GraphDomain& g, const std::vector<Index>& seeds, Index depth) {
    std::vector<long> dist(g.node_count(), -1);
    std::deque<Index> queue;
    for (Index s : seeds) {
        if (s >= g.node_count()) { throw std::out_of_range("seed node out of range"); }
        if (dist[s] < 0) {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        const Index u = queue.front();
        queue.pop_front();
        if (static_cast<Index>(dist[u]) >= depth) { continue; }
        for (Index v : g.neighbors(u)) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    std::vector<Index> out;
    for (Index v = 0; v < g.node_count(); ++v) {
        if (dist[v] >= 0) { out.push_back(v); }
    }
    return out;
}

bool is_connected(const GraphDomain& g) {
    if (g.node_count() == 0) { return true; }
    const auto dist = bfs_distances(g, 0);
    return std::none_of(dist.begin(), dist.end(), [](long d) { return d < 0; });
}

}  // namespace gclp
