#include "gclp/link_kernel.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gclp {

namespace {

void check_pair(NodePair e, Eigen::Index rows, Eigen::Index cols, const char* what) {
    if (static_cast<Eigen::Index>(e.second) >= rows || static_cast<Eigen::Index>(e.second) >= cols) {
        throw std::out_of_range(std::string(what) + ": node index " + std::to_string(e.second) + " out of range");
    }
}

double product_form(const Eigen::MatrixXd& g, NodePair r, NodePair c) {
    const auto i = static_cast<Eigen::Index>(r.first);
    const auto j = static_cast<Eigen::Index>(r.second);
    const auto a = static_cast<Eigen::Index>(c.first);
    const auto b = static_cast<Eigen::Index>(c.second);
    return g(i, a) * g(j, b) + g(i, b) * g(j, a);
}

}  // namespace

double link_cov_input_input(const Eigen::MatrixXd& khat, NodePair e1, NodePair e2) {
    check_pair(e1, khat.rows(), khat.cols(), "link_cov_input_input");
    check_pair(e2, khat.rows(), khat.cols(), "link_cov_input_input");
    return product_form(khat, e1, e2);
}

double link_cov_input_inducing(const Eigen::MatrixXd& cross, NodePair input_edge, NodePair inducing_edge) {
    check_pair(input_edge, cross.rows(), cross.rows(), "link_cov_input_inducing");
    check_pair(inducing_edge, cross.cols(), cross.cols(), "link_cov_input_inducing");
    return product_form(cross, input_edge, inducing_edge);
}

double link_cov_inducing_inducing(const Eigen::MatrixXd& kzz, NodePair e1, NodePair e2) {
    check_pair(e1, kzz.rows(), kzz.cols(), "link_cov_inducing_inducing");
    check_pair(e2, kzz.rows(), kzz.cols(), "link_cov_inducing_inducing");
    return product_form(kzz, e1, e2);
}

Eigen::MatrixXd pair_product_kernel(const Eigen::MatrixXd& node_block, const std::vector<NodePair>& row_pairs,
                                    const std::vector<NodePair>& col_pairs) {
    for (const auto& r : row_pairs) { check_pair(r, node_block.rows(), node_block.rows(), "pair_product_kernel"); }
    for (const auto& c : col_pairs) { check_pair(c, node_block.cols(), node_block.cols(), "pair_product_kernel"); }
    const auto nr = static_cast<Eigen::Index>(row_pairs.size());
    const auto nc = static_cast<Eigen::Index>(col_pairs.size());
    Eigen::MatrixXd out(nr, nc);
    for (Eigen::Index c = 0; c < nc; ++c) {
        for (Eigen::Index r = 0; r < nr; ++r) {
            out(r, c) = product_form(node_block, row_pairs[static_cast<std::size_t>(r)],
                                     col_pairs[static_cast<std::size_t>(c)]);
        }
    }
    return out;
}

Eigen::MatrixXd pair_product_kernel_backward(const Eigen::MatrixXd& node_block, const std::vector<NodePair>& row_pairs,
                                             const std::vector<NodePair>& col_pairs, const Eigen::MatrixXd& adjoint) {
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(node_block.rows(), node_block.cols());
    for (std::size_t c = 0; c < col_pairs.size(); ++c) {
        const auto a = static_cast<Eigen::Index>(col_pairs[c].first);
        const auto b = static_cast<Eigen::Index>(col_pairs[c].second);
        for (std::size_t r = 0; r < row_pairs.size(); ++r) {
            const double w = adjoint(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            if (w == 0.0) { continue; }
            const auto i = static_cast<Eigen::Index>(row_pairs[r].first);
            const auto j = static_cast<Eigen::Index>(row_pairs[r].second);
            grad(i, a) += w * node_block(j, b);
            grad(j, b) += w * node_block(i, a);
            grad(i, b) += w * node_block(j, a);
            grad(j, a) += w * node_block(i, b);
        }
    }
    return grad;
}

ConvolvedBatch convolve_batch(const GraphDomain& g, const ConvolutionConfig& cfg, const KernelParams& params,
                              const FeatureMatrix& x, const Eigen::MatrixXd& z, const std::vector<NodePair>& batch) {
    if (x.rows() != g.node_count()) { throw std::invalid_argument("feature rows do not match the node count"); }
    ConvolvedBatch cb;
    for (const auto& p : batch) {
        if (p.second >= g.node_count()) { throw std::out_of_range("batch pair references a node outside the graph"); }
        cb.endpoints.push_back(p.first);
        cb.endpoints.push_back(p.second);
    }
    std::sort(cb.endpoints.begin(), cb.endpoints.end());
    cb.endpoints.erase(std::unique(cb.endpoints.begin(), cb.endpoints.end()), cb.endpoints.end());
    cb.slots.reserve(batch.size());
    const auto slot_of = [&](Index node) {
        return static_cast<Index>(std::lower_bound(cb.endpoints.begin(), cb.endpoints.end(), node) - cb.endpoints.begin());
    };
    for (const auto& p : batch) { cb.slots.emplace_back(slot_of(p.first), slot_of(p.second)); }

    cb.preimage = preimage_nodes(g, cb.endpoints, cfg.depth());

    const auto n = static_cast<Eigen::Index>(g.node_count());
    const auto nu = static_cast<Eigen::Index>(cb.endpoints.size());
    const auto np = static_cast<Eigen::Index>(cb.preimage.size());
    Eigen::MatrixXd full_rows = Eigen::MatrixXd::Zero(nu, n);
    for (Eigen::Index u = 0; u < nu; ++u) { full_rows(u, static_cast<Eigen::Index>(cb.endpoints[static_cast<std::size_t>(u)])) = 1.0; }
    full_rows = convolve_rows(g, cfg, std::move(full_rows));
    cb.rows.resize(nu, np);
    for (Eigen::Index p = 0; p < np; ++p) {
        cb.rows.col(p) = full_rows.col(static_cast<Eigen::Index>(cb.preimage[static_cast<std::size_t>(p)]));
    }

    cb.x_pre = x.select_rows(cb.preimage).values();
    cb.k_pre = rbf_ard(params, cb.x_pre, cb.x_pre);
    cb.k_pre_z = rbf_ard(params, cb.x_pre, z);
    cb.cross = cb.rows * cb.k_pre_z;
    cb.khat = cb.rows * cb.k_pre * cb.rows.transpose();
    return cb;
}

Eigen::VectorXd batch_prior_diagonal(const ConvolvedBatch& cb) {
    Eigen::VectorXd diag(static_cast<Eigen::Index>(cb.slots.size()));
    for (std::size_t b = 0; b < cb.slots.size(); ++b) {
        diag[static_cast<Eigen::Index>(b)] = product_form(cb.khat, cb.slots[b], cb.slots[b]);
    }
    return diag;
}

LinkGram assemble_link_gram(const GraphDomain& g, const ConvolutionConfig& cfg, const KernelParams& params,
                            const FeatureMatrix& x, const FeatureMatrix& z, const std::vector<NodePair>& inducing_edges,
                            const std::vector<NodePair>& batch, AssemblyPath path) {
    if (batch.empty() || inducing_edges.empty()) { throw std::invalid_argument("assemble_link_gram needs non-empty edge lists"); }
    LinkGram out;
    out.inducing_gram = pair_product_kernel(rbf_ard(params, z, z), inducing_edges, inducing_edges);
    if (path == AssemblyPath::preimage) {
        const auto cb = convolve_batch(g, cfg, params, x, z.values(), batch);
        out.cross_block = pair_product_kernel(cb.cross, cb.slots, inducing_edges);
        out.batch_diag = batch_prior_diagonal(cb);
    } else {
        const Eigen::MatrixXd cross = convolved_cross_kernel(g, cfg, params, x, z);
        const Eigen::MatrixXd khat = convolved_node_kernel(g, cfg, params, x);
        out.cross_block = pair_product_kernel(cross, batch, inducing_edges);
        out.batch_diag.resize(static_cast<Eigen::Index>(batch.size()));
        for (std::size_t b = 0; b < batch.size(); ++b) {
            out.batch_diag[static_cast<Eigen::Index>(b)] = link_cov_input_input(khat, batch[b], batch[b]);
        }
    }
    return out;
}

}  // namespace gclp
