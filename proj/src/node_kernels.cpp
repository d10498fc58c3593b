#include "gclp/node_kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gclp {

FeatureMatrix::FeatureMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (!values_.allFinite()) { throw std::invalid_argument("feature matrix contains non-finite entries"); }
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<Index>& rows) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), values_.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.row(static_cast<Eigen::Index>(r)) = values_.row(static_cast<Eigen::Index>(rows[r]));
    }
    return FeatureMatrix(std::move(out));
}

KernelParams::KernelParams(double variance_, Eigen::VectorXd lengthscales_)
    : variance(variance_), lengthscales(std::move(lengthscales_)) {
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw std::invalid_argument("kernel variance must be positive and finite");
    }
    if (!(lengthscales.array() > 0.0).all() || !lengthscales.allFinite()) {
        throw std::invalid_argument("kernel lengthscales must be positive and finite");
    }
}

KernelParams KernelParams::isotropic(double variance, double lengthscale, Index dimension) {
    return {variance, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dimension), lengthscale)};
}

Eigen::MatrixXd rbf_ard(const KernelParams& params, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.cols() != b.cols() || a.cols() != params.lengthscales.size()) {
        throw std::invalid_argument("rbf_ard dimension mismatch: a has " + std::to_string(a.cols()) + ", b has " +
                                    std::to_string(b.cols()) + ", lengthscales have " +
                                    std::to_string(params.lengthscales.size()));
    }
    const Eigen::RowVectorXd inv_l = params.lengthscales.cwiseInverse().transpose();
    const Eigen::MatrixXd as = a.array().rowwise() * inv_l.array();
    const Eigen::MatrixXd bs = b.array().rowwise() * inv_l.array();
    Eigen::MatrixXd out(a.rows(), b.rows());
    for (Eigen::Index j = 0; j < bs.rows(); ++j) {
        for (Eigen::Index i = 0; i < as.rows(); ++i) {
            const double sq = (as.row(i) - bs.row(j)).squaredNorm();
            out(i, j) = params.variance * std::exp(-0.5 * sq);
        }
    }
    return out;
}

Eigen::MatrixXd rbf_ard(const KernelParams& params, const FeatureMatrix& a, const FeatureMatrix& b) {
    return rbf_ard(params, a.values(), b.values());
}

RbfAdjoint rbf_ard_backward(const KernelParams& params, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            const Eigen::MatrixXd& kernel, const Eigen::MatrixXd& kernel_adjoint, bool wrt_a,
                            bool wrt_b) {
    RbfAdjoint out;
    const Eigen::MatrixXd h = kernel.cwiseProduct(kernel_adjoint);
    out.log_variance = h.sum();
    const Eigen::VectorXd row_sum = h.rowwise().sum();
    const Eigen::VectorXd col_sum = h.colwise().sum().transpose();
    const Eigen::ArrayXd inv_l2 = params.lengthscales.array().square().inverse();

    // sum_ab h_ab (a_ad - b_bd)^2 expanded to avoid the pairwise loop
    const Eigen::MatrixXd hb = h * b;  // |a| x D
    Eigen::VectorXd sq(a.cols());
    for (Eigen::Index d = 0; d < a.cols(); ++d) {
        sq[d] = row_sum.dot(a.col(d).cwiseAbs2()) + col_sum.dot(b.col(d).cwiseAbs2()) - 2.0 * a.col(d).dot(hb.col(d));
    }
    out.log_lengthscales = (sq.array() * inv_l2).matrix();

    if (wrt_a) {
        // dK_ab/da_ad = -K_ab (a_ad - b_bd) / l_d^2
        Eigen::MatrixXd grad = hb - row_sum.asDiagonal() * a;
        out.a = (grad.array().rowwise() * inv_l2.transpose()).matrix();
    }
    if (wrt_b) {
        Eigen::MatrixXd grad = h.transpose() * a - col_sum.asDiagonal() * b;
        out.b = (grad.array().rowwise() * inv_l2.transpose()).matrix();
    }
    return out;
}

Eigen::MatrixXd convolved_node_kernel(const GraphDomain& g, const ConvolutionConfig& cfg, const KernelParams& params,
                                      const FeatureMatrix& x) {
    if (x.rows() != g.node_count()) { throw std::invalid_argument("feature rows do not match the node count"); }
    const Eigen::MatrixXd k = rbf_ard(params, x, x);
    if (cfg.depth() == 0) { return k; }
    const Eigen::MatrixXd p = interpolated_convolution_product(g, cfg);
    return p * k * p.transpose();
}

Eigen::MatrixXd convolved_cross_kernel(const GraphDomain& g, const ConvolutionConfig& cfg, const KernelParams& params,
                                       const FeatureMatrix& x, const FeatureMatrix& z) {
    if (x.rows() != g.node_count()) { throw std::invalid_argument("feature rows do not match the node count"); }
    const Eigen::MatrixXd kxz = rbf_ard(params, x, z);
    if (cfg.depth() == 0) { return kxz; }
    // P K_XZ = (K_XZ^T P^T)^T and P^T = P because every factor is symmetric.
    return convolve_rows(g, cfg, kxz.transpose()).transpose();
}

Eigen::VectorXd convolved_kernel_row(const GraphDomain& g, const ConvolutionConfig& cfg, const KernelParams& params,
                                     const FeatureMatrix& x, Index center) {
    if (x.rows() != g.node_count()) { throw std::invalid_argument("feature rows do not match the node count"); }
    if (center >= g.node_count()) { throw std::out_of_range("center node out of range"); }
    const auto n = static_cast<Eigen::Index>(g.node_count());
    Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, n);
    row(0, static_cast<Eigen::Index>(center)) = 1.0;
    row = convolve_rows(g, cfg, std::move(row));

    std::vector<Index> support;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (row(0, j) != 0.0) { support.push_back(static_cast<Index>(j)); }
    }
    Eigen::RowVectorXd weights(static_cast<Eigen::Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s) {
        weights[static_cast<Eigen::Index>(s)] = row(0, static_cast<Eigen::Index>(support[s]));
    }
    const Eigen::MatrixXd k_support = rbf_ard(params, x.select_rows(support), x);
    Eigen::MatrixXd out = weights * k_support;
    return convolve_rows(g, cfg, std::move(out)).row(0).transpose();
}

std::vector<std::optional<double>> covariance_distance_profile(const GraphDomain& g, const ConvolutionConfig& cfg,
                                                               const KernelParams& params, const FeatureMatrix& x,
                                                               Index center, Index max_d) {
    const auto classes = geodesic_distance_classes(g, center, max_d);
    const Eigen::VectorXd row = convolved_kernel_row(g, cfg, params, x, center);
    std::vector<std::optional<double>> profile(max_d);
    for (Index d = 0; d < max_d; ++d) {
        if (classes[d].empty()) { continue; }
        double sum = 0.0;
        for (Index j : classes[d]) { sum += row[static_cast<Eigen::Index>(j)]; }
        profile[d] = sum / static_cast<double>(classes[d].size());
    }
    return profile;
}

}  // namespace gclp
