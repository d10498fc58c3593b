#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gclp/graph.hpp"

namespace gclp {

/// Node features, one row per node. All entries finite.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    explicit FeatureMatrix(Eigen::MatrixXd values);

    [[nodiscard]] const Eigen::MatrixXd& values() const noexcept { return values_; }
    [[nodiscard]] Index rows() const noexcept { return static_cast<Index>(values_.rows()); }
    [[nodiscard]] Index dimension() const noexcept { return static_cast<Index>(values_.cols()); }

    /// Rows gathered in the given order.
    [[nodiscard]] FeatureMatrix select_rows(const std::vector<Index>& rows) const;

private:
    Eigen::MatrixXd values_;
};

/// RBF-ARD hyperparameters: variance nu and per-dimension lengthscales, all positive.
struct KernelParams {
    double variance{1.0};
    Eigen::VectorXd lengthscales;

    KernelParams() = default;
    KernelParams(double variance, Eigen::VectorXd lengthscales);
    static KernelParams isotropic(double variance, double lengthscale, Index dimension);

    [[nodiscard]] Index dimension() const noexcept { return static_cast<Index>(lengthscales.size()); }
};

/// nu * exp(-1/2 sum_d (a_id - b_jd)^2 / l_d^2).
Eigen::MatrixXd rbf_ard(const KernelParams& params, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
Eigen::MatrixXd rbf_ard(const KernelParams& params, const FeatureMatrix& a, const FeatureMatrix& b);

/// Accumulated adjoints of an RBF-ARD block K(a, b) given dL/dK.
struct RbfAdjoint {
    double log_variance{0.0};
    Eigen::VectorXd log_lengthscales;
    Eigen::MatrixXd a;  // dL/da, empty unless requested
    Eigen::MatrixXd b;  // dL/db, empty unless requested
};

/// Back-propagates dL/dK through K = rbf_ard(params, a, b) onto log(nu), log(l) and optionally the inputs.
RbfAdjoint rbf_ard_backward(const KernelParams& params, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            const Eigen::MatrixXd& kernel, const Eigen::MatrixXd& kernel_adjoint, bool wrt_a,
                            bool wrt_b);

/// P K P^T with P the interpolated convolution product and K = rbf_ard(x, x).
Eigen::MatrixXd convolved_node_kernel(const GraphDomain& g, const ConvolutionConfig& cfg, const KernelParams& params,
                                      const FeatureMatrix& x);

/// P K_XZ: the convolution acts on the input side only.
Eigen::MatrixXd convolved_cross_kernel(const GraphDomain& g, const ConvolutionConfig& cfg, const KernelParams& params,
                                       const FeatureMatrix& x, const FeatureMatrix& z);

/// Row `center` of the convolved node kernel, computed without forming the full matrix.
Eigen::VectorXd convolved_kernel_row(const GraphDomain& g, const ConvolutionConfig& cfg, const KernelParams& params,
                                     const FeatureMatrix& x, Index center);

/// Mean convolved covariance between center and the nodes at geodesic distance d = 1..max_d.
/// Distance classes with no nodes give std::nullopt.
std::vector<std::optional<double>> covariance_distance_profile(const GraphDomain& g, const ConvolutionConfig& cfg,
                                                               const KernelParams& params, const FeatureMatrix& x,
                                                               Index center, Index max_d);

}  // namespace gclp
