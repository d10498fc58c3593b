#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gclp/graph.hpp"
#include "gclp/inducing.hpp"
#include "gclp/link_kernel.hpp"
#include "gclp/node_kernels.hpp"
#include "gclp/quadrature.hpp"

namespace gclp {

double softplus(double x);
double softplus_inverse(double y);

/// q(v) = N(mean, L L^T) over whitened inducing-edge values, u = chol(C_uu) v.
/// The factor's diagonal is stored through an inverse softplus so any raw value is valid.
struct VariationalState {
    Eigen::VectorXd mean;
    Eigen::MatrixXd scale_raw;  // only the lower triangle is read

    static VariationalState prior(Index size);  // mean 0, L = I

    [[nodiscard]] Index size() const noexcept { return static_cast<Index>(mean.size()); }
    [[nodiscard]] Eigen::MatrixXd scale() const;
};

/// KL(N(m, L L^T) || N(0, I)).
double kl_term(const VariationalState& state);

/// Every trainable quantity in unconstrained form.
struct ModelParameters {
    double log_variance{0.0};
    Eigen::VectorXd log_lengthscales;
    Eigen::VectorXd lambda_logits;
    Eigen::MatrixXd inducing_features;
    VariationalState variational;

    [[nodiscard]] KernelParams kernel() const;
    [[nodiscard]] ConvolutionConfig convolution() const;

    /// Same shapes, all zeros. Used as the gradient container.
    [[nodiscard]] ModelParameters zeros_like() const;
};

enum class ParameterGroup { variance, lengthscales, convolution_weights, inducing_features, variational_mean, variational_scale };
inline constexpr std::array<ParameterGroup, 6> kParameterGroups{
    ParameterGroup::variance,          ParameterGroup::lengthscales,     ParameterGroup::convolution_weights,
    ParameterGroup::inducing_features, ParameterGroup::variational_mean, ParameterGroup::variational_scale};

std::string to_string(ParameterGroup group);

/// Flat vector view used by the optimizer and the finite-difference checker.
/// The variational scale contributes only its lower triangle (column-major).
struct ParameterLayout {
    std::array<Index, 7> offsets{};  // begin of each group, offsets[6] = total

    explicit ParameterLayout(const ModelParameters& shape);
    [[nodiscard]] Index size() const noexcept { return offsets.back(); }
    [[nodiscard]] ParameterGroup group_of(Index flat_index) const;
    [[nodiscard]] Eigen::VectorXd flatten(const ModelParameters& p) const;
    void unflatten(const Eigen::VectorXd& flat, ModelParameters& p) const;
};

struct LabelledPair {
    NodePair pair;
    int label{0};
};

struct Predictive {
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;
};

struct ObjectiveWithGradient {
    double value{0.0};
    ModelParameters gradient;
};

enum class ScoreMode {
    expected_probability,  // E_q[sigma(r)] by quadrature
    sigmoid_of_mean,       // sigma(E_q[r])
};

/// Jitter added to the inducing Gram before factorization, relative to the kernel variance.
struct JitterPolicy {
    double initial{1e-6};
    double maximum{1e-2};
};

/// Graph-convolutional link GP with inducing edges on a frozen random inducing graph.
class LinkGpModel {
public:
    LinkGpModel(GraphDomain observed_graph, FeatureMatrix features, GraphDomain inducing_graph, ModelParameters params,
                int quadrature_points = 20);

    [[nodiscard]] const GraphDomain& graph() const noexcept { return graph_; }
    [[nodiscard]] const FeatureMatrix& features() const noexcept { return features_; }
    [[nodiscard]] const GraphDomain& inducing_graph() const noexcept { return inducing_graph_; }
    [[nodiscard]] const std::vector<NodePair>& inducing_edges() const noexcept { return inducing_graph_.edges(); }
    [[nodiscard]] const ModelParameters& params() const noexcept { return params_; }
    [[nodiscard]] ModelParameters& params() noexcept { return params_; }
    [[nodiscard]] int quadrature_points() const noexcept { return rule_.size(); }
    [[nodiscard]] const JitterPolicy& jitter() const noexcept { return jitter_; }

    /// Marginal q(r) for each pair. Throws NumericalError when the inducing Gram cannot be factorized.
    [[nodiscard]] Predictive predict(const std::vector<NodePair>& batch) const;

    [[nodiscard]] Eigen::VectorXd link_scores(const std::vector<NodePair>& batch, ScoreMode mode) const;

    /// (total_count / B) sum_b E_q[log p(y_b | r_b)] - KL.
    [[nodiscard]] double minibatch_elbo(const std::vector<LabelledPair>& batch, double total_count) const;
    [[nodiscard]] ObjectiveWithGradient minibatch_elbo_with_gradient(const std::vector<LabelledPair>& batch,
                                                                     double total_count) const;

    /// Unscaled likelihood over all data minus KL, evaluated in chunks against one factorization.
    [[nodiscard]] double full_elbo(const std::vector<LabelledPair>& data, Index chunk_size = 1024) const;

    /// Sum of expected log-likelihood terms only, unscaled.
    [[nodiscard]] double expected_loglik_sum(const std::vector<LabelledPair>& data, Index chunk_size = 1024) const;

private:
    GraphDomain graph_;
    FeatureMatrix features_;
    GraphDomain inducing_graph_;
    ModelParameters params_;
    GaussHermite rule_;
    JitterPolicy jitter_;
};

/// Initial values for a fresh model.
struct ModelInit {
    Index depth{2};
    std::vector<double> lambda_init{0.5, 0.3};
    double lengthscale_init{1.0};
    double variance_init{1.0};
    Index inducing_nodes{0};  // 0 selects the default sizing rule
    Index inducing_edges{0};
    int quadrature_points{20};
};

/// Builds the inducing structure and sets q(v) to the whitened prior.
LinkGpModel initialize_model(GraphDomain observed_graph, FeatureMatrix features, const ModelInit& init,
                             std::uint64_t seed);

}  // namespace gclp
