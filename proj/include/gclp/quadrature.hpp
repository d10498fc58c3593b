#pragma once

#include <Eigen/Core>

namespace gclp {

/// Gauss-Hermite rule for integrals against exp(-t^2), via Golub-Welsch.
struct GaussHermite {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;

    explicit GaussHermite(int n_points);
    [[nodiscard]] int size() const noexcept { return static_cast<int>(nodes.size()); }
};

/// log sigma(z), stable for large |z|.
double log_sigmoid(double z);
double sigmoid(double z);

/// Quadrature estimate of E_{N(mean, variance)}[log sigma(s f)] with s = +1 for label 1, -1 for label 0,
/// together with its partial derivatives in mean and variance.
struct ExpectedLogLik {
    double value{0.0};
    double d_mean{0.0};
    double d_variance{0.0};
};

ExpectedLogLik bernoulli_expected_loglik(const GaussHermite& rule, double mean, double variance, int label);
double bernoulli_expected_loglik(double mean, double variance, int label, int n_quad = 20);

/// E_{N(mean, variance)}[sigma(f)] by the same rule.
double expected_sigmoid(const GaussHermite& rule, double mean, double variance);

}  // namespace gclp
