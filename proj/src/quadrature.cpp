#include "gclp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace gclp {

GaussHermite::GaussHermite(int n_points) {
    if (n_points < 1) { throw std::invalid_argument("quadrature needs at least one point"); }
    // Jacobi matrix of the physicists' Hermite recurrence: off-diagonal sqrt(k / 2).
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n_points, n_points);
    for (int k = 1; k < n_points; ++k) {
        jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    nodes = eig.eigenvalues();
    weights = std::sqrt(std::numbers::pi) * eig.eigenvectors().row(0).transpose().array().square();
}

double log_sigmoid(double z) { return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

double sigmoid(double z) {
    if (z >= 0) { return 1.0 / (1.0 + std::exp(-z)); }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

ExpectedLogLik bernoulli_expected_loglik(const GaussHermite& rule, double mean, double variance, int label) {
    if (!(variance > 0.0)) { throw std::invalid_argument("predictive variance must be positive"); }
    const double sign = label == 1 ? 1.0 : -1.0;
    const double sd = std::sqrt(2.0 * variance);
    const double norm = 1.0 / std::sqrt(std::numbers::pi);
    ExpectedLogLik out;
    double d_sd = 0.0;
    for (int k = 0; k < rule.size(); ++k) {
        const double w = rule.weights[k] * norm;
        const double f = mean + sd * rule.nodes[k];
        // d/df log sigma(s f) = s sigma(-s f)
        const double slope = sign * sigmoid(-sign * f);
        out.value += w * log_sigmoid(sign * f);
        out.d_mean += w * slope;
        d_sd += w * slope * rule.nodes[k];
    }
    // sd = sqrt(2 v)  =>  d sd / d v = 1 / sd
    out.d_variance = d_sd / sd;
    return out;
}

double bernoulli_expected_loglik(double mean, double variance, int label, int n_quad) {
    return bernoulli_expected_loglik(GaussHermite(n_quad), mean, variance, label).value;
}

double expected_sigmoid(const GaussHermite& rule, double mean, double variance) {
    const double sd = std::sqrt(2.0 * std::max(variance, 0.0));
    const double norm = 1.0 / std::sqrt(std::numbers::pi);
    double out = 0.0;
    for (int k = 0; k < rule.size(); ++k) { out += rule.weights[k] * norm * sigmoid(mean + sd * rule.nodes[k]); }
    return out;
}

}  // namespace gclp
