#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Core>

#include "gclp/svgp.hpp"

namespace gclp {

struct TrainingConfig {
    double learning_rate{0.001};
    Index batch_size{256};
    Index max_epochs{250};
    Index patience_epochs{20};
    double elbo_tolerance{1e-2};
    int quadrature_points{20};
    std::uint64_t seed{0};

    void validate() const;
};

/// Adam ascent step on a flat parameter vector.
class AdamOptimizer {
public:
    AdamOptimizer(Index size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

    /// Moves `params` along `gradient` (maximization).
    void ascend(Eigen::VectorXd& params, const Eigen::VectorXd& gradient);
    [[nodiscard]] long steps() const noexcept { return step_; }

private:
    double learning_rate_;
    double beta1_;
    double beta2_;
    double epsilon_;
    long step_{0};
    Eigen::VectorXd first_;
    Eigen::VectorXd second_;
};

struct TrainResult {
    std::vector<double> elbo_trace;  // full-data ELBO after each epoch
    Index epochs_run{0};
    bool stopped_early{false};
    double final_elbo{0.0};
};

/// Adam over all parameter groups with per-epoch shuffling. Stops after max_epochs or when the
/// full-data ELBO moved less than elbo_tolerance over the last patience_epochs epochs.
/// Throws NumericalError naming the parameter group on a non-finite gradient or ELBO.
TrainResult train(LinkGpModel& model, const std::vector<LabelledPair>& data, const TrainingConfig& config);

struct GradientCheckReport {
    double max_relative_error{0.0};
    std::map<ParameterGroup, double> per_group;
    Eigen::VectorXd analytic;
    Eigen::VectorXd numeric;
};

/// Central finite differences of the full-batch ELBO against the analytic gradient, for every scalar.
/// Relative error is |a - n| / max(|a|, |n|, floor).
GradientCheckReport gradient_check(const LinkGpModel& model, const std::vector<LabelledPair>& data, double step,
                                   double floor = 1e-6);

}  // namespace gclp
