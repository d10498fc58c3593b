#include "gclp/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "gclp/errors.hpp"

namespace gclp {

void TrainingConfig::validate() const {
    if (!(learning_rate > 0.0)) { throw std::invalid_argument("learning rate must be positive"); }
    if (batch_size == 0) { throw std::invalid_argument("batch size must be positive"); }
    if (!(elbo_tolerance > 0.0)) { throw std::invalid_argument("ELBO tolerance must be positive"); }
    if (quadrature_points < 1) { throw std::invalid_argument("quadrature needs at least one point"); }
}

AdamOptimizer::AdamOptimizer(Index size, double learning_rate, double beta1, double beta2, double epsilon)
    : learning_rate_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon),
      first_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size))),
      second_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size))) {}

void AdamOptimizer::ascend(Eigen::VectorXd& params, const Eigen::VectorXd& gradient) {
    ++step_;
    first_ = beta1_ * first_ + (1.0 - beta1_) * gradient;
    second_ = beta2_ * second_ + (1.0 - beta2_) * gradient.cwiseAbs2();
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
    params.array() += learning_rate_ * (first_.array() / c1) / ((second_.array() / c2).sqrt() + epsilon_);
}

namespace {

void check_finite(const ParameterLayout& layout, const Eigen::VectorXd& grad) {
    for (Eigen::Index i = 0; i < grad.size(); ++i) {
        if (!std::isfinite(grad[i])) {
            throw NumericalError("non-finite ELBO gradient in parameter group '" +
                                 to_string(layout.group_of(static_cast<Index>(i))) + "'");
        }
    }
}

}  // namespace

TrainResult train(LinkGpModel& model, const std::vector<LabelledPair>& data, const TrainingConfig& config) {
    config.validate();
    if (data.empty()) { throw std::invalid_argument("training data is empty"); }
    TrainResult result;
    const ParameterLayout layout(model.params());
    Eigen::VectorXd flat = layout.flatten(model.params());
    AdamOptimizer adam(layout.size(), config.learning_rate);
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto total = static_cast<double>(data.size());

    for (Index epoch = 0; epoch < config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(order.size(), begin + config.batch_size);
            std::vector<LabelledPair> batch;
            batch.reserve(end - begin);
            for (std::size_t i = begin; i < end; ++i) { batch.push_back(data[order[i]]); }
            const auto objective = model.minibatch_elbo_with_gradient(batch, total);
            if (!std::isfinite(objective.value)) { throw NumericalError("non-finite minibatch ELBO"); }
            const Eigen::VectorXd grad = layout.flatten(objective.gradient);
            check_finite(layout, grad);
            adam.ascend(flat, grad);
            layout.unflatten(flat, model.params());
        }
        const double elbo = model.full_elbo(data);
        if (!std::isfinite(elbo)) { throw NumericalError("non-finite ELBO at epoch " + std::to_string(epoch + 1)); }
        result.elbo_trace.push_back(elbo);
        result.epochs_run = epoch + 1;
        const std::size_t t = result.elbo_trace.size() - 1;
        if (config.patience_epochs > 0 && t >= config.patience_epochs &&
            std::abs(result.elbo_trace[t] - result.elbo_trace[t - config.patience_epochs]) < config.elbo_tolerance) {
            result.stopped_early = true;
            break;
        }
    }
    result.final_elbo = result.elbo_trace.empty() ? model.full_elbo(data) : result.elbo_trace.back();
    return result;
}

GradientCheckReport gradient_check(const LinkGpModel& model, const std::vector<LabelledPair>& data, double step,
                                   double floor) {
    const auto total = static_cast<double>(data.size());
    const ParameterLayout layout(model.params());
    GradientCheckReport report;
    report.analytic = layout.flatten(model.minibatch_elbo_with_gradient(data, total).gradient);
    report.numeric.resize(report.analytic.size());
    for (auto g : kParameterGroups) { report.per_group[g] = 0.0; }

    LinkGpModel probe = model;
    const Eigen::VectorXd base = layout.flatten(model.params());
    for (Eigen::Index i = 0; i < base.size(); ++i) {
        Eigen::VectorXd shifted = base;
        shifted[i] = base[i] + step;
        layout.unflatten(shifted, probe.params());
        const double up = probe.minibatch_elbo(data, total);
        shifted[i] = base[i] - step;
        layout.unflatten(shifted, probe.params());
        const double down = probe.minibatch_elbo(data, total);
        report.numeric[i] = (up - down) / (2.0 * step);

        const double a = report.analytic[i];
        const double n = report.numeric[i];
        const double rel = std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
        auto& worst = report.per_group[layout.group_of(static_cast<Index>(i))];
        worst = std::max(worst, rel);
        report.max_relative_error = std::max(report.max_relative_error, rel);
    }
    return report;
}

}  // namespace gclp
