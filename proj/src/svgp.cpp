#include "gclp/svgp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "gclp/errors.hpp"

namespace gclp {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double softplus_inverse(double y) {
    if (!(y > 0.0)) { throw std::invalid_argument("softplus_inverse needs a positive argument"); }
    return y > 30.0 ? y + std::log(-std::expm1(-y)) : std::log(std::expm1(y));
}

VariationalState VariationalState::prior(Index size) {
    const auto m = static_cast<Eigen::Index>(size);
    VariationalState s;
    s.mean = Eigen::VectorXd::Zero(m);
    s.scale_raw = Eigen::MatrixXd::Zero(m, m);
    s.scale_raw.diagonal().setConstant(softplus_inverse(1.0));
    return s;
}

Eigen::MatrixXd VariationalState::scale() const {
    Eigen::MatrixXd l = scale_raw.triangularView<Eigen::StrictlyLower>();
    for (Eigen::Index i = 0; i < l.rows(); ++i) { l(i, i) = softplus(scale_raw(i, i)); }
    return l;
}

double kl_term(const VariationalState& state) {
    const Eigen::MatrixXd l = state.scale();
    const double log_det = l.diagonal().array().log().sum();
    return 0.5 * (state.mean.squaredNorm() + l.squaredNorm() - static_cast<double>(state.size()) - 2.0 * log_det);
}

KernelParams ModelParameters::kernel() const {
    return {std::exp(log_variance), log_lengthscales.array().exp().matrix()};
}

ConvolutionConfig ModelParameters::convolution() const { return ConvolutionConfig::from_logits(lambda_logits); }

ModelParameters ModelParameters::zeros_like() const {
    ModelParameters z;
    z.log_variance = 0.0;
    z.log_lengthscales = Eigen::VectorXd::Zero(log_lengthscales.size());
    z.lambda_logits = Eigen::VectorXd::Zero(lambda_logits.size());
    z.inducing_features = Eigen::MatrixXd::Zero(inducing_features.rows(), inducing_features.cols());
    z.variational.mean = Eigen::VectorXd::Zero(variational.mean.size());
    z.variational.scale_raw = Eigen::MatrixXd::Zero(variational.scale_raw.rows(), variational.scale_raw.cols());
    return z;
}

std::string to_string(ParameterGroup group) {
    switch (group) {
        case ParameterGroup::variance: return "variance";
        case ParameterGroup::lengthscales: return "lengthscales";
        case ParameterGroup::convolution_weights: return "convolution_weights";
        case ParameterGroup::inducing_features: return "inducing_features";
        case ParameterGroup::variational_mean: return "variational_mean";
        case ParameterGroup::variational_scale: return "variational_scale";
    }
    return "unknown";
}

ParameterLayout::ParameterLayout(const ModelParameters& shape) {
    const auto m = static_cast<Index>(shape.variational.mean.size());
    const std::array<Index, 6> sizes{1,
                                     static_cast<Index>(shape.log_lengthscales.size()),
                                     static_cast<Index>(shape.lambda_logits.size()),
                                     static_cast<Index>(shape.inducing_features.size()),
                                     m,
                                     m * (m + 1) / 2};
    offsets[0] = 0;
    for (std::size_t g = 0; g < sizes.size(); ++g) { offsets[g + 1] = offsets[g] + sizes[g]; }
}

ParameterGroup ParameterLayout::group_of(Index flat_index) const {
    for (std::size_t g = 0; g < kParameterGroups.size(); ++g) {
        if (flat_index < offsets[g + 1]) { return kParameterGroups[g]; }
    }
    throw std::out_of_range("flat parameter index out of range");
}

Eigen::VectorXd ParameterLayout::flatten(const ModelParameters& p) const {
    Eigen::VectorXd flat(static_cast<Eigen::Index>(size()));
    auto at = [&](std::size_t g) { return static_cast<Eigen::Index>(offsets[g]); };
    flat[at(0)] = p.log_variance;
    flat.segment(at(1), p.log_lengthscales.size()) = p.log_lengthscales;
    flat.segment(at(2), p.lambda_logits.size()) = p.lambda_logits;
    flat.segment(at(3), p.inducing_features.size()) =
        Eigen::Map<const Eigen::VectorXd>(p.inducing_features.data(), p.inducing_features.size());
    flat.segment(at(4), p.variational.mean.size()) = p.variational.mean;
    Eigen::Index pos = at(5);
    const auto& raw = p.variational.scale_raw;
    for (Eigen::Index c = 0; c < raw.cols(); ++c) {
        for (Eigen::Index r = c; r < raw.rows(); ++r) { flat[pos++] = raw(r, c); }
    }
    return flat;
}

void ParameterLayout::unflatten(const Eigen::VectorXd& flat, ModelParameters& p) const {
    if (flat.size() != static_cast<Eigen::Index>(size())) { throw std::invalid_argument("flat parameter size mismatch"); }
    auto at = [&](std::size_t g) { return static_cast<Eigen::Index>(offsets[g]); };
    p.log_variance = flat[at(0)];
    p.log_lengthscales = flat.segment(at(1), p.log_lengthscales.size());
    p.lambda_logits = flat.segment(at(2), p.lambda_logits.size());
    Eigen::Map<Eigen::VectorXd>(p.inducing_features.data(), p.inducing_features.size()) =
        flat.segment(at(3), p.inducing_features.size());
    p.variational.mean = flat.segment(at(4), p.variational.mean.size());
    Eigen::Index pos = at(5);
    auto& raw = p.variational.scale_raw;
    for (Eigen::Index c = 0; c < raw.cols(); ++c) {
        for (Eigen::Index r = c; r < raw.rows(); ++r) { raw(r, c) = flat[pos++]; }
    }
}

namespace {

constexpr double kVarianceFloor = 1e-12;

// Quantities that depend on the parameters but not on the batch.
struct InducingContext {
    KernelParams kernel;
    ConvolutionConfig convolution;
    Eigen::MatrixXd kzz;
    Eigen::MatrixXd chol;   // lower Cholesky factor of C_uu + jitter I
    double jitter{0.0};     // absolute jitter on the diagonal
    Eigen::MatrixXd scale;  // whitened factor L
};

InducingContext make_context(const ModelParameters& p, const std::vector<NodePair>& inducing_edges,
                             const JitterPolicy& policy) {
    InducingContext ctx{p.kernel(), p.convolution(), {}, {}, 0.0, p.variational.scale()};
    ctx.kzz = rbf_ard(ctx.kernel, p.inducing_features, p.inducing_features);
    Eigen::MatrixXd gram = pair_product_kernel(ctx.kzz, inducing_edges, inducing_edges);
    if (!gram.allFinite()) { throw NumericalError("inducing Gram has non-finite entries"); }
    for (double rel = policy.initial; rel <= policy.maximum * (1.0 + 1e-9); rel *= 10.0) {
        Eigen::MatrixXd jittered = gram;
        ctx.jitter = rel * ctx.kernel.variance;
        jittered.diagonal().array() += ctx.jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(jittered);
        if (llt.info() == Eigen::Success) {
            ctx.chol = llt.matrixL();
            return ctx;
        }
    }
    throw NumericalError("inducing Gram is not positive definite even with jitter " +
                         std::to_string(policy.maximum) + " x variance");
}

struct BatchForward {
    ConvolvedBatch cb;
    Eigen::MatrixXd cross_block;  // C_bu
    Eigen::VectorXd prior_diag;
    Eigen::MatrixXd a;            // C_bu chol^{-T}
    Eigen::MatrixXd w;            // a L
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;
    std::vector<bool> floored;
};

BatchForward forward(const InducingContext& ctx, const LinkGpModel& model, const std::vector<NodePair>& pairs) {
    const ModelParameters& p = model.params();
    BatchForward f;
    f.cb = convolve_batch(model.graph(), ctx.convolution, ctx.kernel, model.features(), p.inducing_features, pairs);
    f.cross_block = pair_product_kernel(f.cb.cross, f.cb.slots, model.inducing_edges());
    f.prior_diag = batch_prior_diagonal(f.cb);
    f.a = ctx.chol.triangularView<Eigen::Lower>().solve(f.cross_block.transpose()).transpose();
    f.w = f.a * ctx.scale.triangularView<Eigen::Lower>();
    f.mean = f.a * p.variational.mean;
    f.variance = f.prior_diag - f.a.rowwise().squaredNorm() + f.w.rowwise().squaredNorm();
    f.floored.assign(pairs.size(), false);
    for (Eigen::Index b = 0; b < f.variance.size(); ++b) {
        if (!(f.variance[b] > kVarianceFloor)) {
            f.variance[b] = kVarianceFloor;
            f.floored[static_cast<std::size_t>(b)] = true;
        }
    }
    return f;
}

std::vector<NodePair> pairs_of(const std::vector<LabelledPair>& data, std::size_t begin, std::size_t end) {
    std::vector<NodePair> out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) { out.push_back(data[i].pair); }
    return out;
}

// Phi(X): lower triangle with the diagonal halved.
Eigen::MatrixXd phi(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out = x.triangularView<Eigen::Lower>();
    out.diagonal() *= 0.5;
    return out;
}

}  // namespace

LinkGpModel::LinkGpModel(GraphDomain observed_graph, FeatureMatrix features, GraphDomain inducing_graph,
                         ModelParameters params, int quadrature_points)
    : graph_(std::move(observed_graph)),
      features_(std::move(features)),
      inducing_graph_(std::move(inducing_graph)),
      params_(std::move(params)),
      rule_(quadrature_points) {
    if (features_.rows() != graph_.node_count()) {
        throw DataError("feature rows (" + std::to_string(features_.rows()) + ") do not match node count (" +
                        std::to_string(graph_.node_count()) + ")");
    }
    const auto d = static_cast<Eigen::Index>(features_.dimension());
    const auto m = static_cast<Eigen::Index>(inducing_graph_.edge_count());
    if (params_.log_lengthscales.size() != d || params_.inducing_features.cols() != d) {
        throw std::invalid_argument("parameter feature dimension does not match the node features");
    }
    if (params_.inducing_features.rows() != static_cast<Eigen::Index>(inducing_graph_.node_count())) {
        throw std::invalid_argument("inducing feature rows do not match the inducing graph");
    }
    if (params_.variational.mean.size() != m || params_.variational.scale_raw.rows() != m ||
        params_.variational.scale_raw.cols() != m) {
        throw std::invalid_argument("variational state size does not match the inducing edge count");
    }
    if (m == 0) { throw std::invalid_argument("inducing graph has no edges"); }
}

Predictive LinkGpModel::predict(const std::vector<NodePair>& batch) const {
    Predictive out;
    out.mean.resize(static_cast<Eigen::Index>(batch.size()));
    out.variance.resize(static_cast<Eigen::Index>(batch.size()));
    if (batch.empty()) { return out; }
    const auto ctx = make_context(params_, inducing_edges(), jitter_);
    constexpr std::size_t chunk = 1024;
    for (std::size_t begin = 0; begin < batch.size(); begin += chunk) {
        const std::size_t end = std::min(batch.size(), begin + chunk);
        const std::vector<NodePair> part(batch.begin() + static_cast<std::ptrdiff_t>(begin),
                                         batch.begin() + static_cast<std::ptrdiff_t>(end));
        const auto f = forward(ctx, *this, part);
        out.mean.segment(static_cast<Eigen::Index>(begin), f.mean.size()) = f.mean;
        out.variance.segment(static_cast<Eigen::Index>(begin), f.variance.size()) = f.variance;
    }
    return out;
}

Eigen::VectorXd LinkGpModel::link_scores(const std::vector<NodePair>& batch, ScoreMode mode) const {
    const auto pred = predict(batch);
    Eigen::VectorXd scores(pred.mean.size());
    for (Eigen::Index b = 0; b < scores.size(); ++b) {
        scores[b] = mode == ScoreMode::expected_probability ? expected_sigmoid(rule_, pred.mean[b], pred.variance[b])
                                                            : sigmoid(pred.mean[b]);
    }
    return scores;
}

double LinkGpModel::expected_loglik_sum(const std::vector<LabelledPair>& data, Index chunk_size) const {
    if (data.empty()) { return 0.0; }
    const auto ctx = make_context(params_, inducing_edges(), jitter_);
    double total = 0.0;
    for (std::size_t begin = 0; begin < data.size(); begin += chunk_size) {
        const std::size_t end = std::min(data.size(), begin + chunk_size);
        const auto f = forward(ctx, *this, pairs_of(data, begin, end));
        for (std::size_t i = begin; i < end; ++i) {
            const auto b = static_cast<Eigen::Index>(i - begin);
            total += bernoulli_expected_loglik(rule_, f.mean[b], f.variance[b], data[i].label).value;
        }
    }
    return total;
}

double LinkGpModel::full_elbo(const std::vector<LabelledPair>& data, Index chunk_size) const {
    return expected_loglik_sum(data, chunk_size) - kl_term(params_.variational);
}

double LinkGpModel::minibatch_elbo(const std::vector<LabelledPair>& batch, double total_count) const {
    if (batch.empty()) { throw std::invalid_argument("minibatch must not be empty"); }
    const double scale = total_count / static_cast<double>(batch.size());
    return scale * expected_loglik_sum(batch, batch.size()) - kl_term(params_.variational);
}

ObjectiveWithGradient LinkGpModel::minibatch_elbo_with_gradient(const std::vector<LabelledPair>& batch,
                                                               double total_count) const {
    if (batch.empty()) { throw std::invalid_argument("minibatch must not be empty"); }
    const double scale = total_count / static_cast<double>(batch.size());
    const ModelParameters& p = params_;
    const auto ctx = make_context(p, inducing_edges(), jitter_);
    const auto f = forward(ctx, *this, pairs_of(batch, 0, batch.size()));
    const auto nb = static_cast<Eigen::Index>(batch.size());
    const Eigen::MatrixXd& l = ctx.scale;

    ObjectiveWithGradient out{0.0, p.zeros_like()};
    ModelParameters& grad = out.gradient;

    // Likelihood and its sensitivities to the predictive moments.
    Eigen::VectorXd g_mean(nb);
    Eigen::VectorXd g_var(nb);
    double ell = 0.0;
    for (Eigen::Index b = 0; b < nb; ++b) {
        const auto e = bernoulli_expected_loglik(rule_, f.mean[b], f.variance[b], batch[static_cast<std::size_t>(b)].label);
        ell += e.value;
        g_mean[b] = scale * e.d_mean;
        g_var[b] = f.floored[static_cast<std::size_t>(b)] ? 0.0 : scale * e.d_variance;
    }
    out.value = scale * ell - kl_term(p.variational);

    // KL(N(m, L L^T) || N(0, I)) contributes -m and -(L - diag(1/L_ii)).
    const Eigen::VectorXd& m = p.variational.mean;
    grad.variational.mean = f.a.transpose() * g_mean - m;

    // mean = A m ; var = c - |A_b|^2 + |(A L)_b|^2
    Eigen::MatrixXd a_bar = g_mean * m.transpose();
    a_bar.noalias() -= 2.0 * (g_var.asDiagonal() * f.a);
    a_bar.noalias() += 2.0 * (g_var.asDiagonal() * f.w) * l.transpose();

    Eigen::MatrixXd l_bar = 2.0 * f.a.transpose() * (g_var.asDiagonal() * f.w);
    l_bar -= l;
    l_bar.diagonal() += l.diagonal().cwiseInverse();
    Eigen::MatrixXd& raw_bar = grad.variational.scale_raw;
    raw_bar = l_bar.triangularView<Eigen::StrictlyLower>();
    for (Eigen::Index i = 0; i < raw_bar.rows(); ++i) {
        raw_bar(i, i) = l_bar(i, i) * logistic(p.variational.scale_raw(i, i));  // softplus' = logistic
    }

    // A = C_bu chol^{-T}
    const Eigen::MatrixXd y = ctx.chol.transpose().triangularView<Eigen::Upper>().solve(a_bar.transpose());  // chol^{-T} A_bar^T
    const Eigen::MatrixXd cross_block_bar = y.transpose();
    const Eigen::MatrixXd chol_bar = -(y * f.a);

    // Cholesky adjoint: Sigma_bar = chol^{-T} Phi(chol^T chol_bar) chol^{-1}, symmetrized.
    Eigen::MatrixXd lower_bar = chol_bar.triangularView<Eigen::Lower>();
    Eigen::MatrixXd inner = phi(ctx.chol.transpose() * lower_bar);
    inner = ctx.chol.transpose().triangularView<Eigen::Upper>().solve(inner);
    inner = ctx.chol.transpose().triangularView<Eigen::Upper>().solve(inner.transpose()).transpose();
    const Eigen::MatrixXd sigma_bar = 0.5 * (inner + inner.transpose());

    // The jitter scales with nu, so it carries a log-variance sensitivity.
    grad.log_variance += ctx.jitter * sigma_bar.trace();

    const Eigen::MatrixXd kzz_bar = pair_product_kernel_backward(ctx.kzz, inducing_edges(), inducing_edges(), sigma_bar);
    const Eigen::MatrixXd cross_bar =
        pair_product_kernel_backward(f.cb.cross, f.cb.slots, inducing_edges(), cross_block_bar);

    // Prior diagonal c_b = K_ii K_jj + K_ij K_ji over the convolved node kernel.
    const auto nu = static_cast<Eigen::Index>(f.cb.endpoints.size());
    Eigen::MatrixXd khat_bar = Eigen::MatrixXd::Zero(nu, nu);
    for (Eigen::Index b = 0; b < nb; ++b) {
        const auto i = static_cast<Eigen::Index>(f.cb.slots[static_cast<std::size_t>(b)].first);
        const auto j = static_cast<Eigen::Index>(f.cb.slots[static_cast<std::size_t>(b)].second);
        const double gv = g_var[b];
        khat_bar(i, i) += gv * f.cb.khat(j, j);
        khat_bar(j, j) += gv * f.cb.khat(i, i);
        khat_bar(i, j) += gv * f.cb.khat(j, i);
        khat_bar(j, i) += gv * f.cb.khat(i, j);
    }

    // khat = R K_pre R^T ; cross = R K_pre_z
    const Eigen::MatrixXd r_kpre = f.cb.rows * f.cb.k_pre;
    Eigen::MatrixXd rows_bar = (khat_bar + khat_bar.transpose()) * r_kpre;
    rows_bar.noalias() += cross_bar * f.cb.k_pre_z.transpose();
    const Eigen::MatrixXd kpre_bar = f.cb.rows.transpose() * khat_bar * f.cb.rows;
    const Eigen::MatrixXd kpre_z_bar = f.cb.rows.transpose() * cross_bar;

    // Convolution weights: R depends on lambda through every factor.
    const auto& weights = ctx.convolution.weights();
    if (!weights.empty()) {
        const auto n = static_cast<Eigen::Index>(graph_.node_count());
        Eigen::MatrixXd selector = Eigen::MatrixXd::Zero(nu, n);
        for (Eigen::Index u = 0; u < nu; ++u) {
            selector(u, static_cast<Eigen::Index>(f.cb.endpoints[static_cast<std::size_t>(u)])) = 1.0;
        }
        for (Index k = 0; k < weights.size(); ++k) {
            const Eigen::MatrixXd d_rows = convolve_rows_derivative(graph_, ctx.convolution, selector, k);
            double acc = 0.0;
            for (std::size_t c = 0; c < f.cb.preimage.size(); ++c) {
                acc += rows_bar.col(static_cast<Eigen::Index>(c)).dot(d_rows.col(static_cast<Eigen::Index>(f.cb.preimage[c])));
            }
            grad.lambda_logits[static_cast<Eigen::Index>(k)] = acc * weights[k] * (1.0 - weights[k]);
        }
    }

    // Base kernel blocks.
    const auto adj_pre = rbf_ard_backward(ctx.kernel, f.cb.x_pre, f.cb.x_pre, f.cb.k_pre, kpre_bar, false, false);
    const auto adj_pre_z =
        rbf_ard_backward(ctx.kernel, f.cb.x_pre, p.inducing_features, f.cb.k_pre_z, kpre_z_bar, false, true);
    const auto adj_zz =
        rbf_ard_backward(ctx.kernel, p.inducing_features, p.inducing_features, ctx.kzz, kzz_bar, true, true);
    grad.log_variance += adj_pre.log_variance + adj_pre_z.log_variance + adj_zz.log_variance;
    grad.log_lengthscales = adj_pre.log_lengthscales + adj_pre_z.log_lengthscales + adj_zz.log_lengthscales;
    grad.inducing_features = adj_pre_z.b + adj_zz.a + adj_zz.b;
    return out;
}

LinkGpModel initialize_model(GraphDomain observed_graph, FeatureMatrix features, const ModelInit& init,
                             std::uint64_t seed) {
    if (init.lambda_init.size() != init.depth) {
        throw std::invalid_argument("expected " + std::to_string(init.depth) + " initial convolution weights, got " +
                                    std::to_string(init.lambda_init.size()));
    }
    auto [n_nodes, n_edges] = default_inducing_sizes(observed_graph);
    if (init.inducing_nodes > 0) { n_nodes = init.inducing_nodes; }
    if (init.inducing_edges > 0) {
        n_edges = init.inducing_edges;
    } else if (init.inducing_nodes > 0) {
        const Index max_edges = n_nodes * (n_nodes - 1) / 2;
        n_edges = std::max(n_nodes - 1, std::min(2 * n_nodes, max_edges));
    }
    auto inducing = build_inducing_structure(features, n_nodes, n_edges, seed);

    ModelParameters p;
    p.log_variance = std::log(init.variance_init);
    p.log_lengthscales =
        Eigen::VectorXd::Constant(static_cast<Eigen::Index>(features.dimension()), std::log(init.lengthscale_init));
    p.lambda_logits = ConvolutionConfig(init.lambda_init).logits();
    p.inducing_features = inducing.features.values();
    p.variational = VariationalState::prior(inducing.edges.size());
    return LinkGpModel(std::move(observed_graph), std::move(features), std::move(inducing.graph), std::move(p),
                       init.quadrature_points);
}

}  // namespace gclp
