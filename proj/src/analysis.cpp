#include "gclp/analysis.hpp"

#include <cstdio>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>

#include "gclp/errors.hpp"

namespace gclp {

namespace {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::vector<CovarianceProfileRow> covariance_profile_sweep(const GraphDomain& g, const FeatureMatrix& x,
                                                           const KernelParams& params, Index center, Index max_d,
                                                           Index k_max) {
    std::vector<CovarianceProfileRow> rows;
    for (Index k = 0; k <= k_max; ++k) {
        const auto profile = covariance_distance_profile(g, ConvolutionConfig::full(k), params, x, center, max_d);
        for (Index d = 0; d < max_d; ++d) { rows.push_back({k, d + 1, profile[d]}); }
    }
    return rows;
}

std::string covariance_profile_csv(const std::vector<CovarianceProfileRow>& rows) {
    std::ostringstream out;
    out << "K,d,mean_covariance\n";
    for (const auto& r : rows) {
        out << r.convolutions << ',' << r.distance << ','
            << (r.mean_covariance ? format_number(*r.mean_covariance) : std::string("NA")) << '\n';
    }
    return out.str();
}

std::vector<double> dirichlet_sweep(const GraphDomain& g, const FeatureMatrix& x, const KernelParams& params,
                                    Index k_max, Index samples, std::uint64_t seed, double jitter) {
    if (samples == 0) { throw std::invalid_argument("need at least one sample"); }
    const auto n = static_cast<Eigen::Index>(g.node_count());
    const Eigen::MatrixXd k = rbf_ard(params, x, x);
    Eigen::MatrixXd factor;
    for (double rel = jitter; rel <= 1e-2 * (1.0 + 1e-9); rel *= 10.0) {
        Eigen::MatrixXd jittered = k;
        jittered.diagonal().array() += rel * params.variance;
        Eigen::LLT<Eigen::MatrixXd> llt(jittered);
        if (llt.info() == Eigen::Success) {
            factor = llt.matrixL();
            break;
        }
    }
    if (factor.size() == 0) { throw NumericalError("node kernel is not positive definite even with jitter"); }

    const SparseMatrix lap = laplacian(g);
    const SparseMatrix& s = g.normalized_convolution();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> totals(k_max + 1, 0.0);
    constexpr Index chunk = 256;
    for (Index begin = 0; begin < samples; begin += chunk) {
        const auto cols = static_cast<Eigen::Index>(std::min(chunk, samples - begin));
        Eigen::MatrixXd eps(n, cols);
        for (Eigen::Index c = 0; c < cols; ++c) {
            for (Eigen::Index r = 0; r < n; ++r) { eps(r, c) = normal(rng); }
        }
        Eigen::MatrixXd signal = factor.triangularView<Eigen::Lower>() * eps;
        for (Index kk = 0; kk <= k_max; ++kk) {
            if (kk > 0) { signal = s * signal; }
            const Eigen::MatrixXd lg = lap * signal;
            totals[kk] += signal.cwiseProduct(lg).sum();
        }
    }
    for (auto& t : totals) { t /= static_cast<double>(samples); }
    return totals;
}

std::string dirichlet_sweep_csv(const std::vector<double>& norms) {
    std::ostringstream out;
    out << "K,mean_dirichlet_norm\n";
    for (std::size_t k = 0; k < norms.size(); ++k) { out << k << ',' << format_number(norms[k]) << '\n'; }
    return out.str();
}

Index pick_profile_center(const GraphDomain& g, Index max_d, std::uint64_t seed) {
    if (g.node_count() == 0) { throw std::invalid_argument("graph has no nodes"); }
    std::vector<Index> eligible;
    for (Index v = 0; v < g.node_count(); ++v) {
        const auto dist = bfs_distances(g, v);
        for (long d : dist) {
            if (d == static_cast<long>(max_d)) {
                eligible.push_back(v);
                break;
            }
        }
    }
    std::mt19937_64 rng(seed);
    if (eligible.empty()) { return std::uniform_int_distribution<Index>(0, g.node_count() - 1)(rng); }
    return eligible[std::uniform_int_distribution<std::size_t>(0, eligible.size() - 1)(rng)];
}

}  // namespace gclp
