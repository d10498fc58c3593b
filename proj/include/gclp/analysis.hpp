#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gclp/graph.hpp"
#include "gclp/node_kernels.hpp"

namespace gclp {

struct CovarianceProfileRow {
    Index convolutions{0};
    Index distance{0};
    std::optional<double> mean_covariance;
};

/// Mean convolved covariance by geodesic distance for K = 0..k_max full convolutions.
std::vector<CovarianceProfileRow> covariance_profile_sweep(const GraphDomain& g, const FeatureMatrix& x,
                                                           const KernelParams& params, Index center, Index max_d,
                                                           Index k_max);

/// Header `K,d,mean_covariance`; empty distance classes are written as `NA`.
std::string covariance_profile_csv(const std::vector<CovarianceProfileRow>& rows);

/// Average Dirichlet norm of prior samples for K = 0..k_max full convolutions.
/// Samples are drawn as g = S^K chol(K + jitter nu I) eps with the same eps for every K.
std::vector<double> dirichlet_sweep(const GraphDomain& g, const FeatureMatrix& x, const KernelParams& params,
                                    Index k_max, Index samples, std::uint64_t seed, double jitter = 1e-8);

/// Header `K,mean_dirichlet_norm`.
std::string dirichlet_sweep_csv(const std::vector<double>& norms);

/// Seeded choice of a node that has at least one node at distance exactly max_d, if any exists.
Index pick_profile_center(const GraphDomain& g, Index max_d, std::uint64_t seed);

}  // namespace gclp
