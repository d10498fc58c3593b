#pragma once

#include <cstdint>
#include <string>

#include "gclp/graph.hpp"
#include "gclp/io.hpp"
#include "gclp/svgp.hpp"
#include "gclp/training.hpp"

namespace gclp {

inline constexpr int kCheckpointVersion = 1;

/// Node/edge counts plus FNV-1a over the sorted edge list.
struct GraphFingerprint {
    Index nodes{0};
    Index edges{0};
    std::string hash;

    friend bool operator==(const GraphFingerprint&, const GraphFingerprint&) = default;
};

GraphFingerprint fingerprint(const GraphDomain& g);

/// Everything needed to rebuild a trained model, given the observed graph and the node features.
struct Checkpoint {
    NodeIdMap ids;
    GraphFingerprint graph;
    GraphDomain inducing_graph;
    ModelParameters params;
    int quadrature_points{20};
    TrainingConfig training;
    double test_fraction{0.1};
    double final_elbo{0.0};
    Index epochs_run{0};
    std::uint64_t seed{0};
};

Checkpoint make_checkpoint(const LinkGpModel& model, const NodeIdMap& ids, const TrainingConfig& training,
                           double test_fraction, double final_elbo, Index epochs_run, std::uint64_t seed);

/// Versioned JSON. Doubles are written with round-trip precision.
std::string checkpoint_to_json(const Checkpoint& cp);
Checkpoint checkpoint_from_json(const std::string& text);

/// Rebuilds the model; throws DataError if the graph fingerprint or node ids disagree.
LinkGpModel restore_model(const Checkpoint& cp, GraphDomain observed_graph, FeatureMatrix features,
                          const NodeIdMap& ids);

}  // namespace gclp
