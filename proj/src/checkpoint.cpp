#include "gclp/checkpoint.hpp"

#include <cstdio>

#include "gclp/errors.hpp"
#include "json.hpp"

namespace gclp {

using nlohmann::ordered_json;

GraphFingerprint fingerprint(const GraphDomain& g) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int byte = 0; byte < 8; ++byte) {
            h ^= (v >> (8 * byte)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& e : g.edges()) {
        mix(e.first);
        mix(e.second);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return {g.node_count(), g.edge_count(), buf};
}

Checkpoint make_checkpoint(const LinkGpModel& model, const NodeIdMap& ids, const TrainingConfig& training,
                           double test_fraction, double final_elbo, Index epochs_run, std::uint64_t seed) {
    return {ids,          fingerprint(model.graph()), model.inducing_graph(), model.params(), model.quadrature_points(),
            training,     test_fraction,              final_elbo,             epochs_run,     seed};
}

namespace {

ordered_json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

ordered_json rows_of(const Eigen::MatrixXd& m) {
    auto out = ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c) { row[static_cast<std::size_t>(c)] = m(r, c); }
        out.push_back(row);
    }
    return out;
}

ordered_json lower_rows_of(const Eigen::MatrixXd& m) {
    auto out = ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(r + 1));
        for (Eigen::Index c = 0; c <= r; ++c) { row[static_cast<std::size_t>(c)] = m(r, c); }
        out.push_back(row);
    }
    return out;
}

Eigen::VectorXd to_vec(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd to_matrix(const nlohmann::json& j, Eigen::Index cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const auto row = j[static_cast<std::size_t>(r)].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(row.size()) != cols) { throw DataError("checkpoint matrix row has wrong width"); }
        for (Eigen::Index c = 0; c < cols; ++c) { m(r, c) = row[static_cast<std::size_t>(c)]; }
    }
    return m;
}

Eigen::MatrixXd to_lower(const nlohmann::json& j) {
    const auto n = static_cast<Eigen::Index>(j.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto row = j[static_cast<std::size_t>(r)].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(row.size()) != r + 1) { throw DataError("checkpoint triangular row has wrong width"); }
        for (Eigen::Index c = 0; c <= r; ++c) { m(r, c) = row[static_cast<std::size_t>(c)]; }
    }
    return m;
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& cp) {
    const auto& p = cp.params;
    const KernelParams kernel = p.kernel();
    const ConvolutionConfig conv = p.convolution();

    ordered_json doc;
    doc["format"] = "gclp-checkpoint";
    doc["format_version"] = kCheckpointVersion;
    doc["node_ids"] = cp.ids.tokens();
    doc["graph_fingerprint"] = {{"nodes", cp.graph.nodes}, {"edges", cp.graph.edges}, {"hash", cp.graph.hash}};
    doc["convolution"] = {{"depth", conv.depth()}, {"lambda_logits", vec(p.lambda_logits)}, {"lambda", conv.weights()}};
    doc["kernel"] = {{"log_variance", p.log_variance},
                     {"variance", kernel.variance},
                     {"log_lengthscales", vec(p.log_lengthscales)},
                     {"lengthscales", vec(kernel.lengthscales)}};
    auto edges = ordered_json::array();
    for (const auto& e : cp.inducing_graph.edges()) { edges.push_back({e.first, e.second}); }
    doc["inducing"] = {{"node_count", cp.inducing_graph.node_count()},
                       {"edges", edges},
                       {"features", rows_of(p.inducing_features)}};
    doc["variational"] = {{"whitened_mean", vec(p.variational.mean)},
                          {"scale_raw", lower_rows_of(p.variational.scale_raw)},
                          {"scale", lower_rows_of(p.variational.scale())}};
    doc["training"] = {{"learning_rate", cp.training.learning_rate},
                       {"batch_size", cp.training.batch_size},
                       {"max_epochs", cp.training.max_epochs},
                       {"patience_epochs", cp.training.patience_epochs},
                       {"elbo_tolerance", cp.training.elbo_tolerance},
                       {"quadrature_points", cp.quadrature_points},
                       {"test_fraction", cp.test_fraction},
                       {"epochs_run", cp.epochs_run}};
    doc["final_elbo"] = cp.final_elbo;
    doc["seed"] = cp.seed;
    return doc.dump(1) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.at("format") != "gclp-checkpoint") { throw DataError("not a checkpoint document"); }
        if (doc.at("format_version").get<int>() != kCheckpointVersion) {
            throw DataError("unsupported checkpoint version " + doc.at("format_version").dump());
        }
        Checkpoint cp;
        cp.ids = NodeIdMap(doc.at("node_ids").get<std::vector<std::string>>());
        const auto& fp = doc.at("graph_fingerprint");
        cp.graph = {fp.at("nodes").get<Index>(), fp.at("edges").get<Index>(), fp.at("hash").get<std::string>()};

        auto& p = cp.params;
        p.lambda_logits = to_vec(doc.at("convolution").at("lambda_logits"));
        p.log_variance = doc.at("kernel").at("log_variance").get<double>();
        p.log_lengthscales = to_vec(doc.at("kernel").at("log_lengthscales"));

        const auto& ind = doc.at("inducing");
        std::vector<NodePair> edges;
        for (const auto& e : ind.at("edges")) { edges.emplace_back(e.at(0).get<Index>(), e.at(1).get<Index>()); }
        cp.inducing_graph = GraphDomain(ind.at("node_count").get<Index>(), std::move(edges));
        p.inducing_features = to_matrix(ind.at("features"), p.log_lengthscales.size());

        p.variational.mean = to_vec(doc.at("variational").at("whitened_mean"));
        p.variational.scale_raw = to_lower(doc.at("variational").at("scale_raw"));

        const auto& tr = doc.at("training");
        cp.training.learning_rate = tr.at("learning_rate").get<double>();
        cp.training.batch_size = tr.at("batch_size").get<Index>();
        cp.training.max_epochs = tr.at("max_epochs").get<Index>();
        cp.training.patience_epochs = tr.at("patience_epochs").get<Index>();
        cp.training.elbo_tolerance = tr.at("elbo_tolerance").get<double>();
        cp.quadrature_points = tr.at("quadrature_points").get<int>();
        cp.training.quadrature_points = cp.quadrature_points;
        cp.test_fraction = tr.at("test_fraction").get<double>();
        cp.epochs_run = tr.at("epochs_run").get<Index>();
        cp.final_elbo = doc.at("final_elbo").get<double>();
        cp.seed = doc.at("seed").get<std::uint64_t>();
        cp.training.seed = cp.seed;
        return cp;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed checkpoint: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("invalid checkpoint: ") + e.what());
    }
}

LinkGpModel restore_model(const Checkpoint& cp, GraphDomain observed_graph, FeatureMatrix features,
                          const NodeIdMap& ids) {
    if (ids.tokens() != cp.ids.tokens()) { throw DataError("node id mapping differs from the checkpoint"); }
    if (fingerprint(observed_graph) != cp.graph) {
        throw DataError("training graph fingerprint differs from the checkpoint (was the same split used?)");
    }
    return LinkGpModel(std::move(observed_graph), std::move(features), cp.inducing_graph, cp.params,
                       cp.quadrature_points);
}

}  // namespace gclp
