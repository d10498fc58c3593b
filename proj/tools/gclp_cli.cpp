// gclp: train and evaluate graph-convolutional GP link predictors from edge lists.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gclp/analysis.hpp"
#include "gclp/checkpoint.hpp"
#include "gclp/dataset.hpp"
#include "gclp/errors.hpp"
#include "gclp/io.hpp"
#include "gclp/metrics.hpp"
#include "gclp/svgp.hpp"
#include "gclp/training.hpp"

namespace {

using namespace gclp;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalOptions {
    std::uint64_t seed{0};
    std::string edges;
    std::string features;
    std::string checkpoint;
    std::string out;
    std::string split;
};

struct TrainOptions {
    TrainingConfig config;
    Index depth{2};
    std::vector<double> lambda_init;
    double lengthscale_init{1.0};
    double variance_init{1.0};
    Index inducing_nodes{0};
    Index inducing_edges{0};
    double test_fraction{0.1};
};

struct PredictOptions {
    std::string score_mode{"quadrature"};
};

struct AnalysisOptions {
    std::optional<Index> center;
    Index max_distance{5};
    Index k_max{9};
    Index samples{5000};
    double lengthscale{1.0};
    double variance{1.0};
    double jitter{1e-8};
};

struct GradcheckOptions {
    double step{1e-5};
    double tolerance{1e-4};
    Index max_pairs{64};
    Index depth{2};
    Index inducing_nodes{0};
    Index inducing_edges{0};
    double test_fraction{0.1};
};

std::string require(const std::string& value, const char* flag) {
    if (value.empty()) { throw UsageError(std::string("missing required option ") + flag); }
    return value;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) { throw DataError("cannot open '" + path + "'"); }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) { throw DataError("cannot write '" + path + "'"); }
    out << text;
    if (!out) { throw DataError("write failed for '" + path + "'"); }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Inputs {
    LoadedGraph loaded;
    FeatureMatrix features;
};

Inputs load_inputs(const GlobalOptions& g, bool need_features) {
    Inputs in{read_edge_list_file(require(g.edges, "--edges")), {}};
    if (need_features) { in.features = read_features_file(require(g.features, "--features"), in.loaded.ids); }
    return in;
}

LinkDataset load_split(const GlobalOptions& g, const Inputs& in, double test_fraction, std::uint64_t seed) {
    if (!g.split.empty()) { return split_from_manifest_json(read_text(g.split), in.loaded.graph, in.loaded.ids); }
    return split_dataset(in.loaded.graph, test_fraction, seed);
}

std::vector<double> resolve_lambda_init(const std::vector<double>& given, Index depth) {
    if (!given.empty()) {
        if (given.size() != depth) {
            throw UsageError("--lambda-init needs exactly " + std::to_string(depth) + " values for --K " +
                             std::to_string(depth));
        }
        return given;
    }
    std::vector<double> out{0.5, 0.3};
    out.resize(depth, 0.3);
    return out;
}

int run_stats(const GlobalOptions& g) {
    const auto in = load_inputs(g, false);
    const auto s = dataset_stats(in.loaded.graph);
    char buf[160];
    std::snprintf(buf, sizeof buf, "nodes %zu\nedges %zu\naverage_degree %.2f\n", s.nodes, s.edges, s.average_degree);
    write_output(g.out, buf);
    return 0;
}

int run_split(const GlobalOptions& g, const TrainOptions& t) {
    const auto in = load_inputs(g, false);
    const auto ds = split_dataset(in.loaded.graph, t.test_fraction, g.seed);
    write_output(g.out, split_manifest_json(ds, in.loaded.ids));
    return 0;
}

int run_train(const GlobalOptions& g, TrainOptions t) {
    const std::string target = g.checkpoint.empty() ? require(g.out, "--checkpoint") : g.checkpoint;
    t.config.seed = g.seed;
    t.config.validate();

    auto in = load_inputs(g, true);
    auto ds = load_split(g, in, t.test_fraction, g.seed);

    ModelInit init;
    init.depth = t.depth;
    init.lambda_init = resolve_lambda_init(t.lambda_init, t.depth);
    init.lengthscale_init = t.lengthscale_init;
    init.variance_init = t.variance_init;
    init.inducing_nodes = t.inducing_nodes;
    init.inducing_edges = t.inducing_edges;
    init.quadrature_points = t.config.quadrature_points;

    auto model = initialize_model(ds.observed_graph, in.features, init, g.seed);
    const auto result = train(model, ds.train, t.config);

    const auto cp = make_checkpoint(model, in.loaded.ids, t.config, ds.test_fraction, result.final_elbo,
                                    result.epochs_run, g.seed);
    write_output(target, checkpoint_to_json(cp));
    std::fprintf(stderr, "trained %zu epochs%s, final ELBO %.6f\n", result.epochs_run,
                 result.stopped_early ? " (converged)" : "", result.final_elbo);
    return 0;
}

struct RestoredRun {
    Checkpoint cp;
    LinkDataset ds;
    LinkGpModel model;
};

RestoredRun restore_run(const GlobalOptions& g) {
    auto cp = checkpoint_from_json(read_text(require(g.checkpoint, "--checkpoint")));
    auto in = load_inputs(g, true);
    auto ds = load_split(g, in, cp.test_fraction, cp.seed);
    auto model = restore_model(cp, ds.observed_graph, in.features, in.loaded.ids);
    return {std::move(cp), std::move(ds), std::move(model)};
}

ScoreMode parse_score_mode(const std::string& s) {
    if (s == "quadrature") { return ScoreMode::expected_probability; }
    if (s == "sigmoid-mean") { return ScoreMode::sigmoid_of_mean; }
    throw UsageError("unknown score mode '" + s + "'");
}

int run_predict(const GlobalOptions& g, const PredictOptions& p) {
    const auto mode = parse_score_mode(p.score_mode);
    const auto run = restore_run(g);
    std::vector<NodePair> pairs;
    pairs.reserve(run.ds.test.size());
    for (const auto& lp : run.ds.test) { pairs.push_back(lp.pair); }
    const auto pred = run.model.predict(pairs);
    const auto scores = run.model.link_scores(pairs, mode);

    std::string csv = "u,v,label,mean,variance,score\n";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        csv += run.cp.ids.token(pairs[i].first) + "," + run.cp.ids.token(pairs[i].second) + "," +
               std::to_string(run.ds.test[i].label) + "," + format_double(pred.mean(r)) + "," +
               format_double(pred.variance(r)) + "," + format_double(scores(r)) + "\n";
    }
    write_output(g.out, csv);
    return 0;
}

int run_evaluate(const GlobalOptions& g, const PredictOptions& p) {
    const auto mode = parse_score_mode(p.score_mode);
    const auto run = restore_run(g);
    std::vector<NodePair> pairs;
    ScoredPairs sp;
    for (const auto& lp : run.ds.test) {
        pairs.push_back(lp.pair);
        sp.labels.push_back(lp.label);
    }
    const auto scores = run.model.link_scores(pairs, mode);
    sp.scores.assign(scores.data(), scores.data() + scores.size());

    nlohmann::ordered_json doc;
    doc["auc"] = auc(sp);
    doc["ap"] = average_precision(sp);
    doc["n_test"] = pairs.size();
    doc["elbo_final"] = run.cp.final_elbo;
    doc["seed"] = run.cp.seed;
    write_output(g.out, doc.dump(2) + "\n");
    return 0;
}

int run_analyze_covariance(const GlobalOptions& g, const AnalysisOptions& a) {
    const auto in = load_inputs(g, true);
    const auto& graph = in.loaded.graph;
    const Index center = a.center ? *a.center : pick_profile_center(graph, a.max_distance, g.seed);
    if (center >= graph.node_count()) { throw UsageError("--center is out of range"); }
    const auto params = KernelParams::isotropic(a.variance, a.lengthscale, in.features.dimension());
    const auto rows = covariance_profile_sweep(graph, in.features, params, center, a.max_distance, a.k_max);
    std::fprintf(stderr, "center node '%s'\n", in.loaded.ids.token(center).c_str());
    write_output(g.out, covariance_profile_csv(rows));
    return 0;
}

int run_analyze_dirichlet(const GlobalOptions& g, const AnalysisOptions& a) {
    const auto in = load_inputs(g, true);
    const auto params = KernelParams::isotropic(a.variance, a.lengthscale, in.features.dimension());
    const auto norms = dirichlet_sweep(in.loaded.graph, in.features, params, a.k_max, a.samples, g.seed, a.jitter);
    write_output(g.out, dirichlet_sweep_csv(norms));
    return 0;
}

int run_gradcheck(const GlobalOptions& g, const GradcheckOptions& o) {
    std::optional<LinkGpModel> model;
    std::vector<LabelledPair> data;
    if (!g.checkpoint.empty()) {
        auto run = restore_run(g);
        data = run.ds.train;
        model.emplace(std::move(run.model));
    } else {
        auto in = load_inputs(g, true);
        auto ds = load_split(g, in, o.test_fraction, g.seed);
        ModelInit init;
        init.depth = o.depth;
        init.lambda_init = resolve_lambda_init({}, o.depth);
        init.inducing_nodes = o.inducing_nodes;
        init.inducing_edges = o.inducing_edges;
        model.emplace(initialize_model(ds.observed_graph, in.features, init, g.seed));
        data = ds.train;
    }
    if (data.size() > o.max_pairs) {
        std::mt19937_64 rng(g.seed);
        std::shuffle(data.begin(), data.end(), rng);
        data.resize(o.max_pairs);
    }
    const auto report = gradient_check(*model, data, o.step);
    std::string text;
    char buf[128];
    for (const auto& [group, err] : report.per_group) {
        std::snprintf(buf, sizeof buf, "%s %.3e\n", to_string(group).c_str(), err);
        text += buf;
    }
    std::snprintf(buf, sizeof buf, "max %.3e\n", report.max_relative_error);
    text += buf;
    write_output(g.out, text);
    if (!(report.max_relative_error < o.tolerance)) {
        throw NumericalError("gradient check exceeded tolerance " + format_double(o.tolerance));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-convolutional Gaussian process link prediction"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--edges", g.edges, "Edge list file");
    app.add_option("--features", g.features, "Node feature file");
    app.add_option("--checkpoint", g.checkpoint, "Checkpoint JSON (written by train, read by the rest)");
    app.add_option("--out", g.out, "Output file (default: stdout)");
    app.add_option("--split", g.split, "Split manifest JSON (default: re-derive from the seed)");

    TrainOptions t;
    PredictOptions p;
    AnalysisOptions a;
    GradcheckOptions gc;

    auto* stats = app.add_subcommand("stats", "Node count, edge count and average degree");
    auto* split = app.add_subcommand("split", "Write a train/test split manifest");
    split->add_option("--test-fraction", t.test_fraction, "Share of edges held out")->capture_default_str();

    auto* tr = app.add_subcommand("train", "Fit a model and write a checkpoint");
    tr->add_option("--test-fraction", t.test_fraction, "Share of edges held out")->capture_default_str();
    tr->add_option("--learning-rate", t.config.learning_rate)->capture_default_str();
    tr->add_option("--batch-size", t.config.batch_size)->capture_default_str();
    tr->add_option("--max-epochs", t.config.max_epochs)->capture_default_str();
    tr->add_option("--patience", t.config.patience_epochs, "Epoch window for the ELBO stopping rule")
        ->capture_default_str();
    tr->add_option("--elbo-tolerance", t.config.elbo_tolerance)->capture_default_str();
    tr->add_option("--quadrature-points", t.config.quadrature_points)->capture_default_str();
    tr->add_option("--K", t.depth, "Number of convolution steps")->capture_default_str();
    tr->add_option("--lambda-init", t.lambda_init, "Comma-separated initial weights, one per step (default 0.5,0.3)")
        ->delimiter(',');
    tr->add_option("--lengthscale-init", t.lengthscale_init)->capture_default_str();
    tr->add_option("--variance-init", t.variance_init)->capture_default_str();
    tr->add_option("--inducing-nodes", t.inducing_nodes, "0 selects half the node count");
    tr->add_option("--inducing-edges", t.inducing_edges, "0 selects twice the inducing node count");

    auto* pr = app.add_subcommand("predict", "Write test-pair predictions as CSV");
    auto* ev = app.add_subcommand("evaluate", "Test AUC and AP as JSON");
    for (auto* sub : {pr, ev}) {
        sub->add_option("--score-mode", p.score_mode, "quadrature or sigmoid-mean")->capture_default_str();
    }

    auto* cov = app.add_subcommand("analyze-covariance", "Mean covariance by geodesic distance, per K");
    cov->add_option("--center", a.center, "Center node index (default: seeded choice)");
    cov->add_option("--max-distance", a.max_distance)->capture_default_str();
    auto* dir = app.add_subcommand("analyze-dirichlet", "Mean Dirichlet norm of prior samples, per K");
    dir->add_option("--samples", a.samples)->capture_default_str();
    dir->add_option("--jitter", a.jitter, "Relative jitter on the base kernel")->capture_default_str();
    for (auto* sub : {cov, dir}) {
        sub->add_option("--k-max", a.k_max)->capture_default_str();
        sub->add_option("--lengthscale", a.lengthscale)->capture_default_str();
        sub->add_option("--variance", a.variance)->capture_default_str();
    }

    auto* grad = app.add_subcommand("gradcheck", "Compare analytic ELBO gradients with finite differences");
    grad->add_option("--step", gc.step)->capture_default_str();
    grad->add_option("--tolerance", gc.tolerance)->capture_default_str();
    grad->add_option("--max-pairs", gc.max_pairs)->capture_default_str();
    grad->add_option("--K", gc.depth)->capture_default_str();
    grad->add_option("--inducing-nodes", gc.inducing_nodes);
    grad->add_option("--inducing-edges", gc.inducing_edges);
    grad->add_option("--test-fraction", gc.test_fraction)->capture_default_str();

    for (auto* sub : app.get_subcommands({})) { sub->fallthrough(); }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*stats) { return run_stats(g); }
        if (*split) { return run_split(g, t); }
        if (*tr) { return run_train(g, t); }
        if (*pr) { return run_predict(g, p); }
        if (*ev) { return run_evaluate(g, p); }
        if (*cov) { return run_analyze_covariance(g, a); }
        if (*dir) { return run_analyze_dirichlet(g, a); }
        if (*grad) { return run_gradcheck(g, gc); }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
