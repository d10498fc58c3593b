// Acceptance suite: one line per criterion, non-zero exit if any gating criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "gclp/analysis.hpp"
#include "gclp/checkpoint.hpp"
#include "gclp/dataset.hpp"
#include "gclp/io.hpp"
#include "gclp/metrics.hpp"
#include "gclp/svgp.hpp"
#include "gclp/training.hpp"
#include "oracles.hpp"

using namespace gclp;

namespace {

enum class Outcome { pass, fail, skip };

struct Verdict {
    Outcome outcome{Outcome::fail};
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<oracle::Edge> as_edges(const std::vector<NodePair>& p) {
    std::vector<oracle::Edge> out;
    for (const auto& e : p) { out.emplace_back(e.first, e.second); }
    return out;
}

std::vector<NodePair> all_pairs(Index n) {
    std::vector<NodePair> out;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) { out.emplace_back(i, j); }
    }
    return out;
}

// 1. Closed-form link kernel against the empirical covariance of the finite-L pair construction.
Verdict kernel_oracle() {
    const std::vector<oracle::Edge> edges{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    const auto g = oracle::to_graph(4, edges);
    std::mt19937_64 rng(1);
    const FeatureMatrix x(oracle::random_matrix(4, 3, rng, 0.7));
    const auto khat = convolved_node_kernel(g, ConvolutionConfig({0.5, 0.3}), KernelParams::isotropic(1.0, 1.0, 3), x);
    std::vector<NodePair> pairs;
    for (auto [i, j] : edges) { pairs.emplace_back(i, j); }
    const Eigen::MatrixXd exact = pair_product_kernel(khat, pairs, pairs);
    const Eigen::MatrixXd mc = oracle::mc_link_covariance(khat, edges, 200000, 7);
    const double err = ((mc - exact).array().abs() / exact.array().abs()).maxCoeff();
    return {err < 0.02 ? Outcome::pass : Outcome::fail, "max_rel_err=" + fmt("%.4f", err) + " (tol 0.02, L=200000)"};
}

// 2. Fully convolved kernel against the explicit neighbourhood double sum.
Verdict double_sum() {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::size_t> size(4, 15);
    std::uniform_real_distribution<double> density(0.15, 0.5);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = size(rng);
        const auto edges = oracle::random_edges(n, density(rng), rng);
        const Eigen::MatrixXd xv = oracle::random_matrix(static_cast<Eigen::Index>(n), 3, rng);
        const KernelParams p(1.2, Eigen::Vector3d(0.8, 1.0, 1.5));
        const Eigen::MatrixXd k = oracle::rbf(xv, xv, 1.2, p.lengthscales);
        for (int depth = 1; depth <= 3; ++depth) {
            const auto khat = convolved_node_kernel(oracle::to_graph(n, edges), ConvolutionConfig::full(depth), p,
                                                    FeatureMatrix(xv));
            const auto ref = oracle::neighbourhood_double_sum(oracle::adjacency(n, edges), k, depth);
            worst = std::max(worst, (khat - ref).cwiseAbs().maxCoeff());
        }
    }
    return {worst < 1e-10 ? Outcome::pass : Outcome::fail, "max_abs_err=" + fmt("%.3e", worst) + " (tol 1e-10, 20 graphs, K=1..3)"};
}

// 3. Analytic ELBO gradient against central differences.
Verdict gradients() {
    std::mt19937_64 rng(3);
    const auto g = oracle::to_graph(8, oracle::random_edges(8, 0.4, rng));
    const FeatureMatrix x(oracle::random_matrix(8, 2, rng));
    ModelInit init;
    init.inducing_nodes = 4;
    init.inducing_edges = 4;
    auto model = initialize_model(g, x, init, 3);
    auto& p = model.params();
    p.variational.mean = oracle::random_matrix(4, 1, rng, 0.5);
    Eigen::MatrixXd l = oracle::random_matrix(4, 4, rng, 0.3);
    p.variational.scale_raw = l.triangularView<Eigen::Lower>();
    p.log_variance = 0.3;
    p.log_lengthscales = Eigen::Vector2d(0.2, -0.1);
    std::vector<LabelledPair> data;
    for (const auto& e : all_pairs(8)) { data.push_back({e, g.has_edge(e.first, e.second) ? 1 : 0}); }
    const auto report = gradient_check(model, data, 1e-5);
    std::string detail = "max_rel_err=" + fmt("%.3e", report.max_relative_error) + " (tol 1e-4;";
    for (const auto& [group, err] : report.per_group) { detail += " " + to_string(group) + "=" + fmt("%.1e", err); }
    detail += ")";
    return {report.max_relative_error < 1e-4 ? Outcome::pass : Outcome::fail, detail};
}

// 4. KL at the prior, prior predictive, whitened vs unwhitened predictive.
Verdict svgp_identities() {
    std::mt19937_64 rng(4);
    const GraphDomain g(6, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {4, 5}, {3, 5}});
    const Eigen::MatrixXd x = oracle::random_matrix(6, 2, rng);
    const double nu = 1.4;
    const Eigen::Vector2d ls(0.9, 1.3);
    ModelParameters p;
    p.log_variance = std::log(nu);
    p.log_lengthscales = ls.array().log().matrix();
    p.lambda_logits = ConvolutionConfig({0.5, 0.3}).logits();
    p.inducing_features = x;
    p.variational = VariationalState::prior(g.edge_count());
    const LinkGpModel prior_model(g, FeatureMatrix(x), g, p);

    const double kl = kl_term(p.variational);
    const auto pairs = all_pairs(6);
    const auto s = oracle::normalized(oracle::adjacency(6, as_edges(g.edges())));
    const auto pm = oracle::interpolated_product(s, {0.5, 0.3});
    const Eigen::MatrixXd k = oracle::rbf(x, x, nu, ls);
    const Eigen::MatrixXd khat = pm * k * pm.transpose();
    const Eigen::VectorXd cbb = oracle::link_cov(khat, as_edges(pairs), as_edges(pairs)).diagonal();
    const auto prior_pred = prior_model.predict(pairs);
    const double prior_mean_err = prior_pred.mean.cwiseAbs().maxCoeff();
    const double prior_var_err = (prior_pred.variance - cbb).cwiseAbs().maxCoeff();

    p.variational.mean = oracle::random_matrix(7, 1, rng);
    Eigen::MatrixXd raw = oracle::random_matrix(7, 7, rng, 0.3);
    p.variational.scale_raw = raw.triangularView<Eigen::Lower>();
    const LinkGpModel model(g, FeatureMatrix(x), g, p);
    const Eigen::MatrixXd cross = pm * k;
    const auto ind = as_edges(g.edges());
    const Eigen::MatrixXd cbu = oracle::link_cov(cross, as_edges(pairs), ind);
    Eigen::MatrixXd cuu = oracle::link_cov(k, ind, ind);
    cuu.diagonal().array() += 1e-6 * nu;
    const Eigen::MatrixXd r = cuu.llt().matrixL();
    const Eigen::MatrixXd l = p.variational.scale();
    const auto ref = oracle::unwhitened_predict(cbu, cuu, cbb, r * p.variational.mean, r * l * l.transpose() * r.transpose());
    const auto pred = model.predict(pairs);
    const double dual = std::max((pred.mean - ref.mean).cwiseAbs().maxCoeff(), (pred.variance - ref.variance).cwiseAbs().maxCoeff());

    const bool ok = std::abs(kl) < 1e-12 && prior_mean_err < 1e-10 && prior_var_err < 1e-10 && dual < 1e-8;
    return {ok ? Outcome::pass : Outcome::fail, "kl_prior=" + fmt("%.1e", kl) + " prior_mean_err=" + fmt("%.1e", prior_mean_err) +
                                                    " prior_var_err=" + fmt("%.1e", prior_var_err) +
                                                    " whitened_vs_unwhitened=" + fmt("%.1e", dual) + " (tol 1e-10/1e-8)"};
}

// 5. Gauss-Hermite expected log-likelihood against Monte Carlo over the grid.
Verdict quadrature() {
    double worst = 0.0;
    std::uint64_t seed = 500;
    for (int m = -3; m <= 3; ++m) {
        for (double v : {0.1, 1.0, 10.0}) {
            for (int y : {0, 1}) {
                const double gh = bernoulli_expected_loglik(m, v, y, 20);
                const double mc = oracle::mc_expected_loglik_antithetic(m, v, y, 10'000'000, seed++);
                worst = std::max(worst, std::abs(gh - mc));
            }
        }
    }
    return {worst < 1e-3 ? Outcome::pass : Outcome::fail,
            "max_abs_err=" + fmt("%.2e", worst) + " (tol 1e-3, 42 grid points, 1e7 samples each)"};
}

struct TrendInputs {
    GraphDomain graph;
    FeatureMatrix features;
    std::string label;
};

// Seeded sparse random graph on 300 nodes, i.i.d. 64-dim Gaussian features with per-dimension variance 1/64.
TrendInputs synthetic_trend_inputs() {
    std::mt19937_64 rng(6);
    const auto edges = oracle::random_edges(300, 3.0 / 299.0, rng);
    Eigen::MatrixXd x = oracle::random_matrix(300, 64, rng, 1.0 / 8.0);
    return {oracle::to_graph(300, edges), FeatureMatrix(x), "random300"};
}

std::string trend_detail(const std::vector<double>& norms, const std::vector<double>& ratio) {
    std::string d = "dirichlet=[";
    for (std::size_t i = 0; i < norms.size(); ++i) { d += (i ? "," : "") + fmt("%.4g", norms[i]); }
    d += "] d1/d5=[";
    for (std::size_t i = 0; i < ratio.size(); ++i) { d += (i ? "," : "") + fmt("%.4g", ratio[i]); }
    return d + "]";
}

struct TrendResult {
    bool dirichlet_decreasing{false};
    bool ratio_decreasing{false};
    std::string detail;
};

TrendResult figure_trends(const TrendInputs& in) {
    const auto params = KernelParams::isotropic(1.0, 1.0, in.features.dimension());
    const auto norms = dirichlet_sweep(in.graph, in.features, params, 9, 5000, 66);
    bool dir_ok = true;
    for (std::size_t k = 1; k < norms.size(); ++k) { dir_ok = dir_ok && norms[k] < norms[k - 1]; }

    const Index center = pick_profile_center(in.graph, 5, 66);
    const auto rows = covariance_profile_sweep(in.graph, in.features, params, center, 5, 9);
    std::vector<double> ratio;
    for (Index k = 0; k <= 9; ++k) {
        const auto& d1 = rows[k * 5 + 0].mean_covariance;
        const auto& d5 = rows[k * 5 + 4].mean_covariance;
        ratio.push_back(d1 && d5 ? *d1 / *d5 : std::nan(""));
    }
    bool ratio_ok = true;
    for (std::size_t k = 1; k < ratio.size(); ++k) { ratio_ok = ratio_ok && ratio[k] <= ratio[k - 1]; }
    return {dir_ok, ratio_ok, in.label + " " + trend_detail(norms, ratio)};
}

// 6. Dirichlet norm and covariance-ratio trends over K = 0..9.
Verdict trends() {
    std::vector<TrendInputs> inputs{synthetic_trend_inputs()};
    const char* yeast_edges = std::getenv("GCLP_YEAST_EDGES");
    const char* yeast_features = std::getenv("GCLP_YEAST_FEATURES");
    if (yeast_edges && yeast_features) {
        auto loaded = read_edge_list_file(yeast_edges);
        auto x = read_features_file(yeast_features, loaded.ids);
        inputs.push_back({std::move(loaded.graph), std::move(x), "yeast"});
    }
    bool a = true, b = true;
    std::string detail;
    for (const auto& in : inputs) {
        const auto r = figure_trends(in);
        a = a && r.dirichlet_decreasing;
        b = b && r.ratio_decreasing;
        detail += r.detail + "; ";
    }
    detail += std::string("(a) dirichlet strictly decreasing: ") + (a ? "yes" : "no") +
              ", (b) d1/d5 ratio monotonically decreasing: " + (b ? "yes" : "no");
    return {a && b ? Outcome::pass : Outcome::fail, detail};
}

// Two-block graph: within-block edges with probability p_in, across with p_out.
// Features are one-hot community indicators.
struct BlockGraph {
    GraphDomain graph;
    FeatureMatrix features;
    NodeIdMap ids;
};

BlockGraph block_graph(std::uint64_t seed, Index n = 60, double p_in = 0.9, double p_out = 0.02) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<NodePair> edges;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 2);
    std::vector<std::string> tokens;
    for (Index i = 0; i < n; ++i) {
        x(static_cast<Eigen::Index>(i), i < n / 2 ? 0 : 1) = 1.0;
        tokens.push_back("n" + std::to_string(i));
        for (Index j = i + 1; j < n; ++j) {
            const bool same = (i < n / 2) == (j < n / 2);
            if (u(rng) < (same ? p_in : p_out)) { edges.emplace_back(i, j); }
        }
    }
    return {GraphDomain(n, edges), FeatureMatrix(x), NodeIdMap(tokens)};
}

double train_and_score(const BlockGraph& bg, std::uint64_t seed) {
    const auto ds = split_dataset(bg.graph, 0.1, seed);
    auto model = initialize_model(ds.observed_graph, bg.features, {}, seed);
    TrainingConfig cfg;
    cfg.seed = seed;
    train(model, ds.train, cfg);
    ScoredPairs sp;
    std::vector<NodePair> pairs;
    for (const auto& lp : ds.test) {
        pairs.push_back(lp.pair);
        sp.labels.push_back(lp.label);
    }
    const auto scores = model.link_scores(pairs, ScoreMode::expected_probability);
    sp.scores.assign(scores.data(), scores.data() + scores.size());
    return auc(sp);
}

// 7. End-to-end learning signal on a two-community graph.
Verdict learning_signal() {
    int good = 0;
    std::string detail = "auc=[";
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const double a = train_and_score(block_graph(seed), seed);
        if (a >= 0.85) { ++good; }
        detail += (seed > 1 ? "," : "") + fmt("%.4f", a);
    }
    detail += "] seeds_at_or_above_0.85=" + std::to_string(good) + "/5 (need 4)";
    return {good >= 4 ? Outcome::pass : Outcome::fail, detail};
}

// 8. Paper benchmark; runs only when edge and feature files are supplied.
Verdict benchmark() {
    struct Set {
        const char* name;
        const char* edges_env;
        const char* features_env;
        double target;
    };
    const Set sets[] = {{"usair", "GCLP_USAIR_EDGES", "GCLP_USAIR_FEATURES", 0.9501},
                        {"yeast", "GCLP_YEAST_EDGES", "GCLP_YEAST_FEATURES", 0.9583}};
    std::string detail;
    bool any = false, ok = true;
    for (const auto& s : sets) {
        const char* e = std::getenv(s.edges_env);
        const char* f = std::getenv(s.features_env);
        if (!e || !f) { continue; }
        any = true;
        auto loaded = read_edge_list_file(e);
        const auto x = read_features_file(f, loaded.ids);
        const BlockGraph bg{loaded.graph, x, loaded.ids};
        const double a = train_and_score(bg, 1);
        ok = ok && std::abs(a - s.target) <= 0.05;
        detail += std::string(s.name) + " auc=" + fmt("%.4f", a) + " target=" + fmt("%.4f", s.target) + "; ";
    }
    if (!any) { return {Outcome::skip, "no benchmark data (set GCLP_USAIR_EDGES/FEATURES, GCLP_YEAST_EDGES/FEATURES)"}; }
    return {ok ? Outcome::pass : Outcome::fail, detail + "(non-gating)"};
}

// 9. Metrics against brute force on random tie-free instances.
Verdict metric_oracles() {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<std::size_t> size(2, 500);
    std::uniform_real_distribution<double> prevalence(0.02, 0.98);
    int mismatches = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = size(rng);
        ScoredPairs sp;
        std::uniform_real_distribution<double> score(0.0, 1.0);
        std::set<double> seen;
        while (sp.scores.size() < n) {
            const double s = score(rng);
            if (seen.insert(s).second) { sp.scores.push_back(s); }
        }
        std::bernoulli_distribution coin(prevalence(rng));
        for (std::size_t i = 0; i < n; ++i) { sp.labels.push_back(coin(rng) ? 1 : 0); }
        sp.labels[0] = 1;
        sp.labels[1] = 0;
        if (auc(sp) != oracle::brute_force_auc(sp.scores, sp.labels)) { ++mismatches; }
        if (average_precision(sp) != oracle::prefix_scan_ap(sp.scores, sp.labels)) { ++mismatches; }
    }
    return {mismatches == 0 ? Outcome::pass : Outcome::fail,
            "exact_mismatches=" + std::to_string(mismatches) + " over 1000 instances (AUC and AP)"};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 10. Byte-identical split, checkpoint and evaluation output across two runs of the command-line tool.
Verdict determinism(const std::string& cli) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("gclp_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const auto bg = block_graph(10);
    {
        std::ofstream e(dir / "edges.txt");
        for (const auto& p : bg.graph.edges()) { e << bg.ids.token(p.first) << ' ' << bg.ids.token(p.second) << '\n'; }
        std::ofstream f(dir / "features.txt");
        for (Index i = 0; i < bg.ids.size(); ++i) {
            f << bg.ids.token(i) << ' ' << bg.features.values()(static_cast<Eigen::Index>(i), 0) << ' '
              << bg.features.values()(static_cast<Eigen::Index>(i), 1) << '\n';
        }
    }
    const std::string common = " --seed 10 --edges " + (dir / "edges.txt").string() + " --features " +
                               (dir / "features.txt").string();
    bool ok = true;
    for (int run = 0; run < 2; ++run) {
        const std::string r = std::to_string(run);
        const auto cp = (dir / ("cp" + r + ".json")).string();
        const std::string cmds[] = {
            cli + " split" + common + " --out " + (dir / ("split" + r + ".json")).string(),
            cli + " train" + common + " --max-epochs 40 --checkpoint " + cp + " 2>/dev/null",
            cli + " evaluate" + common + " --checkpoint " + cp + " --out " + (dir / ("eval" + r + ".json")).string(),
        };
        for (const auto& c : cmds) { ok = ok && std::system(c.c_str()) == 0; }
    }
    std::string detail = ok ? "" : "command failed; ";
    for (const char* stem : {"split", "cp", "eval"}) {
        const auto a = slurp(dir / (std::string(stem) + "0.json"));
        const auto b = slurp(dir / (std::string(stem) + "1.json"));
        const bool same = !a.empty() && a == b;
        ok = ok && same;
        detail += std::string(stem) + (same ? "=identical " : "=DIFFERENT ") + "(" + std::to_string(a.size()) + " bytes) ";
    }
    fs::remove_all(dir);
    return {ok ? Outcome::pass : Outcome::fail, detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : GCLP_CLI_PATH;
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        bool gating;
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "kernel oracle equivalence", 60, true, kernel_oracle},
        {2, "neighbourhood double sum", 10, true, double_sum},
        {3, "gradient correctness", 30, true, gradients},
        {4, "SVGP identities", 1e9, true, svgp_identities},
        {5, "quadrature accuracy", 1e9, true, quadrature},
        {6, "figure trends", 300, true, trends},
        {7, "end-to-end learning signal", 600, true, learning_signal},
        {8, "paper benchmark", 1e9, false, benchmark},
        {9, "metric oracles", 30, true, metric_oracles},
        {10, "determinism", 1e9, true, [&] { return determinism(cli); }},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {Outcome::fail, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (v.outcome == Outcome::pass && secs >= c.budget_s) {
            v.outcome = Outcome::fail;
            v.detail += " runtime over budget";
        }
        const char* tag = v.outcome == Outcome::pass ? "PASS" : v.outcome == Outcome::skip ? "SKIP" : "FAIL";
        std::printf("CRITERION %d %s: %s [%.1fs] %s\n", c.id, tag, c.name, secs, v.detail.c_str());
        std::fflush(stdout);
        if (v.outcome == Outcome::fail && c.gating) { ++failures; }
    }
    std::printf("%d gating criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
