#include "gclp/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gclp {

namespace {

void check_lengths(const ScoredPairs& sp) {
    if (sp.scores.size() != sp.labels.size()) { throw std::invalid_argument("scores and labels differ in length"); }
    for (int l : sp.labels) {
        if (l != 0 && l != 1) { throw std::invalid_argument("labels must be 0 or 1"); }
    }
}

}  // namespace

double auc(const ScoredPairs& sp) {
    check_lengths(sp);
    const std::size_t n = sp.scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sp.scores[a] < sp.scores[b]; });

    double positive_rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sp.scores[order[j]] == sp.scores[order[i]]) { ++j; }
        const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) {
            if (sp.labels[order[k]] == 1) {
                positive_rank_sum += mid_rank;
                ++n_pos;
            }
        }
        i = j;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) { throw std::invalid_argument("AUC needs at least one positive and one negative"); }
    const double np = static_cast<double>(n_pos);
    return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double average_precision(const ScoredPairs& sp) {
    check_lengths(sp);
    const std::size_t n = sp.scores.size();
    const auto n_pos = static_cast<std::size_t>(std::count(sp.labels.begin(), sp.labels.end(), 1));
    if (n_pos == 0) { throw std::invalid_argument("average precision needs at least one positive"); }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sp.scores[a] > sp.scores[b]; });
    double ap = 0.0;
    double previous_recall = 0.0;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (sp.labels[order[k]] == 1) { ++hits; }
        const double recall = static_cast<double>(hits) / static_cast<double>(n_pos);
        const double precision = static_cast<double>(hits) / static_cast<double>(k + 1);
        ap += (recall - previous_recall) * precision;
        previous_recall = recall;
    }
    return ap;
}

}  // namespace gclp
