#pragma once

#include <vector>

namespace gclp {

/// Scores with binary labels; both vectors have the same length.
struct ScoredPairs {
    std::vector<double> scores;
    std::vector<int> labels;
};

/// Mann-Whitney AUC: P(score_pos > score_neg) + 1/2 P(tie), from average ranks.
/// Throws std::invalid_argument unless both classes are present.
double auc(const ScoredPairs& sp);

/// sum_k (recall_k - recall_{k-1}) precision_k over descending-score prefixes.
/// Equal scores keep their input order, so inputs with many ties depend on that order.
/// Throws std::invalid_argument when there are no positives.
double average_precision(const ScoredPairs& sp);

}  // namespace gclp
