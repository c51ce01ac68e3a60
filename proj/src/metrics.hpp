// Classification metrics: accuracy, balanced accuracy, rank-based AUROC
// (midrank ties), support-weighted one-vs-rest AUROC and average precision.

#pragma once

#include <vector>

namespace sigpath {

double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// mean per-class recall over the classes present in y_true
double balanced_accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// one-vs-rest AUROC for a binary 0/1 label vector; ties get midranks;
// degenerate inputs (no positives or no negatives) score 0.5
double auroc_binary(const std::vector<int>& y_true, const std::vector<double>& scores);

// per-class one-vs-rest AUROC averaged with weights = class support / n
double weighted_auroc(const std::vector<int>& y_true,
                      const std::vector<std::vector<double>>& scores);

// average precision over the score-sorted sweep, tie groups processed as one
// block; throws when there are no positives
double average_precision(const std::vector<int>& y_true, const std::vector<double>& scores);

// support-weighted one-vs-rest average precision (multi-class reporting)
double weighted_average_precision(const std::vector<int>& y_true,
                                  const std::vector<std::vector<double>>& scores);

}  // namespace sigpath
