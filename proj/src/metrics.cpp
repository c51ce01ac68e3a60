#include "metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sigpath {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a == 0) throw std::invalid_argument("metrics: empty input");
  if (a != b) throw std::invalid_argument("metrics: length mismatch");
}

int max_label(const std::vector<int>& y) {
  int m = -1;
  for (int l : y) {
    if (l < 0) throw std::invalid_argument("metrics: negative label");
    m = std::max(m, l);
  }
  return m;
}

}  // namespace

double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  check_lengths(y_true.size(), y_pred.size());
  std::size_t hit = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hit += y_true[i] == y_pred[i];
  return static_cast<double>(hit) / static_cast<double>(y_true.size());
}

double balanced_accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  check_lengths(y_true.size(), y_pred.size());
  int classes = max_label(y_true) + 1;
  std::vector<std::size_t> support(classes, 0), correct(classes, 0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ++support[y_true[i]];
    if (y_true[i] == y_pred[i]) ++correct[y_true[i]];
  }
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < classes; ++c) {
    if (support[c] == 0) continue;  // absent classes are excluded from the mean
    sum += static_cast<double>(correct[c]) / static_cast<double>(support[c]);
    ++present;
  }
  return sum / present;
}

double auroc_binary(const std::vector<int>& y_true, const std::vector<double>& scores) {
  check_lengths(y_true.size(), scores.size());
  std::size_t n = y_true.size();
  std::size_t pos = 0;
  for (int l : y_true) pos += l != 0;
  std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) return 0.5;

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // midranks over tie groups
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (y_true[idx[k]] != 0) rank_sum_pos += midrank;
    }
    i = j;
  }
  double p = static_cast<double>(pos);
  return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

double weighted_auroc(const std::vector<int>& y_true,
                      const std::vector<std::vector<double>>& scores) {
  check_lengths(y_true.size(), scores.size());
  int classes = max_label(y_true) + 1;
  std::size_t width = scores[0].size();
  if (width < static_cast<std::size_t>(classes)) {
    throw std::invalid_argument("weighted_auroc: score matrix narrower than class count");
  }
  double out = 0.0;
  for (int c = 0; c < classes; ++c) {
    std::size_t support = 0;
    std::vector<int> onevs(y_true.size());
    std::vector<double> col(y_true.size());
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      onevs[i] = y_true[i] == c;
      support += onevs[i];
      col[i] = scores[i][c];
    }
    if (support == 0) continue;
    out += auroc_binary(onevs, col) * static_cast<double>(support) /
           static_cast<double>(y_true.size());
  }
  return out;
}

double average_precision(const std::vector<int>& y_true, const std::vector<double>& scores) {
  check_lengths(y_true.size(), scores.size());
  std::size_t total_pos = 0;
  for (int l : y_true) total_pos += l != 0;
  if (total_pos == 0) throw std::invalid_argument("average_precision: no positives");

  std::vector<std::size_t> idx(y_true.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double ap = 0.0;
  std::size_t seen = 0, hits = 0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    std::size_t group_hits = 0;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      group_hits += y_true[idx[j]] != 0;
      ++j;
    }
    double recall_before = static_cast<double>(hits) / static_cast<double>(total_pos);
    seen = j;
    hits += group_hits;
    double recall_after = static_cast<double>(hits) / static_cast<double>(total_pos);
    double precision = static_cast<double>(hits) / static_cast<double>(seen);
    ap += (recall_after - recall_before) * precision;
    i = j;
  }
  return ap;
}

double weighted_average_precision(const std::vector<int>& y_true,
                                  const std::vector<std::vector<double>>& scores) {
  check_lengths(y_true.size(), scores.size());
  int classes = max_label(y_true) + 1;
  double out = 0.0;
  for (int c = 0; c < classes; ++c) {
    std::size_t support = 0;
    std::vector<int> onevs(y_true.size());
    std::vector<double> col(y_true.size());
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      onevs[i] = y_true[i] == c;
      support += onevs[i];
      col[i] = scores[i][c];
    }
    if (support == 0) continue;
    out += average_precision(onevs, col) * static_cast<double>(support) /
           static_cast<double>(y_true.size());
  }
  return out;
}

}  // namespace sigpath
