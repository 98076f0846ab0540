#include "sbmlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sbmlab {

namespace {

double choose2(std::int64_t n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

// Summation in sorted order, so the result does not depend on label order.
double sorted_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

}  // namespace

LengthMismatch::LengthMismatch(int truth, int pred)
    : Error("label vectors differ in length: " + std::to_string(truth) + " vs " + std::to_string(pred)) {}

bool ContingencyTable::is_bijection() const {
  for (Eigen::Index r = 0; r < counts.rows(); ++r) {
    if (row_sums[r] == 0) continue;
    if ((counts.row(r).array() > 0).count() != 1) return false;
  }
  for (Eigen::Index c = 0; c < counts.cols(); ++c) {
    if (col_sums[c] == 0) continue;
    if ((counts.col(c).array() > 0).count() != 1) return false;
  }
  return true;
}

ContingencyTable contingency(const CommunityAssignment& truth, const CommunityAssignment& pred) {
  if (truth.size() != pred.size()) throw LengthMismatch(truth.size(), pred.size());
  ContingencyTable t;
  t.counts.setZero(truth.k(), pred.k());
  t.row_sums.assign(truth.k(), 0);
  t.col_sums.assign(pred.k(), 0);
  for (int i = 0; i < truth.size(); ++i) {
    ++t.counts(truth.index(i), pred.index(i));
    ++t.row_sums[truth.index(i)];
    ++t.col_sums[pred.index(i)];
  }
  t.total = truth.size();
  return t;
}

double ari(const CommunityAssignment& truth, const CommunityAssignment& pred) {
  const ContingencyTable t = contingency(truth, pred);
  double index = 0.0;
  for (Eigen::Index i = 0; i < t.counts.size(); ++i) index += choose2(t.counts.data()[i]);
  double rows = 0.0;
  double cols = 0.0;
  for (auto a : t.row_sums) rows += choose2(a);
  for (auto b : t.col_sums) cols += choose2(b);
  const double all_pairs = choose2(t.total);
  const double expected = all_pairs > 0.0 ? rows * cols / all_pairs : 0.0;
  const double max_index = 0.5 * (rows + cols);
  const double denom = max_index - expected;
  if (denom == 0.0) return t.is_bijection() ? 1.0 : 0.0;
  return std::clamp((index - expected) / denom, -1.0, 1.0);
}

double nmi(const CommunityAssignment& truth, const CommunityAssignment& pred) {
  const ContingencyTable t = contingency(truth, pred);
  const double n = static_cast<double>(t.total);
  if (n == 0.0) return 1.0;
  auto entropy = [n](const std::vector<std::int64_t>& sums) {
    std::vector<double> terms;
    for (auto s : sums) {
      if (s > 0) terms.push_back(-(s / n) * std::log(s / n));
    }
    return sorted_sum(std::move(terms));
  };
  const double ht = entropy(t.row_sums);
  const double hp = entropy(t.col_sums);
  if (ht <= 0.0 || hp <= 0.0) return t.is_bijection() ? 1.0 : 0.0;
  std::vector<double> terms;
  for (Eigen::Index r = 0; r < t.counts.rows(); ++r) {
    for (Eigen::Index c = 0; c < t.counts.cols(); ++c) {
      const double nrc = static_cast<double>(t.counts(r, c));
      if (nrc > 0.0) terms.push_back((nrc / n) * std::log(n * nrc / (static_cast<double>(t.row_sums[r]) * t.col_sums[c])));
    }
  }
  const double mi = sorted_sum(std::move(terms));
  return std::clamp(mi / std::sqrt(ht * hp), 0.0, 1.0);
}

}  // namespace sbmlab
