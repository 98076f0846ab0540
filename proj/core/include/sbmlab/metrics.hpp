#pragma once

#include <cstdint>
#include <vector>

#include "sbmlab/model.hpp"

namespace sbmlab {

class LengthMismatch : public Error {
 public:
  LengthMismatch(int truth, int pred);
};

/// counts(r, c) = #{i : truth_i = r + 1, pred_i = c + 1}; rows span truth.k(),
/// columns span pred.k().
struct ContingencyTable {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
  std::vector<std::int64_t> row_sums;
  std::vector<std::int64_t> col_sums;
  std::int64_t total = 0;

  /// True when the two partitions coincide up to relabelling.
  bool is_bijection() const;
};

ContingencyTable contingency(const CommunityAssignment& truth, const CommunityAssignment& pred);

/// Hubert-Arabie adjusted Rand index. A zero denominator gives 1 for identical
/// partitions and 0 otherwise.
double ari(const CommunityAssignment& truth, const CommunityAssignment& pred);

/// I(T;P) / sqrt(H(T) H(P)) in nats. When either entropy is zero: 1 for
/// identical partitions, 0 otherwise.
double nmi(const CommunityAssignment& truth, const CommunityAssignment& pred);

}  // namespace sbmlab
