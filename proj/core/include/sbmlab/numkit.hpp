#pragma once

#include <vector>

#include "sbmlab/model.hpp"
#include "sbmlab/rng.hpp"

namespace sbmlab {

/// Leading eigenpairs ordered by descending |lambda|. Each column is signed so
/// that its largest-magnitude entry is positive.
struct EigenPairs {
  Vector values;
  Matrix vectors;
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, double worst_residual);
  double worst_residual() const { return worst_residual_; }

 private:
  double worst_residual_;
};

/// Top-k eigenpairs of a symmetric matrix by magnitude. Dense
/// tridiagonalisation + implicit QL over the full spectrum, then truncation.
/// Throws ConvergenceFailure if the solver fails or any residual
/// ||M u - lambda u|| exceeds 1e-8 * max(1, |lambda|).
EigenPairs topk_eigen(const Matrix& m, int k);

struct KMeansOptions {
  int n_init = 10;
  int max_iter = 300;
  double tol = 1e-8;
};

struct KMeansResult {
  CommunityAssignment assignment;
  Matrix centers;
  double wcss = 0.0;
  int iterations = 0;
  /// WCSS after each Lloyd iteration of the selected restart.
  std::vector<double> wcss_trace;
  int restart = 0;
};

/// Lloyd's algorithm from k-means++ seeds, best of n_init restarts. Empty
/// clusters are reseeded on the point farthest from its centre, so every
/// cluster in the result is non-empty when rows >= k.
KMeansResult kmeans(const Matrix& points, int k, RngHandle& rng, const KMeansOptions& options = {});

}  // namespace sbmlab
