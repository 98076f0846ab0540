#pragma once

// Mean-field variational Bayes for the SBM with a point-mass label family, a
// Gaussian family for the block means and a one-parameter family for the noise
// scale. Labels are updated by per-node argmin of a cost v_ic; the remaining
// variational parameters (a, delta, mu, Sigma) have closed-form updates.

#include <vector>

#include "sbmlab/model.hpp"
#include "sbmlab/rng.hpp"

namespace sbmlab {

struct VBConfig {
  /// Hyperparameter beta of the noise-scale family.
  double beta_hyper = 1.0;
  int max_iter = 100;
  double tol = 1e-6;
  /// Additive constant D in the objective. Never affects an update.
  double d_const = 0.0;

  void validate() const;
};

class EmptyClusterInit : public Error {
 public:
  explicit EmptyClusterInit(int cluster);
  int cluster() const { return cluster_; }

 private:
  int cluster_;
};

struct VBState {
  /// Every community is non-empty.
  CommunityAssignment z;
  /// Community sizes at the end of the previous iteration.
  std::vector<int> prev_sizes;
  double a_par = 0.0;
  double delta = 1.0;
  Matrix mu;
  /// Diagonal covariance entries, Sigma_cd = 1 / (delta n_c n_d).
  Matrix sigma;
  double objective = 0.0;
  int labels_changed = 0;
};

/// a = n^2, delta = 1 + sqrt(2 beta / n^2), mu and Sigma from block sums
/// under z0. Throws EmptyClusterInit if a community of z0 is empty.
VBState vb_init(const AdjacencyMatrix& a, int k, const CommunityAssignment& z0, const VBConfig& config = {});

/// v_ic for every community c, with the other labels read from state.z:
///   -K log(1 + 1/n_c(i)) - 2 sum_{j!=i} A_ij mu_{c z_j}
///   + delta [sum_{j!=i} mu_{c z_j}^2 + mu_cc^2 / 2]
///   + (sum_r n_r(i)/n_r^prev + 1/n_c^prev)^2 / 2
/// where n_c(i) counts nodes other than i in c. The cost is -inf when i is
/// the sole member of c.
std::vector<double> vb_costs(const VBState& state, const AdjacencyMatrix& a, int node);

/// Visits nodes in a random order and moves each to argmin_c v_ic, rejecting
/// any move that would empty its current community.
VBState vb_update_labels(const VBState& state, const AdjacencyMatrix& a, RngHandle& rng);

/// a = sum_ij mu_{z_i z_j}^2 + delta^-1 (sum_c n_c / n_c^prev)^2, then
/// delta = 1 + sqrt(2 beta / a). Uses mu before its refresh.
VBState vb_update_a_delta(const VBState& state, const VBConfig& config = {});

/// mu_cd = delta^-1 n_c^-1 n_d^-1 sum_ij A_ij [z_i = c, z_j = d] and the
/// matching Sigma; rolls prev_sizes forward.
VBState vb_update_mu_sigma(const VBState& state, const AdjacencyMatrix& a);

/// L = K(K+1)/4 log(delta / (4 beta e^2)) + sqrt(a beta / 2)
///     - 1/2 sum_ij A_ij mu_{z_i z_j} + (D + 1)(K(K+1)/2 + n log K).
double vb_objective(const VBState& state, const AdjacencyMatrix& a, const VBConfig& config = {});

struct VBTraceRow {
  int t = 0;
  double objective = 0.0;
  int labels_changed = 0;
};

struct VBResult {
  CommunityAssignment labels;
  std::vector<VBTraceRow> trace;
  bool converged = false;
  int iterations = 0;
  VBState state;
};

/// Random start with one seed node per community, then (labels, a/delta,
/// mu/Sigma, objective) until |L_{t-1} - L_t| <= tol or max_iter.
VBResult run_vb(const AdjacencyMatrix& a, int k, const VBConfig& config, RngHandle& rng);

}  // namespace sbmlab
