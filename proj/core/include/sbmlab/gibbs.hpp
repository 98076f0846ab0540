#pragma once

// Gibbs sampler for the hierarchical SBM
//   pi ~ Dir(alpha), B_kl ~ Beta(a, b), z_i ~ Mul(pi), A_ij | z, B ~ Ber(B_{z_i z_j})
// with the likelihood taken over ordered pairs i != j.

#include <functional>
#include <vector>

#include "sbmlab/model.hpp"
#include "sbmlab/rng.hpp"

namespace sbmlab {

struct GibbsConfig {
  double a = 2.0;
  double b_prior = 2.0;
  /// Dirichlet concentration; empty means all ones.
  std::vector<double> alpha_dir;
  int n_iter = 2000;
  int burn_in = 1000;
  int thin = 1;
  /// Use 1 instead of b_prior as the second Beta shape in both the B full
  /// conditional and the prior term.
  bool unit_beta_shape = false;
  /// Visit nodes in a fresh random order each sweep instead of 1..N.
  bool randomize_order = false;
  /// Independent chains from separate random starts.
  int chains = 1;

  void validate(int k) const;
  std::vector<double> concentration(int k) const;
  double second_shape() const { return unit_beta_shape ? 1.0 : b_prior; }
};

/// Block sufficient statistics over ordered pairs (i, j), i != j.
struct BlockStats {
  std::vector<int> sizes;  ///< n_k
  Matrix pairs;            ///< n_kl = n_k n_l - n_k [k == l]
  Matrix edges;            ///< A[kl] = sum of A_ij with z_i = k, z_j = l
};

BlockStats count_stats(const CommunityAssignment& z, const AdjacencyMatrix& a);

/// pi | . ~ Dir(alpha_1 + n_1, ..., alpha_K + n_K).
CommunityProportions sample_pi(const BlockStats& stats, const GibbsConfig& config, RngHandle& rng);

/// Draws B_kl for k <= l and mirrors. The diagonal uses Beta(a + A[kk],
/// b + n_kk - A[kk]); an off-diagonal block pools both orientations, Beta(a +
/// A[kl] + A[lk], b + n_kl + n_lk - A[kl] - A[lk]), which is the exact full
/// conditional of a symmetric B under the ordered-pair likelihood. Entries are
/// kept inside (0, 1).
KernelMatrix sample_B(const BlockStats& stats, const GibbsConfig& config, RngHandle& rng);

struct GibbsState {
  CommunityAssignment z;
  KernelMatrix b_mat;
  CommunityProportions pi;
  double log_post = 0.0;
};

/// Unnormalised log P(z_i = k | rest) for k = 0..K-1, both edge directions
/// included.
std::vector<double> z_log_conditional(const GibbsState& state, const AdjacencyMatrix& a, int node);

/// One sequential sweep; each z_i is redrawn given the current other labels.
CommunityAssignment sample_z(const GibbsState& state, const AdjacencyMatrix& a, RngHandle& rng,
                             const GibbsConfig& config = {});

/// Log joint: Dirichlet prior + Beta priors (k <= l) + label term + Bernoulli
/// likelihood over ordered pairs.
double log_posterior(const GibbsState& state, const AdjacencyMatrix& a, const GibbsConfig& config);
/// Same, with the block counts of state.z already tallied.
double log_posterior(const GibbsState& state, const BlockStats& stats, const GibbsConfig& config);

struct GibbsResult {
  /// Retained sample with the highest log posterior.
  CommunityAssignment labels;
  std::vector<double> trace;  ///< log posterior after each sweep
  int best_sweep = 0;         ///< 1-based sweep index of the point estimate
  double best_log_posterior = 0.0;
  int retained = 0;            ///< over all chains
  int best_chain = 0;         ///< chain holding the point estimate; trace is that chain's
};

using GibbsSampleHook = std::function<void(int sweep, const GibbsState& state)>;

/// Random-label start, then n_iter sweeps of (pi, B, z), once per chain. `on_retained` sees
/// every kept post-burn-in state.
GibbsResult run_gibbs(const AdjacencyMatrix& a, int k, const GibbsConfig& config, RngHandle& rng,
                      const GibbsSampleHook& on_retained = {});

}  // namespace sbmlab
