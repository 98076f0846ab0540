#pragma once

// Planted-partition simulation: heterogeneous proportions alpha_k ∝ v_k^beta
// with v_k ~ U(0,1), kernel B = rho * (1/2 + I), and Bernoulli edges.

#include <vector>

#include "sbmlab/model.hpp"
#include "sbmlab/rng.hpp"

namespace sbmlab {

class RhoOutOfRange : public Error {
 public:
  explicit RhoOutOfRange(double rho);
  double rho() const { return rho_; }

 private:
  double rho_;
};

struct ProportionDraw {
  CommunityProportions proportions;
  /// The uniforms v_1..v_k the proportions were built from.
  std::vector<double> latent;
};

struct GeneratedInstance {
  AdjacencyMatrix adjacency;
  CommunityAssignment truth;
  KernelMatrix kernel;
  CommunityProportions proportions;
  std::vector<double> latent;
  ScenarioConfig scenario;
};

ProportionDraw draw_proportions(int k, double beta, RngHandle& rng);
CommunityAssignment assign_communities(int n, const CommunityProportions& alpha, RngHandle& rng);
/// Diagonal (3/2) rho, off-diagonal (1/2) rho. Requires 0 < rho < 2/3.
KernelMatrix build_kernel(int k, double rho);
/// Samples the upper triangle and mirrors it; the diagonal stays zero.
AdjacencyMatrix sample_adjacency(const CommunityAssignment& truth, const KernelMatrix& kernel, RngHandle& rng);

/// Pure function of the scenario. Streams 0, 1, 2 of the scenario seed drive
/// proportions, memberships and edges respectively.
GeneratedInstance generate(const ScenarioConfig& scenario);

}  // namespace sbmlab
