#include "sbmlab/generator.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace sbmlab {

namespace {

std::string rho_message(double rho) {
  std::ostringstream os;
  os << "rho = " << rho << " outside (0, 2/3)";
  return os.str();
}

enum GeneratorStream : std::uint64_t { kProportionStream = 0, kMembershipStream = 1, kEdgeStream = 2 };

}  // namespace

RhoOutOfRange::RhoOutOfRange(double rho) : Error(rho_message(rho)), rho_(rho) {}

ProportionDraw draw_proportions(int k, double beta, RngHandle& rng) {
  if (k < 1) throw Error("draw_proportions: k must be >= 1");
  if (!(beta >= 0.0)) throw Error("draw_proportions: beta must be >= 0");
  std::vector<double> latent(k);
  for (double& v : latent) v = rng.uniform_open();

  std::vector<double> alpha(k);
  if (beta == 0.0) {
    alpha.assign(k, 1.0 / k);
  } else {
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      alpha[i] = std::pow(latent[i], beta);
      total += alpha[i];
    }
    for (double& a : alpha) a /= total;
  }
  return {CommunityProportions(std::move(alpha)), std::move(latent)};
}

CommunityAssignment assign_communities(int n, const CommunityProportions& alpha, RngHandle& rng) {
  if (n < 1) throw Error("assign_communities: n must be >= 1");
  std::discrete_distribution<int> dist(alpha.values().begin(), alpha.values().end());
  std::vector<int> labels(n);
  for (int& l : labels) l = dist(rng) + 1;
  return CommunityAssignment(std::move(labels), alpha.k());
}

KernelMatrix build_kernel(int k, double rho) {
  if (k < 1) throw Error("build_kernel: k must be >= 1");
  if (!(rho > 0.0 && rho < 2.0 / 3.0)) throw RhoOutOfRange(rho);
  Matrix b = Matrix::Constant(k, k, 0.5 * rho);
  b.diagonal().setConstant(1.5 * rho);
  return KernelMatrix(std::move(b));
}

AdjacencyMatrix sample_adjacency(const CommunityAssignment& truth, const KernelMatrix& kernel, RngHandle& rng) {
  if (truth.k() > kernel.k()) throw Error("sample_adjacency: labels exceed kernel dimension");
  const int n = truth.size();
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    const int zi = truth.index(i);
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform() < kernel(zi, truth.index(j))) edges.emplace_back(i, j);
    }
  }
  return AdjacencyMatrix::from_edges(n, edges);
}

GeneratedInstance generate(const ScenarioConfig& scenario) {
  scenario.validate();
  auto proportion_rng = seeded_rng(scenario.seed, kProportionStream);
  auto membership_rng = seeded_rng(scenario.seed, kMembershipStream);
  auto edge_rng = seeded_rng(scenario.seed, kEdgeStream);

  auto [proportions, latent] = draw_proportions(scenario.k, scenario.beta, proportion_rng);
  auto truth = assign_communities(scenario.n, proportions, membership_rng);
  auto kernel = build_kernel(scenario.k, scenario.rho());
  auto adjacency = sample_adjacency(truth, kernel, edge_rng);
  return {std::move(adjacency), std::move(truth), std::move(kernel), std::move(proportions), std::move(latent),
          scenario};
}

}  // namespace sbmlab
