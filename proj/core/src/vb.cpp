#include "sbmlab/vb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace sbmlab {

namespace {

// Ordered-pair edge counts between communities.
Matrix block_edge_sums(const CommunityAssignment& z, const AdjacencyMatrix& a) {
  Matrix sums = Matrix::Zero(z.k(), z.k());
  for (int i = 0; i < a.size(); ++i) {
    for (int j : a.neighbors(i)) sums(z.index(i), z.index(j)) += 1.0;
  }
  return sums;
}

void refresh_mu_sigma(VBState& s, const AdjacencyMatrix& a, const std::vector<int>& sizes) {
  const int k = s.z.k();
  const Matrix sums = block_edge_sums(s.z, a);
  s.mu.resize(k, k);
  s.sigma.resize(k, k);
  for (int c = 0; c < k; ++c) {
    for (int d = 0; d < k; ++d) {
      const double scale = 1.0 / (s.delta * sizes[c] * sizes[d]);
      s.mu(c, d) = scale * sums(c, d);
      s.sigma(c, d) = scale;
    }
  }
}

void costs_for(const VBState& s, const std::vector<int>& labels, const std::vector<int>& live_sizes,
               const AdjacencyMatrix& a, int node, std::vector<int>& m, std::vector<double>& out) {
  const int k = s.z.k();
  std::fill(m.begin(), m.end(), 0);
  for (int j : a.neighbors(node)) ++m[labels[j]];
  const int own = labels[node];

  double size_ratio = 0.0;
  for (int r = 0; r < k; ++r) size_ratio += static_cast<double>(live_sizes[r] - (r == own)) / s.prev_sizes[r];

  out.assign(k, 0.0);
  for (int c = 0; c < k; ++c) {
    const int others = live_sizes[c] - (c == own);
    const double size_term = others == 0 ? -std::numeric_limits<double>::infinity()
                                         : -k * std::log1p(1.0 / others);
    double linked = 0.0;
    double squares = 0.0;
    for (int l = 0; l < k; ++l) {
      linked += m[l] * s.mu(c, l);
      squares += (live_sizes[l] - (l == own)) * s.mu(c, l) * s.mu(c, l);
    }
    const double bracket = size_ratio + 1.0 / s.prev_sizes[c];
    out[c] = size_term - 2.0 * linked + s.delta * (squares + 0.5 * s.mu(c, c) * s.mu(c, c)) + 0.5 * bracket * bracket;
  }
}

}  // namespace

void VBConfig::validate() const {
  if (!(beta_hyper > 0.0)) throw Error("vb: beta_hyper must be positive");
  if (max_iter < 1) throw Error("vb: max_iter must be >= 1");
  if (!(tol > 0.0)) throw Error("vb: tol must be positive");
}

EmptyClusterInit::EmptyClusterInit(int cluster)
    : Error("vb: initial community " + std::to_string(cluster) + " is empty"), cluster_(cluster) {}

VBState vb_init(const AdjacencyMatrix& a, int k, const CommunityAssignment& z0, const VBConfig& config) {
  config.validate();
  if (z0.size() != a.size() || z0.k() != k) throw Error("vb_init: labels do not match graph or k");
  const std::vector<int> sizes = z0.sizes();
  for (int c = 0; c < k; ++c) {
    if (sizes[c] == 0) throw EmptyClusterInit(c + 1);
  }
  const double n = a.size();
  VBState s;
  s.z = z0;
  s.prev_sizes = sizes;
  s.a_par = n * n;
  s.delta = 1.0 + std::sqrt(2.0 * config.beta_hyper / s.a_par);
  refresh_mu_sigma(s, a, sizes);
  s.objective = std::numeric_limits<double>::infinity();
  return s;
}

std::vector<double> vb_costs(const VBState& state, const AdjacencyMatrix& a, int node) {
  std::vector<int> labels(state.z.size());
  for (int i = 0; i < state.z.size(); ++i) labels[i] = state.z.index(i);
  std::vector<int> m(state.z.k());
  std::vector<double> out;
  costs_for(state, labels, state.z.sizes(), a, node, m, out);
  return out;
}

VBState vb_update_labels(const VBState& state, const AdjacencyMatrix& a, RngHandle& rng) {
  const int n = a.size();
  const int k = state.z.k();
  VBState next = state;
  next.labels_changed = 0;
  if (k == 1) return next;

  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = state.z.index(i);
  std::vector<int> live = state.z.sizes();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<int> m(k);
  std::vector<double> v;
  for (int i : order) {
    costs_for(state, labels, live, a, i, m, v);
    const int own = labels[i];
    int best = 0;
    for (int c = 1; c < k; ++c) {
      if (v[c] < v[best]) best = c;
    }
    if (best == own || live[own] <= 1) continue;
    --live[own];
    ++live[best];
    labels[i] = best;
    ++next.labels_changed;
  }
  next.z = CommunityAssignment::from_indices(labels, k);
  return next;
}

VBState vb_update_a_delta(const VBState& state, const VBConfig& config) {
  VBState next = state;
  const std::vector<int> sizes = state.z.sizes();
  const int k = state.z.k();
  double squares = 0.0;
  double ratio = 0.0;
  for (int c = 0; c < k; ++c) {
    ratio += static_cast<double>(sizes[c]) / state.prev_sizes[c];
    for (int d = 0; d < k; ++d) squares += static_cast<double>(sizes[c]) * sizes[d] * state.mu(c, d) * state.mu(c, d);
  }
  next.a_par = squares + ratio * ratio / state.delta;
  next.delta = 1.0 + std::sqrt(2.0 * config.beta_hyper / next.a_par);
  return next;
}

VBState vb_update_mu_sigma(const VBState& state, const AdjacencyMatrix& a) {
  VBState next = state;
  const std::vector<int> sizes = state.z.sizes();
  refresh_mu_sigma(next, a, sizes);
  next.prev_sizes = sizes;
  return next;
}

double vb_objective(const VBState& state, const AdjacencyMatrix& a, const VBConfig& config) {
  const double k = state.z.k();
  const double n = a.size();
  const double beta = config.beta_hyper;
  const Matrix sums = block_edge_sums(state.z, a);
  const double fit = (sums.array() * state.mu.array()).sum();
  return k * (k + 1.0) / 4.0 * std::log(state.delta / (4.0 * beta * std::numbers::e * std::numbers::e)) +
         std::sqrt(state.a_par * beta / 2.0) - 0.5 * fit +
         (config.d_const + 1.0) * (0.5 * k * (k + 1.0) + n * std::log(k));
}

VBResult run_vb(const AdjacencyMatrix& a, int k, const VBConfig& config, RngHandle& rng) {
  const int n = a.size();
  if (k < 1 || k > n) throw Error("vb: k must lie in [1, n]");
  config.validate();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> z0(n);
  for (int p = 0; p < n; ++p) z0[order[p]] = p < k ? p : rng.below(k);

  VBResult result;
  VBState state = vb_init(a, k, CommunityAssignment::from_indices(z0, k), config);
  double previous = state.objective;
  double change = std::numeric_limits<double>::infinity();
  int t = 0;
  while (t < config.max_iter && change > config.tol) {
    ++t;
    state = vb_update_labels(state, a, rng);
    state = vb_update_a_delta(state, config);
    state = vb_update_mu_sigma(state, a);
    state.objective = vb_objective(state, a, config);
    change = std::abs(previous - state.objective);
    previous = state.objective;
    result.trace.push_back({t, state.objective, state.labels_changed});
  }
  result.labels = state.z;
  result.converged = change <= config.tol;
  result.iterations = t;
  result.state = std::move(state);
  return result;
}

}  // namespace sbmlab
