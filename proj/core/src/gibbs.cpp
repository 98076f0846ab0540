#include "sbmlab/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

namespace sbmlab {

namespace {

constexpr double kEdgeFloor = 1e-12;

double clamp_open(double p) { return std::clamp(p, kEdgeFloor, 1.0 - kEdgeFloor); }

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

struct LogKernel {
  Matrix log_p;
  Matrix log_q;  // log(1 - B)
};

LogKernel log_kernel(const KernelMatrix& b) {
  return {b.entries().array().log().matrix(), (1.0 - b.entries().array()).log().matrix()};
}

// Log weights for node i given per-community neighbour counts m and
// non-self member counts others.
void fill_conditional(const CommunityProportions& pi, const LogKernel& lk, std::span<const int> m,
                      std::span<const int> others, std::vector<double>& out) {
  const int k = pi.k();
  out.assign(k, 0.0);
  for (int c = 0; c < k; ++c) {
    double w = std::log(pi[c]);
    for (int l = 0; l < k; ++l) {
      const double hits = m[l];
      const double misses = others[l] - m[l];
      // z_i -> z_j direction uses B_{c l}, z_j -> z_i uses B_{l c}.
      w += hits * (lk.log_p(c, l) + lk.log_p(l, c)) + misses * (lk.log_q(c, l) + lk.log_q(l, c));
    }
    out[c] = w;
  }
}

}  // namespace

void GibbsConfig::validate(int k) const {
  if (chains < 1) throw Error("gibbs: chains must be >= 1");
  if (!(a > 0.0) || !(b_prior > 0.0)) throw Error("gibbs: Beta prior shapes must be positive");
  if (!alpha_dir.empty()) {
    if (static_cast<int>(alpha_dir.size()) != k) throw Error("gibbs: alpha_dir length must equal k");
    for (double x : alpha_dir) {
      if (!(x > 0.0)) throw Error("gibbs: alpha_dir entries must be positive");
    }
  }
  if (n_iter < 1) throw Error("gibbs: n_iter must be >= 1");
  if (burn_in < 0 || burn_in >= n_iter) throw Error("gibbs: burn_in must satisfy 0 <= burn_in < n_iter");
  if (thin < 1) throw Error("gibbs: thin must be >= 1");
}

std::vector<double> GibbsConfig::concentration(int k) const {
  return alpha_dir.empty() ? std::vector<double>(k, 1.0) : alpha_dir;
}

BlockStats count_stats(const CommunityAssignment& z, const AdjacencyMatrix& a) {
  if (z.size() != a.size()) throw Error("count_stats: label/adjacency size mismatch");
  const int k = z.k();
  const std::vector<int>& labels = z.labels();
  std::vector<std::int64_t> tally(static_cast<std::size_t>(k) * k, 0);
  for (int i = 0; i < a.size(); ++i) {
    std::int64_t* row = tally.data() + static_cast<std::size_t>(labels[i] - 1) * k;
    for (int j : a.neighbors(i)) ++row[labels[j] - 1];
  }
  BlockStats s{z.sizes(), Matrix(k, k), Matrix(k, k)};
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      s.edges(r, c) = static_cast<double>(tally[static_cast<std::size_t>(r) * k + c]);
      s.pairs(r, c) = static_cast<double>(s.sizes[r]) * s.sizes[c] - (r == c ? s.sizes[r] : 0);
    }
  }
  return s;
}

CommunityProportions sample_pi(const BlockStats& stats, const GibbsConfig& config, RngHandle& rng) {
  const int k = static_cast<int>(stats.sizes.size());
  if (k == 1) return CommunityProportions({1.0});
  std::vector<double> conc = config.concentration(k);
  for (int c = 0; c < k; ++c) conc[c] += stats.sizes[c];
  return CommunityProportions(sample_dirichlet(rng, conc));
}

KernelMatrix sample_B(const BlockStats& stats, const GibbsConfig& config, RngHandle& rng) {
  const int k = static_cast<int>(stats.sizes.size());
  Matrix b(k, k);
  for (int r = 0; r < k; ++r) {
    for (int c = r; c < k; ++c) {
      double hits = stats.edges(r, c);
      double trials = stats.pairs(r, c);
      if (r != c) {
        hits += stats.edges(c, r);
        trials += stats.pairs(c, r);
      }
      const double draw = clamp_open(sample_beta(rng, config.a + hits, config.second_shape() + trials - hits));
      b(r, c) = draw;
      b(c, r) = draw;
    }
  }
  return KernelMatrix(std::move(b));
}

std::vector<double> z_log_conditional(const GibbsState& state, const AdjacencyMatrix& a, int node) {
  const int k = state.z.k();
  std::vector<int> m(k, 0);
  std::vector<int> others = state.z.sizes();
  --others[state.z.index(node)];
  for (int j : a.neighbors(node)) ++m[state.z.index(j)];
  std::vector<double> out;
  fill_conditional(state.pi, log_kernel(state.b_mat), m, others, out);
  return out;
}

CommunityAssignment sample_z(const GibbsState& state, const AdjacencyMatrix& a, RngHandle& rng,
                             const GibbsConfig& config) {
  const int n = a.size();
  const int k = state.z.k();
  if (state.z.size() != n) throw Error("sample_z: label/adjacency size mismatch");
  if (k == 1) return state.z;

  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = state.z.index(i);
  std::vector<int> sizes = state.z.sizes();
  const LogKernel lk = log_kernel(state.b_mat);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (config.randomize_order) std::shuffle(order.begin(), order.end(), rng);

  std::vector<int> m(k);
  std::vector<double> weights;
  for (int i : order) {
    std::fill(m.begin(), m.end(), 0);
    for (int j : a.neighbors(i)) ++m[labels[j]];
    --sizes[labels[i]];
    fill_conditional(state.pi, lk, m, sizes, weights);
    labels[i] = sample_log_categorical(rng, weights);
    ++sizes[labels[i]];
  }
  return CommunityAssignment::from_indices(labels, k);
}

double log_posterior(const GibbsState& state, const AdjacencyMatrix& a, const GibbsConfig& config) {
  return log_posterior(state, count_stats(state.z, a), config);
}

double log_posterior(const GibbsState& state, const BlockStats& s, const GibbsConfig& config) {
  const int k = state.z.k();
  const std::vector<double> conc = config.concentration(k);
  const double b_shape = config.second_shape();

  double lp = std::lgamma(std::accumulate(conc.begin(), conc.end(), 0.0));
  for (int c = 0; c < k; ++c) {
    const double log_pi = std::log(state.pi[c]);
    lp += -std::lgamma(conc[c]) + (conc[c] - 1.0) * log_pi;
    lp += s.sizes[c] * log_pi;
  }
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      const double p = state.b_mat(r, c);
      if (c >= r) lp += (config.a - 1.0) * std::log(p) + (b_shape - 1.0) * std::log1p(-p) - log_beta_fn(config.a, b_shape);
      lp += s.edges(r, c) * std::log(p) + (s.pairs(r, c) - s.edges(r, c)) * std::log1p(-p);
    }
  }
  return lp;
}

namespace {

GibbsResult run_chain(const AdjacencyMatrix& a, int k, const GibbsConfig& config, RngHandle& rng, int chain,
                      const GibbsSampleHook& on_retained) {
  const int n = a.size();
  std::vector<int> init(n);
  for (int& l : init) l = rng.below(k);
  const std::vector<double> conc = config.concentration(k);
  Matrix b0(k, k);
  for (int r = 0; r < k; ++r) {
    for (int c = r; c < k; ++c) b0(r, c) = b0(c, r) = clamp_open(sample_beta(rng, config.a, config.second_shape()));
  }
  GibbsState state{CommunityAssignment::from_indices(init, k), KernelMatrix(std::move(b0)),
                   k == 1 ? CommunityProportions({1.0}) : CommunityProportions(sample_dirichlet(rng, conc)), 0.0};
  BlockStats stats = count_stats(state.z, a);
  state.log_post = log_posterior(state, stats, config);

  GibbsResult result;
  result.best_chain = chain;
  result.trace.reserve(config.n_iter);
  result.best_log_posterior = -std::numeric_limits<double>::infinity();
  for (int sweep = 1; sweep <= config.n_iter; ++sweep) {
    state.pi = sample_pi(stats, config, rng);
    state.b_mat = sample_B(stats, config, rng);
    state.z = sample_z(state, a, rng, config);
    stats = count_stats(state.z, a);
    state.log_post = log_posterior(state, stats, config);
    result.trace.push_back(state.log_post);

    if (sweep > config.burn_in && (sweep - config.burn_in) % config.thin == 0) {
      ++result.retained;
      if (state.log_post > result.best_log_posterior) {
        result.best_log_posterior = state.log_post;
        result.best_sweep = sweep;
        result.labels = state.z;
      }
      if (on_retained) on_retained(sweep, state);
    }
  }
  return result;
}

}  // namespace

GibbsResult run_gibbs(const AdjacencyMatrix& a, int k, const GibbsConfig& config, RngHandle& rng,
                      const GibbsSampleHook& on_retained) {
  if (k < 1 || k > a.size()) throw Error("gibbs: k must lie in [1, n]");
  config.validate(k);
  if (config.chains == 1) return run_chain(a, k, config, rng, 0, on_retained);

  // Independent chains on child streams; the point estimate is the best
  // retained sample over all of them.
  GibbsResult best;
  int retained = 0;
  for (int c = 0; c < config.chains; ++c) {
    RngHandle child = rng.spawn(static_cast<std::uint64_t>(c));
    GibbsResult r = run_chain(a, k, config, child, c, on_retained);
    retained += r.retained;
    if (c == 0 || r.best_log_posterior > best.best_log_posterior) best = std::move(r);
  }
  best.retained = retained;
  return best;
}

}  // namespace sbmlab
