#include "sbmlab/vem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sbmlab/spectral.hpp"

namespace sbmlab {

namespace {

constexpr double kEmptyWeight = 1e-300;

// Weighted ordered-pair sums: edges(q,l) = sum_{i != j} tau_iq tau_jl A_ij and
// pairs(q,l) = sum_{i != j} tau_iq tau_jl.
struct PairSums {
  Matrix edges;
  Matrix pairs;
};

PairSums pair_sums(const Matrix& tau, const AdjacencyMatrix& a) {
  const Matrix at = a.dense() * tau;
  const Vector s = tau.colwise().sum().transpose();
  Matrix edges = tau.transpose() * at;
  Matrix pairs = s * s.transpose() - tau.transpose() * tau;
  return {std::move(edges), std::move(pairs)};
}

int argmax_row(const Matrix& tau, Eigen::Index i) {
  Eigen::Index best = 0;
  tau.row(i).maxCoeff(&best);
  return static_cast<int>(best);
}

CommunityAssignment hard_labels(const Matrix& tau) {
  std::vector<int> idx(tau.rows());
  for (Eigen::Index i = 0; i < tau.rows(); ++i) idx[i] = argmax_row(tau, i);
  return CommunityAssignment::from_indices(idx, static_cast<int>(tau.cols()));
}

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

}  // namespace

void VEMConfig::validate() const {
  if (!(tol > 0.0) || !(inner_tol > 0.0)) throw Error("vem: tolerances must be positive");
  if (max_iter < 1 || inner_max < 1) throw Error("vem: iteration caps must be >= 1");
  if (!(eta >= 0.0 && eta < 1.0)) throw Error("vem: eta must lie in [0, 1)");
  if (!(prob_clamp > 0.0 && prob_clamp < 0.5)) throw Error("vem: prob_clamp must lie in (0, 0.5)");
  if (!(variance_floor > 0.0)) throw Error("vem: variance_floor must be positive");
}

EmissionLogs emission_logs(const Emission& emission) {
  if (const auto* bern = std::get_if<BernoulliParams>(&emission)) {
    return {(1.0 - bern->prob.array()).log().matrix(), bern->prob.array().log().matrix()};
  }
  const auto& gauss = std::get<GaussianParams>(emission);
  const double var = gauss.variance;
  const double norm = -0.5 * std::log(2.0 * std::numbers::pi * var);
  const auto mu = gauss.mean.array();
  return {(norm - mu.square() / (2.0 * var)).matrix(), (norm - (1.0 - mu).square() / (2.0 * var)).matrix()};
}

double vem_objective(const VEMState& state, const AdjacencyMatrix& a) {
  const Matrix& tau = state.tau;
  double j = 0.0;
  for (Eigen::Index i = 0; i < tau.rows(); ++i) {
    for (Eigen::Index q = 0; q < tau.cols(); ++q) j += xlogy(tau(i, q), state.alpha(q));
  }
  const EmissionLogs logs = emission_logs(state.emission);
  const PairSums ps = pair_sums(tau, a);
  const Matrix non_edges = ps.pairs - ps.edges;
  for (Eigen::Index q = 0; q < tau.cols(); ++q) {
    for (Eigen::Index l = 0; l < tau.cols(); ++l) {
      j += ps.edges(q, l) * logs.log_f1(q, l) + non_edges(q, l) * logs.log_f0(q, l);
    }
  }
  return j;
}

double tau_entropy(const Matrix& tau) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < tau.size(); ++i) h -= xlogy(tau.data()[i], tau.data()[i]);
  return h;
}

VEMState vem_e_step(const VEMState& state, const AdjacencyMatrix& a, double inner_tol, int inner_max,
                    EStepReport* report) {
  VEMState next = state;
  Matrix& tau = next.tau;
  const int n = static_cast<int>(tau.rows());
  const int k = static_cast<int>(tau.cols());
  const EmissionLogs logs = emission_logs(state.emission);
  const Matrix sym1 = logs.log_f1 + logs.log_f1.transpose();
  const Matrix sym0 = logs.log_f0 + logs.log_f0.transpose();
  Vector log_alpha(k);
  for (int q = 0; q < k; ++q) log_alpha(q) = std::log(state.alpha(q));

  Matrix linked = a.dense() * tau;  // (A tau)_il = sum_j A_ij tau_jl
  Vector totals = tau.colwise().sum().transpose();
  Vector w(k);
  Vector fresh(k);
  EStepReport local;
  for (int sweep = 1; sweep <= inner_max; ++sweep) {
    double max_change = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vector m1 = linked.row(i).transpose();
      const Vector m0 = totals - tau.row(i).transpose() - m1;
      w = log_alpha + sym1 * m1 + sym0 * m0;
      const double top = w.maxCoeff();
      fresh = (w.array() - top).exp().matrix();
      fresh /= fresh.sum();
      const Vector delta = fresh - tau.row(i).transpose();
      max_change = std::max(max_change, delta.cwiseAbs().maxCoeff());
      tau.row(i) = fresh.transpose();
      totals += delta;
      for (int j : a.neighbors(i)) linked.row(j) += delta.transpose();
    }
    local.sweeps = sweep;
    local.max_change = max_change;
    if (max_change < inner_tol) break;
  }
  if (report) *report = local;
  return next;
}

std::pair<Vector, BernoulliParams> vem_m_step_bernoulli(const Matrix& tau, const AdjacencyMatrix& a,
                                                        double prob_clamp, MStepReport* report) {
  const PairSums ps = pair_sums(tau, a);
  const Eigen::Index k = tau.cols();
  Matrix prob(k, k);
  MStepReport local;
  for (Eigen::Index q = 0; q < k; ++q) {
    for (Eigen::Index l = 0; l < k; ++l) {
      if (ps.pairs(q, l) <= kEmptyWeight) {
        prob(q, l) = 0.5;
        ++local.empty_blocks;
      } else {
        prob(q, l) = ps.edges(q, l) / ps.pairs(q, l);
      }
    }
  }
  prob = (0.5 * (prob + prob.transpose())).cwiseMax(prob_clamp).cwiseMin(1.0 - prob_clamp);
  if (report) *report = local;
  Vector alpha = tau.colwise().mean().transpose();
  return {std::move(alpha), BernoulliParams{std::move(prob)}};
}

std::pair<Vector, GaussianParams> vem_m_step_gaussian(const Matrix& tau, const AdjacencyMatrix& a,
                                                      double variance_floor, MStepReport* report) {
  const PairSums ps = pair_sums(tau, a);
  const Eigen::Index k = tau.cols();
  Matrix mean(k, k);
  MStepReport local;
  for (Eigen::Index q = 0; q < k; ++q) {
    for (Eigen::Index l = 0; l < k; ++l) {
      if (ps.pairs(q, l) <= kEmptyWeight) {
        mean(q, l) = 0.5;
        ++local.empty_blocks;
      } else {
        mean(q, l) = ps.edges(q, l) / ps.pairs(q, l);
      }
    }
  }
  mean = 0.5 * (mean + mean.transpose());
  // Binary entries: sum tau tau (A - mu)^2 = edges - 2 mu edges + mu^2 pairs.
  const double residual =
      (ps.edges.array() - 2.0 * mean.array() * ps.edges.array() + mean.array().square() * ps.pairs.array()).sum();
  const double weight = ps.pairs.sum();
  const double variance = std::max(weight > 0.0 ? residual / weight : 0.0, variance_floor);
  if (report) *report = local;
  Vector alpha = tau.colwise().mean().transpose();
  return {std::move(alpha), GaussianParams{std::move(mean), variance}};
}

Matrix soften_labels(const CommunityAssignment& z, double eta) {
  const int k = z.k();
  if (k == 1) return Matrix::Ones(z.size(), 1);
  Matrix tau = Matrix::Constant(z.size(), k, eta / (k - 1));
  for (int i = 0; i < z.size(); ++i) tau(i, z.index(i)) = 1.0 - eta;
  return tau;
}

namespace {

void m_step(VEMState& state, const AdjacencyMatrix& a, const VEMConfig& config) {
  if (config.model == EmissionModel::Bernoulli) {
    auto [alpha, params] = vem_m_step_bernoulli(state.tau, a, config.prob_clamp);
    state.alpha = std::move(alpha);
    state.emission = std::move(params);
  } else {
    auto [alpha, params] = vem_m_step_gaussian(state.tau, a, config.variance_floor);
    state.alpha = std::move(alpha);
    state.emission = std::move(params);
  }
}

}  // namespace

VEMResult run_vem_from(const AdjacencyMatrix& a, Matrix tau, const VEMConfig& config) {
  config.validate();
  if (tau.rows() != a.size() || tau.cols() < 1) throw Error("vem: tau shape does not match the graph");

  VEMState state{std::move(tau), Vector(), BernoulliParams{}};
  m_step(state, a, config);
  double previous = vem_objective(state, a);

  VEMResult result;
  VEMState best = state;
  double best_j = previous;
  for (int cycle = 1; cycle <= config.max_iter; ++cycle) {
    VEMState next = vem_e_step(state, a, config.inner_tol, config.inner_max);
    const double tau_change = (next.tau - state.tau).cwiseAbs().maxCoeff();
    m_step(next, a, config);
    const double j = vem_objective(next, a);
    result.trace.push_back({cycle, j, tau_change, j + tau_entropy(next.tau)});
    result.iterations = cycle;
    state = std::move(next);
    if (j > best_j) {
      best_j = j;
      best = state;
    }
    if (std::abs(j - previous) <= config.tol) {
      result.converged = true;
      break;
    }
    previous = j;
  }
  result.state = result.converged ? std::move(state) : std::move(best);
  result.labels = hard_labels(result.state.tau);
  return result;
}

VEMResult run_vem(const AdjacencyMatrix& a, int k, const VEMConfig& config, RngHandle& rng) {
  if (k < 1 || k > a.size()) throw Error("vem: k must lie in [1, n]");
  config.validate();
  const SpectralResult init = spectral_cluster(a, k, SpectralVariant{SpectralTag::Vanilla, {}, {}}, rng);
  return run_vem_from(a, soften_labels(init.labels, config.eta), config);
}

}  // namespace sbmlab
