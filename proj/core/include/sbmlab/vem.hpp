#pragma once

// Variational EM for block models with Bernoulli or Gaussian edge emissions.
// The E step runs sequential fixed-point sweeps over the responsibilities tau;
// the M step has closed forms for alpha and the emission parameters.

#include <variant>
#include <vector>

#include "sbmlab/model.hpp"
#include "sbmlab/rng.hpp"

namespace sbmlab {

enum class EmissionModel { Bernoulli, Gaussian };

struct BernoulliParams {
  Matrix prob;  ///< pi_ql, symmetric, clamped to [eps_p, 1 - eps_p]
};

struct GaussianParams {
  Matrix mean;  ///< mu_ql, symmetric
  double variance = 1.0;
};

using Emission = std::variant<BernoulliParams, GaussianParams>;

struct VEMConfig {
  EmissionModel model = EmissionModel::Bernoulli;
  double tol = 1e-6;
  int max_iter = 100;
  double inner_tol = 1e-8;
  int inner_max = 50;
  /// Mass spread off the spectral label when initialising tau.
  double eta = 0.1;
  double prob_clamp = 1e-6;
  double variance_floor = 1e-8;

  void validate() const;
};

struct VEMState {
  Matrix tau;    ///< N x K, rows on the simplex
  Vector alpha;  ///< community proportions
  Emission emission;
};

/// log f_ql(0) and log f_ql(1); adjacency entries are binary.
struct EmissionLogs {
  Matrix log_f0;
  Matrix log_f1;
};
EmissionLogs emission_logs(const Emission& emission);

/// J = sum_iq tau_iq log alpha_q + sum_{i != j} sum_ql tau_iq tau_jl log f_ql(A_ij).
double vem_objective(const VEMState& state, const AdjacencyMatrix& a);
/// -sum_iq tau_iq log tau_iq.
double tau_entropy(const Matrix& tau);

struct EStepReport {
  int sweeps = 0;
  double max_change = 0.0;
};

/// Sequential sweeps of tau_iq ∝ alpha_q exp(sum_{j != i} sum_l tau_jl
/// [log f_ql(A_ij) + log f_lq(A_ji)]) until the largest entry change is below
/// inner_tol or inner_max sweeps have run. Each node update maximises
/// J + entropy in tau_i.
VEMState vem_e_step(const VEMState& state, const AdjacencyMatrix& a, double inner_tol, int inner_max,
                    EStepReport* report = nullptr);

struct MStepReport {
  /// Blocks whose weight was zero and were set to 0.5.
  int empty_blocks = 0;
};

/// alpha_q = mean_i tau_iq; pi_ql = weighted ordered-pair density, clamped.
std::pair<Vector, BernoulliParams> vem_m_step_bernoulli(const Matrix& tau, const AdjacencyMatrix& a,
                                                        double prob_clamp = 1e-6, MStepReport* report = nullptr);
/// mu_ql = weighted mean of A_ij; sigma^2 = pooled weighted residual, floored.
std::pair<Vector, GaussianParams> vem_m_step_gaussian(const Matrix& tau, const AdjacencyMatrix& a,
                                                      double variance_floor = 1e-8, MStepReport* report = nullptr);

struct VEMTraceRow {
  int cycle = 0;
  double objective = 0.0;  ///< J
  double max_tau_change = 0.0;
  double bound = 0.0;      ///< J + entropy
};

struct VEMResult {
  CommunityAssignment labels;
  std::vector<VEMTraceRow> trace;
  bool converged = false;
  int iterations = 0;
  VEMState state;
};

/// tau from labels: 1 - eta on the label, eta / (K - 1) elsewhere.
Matrix soften_labels(const CommunityAssignment& z, double eta);

/// Alternates E and M steps from an explicit starting tau until |delta J| <=
/// tol. Returns the argmax-tau labels of the last cycle, or of the best-J
/// cycle when max_iter runs out first.
VEMResult run_vem_from(const AdjacencyMatrix& a, Matrix tau, const VEMConfig& config);

/// Initialises from vanilla spectral clustering and runs run_vem_from.
VEMResult run_vem(const AdjacencyMatrix& a, int k, const VEMConfig& config, RngHandle& rng);

}  // namespace sbmlab
