#include "sbmlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sbmlab {

namespace {

constexpr double kZeroRowNorm = 1e-12;
constexpr double kTinyLeading = 1e-12;

std::string degenerate_message(int tiny, int n) {
  std::ostringstream os;
  os << "SCORE: " << tiny << " of " << n << " leading-eigenvector entries are below " << kTinyLeading;
  return os.str();
}

void check_k(const AdjacencyMatrix& a, int k) {
  if (k < 1 || k > a.size()) throw Error("spectral: k must lie in [1, n]");
}

// When the top eigenvalue is repeated (several components with the same
// leading eigenvalue, for instance) the solver returns an arbitrary basis of
// that eigenspace, and its first vector may vanish on whole components. Pick
// the basis whose first vector is the projection of the all-ones vector
// instead; the spanned subspace is unchanged.
void canonicalize_leading_space(EigenPairs& p) {
  const Eigen::Index k = p.values.size();
  const double lead = p.values(0);
  const double tol = 1e-9 * std::max(1.0, std::abs(lead));
  Eigen::Index m = 1;
  while (m < k && std::abs(p.values(m) - lead) <= tol) ++m;
  if (m == 1) return;
  const Matrix v = p.vectors.leftCols(m);
  const Vector proj = v * (v.transpose() * Vector::Ones(v.rows()));
  if (proj.norm() <= 1e-12) return;
  Matrix stacked(v.rows(), m + 1);
  stacked << proj, v;
  const Matrix q = Eigen::HouseholderQR<Matrix>(stacked).householderQ() * Matrix::Identity(v.rows(), m);
  for (Eigen::Index c = 0; c < m; ++c) {
    Eigen::Index arg = 0;
    q.col(c).cwiseAbs().maxCoeff(&arg);
    p.vectors.col(c) = q(arg, c) < 0.0 ? Vector(-q.col(c)) : Vector(q.col(c));
  }
}

}  // namespace

DegenerateLeadingVector::DegenerateLeadingVector(int tiny_entries, int n)
    : Error(degenerate_message(tiny_entries, n)), tiny_entries_(tiny_entries) {}

Embedding embed_vanilla(const AdjacencyMatrix& a, int k) {
  check_k(a, k);
  return {topk_eigen(a.dense(), k).vectors, 0};
}

Matrix score_ratios(const Matrix& u, double clip) {
  if (!(clip > 0.0)) throw Error("SCORE: clip must be positive");
  if (u.cols() < 2) throw Error("SCORE: needs at least two eigenvectors");
  Matrix ratios(u.rows(), u.cols() - 1);
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double lead = u(i, 0);
    for (Eigen::Index c = 1; c < u.cols(); ++c) {
      double r = 0.0;
      if (lead != 0.0) {
        r = u(i, c) / lead;
      } else if (u(i, c) != 0.0) {
        r = std::copysign(clip, u(i, c));
      }
      ratios(i, c - 1) = std::clamp(r, -clip, clip);
    }
  }
  return ratios;
}

Embedding embed_score(const AdjacencyMatrix& a, int k, double clip) {
  check_k(a, k);
  if (k < 2) throw Error("SCORE: k must be >= 2");
  EigenPairs pairs = topk_eigen(a.dense(), k);
  canonicalize_leading_space(pairs);
  const Matrix& u = pairs.vectors;
  int tiny = 0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    if (std::abs(u(i, 0)) < kTinyLeading) ++tiny;
  }
  if (10 * tiny > a.size()) throw DegenerateLeadingVector(tiny, a.size());
  return {score_ratios(u, clip), 0};
}

int normalize_rows(Matrix& rows) {
  int zero = 0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (norm <= kZeroRowNorm) {
      rows.row(i).setZero();
      ++zero;
    } else {
      rows.row(i) /= norm;
    }
  }
  return zero;
}

Embedding embed_l2(const AdjacencyMatrix& a, int k) {
  Embedding e = embed_vanilla(a, k);
  e.zero_rows = normalize_rows(e.coords);
  return e;
}

Matrix rsc_operator(const AdjacencyMatrix& a, double tau) {
  if (!(tau > 0.0)) throw Error("RSC: tau must be positive");
  const int n = a.size();
  Vector scale(n);
  for (int i = 0; i < n; ++i) scale(i) = 1.0 / std::sqrt(a.degree(i) + tau);
  return scale.asDiagonal() * a.dense() * scale.asDiagonal();
}

double rsc_default_tau(const AdjacencyMatrix& a) {
  const double total = 2.0 * static_cast<double>(a.edge_count());
  return total > 0.0 ? total : 1.0;
}

Embedding embed_rsc(const AdjacencyMatrix& a, int k, std::optional<double> tau) {
  check_k(a, k);
  const Matrix op = rsc_operator(a, tau.value_or(rsc_default_tau(a)));
  Embedding e{topk_eigen(op, k).vectors, 0};
  e.zero_rows = normalize_rows(e.coords);
  return e;
}

Embedding spectral_embed(const AdjacencyMatrix& a, int k, const SpectralVariant& variant) {
  switch (variant.tag) {
    case SpectralTag::Vanilla: return embed_vanilla(a, k);
    case SpectralTag::Score: return embed_score(a, k, variant.score_clip.value_or(std::log(a.size())));
    case SpectralTag::L2Norm: return embed_l2(a, k);
    case SpectralTag::Regularized: return embed_rsc(a, k, variant.rsc_tau);
  }
  throw Error("spectral: unknown variant");
}

SpectralResult spectral_cluster(const AdjacencyMatrix& a, int k, const SpectralVariant& variant, RngHandle& rng,
                                const KMeansOptions& kmeans_options) {
  check_k(a, k);
  if (k == 1) return {CommunityAssignment(std::vector<int>(a.size(), 1), 1), 0, 0};
  const Embedding e = spectral_embed(a, k, variant);
  KMeansResult km = kmeans(e.coords, k, rng, kmeans_options);
  return {std::move(km.assignment), km.iterations, e.zero_rows};
}

}  // namespace sbmlab
