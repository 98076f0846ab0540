#pragma once

// Spectral community detection: vanilla adjacency embedding, SCORE ratios,
// row-L2 normalisation and regularised Laplacian embedding, each followed by
// k-means on the embedded rows.

#include <optional>

#include "sbmlab/model.hpp"
#include "sbmlab/numkit.hpp"
#include "sbmlab/rng.hpp"

namespace sbmlab {

enum class SpectralTag { Vanilla, Score, L2Norm, Regularized };

struct SpectralVariant {
  SpectralTag tag = SpectralTag::Vanilla;
  /// SCORE ratio clip; defaults to log(n).
  std::optional<double> score_clip;
  /// RSC regulariser; defaults to the total degree sum_i D_ii.
  std::optional<double> rsc_tau;
};

struct Embedding {
  Matrix coords;
  /// Rows that were (numerically) zero before normalisation and left at zero.
  int zero_rows = 0;
};

class DegenerateLeadingVector : public Error {
 public:
  DegenerateLeadingVector(int tiny_entries, int n);
  int tiny_entries() const { return tiny_entries_; }

 private:
  int tiny_entries_;
};

/// Rows of the top-k (by |lambda|) eigenvector matrix of A.
Embedding embed_vanilla(const AdjacencyMatrix& a, int k);

/// Columns 2..k of U divided entrywise by column 1, clipped to [-clip, clip].
/// A repeated top eigenvalue is resolved by taking the projection of the
/// all-ones vector onto its eigenspace as the leading vector. Throws
/// DegenerateLeadingVector if more than 10% of |U_i1| are below 1e-12.
Embedding embed_score(const AdjacencyMatrix& a, int k, double clip);
/// The ratio step on an explicit eigenvector matrix (no degeneracy check).
Matrix score_ratios(const Matrix& u, double clip);

/// Vanilla embedding with every row scaled to unit norm (zero rows kept).
Embedding embed_l2(const AdjacencyMatrix& a, int k);
/// Scales rows to unit norm in place; rows with norm <= 1e-12 become zero.
/// Returns the number of such rows.
int normalize_rows(Matrix& rows);

/// D_tau^-1/2 A D_tau^-1/2 with D_tau = D + tau I.
Matrix rsc_operator(const AdjacencyMatrix& a, double tau);
/// Default regulariser: the degree sum, or 1 for an edgeless graph.
double rsc_default_tau(const AdjacencyMatrix& a);
/// Top-k eigenvectors of the regularised operator, rows L2-normalised.
Embedding embed_rsc(const AdjacencyMatrix& a, int k, std::optional<double> tau = std::nullopt);

Embedding spectral_embed(const AdjacencyMatrix& a, int k, const SpectralVariant& variant);

struct SpectralResult {
  CommunityAssignment labels;
  int kmeans_iterations = 0;
  int zero_rows = 0;
};

/// Embeds per variant and clusters rows with k-means; k = 1 short-circuits.
SpectralResult spectral_cluster(const AdjacencyMatrix& a, int k, const SpectralVariant& variant, RngHandle& rng,
                                const KMeansOptions& kmeans_options = {});

}  // namespace sbmlab
