#pragma once

// Shared domain types for stochastic block model inference: adjacency
// matrices, hard community labels, kernel matrices, proportions, scenario
// descriptors and run records.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sbmlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AdjacencyDefect { NotSymmetric, NonZeroDiagonal, NonBinaryEntry };

std::string_view to_string(AdjacencyDefect defect);

/// Raised by validate_adjacency. Indices are 0-based; the message prints them
/// 1-based.
class AdjacencyError : public Error {
 public:
  AdjacencyError(AdjacencyDefect defect, int row, int col);

  AdjacencyDefect defect() const { return defect_; }
  int row() const { return row_; }
  int col() const { return col_; }

 private:
  AdjacencyDefect defect_;
  int row_;
  int col_;
};

/// Symmetric, hollow, binary N x N matrix. Stored dense, with a compressed
/// neighbour index for degree-driven loops.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;

  /// Builds from an undirected edge list (0-based, i != j). Duplicate edges
  /// are collapsed.
  static AdjacencyMatrix from_edges(int n, std::span<const std::pair<int, int>> edges);

  int size() const { return static_cast<int>(entries_.rows()); }
  const Matrix& dense() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

  std::span<const int> neighbors(int i) const {
    return {indices_.data() + offsets_[i], indices_.data() + offsets_[i + 1]};
  }
  int degree(int i) const { return offsets_[i + 1] - offsets_[i]; }
  /// Number of undirected edges.
  std::int64_t edge_count() const { return static_cast<std::int64_t>(indices_.size()) / 2; }

 private:
  friend AdjacencyMatrix validate_adjacency(const Matrix& m);
  explicit AdjacencyMatrix(Matrix entries);
  void build_index();

  Matrix entries_;
  std::vector<int> offsets_{0};
  std::vector<int> indices_;
};

/// Checks symmetry, hollowness and binarity, scanning row-major and reporting
/// the first offending pair. Throws Error when m is not square.
AdjacencyMatrix validate_adjacency(const Matrix& m);

/// Hard labels in {1..k}, one per node.
class CommunityAssignment {
 public:
  CommunityAssignment() = default;
  CommunityAssignment(std::vector<int> labels, int k);

  /// Builds from 0-based indices in {0..k-1}.
  static CommunityAssignment from_indices(std::span<const int> indices, int k);

  int size() const { return static_cast<int>(labels_.size()); }
  int k() const { return k_; }
  int label(int i) const { return labels_[i]; }
  int index(int i) const { return labels_[i] - 1; }
  const std::vector<int>& labels() const { return labels_; }

  /// Community sizes, indexed 0..k-1.
  std::vector<int> sizes() const;
  Matrix one_hot() const;

  bool operator==(const CommunityAssignment&) const = default;

 private:
  std::vector<int> labels_;
  int k_ = 0;
};

/// Symmetric k x k matrix of edge probabilities.
class KernelMatrix {
 public:
  KernelMatrix() = default;
  explicit KernelMatrix(Matrix entries);

  int k() const { return static_cast<int>(entries_.rows()); }
  double operator()(int r, int c) const { return entries_(r, c); }
  const Matrix& entries() const { return entries_; }

 private:
  Matrix entries_;
};

/// Strictly positive proportions summing to one.
class CommunityProportions {
 public:
  CommunityProportions() = default;
  explicit CommunityProportions(std::vector<double> alpha);

  int k() const { return static_cast<int>(alpha_.size()); }
  double operator[](int i) const { return alpha_[i]; }
  const std::vector<double>& values() const { return alpha_; }

 private:
  std::vector<double> alpha_;
};

/// One simulation cell: n nodes, k communities, heterogeneity exponent beta,
/// sparsity exponent b (edge rate n^-b) and the RNG seed.
struct ScenarioConfig {
  int n = 0;
  int k = 0;
  double beta = 0.0;
  double b = 0.0;
  std::uint64_t seed = 0;

  double rho() const;
  /// Throws Error naming the violated constraint.
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

enum class Method { SC, SCORE, L2, RSC, GIBBS, VB, VEMB, VEMG };

inline constexpr Method kAllMethods[] = {Method::SC,    Method::SCORE, Method::L2, Method::RSC,
                                         Method::GIBBS, Method::VB,    Method::VEMB, Method::VEMG};

std::string_view to_string(Method method);
/// Case-insensitive; accepts the canonical tags (SC, SCORE, ...).
std::optional<Method> parse_method(std::string_view text);

/// One (method, scenario) evaluation. A failed run carries a non-empty error
/// and NaN scores.
struct RunRecord {
  Method method = Method::SC;
  ScenarioConfig scenario;
  double ari = 0.0;
  double nmi = 0.0;
  double runtime_ms = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string error;

  bool failed() const { return !error.empty(); }
};

}  // namespace sbmlab
