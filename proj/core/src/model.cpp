#include "sbmlab/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace sbmlab {

std::string_view to_string(AdjacencyDefect defect) {
  switch (defect) {
    case AdjacencyDefect::NotSymmetric: return "NotSymmetric";
    case AdjacencyDefect::NonZeroDiagonal: return "NonZeroDiagonal";
    case AdjacencyDefect::NonBinaryEntry: return "NonBinaryEntry";
  }
  return "Unknown";
}

namespace {

std::string adjacency_message(AdjacencyDefect defect, int row, int col) {
  std::ostringstream os;
  os << to_string(defect) << " at (" << row + 1 << "," << col + 1 << ")";
  return os.str();
}

}  // namespace

AdjacencyError::AdjacencyError(AdjacencyDefect defect, int row, int col)
    : Error(adjacency_message(defect, row, col)), defect_(defect), row_(row), col_(col) {}

AdjacencyMatrix::AdjacencyMatrix(Matrix entries) : entries_(std::move(entries)) { build_index(); }

AdjacencyMatrix AdjacencyMatrix::from_edges(int n, std::span<const std::pair<int, int>> edges) {
  if (n < 0) throw Error("negative node count");
  Matrix m = Matrix::Zero(n, n);
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw Error("edge endpoint out of range");
    if (i == j) throw AdjacencyError(AdjacencyDefect::NonZeroDiagonal, i, i);
    m(i, j) = 1.0;
    m(j, i) = 1.0;
  }
  return AdjacencyMatrix(std::move(m));
}

void AdjacencyMatrix::build_index() {
  const int n = size();
  offsets_.assign(n + 1, 0);
  indices_.clear();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (entries_(i, j) != 0.0) indices_.push_back(j);
    }
    offsets_[i + 1] = static_cast<int>(indices_.size());
  }
}

AdjacencyMatrix validate_adjacency(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error("adjacency matrix must be square");
  const int n = static_cast<int>(m.rows());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = m(i, j);
      if (v != 0.0 && v != 1.0) throw AdjacencyError(AdjacencyDefect::NonBinaryEntry, i, j);
      if (i == j && v != 0.0) throw AdjacencyError(AdjacencyDefect::NonZeroDiagonal, i, j);
      if (v != m(j, i)) throw AdjacencyError(AdjacencyDefect::NotSymmetric, i, j);
    }
  }
  return AdjacencyMatrix(m);
}

CommunityAssignment::CommunityAssignment(std::vector<int> labels, int k) : labels_(std::move(labels)), k_(k) {
  if (k_ < 1) throw Error("community count must be at least 1");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 1 || labels_[i] > k_) {
      std::ostringstream os;
      os << "label " << labels_[i] << " at node " << i + 1 << " outside 1.." << k_;
      throw Error(os.str());
    }
  }
}

CommunityAssignment CommunityAssignment::from_indices(std::span<const int> indices, int k) {
  std::vector<int> labels(indices.begin(), indices.end());
  for (int& l : labels) ++l;
  return CommunityAssignment(std::move(labels), k);
}

std::vector<int> CommunityAssignment::sizes() const {
  std::vector<int> counts(k_, 0);
  for (int l : labels_) ++counts[l - 1];
  return counts;
}

Matrix CommunityAssignment::one_hot() const {
  Matrix z = Matrix::Zero(size(), k_);
  for (int i = 0; i < size(); ++i) z(i, index(i)) = 1.0;
  return z;
}

KernelMatrix::KernelMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 1) throw Error("kernel matrix must be square and non-empty");
  for (Eigen::Index r = 0; r < entries_.rows(); ++r) {
    for (Eigen::Index c = 0; c < entries_.cols(); ++c) {
      const double v = entries_(r, c);
      if (!(v >= 0.0 && v <= 1.0)) throw Error("kernel entries must lie in [0, 1]");
      if (v != entries_(c, r)) throw Error("kernel matrix must be symmetric");
    }
  }
}

CommunityProportions::CommunityProportions(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.empty()) throw Error("proportions must be non-empty");
  double total = 0.0;
  for (double a : alpha_) {
    if (!(a > 0.0)) throw Error("proportions must be strictly positive");
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error("proportions must sum to 1");
}

double ScenarioConfig::rho() const { return std::pow(static_cast<double>(n), -b); }

void ScenarioConfig::validate() const {
  if (k < 1) throw Error("scenario: k must be >= 1");
  if (n < k) throw Error("scenario: n must be >= k");
  if (!(beta >= 0.0)) throw Error("scenario: beta must be >= 0");
  if (!(b > 0.0)) throw Error("scenario: b must be > 0");
  if (!(rho() < 2.0 / 3.0)) throw Error("scenario: rho = n^-b must be < 2/3");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::SC: return "SC";
    case Method::SCORE: return "SCORE";
    case Method::L2: return "L2";
    case Method::RSC: return "RSC";
    case Method::GIBBS: return "GIBBS";
    case Method::VB: return "VB";
    case Method::VEMB: return "VEMB";
    case Method::VEMG: return "VEMG";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (Method m : kAllMethods) {
    if (upper == to_string(m)) return m;
  }
  return std::nullopt;
}

}  // namespace sbmlab
