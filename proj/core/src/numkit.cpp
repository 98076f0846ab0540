#include "sbmlab/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace sbmlab {

ConvergenceFailure::ConvergenceFailure(const std::string& what, double worst_residual)
    : Error(what), worst_residual_(worst_residual) {}

EigenPairs topk_eigen(const Matrix& m, int k) {
  if (m.rows() != m.cols()) throw Error("topk_eigen: matrix must be square");
  const int n = static_cast<int>(m.rows());
  if (k < 1 || k > n) throw Error("topk_eigen: k must lie in [1, n]");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw Error("topk_eigen: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailure("topk_eigen: symmetric QL iteration did not converge",
                             std::numeric_limits<double>::infinity());
  }
  const Vector& all_values = solver.eigenvalues();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double fa = std::abs(all_values(a));
    const double fb = std::abs(all_values(b));
    if (fa != fb) return fa > fb;
    return all_values(a) > all_values(b);
  });

  EigenPairs pairs{Vector(k), Matrix(n, k)};
  double worst = 0.0;
  for (int c = 0; c < k; ++c) {
    const int src = order[c];
    Vector u = solver.eigenvectors().col(src);
    Eigen::Index top = 0;
    u.cwiseAbs().maxCoeff(&top);
    if (u(top) < 0.0) u = -u;
    const double lambda = all_values(src);
    const double residual = (m * u - lambda * u).norm() / std::max(1.0, std::abs(lambda));
    worst = std::max(worst, residual);
    pairs.values(c) = lambda;
    pairs.vectors.col(c) = u;
  }
  if (worst > 1e-8) {
    std::ostringstream os;
    os << "topk_eigen: residual " << worst << " exceeds tolerance";
    throw ConvergenceFailure(os.str(), worst);
  }
  return pairs;
}

namespace {

struct LloydRun {
  std::vector<int> labels;
  Matrix centers;
  double wcss = 0.0;
  int iterations = 0;
  std::vector<double> trace;
};

Matrix seed_plus_plus(const Matrix& points, int k, RngHandle& rng) {
  const Eigen::Index n = points.rows();
  Matrix centers(k, points.cols());
  centers.row(0) = points.row(rng.below(static_cast<int>(n)));
  std::vector<double> d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = (points.row(i) - centers.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        u -= d2[i];
        if (u < 0.0) {
          pick = i;
          break;
        }
      }
      while (d2[pick] == 0.0 && pick > 0) --pick;
    } else {
      pick = rng.below(static_cast<int>(n));
    }
    centers.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (points.row(i) - centers.row(c)).squaredNorm());
    }
  }
  return centers;
}

double assign_nearest(const Matrix& points, const Matrix& centers, std::vector<int>& labels, std::vector<double>& dist) {
  const Eigen::Index n = points.rows();
  const Eigen::Index k = centers.rows();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < k; ++c) {
      const double d = (points.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[i] = best;
    dist[i] = best_d;
    total += best_d;
  }
  return total;
}

// Moves the point farthest from its centre (taken from a cluster with more
// than one member) into each empty cluster.
void repair_empty(const Matrix& points, Matrix& centers, std::vector<int>& labels, std::vector<double>& dist) {
  const int k = static_cast<int>(centers.rows());
  std::vector<int> sizes(k, 0);
  for (int l : labels) ++sizes[l];
  for (int c = 0; c < k; ++c) {
    if (sizes[c] > 0) continue;
    int far = -1;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (sizes[labels[i]] > 1 && (far < 0 || dist[i] > dist[far])) far = static_cast<int>(i);
    }
    if (far < 0) break;
    --sizes[labels[far]];
    labels[far] = c;
    sizes[c] = 1;
    dist[far] = 0.0;
    centers.row(c) = points.row(far);
  }
}

void update_centers(const Matrix& points, const std::vector<int>& labels, Matrix& centers) {
  const int k = static_cast<int>(centers.rows());
  Matrix sums = Matrix::Zero(k, points.cols());
  std::vector<int> counts(k, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    sums.row(labels[i]) += points.row(static_cast<Eigen::Index>(i));
    ++counts[labels[i]];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] > 0) centers.row(c) = sums.row(c) / counts[c];
  }
}

double total_wcss(const Matrix& points, const Matrix& centers, const std::vector<int>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    total += (points.row(static_cast<Eigen::Index>(i)) - centers.row(labels[i])).squaredNorm();
  }
  return total;
}

LloydRun lloyd(const Matrix& points, int k, RngHandle& rng, const KMeansOptions& options) {
  const Eigen::Index n = points.rows();
  LloydRun run;
  run.centers = seed_plus_plus(points, k, rng);
  run.labels.assign(n, -1);
  std::vector<int> next(n);
  std::vector<double> dist(n);
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_iter; ++it) {
    assign_nearest(points, run.centers, next, dist);
    repair_empty(points, run.centers, next, dist);
    const bool unchanged = next == run.labels;
    run.labels = next;
    update_centers(points, run.labels, run.centers);
    run.wcss = total_wcss(points, run.centers, run.labels);
    run.trace.push_back(run.wcss);
    run.iterations = it;
    if (unchanged || run.wcss == 0.0 || previous - run.wcss <= options.tol * previous) break;
    previous = run.wcss;
  }
  return run;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, RngHandle& rng, const KMeansOptions& options) {
  if (k < 1) throw Error("kmeans: k must be >= 1");
  if (points.rows() < k) throw Error("kmeans: fewer points than clusters");
  if (points.cols() < 1) throw Error("kmeans: points need at least one coordinate");
  if (options.n_init < 1 || options.max_iter < 1) throw Error("kmeans: n_init and max_iter must be >= 1");

  const std::uint64_t base = rng();
  LloydRun best;
  int best_restart = -1;
  for (int r = 0; r < options.n_init; ++r) {
    RngHandle restart_rng(base, static_cast<std::uint64_t>(r));
    LloydRun run = lloyd(points, k, restart_rng, options);
    if (best_restart < 0 || run.wcss < best.wcss) {
      best = std::move(run);
      best_restart = r;
    }
  }
  return {CommunityAssignment::from_indices(best.labels, k), std::move(best.centers), best.wcss, best.iterations,
          std::move(best.trace), best_restart};
}

}  // namespace sbmlab
