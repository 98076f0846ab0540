#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sbmlab/generator.hpp"
#include "sbmlab/metrics.hpp"
#include "sbmlab/spectral.hpp"

using namespace sbmlab;

namespace {

AdjacencyMatrix disjoint_cliques(int count, int size) {
  std::vector<std::pair<int, int>> edges;
  for (int c = 0; c < count; ++c) {
    for (int i = 0; i < size; ++i) {
      for (int j = i + 1; j < size; ++j) edges.emplace_back(c * size + i, c * size + j);
    }
  }
  return AdjacencyMatrix::from_edges(count * size, edges);
}

CommunityAssignment clique_truth(int count, int size) {
  std::vector<int> labels;
  for (int c = 1; c <= count; ++c) labels.insert(labels.end(), size, c);
  return CommunityAssignment(labels, count);
}

Matrix squared_distances(const Matrix& rows) {
  const Eigen::Index n = rows.rows();
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = (rows.row(i) - rows.row(j)).squaredNorm();
  }
  return d;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

const SpectralVariant kVariants[] = {
    {SpectralTag::Vanilla, {}, {}},
    {SpectralTag::Score, {}, {}},
    {SpectralTag::L2Norm, {}, {}},
    {SpectralTag::Regularized, {}, {}},
};

}  // namespace

TEST_CASE("vanilla embedding is constant on disjoint cliques") {
  const Embedding e = embed_vanilla(disjoint_cliques(2, 3), 2);
  for (int c = 0; c < 2; ++c) {
    for (int i = 1; i < 3; ++i) CHECK((e.coords.row(3 * c + i) - e.coords.row(3 * c)).norm() <= 1e-8);
  }
  CHECK((e.coords.row(0) - e.coords.row(3)).norm() > 0.1);
}

TEST_CASE("empty graph embeds without error") {
  const AdjacencyMatrix empty = validate_adjacency(Matrix::Zero(6, 6));
  const Embedding v = embed_vanilla(empty, 2);
  CHECK((v.coords.transpose() * v.coords - Matrix::Identity(2, 2)).norm() <= 1e-10);
  CHECK(rsc_default_tau(empty) == 1.0);
  CHECK_NOTHROW(embed_rsc(empty, 2));
  CHECK(rsc_operator(empty, 1.0).isZero(0.0));
}

TEST_CASE("vanilla spectral recovers a planted two-block graph") {
  const int n = 200;
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i % 2 + 1;
  const CommunityAssignment truth(labels, 2);
  const KernelMatrix kernel = build_kernel(2, 0.3);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RngHandle rng = seeded_rng(seed, 2);
    const AdjacencyMatrix a = sample_adjacency(truth, kernel, rng);
    RngHandle krng = seeded_rng(seed, 3);
    CHECK(ari(truth, spectral_cluster(a, 2, kVariants[0], krng).labels) > 0.9);
  }
}

TEST_CASE("score ratio step") {
  Matrix u(2, 2);
  u << 0.5, 0.5, 0.5, -0.5;
  const Matrix r = score_ratios(u, 10.0);
  CHECK(r.cols() == 1);
  CHECK(r(0, 0) == 1.0);
  CHECK(r(1, 0) == -1.0);

  Matrix tiny(3, 3);
  tiny << 1e-15, 0.3, -0.2, 0.5, 0.5, 0.1, 0.5, -0.5, 0.2;
  const Matrix clipped = score_ratios(tiny, 10.0);
  CHECK(clipped(0, 0) == 10.0);
  CHECK(clipped(0, 1) == -10.0);
  CHECK(clipped(1, 0) == 1.0);
  CHECK(clipped.cwiseAbs().maxCoeff() <= 10.0);

  CHECK_THROWS_AS(score_ratios(u, 0.0), Error);
  CHECK_THROWS_AS(score_ratios(u.leftCols(1), 1.0), Error);
  CHECK_THROWS_AS(embed_score(disjoint_cliques(2, 3), 1, 1.0), Error);
}

TEST_CASE("score embedding is block-constant under multiplicative degree heterogeneity") {
  const int per = 20, k = 3, n = per * k;
  Matrix b(k, k);
  b << 0.6, 0.2, 0.1, 0.2, 0.5, 0.15, 0.1, 0.15, 0.4;
  RngHandle rng = seeded_rng(6, 0);
  Vector theta(n);
  for (int i = 0; i < n; ++i) theta(i) = 0.5 + rng.uniform();
  Matrix p(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) p(i, j) = theta(i) * theta(j) * b(i / per, j / per);
  }
  const Matrix ratios = score_ratios(topk_eigen(p, k).vectors, std::log(n));
  for (int i = 0; i < n; ++i) CHECK((ratios.row(i) - ratios.row(per * (i / per))).norm() <= 1e-6);
  CHECK((ratios.row(0) - ratios.row(per)).norm() > 1e-3);
}

TEST_CASE("vanilla and L2 rows collapse on the hollow expectation matrix") {
  const int per = 15, k = 3, n = per * k;
  const KernelMatrix kernel = build_kernel(k, 0.3);
  Matrix p(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) p(i, j) = i == j ? 0.0 : kernel(i / per, j / per);
  }
  Matrix u = topk_eigen(p, k).vectors;
  for (int i = 0; i < n; ++i) CHECK((u.row(i) - u.row(per * (i / per))).norm() <= 1e-6);
  normalize_rows(u);
  for (int i = 0; i < n; ++i) CHECK((u.row(i) - u.row(per * (i / per))).norm() <= 1e-6);
}

TEST_CASE("row normalisation") {
  Matrix rows(3, 2);
  rows << 3, 4, 0, 0, 1e-13, 0;
  CHECK(normalize_rows(rows) == 2);
  CHECK(rows(0, 0) == doctest::Approx(0.6));
  CHECK(rows(0, 1) == doctest::Approx(0.8));
  CHECK(rows.row(1).isZero(0.0));
  CHECK(rows.row(2).isZero(0.0));

  const GeneratedInstance inst = generate({120, 4, 5.0, 1.0, 3});
  const Embedding e = embed_l2(inst.adjacency, 4);
  int zero = 0;
  for (int i = 0; i < e.coords.rows(); ++i) {
    const double norm = e.coords.row(i).norm();
    CHECK((std::abs(norm) <= 1e-12 || std::abs(norm - 1.0) <= 1e-12));
    if (norm == 0.0) ++zero;
  }
  CHECK(zero == e.zero_rows);
}

TEST_CASE("RSC on a regular graph matches the vanilla eigenvectors") {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < 3; ++i) {
    for (int j = 3; j < 6; ++j) edges.emplace_back(i, j);
  }
  const AdjacencyMatrix a = AdjacencyMatrix::from_edges(6, edges);
  const double tau = rsc_default_tau(a);
  CHECK(tau == 18.0);
  CHECK((rsc_operator(a, tau) - a.dense() / (3.0 + tau)).norm() <= 1e-15);
  const EigenPairs plain = topk_eigen(a.dense(), 2);
  const EigenPairs reg = topk_eigen(rsc_operator(a, tau), 2);
  CHECK((plain.vectors - reg.vectors).norm() <= 1e-10);
  CHECK((plain.values / (3.0 + tau) - reg.values).norm() <= 1e-12);
  Matrix normalized = plain.vectors;
  normalize_rows(normalized);
  CHECK((embed_rsc(a, 2).coords - normalized).norm() <= 1e-10);
  CHECK_THROWS_AS(rsc_operator(a, 0.0), Error);
}

TEST_CASE("pairwise distances survive eigenvector sign flips") {
  const GeneratedInstance inst = generate({80, 3, 0.0, 0.5, 21});
  const AdjacencyMatrix& a = inst.adjacency;
  const Matrix u = topk_eigen(a.dense(), 3).vectors;
  const Matrix v = topk_eigen(rsc_operator(a, rsc_default_tau(a)), 3).vectors;
  for (int col = 0; col < 3; ++col) {
    Matrix uf = u, vf = v;
    uf.col(col) *= -1.0;
    vf.col(col) *= -1.0;
    CHECK(squared_distances(uf) == squared_distances(u));
    Matrix l2 = u, l2f = uf;
    normalize_rows(l2);
    normalize_rows(l2f);
    CHECK(squared_distances(l2f) == squared_distances(l2));
    Matrix r = v, rf = vf;
    normalize_rows(r);
    normalize_rows(rf);
    CHECK(squared_distances(rf) == squared_distances(r));
    CHECK(squared_distances(score_ratios(uf, std::log(80.0))) == squared_distances(score_ratios(u, std::log(80.0))));
  }
}

TEST_CASE("embeddings are permutation equivariant") {
  const GeneratedInstance inst = generate({90, 3, 0.0, 0.1, 4});
  const int n = inst.adjacency.size();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  RngHandle rng = seeded_rng(4, 7);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> p(n);
  for (int i = 0; i < n; ++i) p.indices()(i) = perm[i];
  const Matrix dense = p * inst.adjacency.dense() * p.transpose();
  const AdjacencyMatrix permuted = validate_adjacency(dense);
  for (const SpectralVariant& variant : kVariants) {
    const Matrix d0 = squared_distances(spectral_embed(inst.adjacency, 3, variant).coords);
    const Matrix d1 = squared_distances(spectral_embed(permuted, 3, variant).coords);
    const Matrix d0p = p * d0 * p.transpose();
    CHECK((d0p - d1).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("disjoint cliques are recovered exactly by every variant") {
  const AdjacencyMatrix a = disjoint_cliques(2, 10);
  const CommunityAssignment truth = clique_truth(2, 10);
  for (const SpectralVariant& variant : kVariants) {
    RngHandle rng = seeded_rng(1, 0);
    CHECK(ari(truth, spectral_cluster(a, 2, variant, rng).labels) == 1.0);
  }
}

TEST_CASE("k = 1 returns a single community") {
  const GeneratedInstance inst = generate({30, 2, 0.0, 0.5, 1});
  for (const SpectralVariant& variant : kVariants) {
    RngHandle rng = seeded_rng(1, 0);
    const SpectralResult r = spectral_cluster(inst.adjacency, 1, variant, rng);
    CHECK(r.labels.labels() == std::vector<int>(30, 1));
    CHECK(r.kmeans_iterations == 0);
  }
}

TEST_CASE("dense five-block graphs are recovered") {
  std::vector<double> sc, score, l2;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const GeneratedInstance inst = generate({500, 5, 0.0, 0.1, seed});
    for (int v = 0; v < 3; ++v) {
      RngHandle rng = seeded_rng(seed, 100 + v);
      const double value = ari(inst.truth, spectral_cluster(inst.adjacency, 5, kVariants[v], rng).labels);
      (v == 0 ? sc : v == 1 ? score : l2).push_back(value);
    }
  }
  CHECK(median(sc) > 0.9);
  CHECK(median(score) > 0.9);
  CHECK(median(l2) > 0.9);
}

TEST_CASE("RSC trails SCORE on sparse two-block graphs") {
  std::vector<double> score, rsc;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const GeneratedInstance inst = generate({500, 2, 0.0, 0.5, seed});
    RngHandle r1 = seeded_rng(seed, 101);
    RngHandle r2 = seeded_rng(seed, 103);
    score.push_back(ari(inst.truth, spectral_cluster(inst.adjacency, 2, kVariants[1], r1).labels));
    rsc.push_back(ari(inst.truth, spectral_cluster(inst.adjacency, 2, kVariants[3], r2).labels));
  }
  MESSAGE("median ARI: SCORE " << median(score) << ", RSC " << median(rsc));
  CHECK(median(rsc) < median(score));
}
