#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "fixtures.hpp"
#include "fracflow/error.hpp"
#include "fracflow/structure.hpp"
#include "fracflow/synthgen.hpp"

using namespace fracflow;
using namespace fracflow::structure;

namespace {

Matrix triads() {
  Matrix x(7, 2);
  x << 0, 0, 0.2, 0, 0, 0.2, 5, 5, 5.2, 5, 5, 5.2, 40, -40;
  return x;
}

/// True when a and b induce the same partition and the same noise set.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] < 0) != (b[i] < 0)) return false;
    if (a[i] < 0) continue;
    auto [it, fresh] = ab.emplace(a[i], b[i]);
    if (!fresh && it->second != b[i]) return false;
    auto [jt, fresh2] = ba.emplace(b[i], a[i]);
    if (!fresh2 && jt->second != a[i]) return false;
  }
  return true;
}

bool linearly_separable(const Matrix& e, const std::vector<int>& cls) {
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  for (int epoch = 0; epoch < 10000; ++epoch) {
    bool clean = true;
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
      const Eigen::Vector3d p(e(i, 0), e(i, 1), 1.0);
      const double s = cls[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
      if (s * w.dot(p) <= 0.0) {
        w += s * p;
        clean = false;
      }
    }
    if (clean) return true;
  }
  return false;
}

}  // namespace

TEST(Dbscan, SinglePointIsNoise) {
  const auto l = dbscan(Matrix::Zero(1, 2), 0.5, 2);
  EXPECT_EQ(l.labels, std::vector<int>{-1});
  EXPECT_EQ(l.cluster_count(), 0);
}

TEST(Dbscan, TwoTriadsAndNoise) {
  const auto l = dbscan(triads(), 0.5, 2);
  EXPECT_EQ(l.labels, (std::vector<int>{0, 0, 0, 1, 1, 1, -1}));
  EXPECT_TRUE(same_partition(l.labels, synth::brute_force_dbscan(triads(), 0.5, 2).labels));
}

TEST(Dbscan, IdenticalPointsFormOneCluster) {
  const auto l = dbscan(Matrix::Constant(6, 3, 1.5), 0.1, 6);
  EXPECT_EQ(l.labels, std::vector<int>(6, 0));
}

TEST(Dbscan, BorderJoinsLowestIndexCore) {
  // Point 4 is within eps of a core in each group but is not core itself.
  Matrix x(9, 1);
  x << 1.8, 1.9, 1.95, 2.0, 1.0, 0.0, 0.05, 0.1, 0.2;
  const auto l = dbscan(x, 0.85, 4);
  EXPECT_EQ(l.labels, (std::vector<int>{0, 0, 0, 0, 0, 1, 1, 1, 1}));
  EXPECT_TRUE(same_partition(l.labels, synth::brute_force_dbscan(x, 0.85, 4).labels));
}

TEST(Dbscan, PermutationKeepsCoreAndNoiseSets) {
  Rng rng(3);
  for (int rep = 0; rep < 30; ++rep) {
    const Matrix x = fixtures::random_matrix(30, 2, rng, 0, 4);
    const auto perm = rng.permutation(30);
    Matrix px(30, 2);
    for (std::size_t i = 0; i < 30; ++i) px.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(perm[i]));
    const auto a = dbscan(x, 0.6, 3);
    const auto b = dbscan(px, 0.6, 3);
    for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(a.labels[perm[i]] < 0, b.labels[i] < 0);
    EXPECT_EQ(a.cluster_count(), b.cluster_count());
  }
}

TEST(Dbscan, ContiguousClusterIds) {
  Rng rng(4);
  for (int rep = 0; rep < 30; ++rep) {
    const auto l = dbscan(fixtures::random_matrix(35, 3, rng, 0, 3), 0.7, 3);
    const int k = l.cluster_count();
    for (int v : l.labels) EXPECT_TRUE(v >= -1 && v < k);
    for (int c = 0; c < k; ++c) EXPECT_NE(std::find(l.labels.begin(), l.labels.end(), c), l.labels.end());
  }
}

TEST(DefaultEps, PercentileOfKthNeighbour) {
  Matrix x(4, 1);
  x << 0, 1, 3, 6;
  // Second-nearest (self counted first) distances: 1, 1, 2, 3.
  EXPECT_DOUBLE_EQ(default_eps(x, 2, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(default_eps(x, 2, 0.5), 1.5);
}

TEST(CFactor, Values) {
  EXPECT_DOUBLE_EQ(c_factor(2), 1.0);
  EXPECT_NEAR(c_factor(3), 2.0 * 1.5 - 4.0 / 3.0, 1e-15);
}

TEST(IsolationForest, FarPointScoresHighest) {
  Rng rng(0);
  Matrix x(51, 2);
  for (Eigen::Index i = 0; i < 50; ++i) x.row(i) << rng.normal(), rng.normal();
  x.row(50) << 10.0, 10.0;
  const auto s = isolation_forest_scores(x, 100, 51, 0);
  EXPECT_EQ(std::max_element(s.scores.begin(), s.scores.end()) - s.scores.begin(), 50);
  for (double v : s.scores) {
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(IsolationForest, ZeroTreesRejected) {
  EXPECT_THROW(isolation_forest_scores(Matrix::Zero(5, 2), 0, 5, 1), Error);
}

TEST(IsolationForest, DuplicatingAPointDoesNotRaiseItsScore) {
  Rng rng(9);
  Matrix x(41, 2);
  for (Eigen::Index i = 0; i < 40; ++i) x.row(i) << rng.normal(), rng.normal();
  x.row(40) << 6.0, -6.0;
  Matrix dup(42, 2);
  dup << x, x.row(40);
  const auto a = isolation_forest_scores(x, 400, 41, 5);
  const auto b = isolation_forest_scores(dup, 400, 41, 5);
  EXPECT_LE(b.scores[40], a.scores[40] + 1e-12);
}

TEST(Kurtosis, NormalSampleNearZero) {
  Rng rng(1);
  std::vector<double> v(100000);
  for (auto& x : v) x = rng.normal();
  EXPECT_NEAR(kurtosis(v), 0.0, 0.1);
}

TEST(Kurtosis, TwoPointMass) {
  EXPECT_DOUBLE_EQ(kurtosis(std::vector<double>{-1, 1, -1, 1, -1, 1}), -2.0);
  EXPECT_THROW(kurtosis(std::vector<double>{3, 3, 3}), Error);
}

TEST(Tsne, ShapeFiniteAndDeterministic) {
  Rng rng(2);
  const Matrix x = fixtures::random_matrix(40, 5, rng);
  TsneOptions o;
  o.perplexity = 10;
  o.iters = 300;
  o.seed = 4;
  const auto a = tsne(x, o);
  const auto b = tsne(x, o);
  EXPECT_EQ(a.embedding.rows(), 40);
  EXPECT_EQ(a.embedding.cols(), 2);
  EXPECT_TRUE(a.embedding.allFinite());
  EXPECT_TRUE(a.embedding == b.embedding);
}

TEST(Tsne, BisectionHitsPerplexity) {
  Rng rng(5);
  const Matrix x = fixtures::random_matrix(60, 4, rng);
  TsneOptions o;
  o.perplexity = 15;
  o.iters = 1;
  const auto r = tsne(x, o);
  for (double p : r.perplexities) EXPECT_NEAR(p, 15.0, 1e-5);
}

TEST(Tsne, SeparatedBlobsStaySeparable) {
  Rng rng(6);
  Matrix x(60, 3);
  std::vector<int> cls(60);
  for (Eigen::Index i = 0; i < 60; ++i) {
    const double shift = i < 30 ? 0.0 : 20.0;
    cls[static_cast<std::size_t>(i)] = i >= 30;
    x.row(i) << rng.normal() + shift, rng.normal(), rng.normal();
  }
  const auto e = tsne_embed(x, 10, 200, 500, 7);
  EXPECT_TRUE(linearly_separable(e, cls));
}

TEST(Tsne, PerplexityMustBeBelowN) {
  EXPECT_THROW(tsne_embed(Matrix::Random(5, 2), 5, 200, 10, 1), Error);
}

TEST(Embedding, CsvHasOneRowPerPoint) {
  fixtures::TempDir dir("embedding");
  Matrix e(2, 2);
  e << 0.5, 1, 2, 3;
  write_embedding_csv(fixtures::keys(2), e, {0, -1}, {0.4, 0.6}, dir / "e.csv");
  std::ifstream in(dir / "e.csv");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 3);
}
