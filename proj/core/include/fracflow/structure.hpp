#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracflow/table.hpp"

namespace fracflow::structure {

struct ClusterLabels {
  /// -1 marks noise; clusters are numbered 0..K-1 by first core point.
  std::vector<int> labels;
  double eps = 0.0;
  std::size_t min_pts = 0;

  int cluster_count() const;
};

/// Density-based clustering with the lowest-index-core rule for border points.
ClusterLabels dbscan(const Matrix& points, double eps, std::size_t min_pts);

/// 95th percentile (linear interpolation) of each point's distance to its
/// min_pts-th nearest neighbour, the point itself counted as the first.
double default_eps(const Matrix& points, std::size_t min_pts, double quantile = 0.95);

/// Average path length of an unsuccessful search in a binary search tree
/// of n points: 2 H(n-1) - 2 (n-1) / n.
double c_factor(std::size_t n);

struct AnomalyScores {
  std::vector<double> scores;
  std::size_t n_trees = 0;
  std::size_t subsample = 0;
};

AnomalyScores isolation_forest_scores(const Matrix& points, std::size_t n_trees, std::size_t subsample,
                                      std::uint64_t seed);

/// Excess kurtosis with population moments.
double kurtosis(std::span<const double> values);

struct TsneOptions {
  double perplexity = 30.0;
  double learning_rate = 200.0;
  int iters = 1000;
  std::uint64_t seed = 0;
};

struct TsneResult {
  Matrix embedding;
  /// Perplexity reached by the bandwidth search for each point.
  std::vector<double> perplexities;
};

/// Exact t-SNE to two dimensions.
TsneResult tsne(const Matrix& points, const TsneOptions& options);
Matrix tsne_embed(const Matrix& points, double perplexity, double learning_rate, int iters, std::uint64_t seed);

/// Writes key columns, x, y, cluster and anomaly score per row.
void write_embedding_csv(const std::vector<RowKey>& keys, const Matrix& embedding, const std::vector<int>& labels,
                         const std::vector<double>& scores, const std::string& path);

}  // namespace fracflow::structure
