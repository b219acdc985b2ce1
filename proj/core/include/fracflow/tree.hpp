#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fracflow/table.hpp"

namespace fracflow::regress {

/// Flat tree node. Split nodes send x[feature] < threshold to `left`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  std::size_t count = 0;
  /// Objective reduction of the split (0 for leaves).
  double gain = 0.0;

  bool is_leaf() const { return feature < 0; }
};

class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  bool empty() const { return nodes_.empty(); }

  template <class Row>
  double predict_row(const Row& x) const {
    std::size_t n = 0;
    while (!nodes_[n].is_leaf())
      n = static_cast<std::size_t>(x(nodes_[n].feature) < nodes_[n].threshold ? nodes_[n].left : nodes_[n].right);
    return nodes_[n].value;
  }
  Vector predict(const Matrix& x) const;
  int depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

struct TreeParams {
  int depth = 6;
  std::size_t min_leaf = 1;
  double l2 = 0.0;
  std::size_t max_bins = 256;
};

/// Per-feature quantization: up to max_bins bins, boundaries at midpoints
/// between adjacent distinct training values. With no more distinct values
/// than bins every value owns a bin and splits are exact.
class BinnedMatrix {
 public:
  BinnedMatrix(const Matrix& x, std::size_t max_bins);

  std::size_t rows() const { return rows_; }
  std::size_t features() const { return thresholds_.size(); }
  std::size_t bins(std::size_t f) const { return thresholds_[f].size() + 1; }
  std::size_t offset(std::size_t f) const { return offsets_[f]; }
  std::size_t total_bins() const { return offsets_.back(); }
  std::uint8_t code(std::size_t row, std::size_t f) const { return codes_[f * rows_ + row]; }
  const std::uint8_t* column(std::size_t f) const { return codes_.data() + f * rows_; }
  /// Threshold between bin b and b + 1.
  double threshold(std::size_t f, std::size_t b) const { return thresholds_[f][b]; }

 private:
  std::size_t rows_ = 0;
  std::vector<std::uint8_t> codes_;
  std::vector<std::vector<double>> thresholds_;
  std::vector<std::size_t> offsets_;
};

struct GrowOptions {
  TreeParams params;
  /// Fraction of features drawn at every split (random forest); 1 = all.
  double feature_frac = 1.0;
  std::uint64_t seed = 0;
};

/// Histogram-based greedy tree on targets g over the given rows (duplicates
/// allowed). Leaf value = sum(g) / (count + l2). When row_output is given it
/// receives the leaf value of every listed row.
Tree grow_tree(const BinnedMatrix& bins, std::span<const double> g, std::vector<std::uint32_t> rows,
               const GrowOptions& options, std::vector<double>* row_output = nullptr);

/// Extremely randomized tree: one uniform threshold per candidate feature
/// in the node's value range.
Tree grow_random_tree(const Matrix& x, std::span<const double> g, std::vector<std::uint32_t> rows,
                      const GrowOptions& options);

Tree fit_tree(const Matrix& x, const Vector& y, const TreeParams& params);

}  // namespace fracflow::regress
