#include "fracflow/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fracflow/error.hpp"
#include "fracflow/rng.hpp"

namespace fracflow::regress {

namespace {

using Index = Eigen::Index;

double midpoint(double a, double b) {
  const double t = a + (b - a) / 2.0;
  return t > a ? t : b;
}

double split_gain(double gl, double nl, double gr, double nr, double g, double n, double l2) {
  return gl * gl / (nl + l2) + gr * gr / (nr + l2) - g * g / (n + l2);
}

std::vector<std::size_t> candidate_features(std::size_t total, double frac, Rng& rng) {
  std::vector<std::size_t> f;
  if (frac >= 1.0) {
    f.resize(total);
    std::iota(f.begin(), f.end(), std::size_t{0});
    return f;
  }
  const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(frac * static_cast<double>(total))), 1, total);
  f = rng.sample_without_replacement(total, k);
  std::sort(f.begin(), f.end());
  return f;
}

}  // namespace

Vector Tree::predict(const Matrix& x) const {
  if (nodes_.empty()) throw Error("tree is not fitted");
  Vector out(x.rows());
  for (Index i = 0; i < x.rows(); ++i) out(i) = predict_row(x.row(i));
  return out;
}

int Tree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes_[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return best;
}

BinnedMatrix::BinnedMatrix(const Matrix& x, std::size_t max_bins) : rows_(static_cast<std::size_t>(x.rows())) {
  if (max_bins < 2 || max_bins > 256) throw Error("max_bins must lie in [2, 256]");
  const auto nf = static_cast<std::size_t>(x.cols());
  codes_.resize(nf * rows_);
  thresholds_.resize(nf);
  offsets_.assign(1, 0);
  std::vector<double> sorted(rows_);
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t i = 0; i < rows_; ++i) sorted[i] = x(static_cast<Index>(i), static_cast<Index>(f));
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct;
    std::vector<std::size_t> counts;
    for (double v : sorted) {
      if (distinct.empty() || v != distinct.back()) {
        distinct.push_back(v);
        counts.push_back(0);
      }
      ++counts.back();
    }
    auto& t = thresholds_[f];
    if (distinct.size() <= max_bins) {
      for (std::size_t k = 0; k + 1 < distinct.size(); ++k) t.push_back(midpoint(distinct[k], distinct[k + 1]));
    } else {
      std::size_t cum = 0, next_bin = 1;
      for (std::size_t k = 0; k + 1 < distinct.size() && next_bin < max_bins; ++k) {
        cum += counts[k];
        if (static_cast<double>(cum) * static_cast<double>(max_bins) >= static_cast<double>(next_bin * rows_)) {
          t.push_back(midpoint(distinct[k], distinct[k + 1]));
          while (next_bin < max_bins &&
                 static_cast<double>(cum) * static_cast<double>(max_bins) >= static_cast<double>(next_bin * rows_))
            ++next_bin;
        }
      }
    }
    auto* col = codes_.data() + f * rows_;
    for (std::size_t i = 0; i < rows_; ++i) {
      const double v = x(static_cast<Index>(i), static_cast<Index>(f));
      col[i] = static_cast<std::uint8_t>(std::upper_bound(t.begin(), t.end(), v) - t.begin());
    }
    offsets_.push_back(offsets_.back() + t.size() + 1);
  }
}

namespace {

struct Hist {
  std::vector<double> sum;
  std::vector<std::uint32_t> count;
};

class HistBuilder {
 public:
  HistBuilder(const BinnedMatrix& b, std::span<const double> g, std::vector<std::uint32_t> rows, const GrowOptions& o,
              std::vector<double>* out)
      : b_(b), g_(g), rows_(std::move(rows)), o_(o), rng_(o.seed), out_(out) {}

  Tree run() {
    if (rows_.empty()) throw Error("cannot fit a tree on empty data");
    Hist h;
    if (can_split(rows_.size(), 0)) fill(h, 0, rows_.size());
    build(0, rows_.size(), 0, h);
    return Tree(std::move(nodes_));
  }

 private:
  bool can_split(std::size_t n, int depth) const {
    return depth < o_.params.depth && n >= 2 * std::max<std::size_t>(o_.params.min_leaf, 1);
  }

  void fill(Hist& h, std::size_t begin, std::size_t end) const {
    h.sum.assign(b_.total_bins(), 0.0);
    h.count.assign(b_.total_bins(), 0);
    for (std::size_t f = 0; f < b_.features(); ++f) {
      const auto* col = b_.column(f);
      double* s = h.sum.data() + b_.offset(f);
      std::uint32_t* c = h.count.data() + b_.offset(f);
      for (std::size_t k = begin; k < end; ++k) {
        const auto r = rows_[k];
        s[col[r]] += g_[r];
        ++c[col[r]];
      }
    }
  }

  int build(std::size_t begin, std::size_t end, int depth, Hist& h) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    const std::size_t n = end - begin;
    double g = 0.0, g2 = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      g += g_[rows_[k]];
      g2 += g_[rows_[k]] * g_[rows_[k]];
    }
    const double l2 = o_.params.l2;
    const double value = g / (static_cast<double>(n) + l2);
    nodes_.back().value = value;
    nodes_.back().count = n;

    auto make_leaf = [&] {
      if (out_)
        for (std::size_t k = begin; k < end; ++k) (*out_)[rows_[k]] = value;
      return id;
    };
    if (!can_split(n, depth)) return make_leaf();

    const auto features = candidate_features(b_.features(), o_.feature_frac, rng_);
    const std::size_t min_leaf = std::max<std::size_t>(o_.params.min_leaf, 1);
    double best_gain = 1e-12 * g2;
    std::size_t best_f = 0, best_b = 0;
    bool found = false;
    for (auto f : features) {
      const double* s = h.sum.data() + b_.offset(f);
      const std::uint32_t* c = h.count.data() + b_.offset(f);
      double gl = 0.0;
      std::size_t nl = 0;
      for (std::size_t bin = 0; bin + 1 < b_.bins(f); ++bin) {
        gl += s[bin];
        nl += c[bin];
        if (nl < min_leaf || c[bin] == 0) continue;
        const std::size_t nr = n - nl;
        if (nr < min_leaf) break;
        const double gain = split_gain(gl, static_cast<double>(nl), g - gl, static_cast<double>(nr), g,
                                       static_cast<double>(n), l2);
        if (gain > best_gain) {
          best_gain = gain;
          best_f = f;
          best_b = bin;
          found = true;
        }
      }
    }
    if (!found) return make_leaf();

    const auto* col = b_.column(best_f);
    const auto mid_it = std::stable_partition(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                                              rows_.begin() + static_cast<std::ptrdiff_t>(end),
                                              [&](std::uint32_t r) { return col[r] <= best_b; });
    const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());

    nodes_[static_cast<std::size_t>(id)].feature = static_cast<int>(best_f);
    nodes_[static_cast<std::size_t>(id)].threshold = b_.threshold(best_f, best_b);
    nodes_[static_cast<std::size_t>(id)].gain = best_gain;

    Hist small;
    const bool left_small = (mid - begin) <= (end - mid);
    if (can_split(mid - begin, depth + 1) || can_split(end - mid, depth + 1)) {
      if (left_small) fill(small, begin, mid);
      else fill(small, mid, end);
      for (std::size_t k = 0; k < h.sum.size(); ++k) {
        h.sum[k] -= small.sum[k];
        h.count[k] -= small.count[k];
      }
    }
    Hist& lh = left_small ? small : h;
    Hist& rh = left_small ? h : small;
    const int l = build(begin, mid, depth + 1, lh);
    const int r = build(mid, end, depth + 1, rh);
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  const BinnedMatrix& b_;
  std::span<const double> g_;
  std::vector<std::uint32_t> rows_;
  const GrowOptions& o_;
  Rng rng_;
  std::vector<double>* out_;
  std::vector<TreeNode> nodes_;
};

class RandomBuilder {
 public:
  RandomBuilder(const Matrix& x, std::span<const double> g, std::vector<std::uint32_t> rows, const GrowOptions& o)
      : x_(x), g_(g), rows_(std::move(rows)), o_(o), rng_(o.seed) {}

  Tree run() {
    if (rows_.empty()) throw Error("cannot fit a tree on empty data");
    build(0, rows_.size(), 0);
    return Tree(std::move(nodes_));
  }

 private:
  int build(std::size_t begin, std::size_t end, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    const std::size_t n = end - begin;
    double g = 0.0, g2 = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      g += g_[rows_[k]];
      g2 += g_[rows_[k]] * g_[rows_[k]];
    }
    const double l2 = o_.params.l2;
    nodes_.back().value = g / (static_cast<double>(n) + l2);
    nodes_.back().count = n;
    const std::size_t min_leaf = std::max<std::size_t>(o_.params.min_leaf, 1);
    if (depth >= o_.params.depth || n < 2 * min_leaf) return id;

    const auto features = candidate_features(static_cast<std::size_t>(x_.cols()), o_.feature_frac, rng_);
    double best_gain = 1e-12 * g2, best_t = 0.0;
    int best_f = -1;
    for (auto f : features) {
      const auto fi = static_cast<Index>(f);
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t k = begin; k < end; ++k) {
        const double v = x_(static_cast<Index>(rows_[k]), fi);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (!(hi > lo)) continue;
      double t = rng_.uniform(lo, hi);
      if (t <= lo) t = std::nextafter(lo, hi);
      double gl = 0.0;
      std::size_t nl = 0;
      for (std::size_t k = begin; k < end; ++k)
        if (x_(static_cast<Index>(rows_[k]), fi) < t) {
          gl += g_[rows_[k]];
          ++nl;
        }
      if (nl < min_leaf || n - nl < min_leaf) continue;
      const double gain = split_gain(gl, static_cast<double>(nl), g - gl, static_cast<double>(n - nl), g,
                                     static_cast<double>(n), l2);
      if (gain > best_gain) {
        best_gain = gain;
        best_f = static_cast<int>(f);
        best_t = t;
      }
    }
    if (best_f < 0) return id;
    const auto mid_it = std::stable_partition(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                                              rows_.begin() + static_cast<std::ptrdiff_t>(end),
                                              [&](std::uint32_t r) { return x_(static_cast<Index>(r), best_f) < best_t; });
    const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());
    nodes_[static_cast<std::size_t>(id)].feature = best_f;
    nodes_[static_cast<std::size_t>(id)].threshold = best_t;
    nodes_[static_cast<std::size_t>(id)].gain = best_gain;
    const int l = build(begin, mid, depth + 1);
    const int r = build(mid, end, depth + 1);
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  const Matrix& x_;
  std::span<const double> g_;
  std::vector<std::uint32_t> rows_;
  const GrowOptions& o_;
  Rng rng_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

Tree grow_tree(const BinnedMatrix& bins, std::span<const double> g, std::vector<std::uint32_t> rows,
               const GrowOptions& options, std::vector<double>* row_output) {
  if (options.params.depth < 0) throw Error("tree depth must be nonnegative");
  if (options.params.l2 < 0.0) throw Error("l2 must be nonnegative");
  return HistBuilder(bins, g, std::move(rows), options, row_output).run();
}

Tree grow_random_tree(const Matrix& x, std::span<const double> g, std::vector<std::uint32_t> rows,
                      const GrowOptions& options) {
  if (options.params.depth < 0) throw Error("tree depth must be nonnegative");
  return RandomBuilder(x, g, std::move(rows), options).run();
}

Tree fit_tree(const Matrix& x, const Vector& y, const TreeParams& params) {
  if (x.rows() == 0 || x.rows() != y.size()) throw Error("fit_tree needs matching nonempty X and y");
  if (static_cast<std::size_t>(x.rows()) < params.min_leaf) throw Error("fewer rows than min_leaf");
  BinnedMatrix bins(x, params.max_bins);
  std::vector<std::uint32_t> rows(static_cast<std::size_t>(x.rows()));
  std::iota(rows.begin(), rows.end(), 0u);
  return grow_tree(bins, std::span<const double>(y.data(), static_cast<std::size_t>(y.size())), std::move(rows),
                   GrowOptions{params, 1.0, 0});
}

}  // namespace fracflow::regress
