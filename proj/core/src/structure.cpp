#include "fracflow/structure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>
#include <queue>

#include "fracflow/csv.hpp"
#include "fracflow/error.hpp"
#include "fracflow/parallel.hpp"
#include "fracflow/rng.hpp"

namespace fracflow::structure {

namespace {

using Index = Eigen::Index;

double sq_dist(const Matrix& x, Index a, Index b) { return (x.row(a) - x.row(b)).squaredNorm(); }

double quantile_linear(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

int ClusterLabels::cluster_count() const {
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  return k;
}

ClusterLabels dbscan(const Matrix& points, double eps, std::size_t min_pts) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (n == 0) throw Error("empty input");
  if (!(eps > 0.0)) throw Error("eps must be positive");
  if (min_pts < 1) throw Error("min_pts must be at least 1");
  const double eps2 = eps * eps;

  std::vector<std::vector<std::size_t>> nbrs(n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j)
      if (sq_dist(points, static_cast<Index>(i), static_cast<Index>(j)) <= eps2) nbrs[i].push_back(j);
  });
  std::vector<char> core(n);
  for (std::size_t i = 0; i < n; ++i) core[i] = nbrs[i].size() >= min_pts;

  ClusterLabels out{std::vector<int>(n, -1), eps, min_pts};
  int next = 0;
  std::vector<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || out.labels[i] != -1) continue;
    out.labels[i] = next;
    queue.assign(1, i);
    for (std::size_t head = 0; head < queue.size(); ++head)
      for (auto q : nbrs[queue[head]])
        if (core[q] && out.labels[q] == -1) {
          out.labels[q] = next;
          queue.push_back(q);
        }
    ++next;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    for (auto j : nbrs[i])
      if (core[j]) {
        out.labels[i] = out.labels[j];
        break;
      }
  }
  return out;
}

double default_eps(const Matrix& points, std::size_t min_pts, double quantile) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (n == 0) throw Error("empty input");
  if (min_pts < 1 || min_pts > n) throw Error("min_pts must lie in [1, N]");
  std::vector<double> kth(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = sq_dist(points, static_cast<Index>(i), static_cast<Index>(j));
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(min_pts - 1), d.end());
    kth[i] = std::sqrt(d[min_pts - 1]);
  });
  return quantile_linear(std::move(kth), quantile);
}

double c_factor(std::size_t n) {
  if (n <= 1) return 0.0;
  if (n == 2) return 1.0;
  const double m = static_cast<double>(n - 1);
  double h = 0.0;
  if (n <= 1000) {
    for (std::size_t k = n - 1; k >= 1; --k) h += 1.0 / static_cast<double>(k);
  } else {
    h = std::log(m) + 0.57721566490153286 + 1.0 / (2.0 * m) - 1.0 / (12.0 * m * m);
  }
  return 2.0 * h - 2.0 * m / static_cast<double>(n);
}

namespace {

struct IsoNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::size_t size = 0;
};

class IsoTree {
 public:
  IsoTree(const Matrix& x, std::vector<std::size_t> rows, std::size_t limit, Rng& rng) {
    build(x, rows, 0, limit, rng);
  }

  double path_length(const Eigen::RowVectorXd& p) const {
    int node = 0;
    double depth = 0.0;
    while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
      const auto& nd = nodes_[static_cast<std::size_t>(node)];
      node = p(nd.feature) < nd.threshold ? nd.left : nd.right;
      depth += 1.0;
    }
    return depth + c_factor(nodes_[static_cast<std::size_t>(node)].size);
  }

 private:
  int build(const Matrix& x, std::vector<std::size_t>& rows, std::size_t depth, std::size_t limit, Rng& rng) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_.back().size = rows.size();
    if (rows.size() <= 1 || depth >= limit) return id;
    std::vector<int> candidates;
    std::vector<std::pair<double, double>> range;
    for (Index f = 0; f < x.cols(); ++f) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (auto r : rows) {
        lo = std::min(lo, x(static_cast<Index>(r), f));
        hi = std::max(hi, x(static_cast<Index>(r), f));
      }
      if (hi > lo) {
        candidates.push_back(static_cast<int>(f));
        range.emplace_back(lo, hi);
      }
    }
    if (candidates.empty()) return id;
    const auto pick = rng.index(candidates.size());
    const int f = candidates[pick];
    double t = rng.uniform(range[pick].first, range[pick].second);
    if (t <= range[pick].first) t = std::nextafter(range[pick].first, range[pick].second);
    std::vector<std::size_t> left, right;
    for (auto r : rows) (x(static_cast<Index>(r), f) < t ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const int l = build(x, left, depth + 1, limit, rng);
    const int rr = build(x, right, depth + 1, limit, rng);
    auto& nd = nodes_[static_cast<std::size_t>(id)];
    nd.feature = f;
    nd.threshold = t;
    nd.left = l;
    nd.right = rr;
    return id;
  }

  std::vector<IsoNode> nodes_;
};

}  // namespace

AnomalyScores isolation_forest_scores(const Matrix& points, std::size_t n_trees, std::size_t subsample,
                                      std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (n_trees < 1) throw Error("n_trees must be at least 1");
  if (subsample < 2) throw Error("subsample must be at least 2");
  if (subsample > n) throw Error("subsample exceeds the number of points");
  const auto limit = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(subsample))));

  std::vector<std::unique_ptr<IsoTree>> trees(n_trees);
  parallel_for(n_trees, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    trees[t] = std::make_unique<IsoTree>(points, rng.sample_without_replacement(n, subsample), limit, rng);
  });
  AnomalyScores out{std::vector<double>(n), n_trees, subsample};
  const double c = c_factor(subsample);
  parallel_for(n, [&](std::size_t i) {
    double total = 0.0;
    const Eigen::RowVectorXd p = points.row(static_cast<Index>(i));
    for (const auto& tree : trees) total += tree->path_length(p);
    out.scores[i] = std::pow(2.0, -(total / static_cast<double>(n_trees)) / c);
  });
  return out;
}

double kurtosis(std::span<const double> values) {
  if (values.size() < 4) throw Error("kurtosis needs at least 4 values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) throw Error("degenerate column");
  return m4 / (m2 * m2) - 3.0;
}

namespace {

/// Conditional affinities of one row for a given precision; returns the
/// Shannon entropy (nats).
double row_affinities(const Eigen::RowVectorXd& d2, Index self, double beta, Eigen::RowVectorXd& p) {
  double dmin = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < d2.size(); ++j)
    if (j != self) dmin = std::min(dmin, d2(j));
  double sum = 0.0, weighted = 0.0;
  for (Index j = 0; j < d2.size(); ++j) {
    if (j == self) {
      p(j) = 0.0;
      continue;
    }
    p(j) = std::exp(-beta * (d2(j) - dmin));
    sum += p(j);
    weighted += p(j) * (d2(j) - dmin);
  }
  p /= sum;
  return std::log(sum) + beta * weighted / sum;
}

}  // namespace

TsneResult tsne(const Matrix& points, const TsneOptions& o) {
  const Index n = points.rows();
  if (n < 3) throw Error("t-SNE needs at least 3 points");
  if (!(o.perplexity > 0.0) || o.perplexity >= static_cast<double>(n)) throw Error("perplexity must lie in (0, N)");
  if (o.iters < 0) throw Error("iteration count must be nonnegative");

  Matrix d2(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Index>(ii);
    for (Index j = 0; j < n; ++j) d2(i, j) = sq_dist(points, i, j);
  });

  Matrix p(n, n);
  std::vector<double> reached(static_cast<std::size_t>(n));
  const double target = o.perplexity;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Index>(ii);
    const Eigen::RowVectorXd row = d2.row(i);
    Eigen::RowVectorXd pr(n);
    double lo = 0.0, hi = std::numeric_limits<double>::infinity(), beta = 1.0;
    double perp = 0.0;
    for (int step = 0; step < 500; ++step) {
      perp = std::exp(row_affinities(row, i, beta, pr));
      if (std::abs(perp - target) < 1e-6) break;
      if (perp > target) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
      } else {
        hi = beta;
        beta = (beta + lo) / 2.0;
      }
    }
    p.row(i) = pr;
    reached[ii] = perp;
  });
  Matrix pj = (p + p.transpose()) / (2.0 * static_cast<double>(n));
  pj = pj.cwiseMax(1e-12);

  Rng rng(o.seed);
  Matrix y(n, 2);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < 2; ++k) y(i, k) = 1e-4 * rng.normal();
  Matrix update = Matrix::Zero(n, 2), gains = Matrix::Ones(n, 2), grad(n, 2), num(n, n);

  for (int it = 0; it < o.iters; ++it) {
    const double exaggeration = it < 250 ? 12.0 : 1.0;
    const double momentum = it < 250 ? 0.5 : 0.8;
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
      const auto i = static_cast<Index>(ii);
      for (Index j = 0; j < n; ++j) num(i, j) = i == j ? 0.0 : 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
    });
    const double zsum = num.sum();
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
      const auto i = static_cast<Index>(ii);
      double gx = 0.0, gy = 0.0;
      for (Index j = 0; j < n; ++j) {
        const double w = (exaggeration * pj(i, j) - num(i, j) / zsum) * num(i, j);
        gx += w * (y(i, 0) - y(j, 0));
        gy += w * (y(i, 1) - y(j, 1));
      }
      grad(i, 0) = 4.0 * gx;
      grad(i, 1) = 4.0 * gy;
    });
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < 2; ++k) {
        const bool same = (grad(i, k) > 0.0) == (update(i, k) > 0.0);
        gains(i, k) = std::max(same ? gains(i, k) * 0.8 : gains(i, k) + 0.2, 0.01);
        update(i, k) = momentum * update(i, k) - o.learning_rate * gains(i, k) * grad(i, k);
        y(i, k) += update(i, k);
      }
    y.rowwise() -= y.colwise().mean();
  }
  return {std::move(y), std::move(reached)};
}

Matrix tsne_embed(const Matrix& points, double perplexity, double learning_rate, int iters, std::uint64_t seed) {
  return tsne(points, {perplexity, learning_rate, iters, seed}).embedding;
}

void write_embedding_csv(const std::vector<RowKey>& keys, const Matrix& embedding, const std::vector<int>& labels,
                         const std::vector<double>& scores, const std::string& path) {
  const auto n = keys.size();
  if (static_cast<std::size_t>(embedding.rows()) != n || labels.size() != n || scores.size() != n)
    throw Error("embedding export inputs differ in length");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  csv::write_row(out, {"field_id", "well_id", "layer_id", "op_date", "x", "y", "cluster", "anomaly_score"});
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Index>(i);
    csv::write_row(out, {keys[i].field_id, keys[i].well_id, keys[i].layer_id, std::to_string(keys[i].op_date),
                         csv::format_double(embedding(r, 0)), csv::format_double(embedding(r, 1)),
                         std::to_string(labels[i]), csv::format_double(scores[i])});
  }
}

}  // namespace fracflow::structure
