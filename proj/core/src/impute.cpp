#include "fracflow/impute.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "fracflow/error.hpp"
#include "fracflow/linalg.hpp"
#include "fracflow/rng.hpp"

namespace fracflow::impute {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

FieldTable with_numeric(const FieldTable& t, Matrix x) {
  return FieldTable(t.keys(), t.schema(), std::move(x), Mask::Constant(t.numeric_missing().rows(), t.numeric_missing().cols(), false),
                    t.categorical(), t.categorical_missing());
}

std::vector<std::size_t> rows_where(const std::vector<bool>& keep) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < keep.size(); ++i)
    if (keep[i]) out.push_back(i);
  return out;
}

std::vector<double> observed_means(const FieldTable& t) {
  std::vector<double> means(t.numeric_count());
  for (std::size_t j = 0; j < t.numeric_count(); ++j) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.rows(); ++i)
      if (!t.missing(i, j)) {
        sum += t.numeric()(idx(i), idx(j));
        ++n;
      }
    if (n == 0) throw Error("column '" + t.numeric_meta(j).name + "' has no observed values");
    means[j] = sum / static_cast<double>(n);
  }
  return means;
}

void check_rank(const FieldTable& t, std::size_t rank) {
  if (rank < 1) throw Error("rank must be positive");
  if (rank > std::min(t.rows(), t.numeric_count()))
    throw Error("rank " + std::to_string(rank) + " exceeds min(rows, columns)");
}

/// Observed-cell mean/std standardization used by the SVD routines.
struct Scaled {
  Matrix z;
  std::vector<double> mean, sd;
};

Scaled mean_filled_standardized(const FieldTable& t) {
  const auto means = observed_means(t);
  Scaled s{Matrix(idx(t.rows()), idx(t.numeric_count())), means, std::vector<double>(t.numeric_count(), 1.0)};
  for (std::size_t j = 0; j < t.numeric_count(); ++j) {
    double ss = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.rows(); ++i)
      if (!t.missing(i, j)) {
        const double d = t.numeric()(idx(i), idx(j)) - means[j];
        ss += d * d;
        ++n;
      }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    s.sd[j] = sd > 0.0 ? sd : 1.0;
    for (std::size_t i = 0; i < t.rows(); ++i)
      s.z(idx(i), idx(j)) = t.missing(i, j) ? 0.0 : (t.numeric()(idx(i), idx(j)) - means[j]) / s.sd[j];
  }
  return s;
}

}  // namespace

std::string_view to_string(ImputeMethod m) {
  switch (m) {
    case ImputeMethod::drop_rows: return "drop_rows";
    case ImputeMethod::column_mean: return "column_mean";
    case ImputeMethod::group_mean: return "group_mean";
    case ImputeMethod::nnmf: return "nnmf";
    case ImputeMethod::tsvd: return "tsvd";
  }
  return "column_mean";
}

ImputeMethod parse_impute_method(std::string_view text) {
  for (auto m : {ImputeMethod::drop_rows, ImputeMethod::column_mean, ImputeMethod::group_mean, ImputeMethod::nnmf,
                 ImputeMethod::tsvd})
    if (to_string(m) == text) return m;
  throw Error("unknown imputation method '" + std::string(text) + "'");
}

nlohmann::json CompletedTable::record() const {
  return {{"schema_version", 1},
          {"method", to_string(method)},
          {"rank", rank},
          {"iterations", iterations},
          {"final_objective", final_objective},
          {"objective_trace", objective_trace},
          {"imputed_cells", imputed.count()}};
}

FieldTable drop_sparse_rows(const FieldTable& table, double max_missing_frac) {
  if (!(max_missing_frac >= 0.0 && max_missing_frac <= 1.0)) throw Error("max_missing_frac must lie in [0, 1]");
  const auto frac = missing_fraction(table, Axis::per_row);
  std::vector<bool> keep(frac.size());
  for (std::size_t i = 0; i < frac.size(); ++i) keep[i] = frac[i] <= max_missing_frac;
  auto rows = rows_where(keep);
  if (rows.empty()) throw Error("empty result");
  return table.select_rows(rows);
}

FieldTable drop_rows_over_count(const FieldTable& table, std::size_t max_missing_cells) {
  std::vector<bool> keep(table.rows());
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const auto n = table.numeric_missing().row(idx(i)).count() + table.categorical_missing().row(idx(i)).count();
    keep[i] = static_cast<std::size_t>(n) <= max_missing_cells;
  }
  auto rows = rows_where(keep);
  if (rows.empty()) throw Error("empty result");
  return table.select_rows(rows);
}

CompletedTable fill_column_means(const FieldTable& table) {
  const auto means = observed_means(table);
  Matrix x = table.numeric();
  for (std::size_t j = 0; j < table.numeric_count(); ++j)
    for (std::size_t i = 0; i < table.rows(); ++i)
      if (table.missing(i, j)) x(idx(i), idx(j)) = means[j];
  return {with_numeric(table, std::move(x)), table.numeric_missing(), ImputeMethod::column_mean, 0, 0, 0.0, {}};
}

CompletedTable fill_group_means(const FieldTable& table, const std::vector<std::string>& groups) {
  if (groups.size() != table.rows()) throw Error("group labels must cover every row");
  const auto global = observed_means(table);
  std::map<std::string, std::size_t> ids;
  std::vector<std::size_t> gid(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) gid[i] = ids.try_emplace(groups[i], ids.size()).first->second;
  Matrix x = table.numeric();
  std::vector<double> sum(ids.size());
  std::vector<std::size_t> count(ids.size());
  for (std::size_t j = 0; j < table.numeric_count(); ++j) {
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t i = 0; i < table.rows(); ++i)
      if (!table.missing(i, j)) {
        sum[gid[i]] += x(idx(i), idx(j));
        ++count[gid[i]];
      }
    for (std::size_t i = 0; i < table.rows(); ++i)
      if (table.missing(i, j))
        x(idx(i), idx(j)) = count[gid[i]] ? sum[gid[i]] / static_cast<double>(count[gid[i]]) : global[j];
  }
  return {with_numeric(table, std::move(x)), table.numeric_missing(), ImputeMethod::group_mean, 0, 0, 0.0, {}};
}

FieldTable split_signed_column(const FieldTable& table, std::string_view column) {
  const auto target = table.numeric_index(column);
  const auto& src = table.numeric_meta(target);
  const std::string flag_name = "is_negative_" + src.name;
  if (table.find_column(flag_name)) throw Error("column '" + flag_name + "' already exists");

  std::vector<ColumnMeta> schema;
  const auto n = idx(table.rows());
  const auto m = idx(table.numeric_count() + 1);
  Matrix x(n, m);
  Mask mask(n, m);
  Index out = 0;
  std::size_t num = 0;
  for (const auto& meta : table.schema()) {
    schema.push_back(meta);
    if (meta.kind != ColumnKind::numeric) continue;
    x.col(out) = table.numeric().col(idx(num));
    mask.col(out) = table.numeric_missing().col(idx(num));
    if (num == target) {
      x.col(out) = x.col(out).cwiseAbs();
      ++out;
      schema.push_back({flag_name, ColumnKind::numeric, meta.group, "", false});
      for (Index i = 0; i < n; ++i) x(i, out) = table.numeric()(i, idx(num)) < 0.0 ? 1.0 : 0.0;
      mask.col(out) = table.numeric_missing().col(idx(num));
    }
    ++out;
    ++num;
  }
  return FieldTable(table.keys(), std::move(schema), std::move(x), std::move(mask), table.categorical(),
                    table.categorical_missing());
}

FieldTable split_signed_columns(const FieldTable& table) {
  FieldTable out = table;
  for (std::size_t j = 0; j < table.numeric_count(); ++j) {
    bool negative = false;
    for (std::size_t i = 0; i < table.rows() && !negative; ++i)
      negative = !table.missing(i, j) && table.numeric()(idx(i), idx(j)) < 0.0;
    if (negative) out = split_signed_column(out, table.numeric_meta(j).name);
  }
  return out;
}

CompletedTable nnmf_impute(const FieldTable& table, std::size_t rank, int max_iters, double tol, std::uint64_t seed) {
  check_rank(table, rank);
  if (max_iters < 0) throw Error("max_iters must be nonnegative");
  const Index n = idx(table.rows()), m = idx(table.numeric_count());
  const auto& raw = table.numeric();
  const auto& miss = table.numeric_missing();

  Vector scale(m);
  for (Index j = 0; j < m; ++j) {
    double hi = 0.0;
    bool any = false;
    for (Index i = 0; i < n; ++i) {
      if (miss(i, j)) continue;
      if (raw(i, j) < 0.0) throw Error("negative input to NNMF");
      hi = std::max(hi, raw(i, j));
      any = true;
    }
    if (!any) throw Error("column '" + table.numeric_meta(static_cast<std::size_t>(j)).name + "' has no observed values");
    scale(j) = hi > 0.0 ? hi : 1.0;
  }
  Matrix obs = Matrix::Zero(n, m);
  Matrix x = Matrix::Zero(n, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i)
      if (!miss(i, j)) {
        obs(i, j) = 1.0;
        x(i, j) = raw(i, j) / scale(j);
      }

  Rng rng(seed);
  const Index k = idx(rank);
  Matrix w(n, k), h(k, m);
  for (Index i = 0; i < n; ++i)
    for (Index r = 0; r < k; ++r) w(i, r) = rng.uniform(0.1, 1.1);
  for (Index r = 0; r < k; ++r)
    for (Index j = 0; j < m; ++j) h(r, j) = rng.uniform(0.1, 1.1);

  auto objective = [&](const Matrix& wh) { return (obs.cwiseProduct(x - wh)).squaredNorm(); };
  Matrix wh = w * h;
  std::vector<double> trace{objective(wh)};
  int it = 0;
  for (; it < max_iters; ++it) {
    {
      const Matrix num = x * h.transpose();
      const Matrix den = obs.cwiseProduct(wh) * h.transpose();
      for (Index i = 0; i < n; ++i)
        for (Index r = 0; r < k; ++r)
          if (den(i, r) > 0.0) w(i, r) *= num(i, r) / den(i, r);
    }
    wh = w * h;
    {
      const Matrix num = w.transpose() * x;
      const Matrix den = w.transpose() * obs.cwiseProduct(wh);
      for (Index r = 0; r < k; ++r)
        for (Index j = 0; j < m; ++j)
          if (den(r, j) > 0.0) h(r, j) *= num(r, j) / den(r, j);
    }
    wh = w * h;
    const double prev = trace.back();
    trace.push_back(objective(wh));
    if (prev <= 0.0 || (prev - trace.back()) / prev < tol) {
      ++it;
      break;
    }
  }

  Matrix filled = raw;
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i)
      if (miss(i, j)) filled(i, j) = wh(i, j) * scale(j);
  CompletedTable out{with_numeric(table, std::move(filled)), miss, ImputeMethod::nnmf, rank, it, trace.back(), {}};
  out.objective_trace = std::move(trace);
  return out;
}

CompletedTable tsvd_impute(const FieldTable& table, std::size_t rank, int max_iters, double tol) {
  check_rank(table, rank);
  if (max_iters < 0) throw Error("max_iters must be nonnegative");
  const Index n = idx(table.rows()), m = idx(table.numeric_count());
  const auto& miss = table.numeric_missing();
  auto s = mean_filled_standardized(table);
  Matrix& z = s.z;

  std::vector<double> trace;
  int it = 0;
  double change = 0.0;
  if (miss.any()) {
    for (; it < max_iters;) {
      const Matrix approx = low_rank(jacobi_svd(z), idx(rank));
      double diff = 0.0, base = 0.0;
      for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < n; ++i)
          if (miss(i, j)) {
            const double d = approx(i, j) - z(i, j);
            diff += d * d;
            base += z(i, j) * z(i, j);
            z(i, j) = approx(i, j);
          }
      ++it;
      change = base > 0.0 ? std::sqrt(diff / base) : std::sqrt(diff);
      trace.push_back(change);
      if (change < tol) break;
    }
  }

  Matrix filled = table.numeric();
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i)
      if (miss(i, j)) filled(i, j) = z(i, j) * s.sd[static_cast<std::size_t>(j)] + s.mean[static_cast<std::size_t>(j)];
  CompletedTable out{with_numeric(table, std::move(filled)), miss, ImputeMethod::tsvd, rank, it, change, {}};
  out.objective_trace = std::move(trace);
  return out;
}

std::size_t select_rank(const FieldTable& table, double target, std::size_t max_rank) {
  const auto s = mean_filled_standardized(table);
  const auto svd = jacobi_svd(s.z);
  const auto& miss = table.numeric_missing();
  double total = 0.0;
  for (Index j = 0; j < s.z.cols(); ++j)
    for (Index i = 0; i < s.z.rows(); ++i)
      if (!miss(i, j)) total += s.z(i, j) * s.z(i, j);
  const std::size_t cap = std::min({max_rank, table.rows(), table.numeric_count()});
  if (total <= 0.0) return 1;
  for (std::size_t k = 1; k <= cap; ++k) {
    const Matrix approx = low_rank(svd, idx(k));
    double resid = 0.0;
    for (Index j = 0; j < s.z.cols(); ++j)
      for (Index i = 0; i < s.z.rows(); ++i)
        if (!miss(i, j)) {
          const double d = s.z(i, j) - approx(i, j);
          resid += d * d;
        }
    if (1.0 - resid / total >= target) return k;
  }
  return std::max<std::size_t>(cap, 1);
}

CompletedTable impute_features(const FieldTable& table, const ImputeOptions& options) {
  if (!options.groups.empty() && options.groups.size() != table.rows())
    throw Error("group labels must cover every row");
  const auto target = table.target_index();

  std::vector<std::string> outputs;
  for (std::size_t j = 0; j < table.numeric_count(); ++j) {
    const auto& meta = table.numeric_meta(j);
    if (meta.group == ColumnGroup::production && !meta.is_target) outputs.push_back(meta.name);
  }
  FieldTable base = table.drop_columns(outputs);
  std::vector<std::string> groups = options.groups;
  if (target) {
    const auto t = base.require_target();
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < base.rows(); ++i)
      if (!base.missing(i, t)) rows.push_back(i);
    if (rows.empty()) throw Error("no rows with an observed target");
    if (rows.size() != base.rows()) {
      base = base.select_rows(rows);
      if (!groups.empty()) {
        std::vector<std::string> kept;
        for (auto r : rows) kept.push_back(groups[r]);
        groups = std::move(kept);
      }
    }
  }
  const std::string target_name = target ? base.numeric_meta(base.require_target()).name : std::string();
  FieldTable features = target ? base.drop_columns(std::vector<std::string>{target_name}) : base;

  CompletedTable done;
  switch (options.method) {
    case ImputeMethod::drop_rows: {
      auto kept = options.max_missing_cells ? drop_rows_over_count(features, *options.max_missing_cells)
                                            : drop_sparse_rows(features, options.max_missing_frac);
      done = fill_column_means(kept);
      break;
    }
    case ImputeMethod::column_mean: done = fill_column_means(features); break;
    case ImputeMethod::group_mean:
      if (groups.empty()) throw Error("group_mean requires group labels");
      done = fill_group_means(features, groups);
      break;
    case ImputeMethod::nnmf: {
      auto split = split_signed_columns(features);
      const auto rank = options.rank.value_or(select_rank(split));
      done = nnmf_impute(split, rank, options.max_iters, options.tol, options.seed);
      break;
    }
    case ImputeMethod::tsvd: {
      const auto rank = options.rank.value_or(select_rank(features));
      done = tsvd_impute(features, rank, options.max_iters, options.tol);
      break;
    }
  }
  done.method = options.method;
  if (!target) return done;

  // Reattach the observed target as the last column.
  const auto& ft = done.table;
  std::map<RowKey, std::size_t> base_row;
  for (std::size_t i = 0; i < base.rows(); ++i) base_row.emplace(base.keys()[i], i);
  const auto t = base.require_target();
  const Index n = idx(ft.rows()), m = idx(ft.numeric_count());
  Matrix x(n, m + 1);
  x.leftCols(m) = ft.numeric();
  for (Index i = 0; i < n; ++i) x(i, m) = base.numeric()(idx(base_row.at(ft.keys()[static_cast<std::size_t>(i)])), idx(t));
  auto schema = ft.schema();
  schema.push_back(base.numeric_meta(t));
  Mask imputed(n, m + 1);
  imputed.leftCols(m) = done.imputed;
  imputed.col(m).setConstant(false);
  done.table = FieldTable(ft.keys(), std::move(schema), std::move(x), Mask::Constant(n, m + 1, false), ft.categorical(),
                          ft.categorical_missing());
  done.imputed = std::move(imputed);
  return done;
}

}  // namespace fracflow::impute
