#include "fracflow/table.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_set>

#include "fracflow/error.hpp"
#include "fracflow/rng.hpp"

namespace fracflow {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string_view to_string(ColumnKind kind) {
  return kind == ColumnKind::numeric ? "numeric" : "categorical";
}

std::string_view to_string(ColumnGroup group) {
  switch (group) {
    case ColumnGroup::formation: return "formation";
    case ColumnGroup::well: return "well";
    case ColumnGroup::design: return "design";
    case ColumnGroup::production: return "production";
    case ColumnGroup::key: return "key";
  }
  return "formation";
}

ColumnKind parse_column_kind(std::string_view text) {
  if (text == "numeric") return ColumnKind::numeric;
  if (text == "categorical") return ColumnKind::categorical;
  throw Error("unknown column kind '" + std::string(text) + "'");
}

ColumnGroup parse_column_group(std::string_view text) {
  if (text == "formation") return ColumnGroup::formation;
  if (text == "well") return ColumnGroup::well;
  if (text == "design") return ColumnGroup::design;
  if (text == "production") return ColumnGroup::production;
  if (text == "key") return ColumnGroup::key;
  throw Error("unknown column group '" + std::string(text) + "'");
}

FieldTable::FieldTable(std::vector<RowKey> keys, std::vector<ColumnMeta> schema, Matrix numeric,
                       Mask numeric_missing, std::vector<std::vector<std::string>> categorical,
                       Mask categorical_missing)
    : keys_(std::move(keys)),
      schema_(std::move(schema)),
      numeric_(std::move(numeric)),
      numeric_missing_(std::move(numeric_missing)),
      categorical_(std::move(categorical)),
      categorical_missing_(std::move(categorical_missing)) {
  index_schema();
  const auto n = static_cast<Eigen::Index>(keys_.size());
  const auto n_num = static_cast<Eigen::Index>(numeric_columns_.size());
  const auto n_cat = static_cast<Eigen::Index>(categorical_columns_.size());
  if (numeric_.rows() != n || numeric_.cols() != n_num)
    throw Error("numeric block shape does not match rows x numeric columns");
  if (numeric_missing_.rows() != n || numeric_missing_.cols() != n_num)
    throw Error("numeric mask shape does not match data shape");
  if (static_cast<Eigen::Index>(categorical_.size()) != n_cat)
    throw Error("categorical block does not match categorical column count");
  for (const auto& col : categorical_)
    if (static_cast<Eigen::Index>(col.size()) != n) throw Error("categorical column length mismatch");
  if (categorical_missing_.rows() != n || categorical_missing_.cols() != n_cat)
    throw Error("categorical mask shape does not match data shape");

  std::set<RowKey> seen;
  for (const auto& k : keys_)
    if (!seen.insert(k).second)
      throw Error("duplicate row key (" + k.field_id + ", " + k.well_id + ", " + k.layer_id + ", " +
                  std::to_string(k.op_date) + ")");

  for (Eigen::Index j = 0; j < n_num; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (numeric_missing_(i, j)) numeric_(i, j) = kNaN;
  for (Eigen::Index j = 0; j < n_cat; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (categorical_missing_(i, j)) categorical_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)].clear();
}

FieldTable FieldTable::numeric_only(std::vector<RowKey> keys, std::vector<ColumnMeta> schema, Matrix numeric,
                                    Mask numeric_missing) {
  const auto n = static_cast<Eigen::Index>(keys.size());
  return FieldTable(std::move(keys), std::move(schema), std::move(numeric), std::move(numeric_missing), {},
                    Mask(n, 0));
}

void FieldTable::index_schema() {
  numeric_columns_.clear();
  categorical_columns_.clear();
  std::unordered_set<std::string> names;
  std::size_t targets = 0;
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    const auto& c = schema_[i];
    if (c.name.empty()) throw Error("empty column name");
    if (!names.insert(c.name).second) throw Error("duplicate column name '" + c.name + "'");
    if (c.group == ColumnGroup::key) throw Error("key columns are carried by row keys, not the schema");
    if (c.is_target) {
      ++targets;
      if (c.kind != ColumnKind::numeric) throw Error("target column must be numeric");
    }
    (c.kind == ColumnKind::numeric ? numeric_columns_ : categorical_columns_).push_back(i);
  }
  if (targets > 1) throw Error("schema has more than one target column");
}

std::optional<std::size_t> FieldTable::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < schema_.size(); ++i)
    if (schema_[i].name == name) return i;
  return std::nullopt;
}

std::size_t FieldTable::numeric_index(std::string_view name) const {
  for (std::size_t j = 0; j < numeric_columns_.size(); ++j)
    if (schema_[numeric_columns_[j]].name == name) return j;
  throw Error("no numeric column named '" + std::string(name) + "'");
}

std::size_t FieldTable::categorical_index(std::string_view name) const {
  for (std::size_t j = 0; j < categorical_columns_.size(); ++j)
    if (schema_[categorical_columns_[j]].name == name) return j;
  throw Error("no categorical column named '" + std::string(name) + "'");
}

const ColumnMeta& FieldTable::numeric_meta(std::size_t numeric_col) const {
  return schema_.at(numeric_columns_.at(numeric_col));
}

const ColumnMeta& FieldTable::categorical_meta(std::size_t categorical_col) const {
  return schema_.at(categorical_columns_.at(categorical_col));
}

std::vector<std::string> FieldTable::numeric_names() const {
  std::vector<std::string> out;
  out.reserve(numeric_columns_.size());
  for (auto i : numeric_columns_) out.push_back(schema_[i].name);
  return out;
}

std::optional<std::size_t> FieldTable::target_index() const {
  for (std::size_t j = 0; j < numeric_columns_.size(); ++j)
    if (schema_[numeric_columns_[j]].is_target) return j;
  return std::nullopt;
}

std::size_t FieldTable::require_target() const {
  if (auto t = target_index()) return *t;
  throw Error("schema has no target column");
}

std::optional<double> FieldTable::value(std::size_t row, std::size_t numeric_col) const {
  if (missing(row, numeric_col)) return std::nullopt;
  return numeric_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(numeric_col));
}

std::size_t FieldTable::missing_cells() const {
  return static_cast<std::size_t>(numeric_missing_.count() + categorical_missing_.count());
}

FieldTable FieldTable::select_rows(std::span<const std::size_t> rows) const {
  const auto n = static_cast<Eigen::Index>(rows.size());
  std::vector<RowKey> keys;
  keys.reserve(rows.size());
  Matrix num(n, numeric_.cols());
  Mask num_mask(n, numeric_.cols());
  std::vector<std::vector<std::string>> cat(categorical_.size(), std::vector<std::string>(rows.size()));
  Mask cat_mask(n, categorical_missing_.cols());
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto src = rows[static_cast<std::size_t>(r)];
    if (src >= keys_.size()) throw Error("row index out of range");
    keys.push_back(keys_[src]);
    num.row(r) = numeric_.row(static_cast<Eigen::Index>(src));
    num_mask.row(r) = numeric_missing_.row(static_cast<Eigen::Index>(src));
    for (std::size_t c = 0; c < categorical_.size(); ++c) cat[c][static_cast<std::size_t>(r)] = categorical_[c][src];
    cat_mask.row(r) = categorical_missing_.row(static_cast<Eigen::Index>(src));
  }
  return FieldTable(std::move(keys), schema_, std::move(num), std::move(num_mask), std::move(cat),
                    std::move(cat_mask));
}

FieldTable FieldTable::drop_columns(std::span<const std::string> names) const {
  auto dropped = [&](const std::string& n) { return std::find(names.begin(), names.end(), n) != names.end(); };
  std::vector<ColumnMeta> schema;
  std::vector<Eigen::Index> keep_num, keep_cat;
  for (std::size_t j = 0; j < numeric_columns_.size(); ++j)
    if (!dropped(schema_[numeric_columns_[j]].name)) keep_num.push_back(static_cast<Eigen::Index>(j));
  for (std::size_t j = 0; j < categorical_columns_.size(); ++j)
    if (!dropped(schema_[categorical_columns_[j]].name)) keep_cat.push_back(static_cast<Eigen::Index>(j));
  for (const auto& c : schema_)
    if (!dropped(c.name)) schema.push_back(c);
  const auto n = static_cast<Eigen::Index>(rows());
  Matrix num(n, static_cast<Eigen::Index>(keep_num.size()));
  Mask num_mask(n, static_cast<Eigen::Index>(keep_num.size()));
  for (std::size_t k = 0; k < keep_num.size(); ++k) {
    num.col(static_cast<Eigen::Index>(k)) = numeric_.col(keep_num[k]);
    num_mask.col(static_cast<Eigen::Index>(k)) = numeric_missing_.col(keep_num[k]);
  }
  std::vector<std::vector<std::string>> cat;
  Mask cat_mask(n, static_cast<Eigen::Index>(keep_cat.size()));
  for (std::size_t k = 0; k < keep_cat.size(); ++k) {
    cat.push_back(categorical_[static_cast<std::size_t>(keep_cat[k])]);
    cat_mask.col(static_cast<Eigen::Index>(k)) = categorical_missing_.col(keep_cat[k]);
  }
  return FieldTable(keys_, std::move(schema), std::move(num), std::move(num_mask), std::move(cat),
                    std::move(cat_mask));
}

std::vector<double> missing_fraction(const FieldTable& table, Axis axis) {
  if (table.empty()) throw Error("empty input");
  const auto n = table.rows();
  const auto m = table.columns();
  if (axis == Axis::per_row) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const auto count = table.numeric_missing().row(r).count() + table.categorical_missing().row(r).count();
      out[i] = static_cast<double>(count) / static_cast<double>(m);
    }
    return out;
  }
  std::vector<double> out(m, 0.0);
  for (std::size_t j = 0; j < table.numeric_count(); ++j)
    out[table.numeric_columns()[j]] =
        static_cast<double>(table.numeric_missing().col(static_cast<Eigen::Index>(j)).count()) / static_cast<double>(n);
  for (std::size_t j = 0; j < table.categorical_count(); ++j)
    out[table.categorical_columns()[j]] =
        static_cast<double>(table.categorical_missing().col(static_cast<Eigen::Index>(j)).count()) /
        static_cast<double>(n);
  return out;
}

Standardized standardize(const FieldTable& table) {
  if (table.numeric_count() == 0) throw Error("standardize requires numeric columns");
  Matrix values = table.numeric();
  const auto& mask = table.numeric_missing();
  std::vector<double> means(table.numeric_count(), 0.0), stds(table.numeric_count(), 0.0);
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    double sum = 0.0;
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < values.rows(); ++i)
      if (!mask(i, j)) {
        sum += values(i, j);
        ++count;
      }
    if (count == 0) {
      means[static_cast<std::size_t>(j)] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < values.rows(); ++i)
      if (!mask(i, j)) ss += (values(i, j) - mean) * (values(i, j) - mean);
    const double sd = std::sqrt(ss / static_cast<double>(count));
    means[static_cast<std::size_t>(j)] = mean;
    stds[static_cast<std::size_t>(j)] = sd;
    for (Eigen::Index i = 0; i < values.rows(); ++i)
      if (!mask(i, j)) values(i, j) = sd > 0.0 ? (values(i, j) - mean) / sd : 0.0;
  }
  FieldTable out(table.keys(), table.schema(), std::move(values), mask, table.categorical(),
                 table.categorical_missing());
  return {std::move(out), std::move(means), std::move(stds)};
}

SplitIndices stratified_split_indices(std::span<const double> target, double test_frac, std::size_t n_bins,
                                      std::uint64_t seed) {
  if (!(test_frac > 0.0 && test_frac < 1.0)) throw Error("test_frac must lie in (0,1)");
  const std::size_t n = target.size();
  if (n_bins == 0) throw Error("n_bins must be positive");
  if (n_bins > n) throw Error("n_bins exceeds row count");
  for (double v : target)
    if (!std::isfinite(v)) throw Error("stratification target must be fully observed");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return target[a] < target[b] || (target[a] == target[b] && a < b);
  });

  Rng rng(seed);
  SplitIndices out;
  const std::size_t base = n / n_bins;
  const std::size_t extra = n % n_bins;
  std::size_t start = 0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    const std::size_t size = base + (b < extra ? 1 : 0);
    const auto bin = std::span(order).subspan(start, size);
    const auto n_test = static_cast<std::size_t>(std::llround(test_frac * static_cast<double>(size)));
    const auto picks = rng.sample_without_replacement(size, std::min(n_test, size));
    std::vector<char> is_test(size, 0);
    for (auto p : picks) is_test[p] = 1;
    for (std::size_t k = 0; k < size; ++k) (is_test[k] ? out.test : out.train).push_back(bin[k]);
    if (b + 1 < n_bins) out.bin_edges.push_back(0.5 * (target[bin.back()] + target[order[start + size]]));
    start += size;
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

SplitPair stratified_split(const FieldTable& table, std::string_view target_column, double test_frac,
                           std::size_t n_bins, std::uint64_t seed) {
  const std::size_t t = table.numeric_index(target_column);
  std::vector<double> y(table.rows());
  for (std::size_t i = 0; i < table.rows(); ++i) {
    if (table.missing(i, t)) throw Error("target column '" + std::string(target_column) + "' has missing cells");
    y[i] = table.numeric()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
  }
  auto idx = stratified_split_indices(y, test_frac, n_bins, seed);
  return {table.select_rows(idx.train), table.select_rows(idx.test), std::move(idx.bin_edges)};
}

std::int64_t days_from_civil(int year, unsigned month, unsigned day) {
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!ymd.ok()) throw Error("invalid calendar date");
  return sys_days{ymd}.time_since_epoch().count();
}

std::int64_t month_index(std::int64_t days) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  return static_cast<std::int64_t>(static_cast<int>(ymd.year())) * 12 +
         static_cast<std::int64_t>(static_cast<unsigned>(ymd.month())) - 1;
}

std::int64_t month_start(std::int64_t month_idx) {
  const auto year = static_cast<int>(month_idx >= 0 ? month_idx / 12 : (month_idx - 11) / 12);
  const auto month = static_cast<unsigned>(month_idx - static_cast<std::int64_t>(year) * 12 + 1);
  return days_from_civil(year, month, 1);
}

}  // namespace fracflow
