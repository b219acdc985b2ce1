#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace fracflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

enum class ColumnKind { numeric, categorical };
enum class ColumnGroup { formation, well, design, production, key };

std::string_view to_string(ColumnKind kind);
std::string_view to_string(ColumnGroup group);
ColumnKind parse_column_kind(std::string_view text);
ColumnGroup parse_column_group(std::string_view text);

struct ColumnMeta {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  ColumnGroup group = ColumnGroup::formation;
  std::string unit;
  /// Marks the regression target (cumulative 3-month oil production).
  bool is_target = false;

  bool operator==(const ColumnMeta&) const = default;
};

/// Composite row identity. Dates are days since 1970-01-01.
struct RowKey {
  std::string field_id;
  std::string well_id;
  std::string layer_id;
  std::int64_t op_date = 0;

  auto operator<=>(const RowKey&) const = default;
};

/// Column-typed table with explicit missingness masks.
///
/// Numeric columns live in one dense matrix, categorical columns in string
/// vectors; both are ordered as they appear in the schema. A masked cell's
/// stored value is meaningless (numeric cells hold NaN) and must never be
/// read. Tables are immutable once constructed: every transformation in the
/// library returns a new table.
class FieldTable {
 public:
  FieldTable() = default;

  /// Validates shapes, name uniqueness, key uniqueness and the
  /// at-most-one-target rule. Numeric cells under the mask are reset to NaN.
  FieldTable(std::vector<RowKey> keys, std::vector<ColumnMeta> schema, Matrix numeric,
             Mask numeric_missing, std::vector<std::vector<std::string>> categorical,
             Mask categorical_missing);

  /// Convenience for all-numeric tables.
  static FieldTable numeric_only(std::vector<RowKey> keys, std::vector<ColumnMeta> schema,
                                 Matrix numeric, Mask numeric_missing);

  std::size_t rows() const { return keys_.size(); }
  std::size_t columns() const { return schema_.size(); }
  bool empty() const { return rows() == 0 || columns() == 0; }

  const std::vector<RowKey>& keys() const { return keys_; }
  const std::vector<ColumnMeta>& schema() const { return schema_; }
  const Matrix& numeric() const { return numeric_; }
  const Mask& numeric_missing() const { return numeric_missing_; }
  /// Indexed [categorical column][row].
  const std::vector<std::vector<std::string>>& categorical() const { return categorical_; }
  /// rows × categorical columns.
  const Mask& categorical_missing() const { return categorical_missing_; }

  std::size_t numeric_count() const { return numeric_columns_.size(); }
  std::size_t categorical_count() const { return categorical_columns_.size(); }
  /// Schema positions of the numeric (resp. categorical) columns.
  const std::vector<std::size_t>& numeric_columns() const { return numeric_columns_; }
  const std::vector<std::size_t>& categorical_columns() const { return categorical_columns_; }

  std::optional<std::size_t> find_column(std::string_view name) const;
  /// Position of a numeric column within numeric(); throws if absent.
  std::size_t numeric_index(std::string_view name) const;
  std::size_t categorical_index(std::string_view name) const;
  const ColumnMeta& numeric_meta(std::size_t numeric_col) const;
  const ColumnMeta& categorical_meta(std::size_t categorical_col) const;
  std::vector<std::string> numeric_names() const;

  /// Numeric position of the target column, if the schema has one.
  std::optional<std::size_t> target_index() const;
  /// Throws if the schema has no target column.
  std::size_t require_target() const;

  bool missing(std::size_t row, std::size_t numeric_col) const {
    return numeric_missing_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(numeric_col));
  }
  std::optional<double> value(std::size_t row, std::size_t numeric_col) const;

  std::size_t missing_cells() const;
  std::size_t cell_count() const { return rows() * columns(); }

  FieldTable select_rows(std::span<const std::size_t> rows) const;
  /// Drops the named columns (numeric or categorical).
  FieldTable drop_columns(std::span<const std::string> names) const;

 private:
  void index_schema();

  std::vector<RowKey> keys_;
  std::vector<ColumnMeta> schema_;
  Matrix numeric_;
  Mask numeric_missing_;
  std::vector<std::vector<std::string>> categorical_;
  Mask categorical_missing_;
  std::vector<std::size_t> numeric_columns_;
  std::vector<std::size_t> categorical_columns_;
};

enum class Axis { per_row, per_column };

/// Fraction of missing cells (numeric and categorical) along each row or
/// each schema column.
std::vector<double> missing_fraction(const FieldTable& table, Axis axis);

struct Standardized {
  FieldTable table;
  std::vector<double> means;
  std::vector<double> stds;
};

/// (x - mean) / std per numeric column, statistics over observed cells with
/// population variance. Zero-variance columns map to 0 (std reported as 0).
Standardized standardize(const FieldTable& table);

/// Inverse of standardize for a single value.
inline double unstandardize(double z, double mean, double std) { return std == 0.0 ? mean : z * std + mean; }

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<double> bin_edges;
};

/// Target-quantile stratified split on a value vector. Rows are sorted by
/// (value, row index) and cut into n_bins contiguous groups whose sizes
/// differ by at most one; each group contributes round(test_frac * size)
/// test rows. Edges are midpoints between adjacent groups.
SplitIndices stratified_split_indices(std::span<const double> target, double test_frac,
                                      std::size_t n_bins, std::uint64_t seed);

struct SplitPair {
  FieldTable train;
  FieldTable test;
  std::vector<double> bin_edges;
};

SplitPair stratified_split(const FieldTable& table, std::string_view target_column, double test_frac,
                           std::size_t n_bins, std::uint64_t seed);

/// Civil-date helpers for the days-since-epoch convention.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);
/// Month index (year * 12 + month - 1) of a day number.
std::int64_t month_index(std::int64_t days);
/// First day of the given month index, as days since epoch.
std::int64_t month_start(std::int64_t month_idx);

}  // namespace fracflow
