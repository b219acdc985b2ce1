#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracflow/table.hpp"

namespace fracflow::impute {

enum class ImputeMethod { drop_rows, column_mean, group_mean, nnmf, tsvd };

std::string_view to_string(ImputeMethod m);
ImputeMethod parse_impute_method(std::string_view text);

/// A table whose numeric block is fully observed. `imputed` has the shape of
/// the numeric block and marks the cells that were filled.
struct CompletedTable {
  FieldTable table;
  Mask imputed;
  ImputeMethod method = ImputeMethod::column_mean;
  std::size_t rank = 0;
  int iterations = 0;
  double final_objective = 0.0;
  /// Objective per iteration, starting with the initial state.
  std::vector<double> objective_trace;

  nlohmann::json record() const;
};

/// Removes rows whose missing fraction exceeds max_missing_frac.
FieldTable drop_sparse_rows(const FieldTable& table, double max_missing_frac);
/// Removes rows with more than max_missing_cells missing cells.
FieldTable drop_rows_over_count(const FieldTable& table, std::size_t max_missing_cells);

CompletedTable fill_column_means(const FieldTable& table);
CompletedTable fill_group_means(const FieldTable& table, const std::vector<std::string>& groups);

/// Replaces a numeric column by its absolute value followed by a 0/1
/// column "is_negative_<name>".
FieldTable split_signed_column(const FieldTable& table, std::string_view column);
/// Splits every numeric column that has a negative observed value.
FieldTable split_signed_columns(const FieldTable& table);

/// Masked non-negative matrix factorization with multiplicative updates.
/// Columns are divided by their observed maximum before factorizing.
CompletedTable nnmf_impute(const FieldTable& table, std::size_t rank, int max_iters, double tol, std::uint64_t seed);

/// Iterative truncated-SVD completion on standardized columns; observed
/// cells are never modified.
CompletedTable tsvd_impute(const FieldTable& table, std::size_t rank, int max_iters, double tol);

/// Smallest rank whose reconstruction of the mean-filled standardized matrix
/// explains at least `target` of the observed variance, capped at max_rank.
std::size_t select_rank(const FieldTable& table, double target = 0.9, std::size_t max_rank = 10);

struct ImputeOptions {
  ImputeMethod method = ImputeMethod::tsvd;
  double max_missing_frac = 0.65;
  std::optional<std::size_t> max_missing_cells;
  std::optional<std::size_t> rank;
  int max_iters = 500;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  /// Per-row labels for group_mean.
  std::vector<std::string> groups;
};

/// Pipeline entry: keeps the target and the input features (production
/// outputs other than the target are removed), drops rows whose target is
/// missing, and completes the input features with the chosen method. The
/// target is never imputed.
CompletedTable impute_features(const FieldTable& table, const ImputeOptions& options);

}  // namespace fracflow::impute
