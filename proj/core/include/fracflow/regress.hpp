#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracflow/table.hpp"
#include "fracflow/tree.hpp"

namespace fracflow::regress {

double r2_score(std::span<const double> y, std::span<const double> yhat);
double r2_score(const Vector& y, const Vector& yhat);
double mape(std::span<const double> y, std::span<const double> yhat);
double mape(const Vector& y, const Vector& yhat);

enum class ForestMode { random_forest, extra_trees };

struct ForestParams {
  ForestMode mode = ForestMode::random_forest;
  int n_trees = 100;
  int depth = 8;
  std::size_t min_leaf = 1;
  double feature_frac = 1.0;
  /// Row bootstrap; only used by random_forest.
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct ForestModel {
  std::vector<Tree> trees;

  Vector predict(const Matrix& x) const;
};

ForestModel fit_forest(const Matrix& x, const Vector& y, const ForestParams& params);

struct GbdtParams {
  int n_rounds = 2000;
  int depth = 6;
  double l2_leaf = 3.0;
  double learning_rate = 0.02;
  int od_wait = 5;
  std::size_t min_leaf = 1;
  std::size_t max_bins = 256;
};

/// Iteration-count early stopping. Iteration 0 is the state before the
/// first round; a later value counts only if it strictly improves on the
/// best so far.
class EarlyStopper {
 public:
  EarlyStopper(int od_wait, double initial) : od_wait_(od_wait), best_(initial) {}

  /// Records the score after `round`; returns true when training must stop.
  bool observe(int round, double score);
  int best_iteration() const { return best_round_; }
  double best_score() const { return best_; }

 private:
  int od_wait_;
  double best_;
  int best_round_ = 0;
};

struct GbdtModel {
  double base_score = 0.0;
  std::vector<Tree> trees;
  double learning_rate = 0.1;
  int depth = 0;
  double l2_leaf = 0.0;
  /// Number of leading trees used for prediction.
  int best_iteration = 0;
  /// Validation R² per round (negative MSE when the validation target is
  /// constant), entry r after round r + 1.
  std::vector<double> validation_curve;
  /// Training MSE, entry 0 before the first round.
  std::vector<double> train_mse;

  Vector predict(const Matrix& x) const;
  Vector predict(const Matrix& x, int n_trees) const;
  double predict_row(const Eigen::RowVectorXd& row) const;
};

GbdtModel fit_gbdt(const Matrix& x_train, const Vector& y_train, const Matrix& x_val, const Vector& y_val,
                   const GbdtParams& params);

/// Mean target of the k nearest training rows; distance ties by row index.
Vector knn_regress(const Matrix& x_train, const Vector& y_train, const Matrix& x_query, std::size_t k);

enum class ModelKind { gbdt, random_forest, extra_trees, decision_tree, knn };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

struct KnnModel {
  Matrix x;
  Vector y;
  std::size_t k = 5;
  /// Standardization fitted on the training rows.
  Vector mean;
  Vector scale;

  Vector predict(const Matrix& q) const;
};

struct TrainerSpec {
  ModelKind kind = ModelKind::gbdt;
  GbdtParams gbdt;
  ForestParams forest;
  TreeParams tree;
  std::size_t knn_k = 5;
  /// Share of training rows held out for GBDT early stopping.
  double val_frac = 0.15;
  /// Fit on ln(1 + y) and exponentiate predictions.
  bool log_target = false;
};

nlohmann::json to_json(const TrainerSpec& spec);
TrainerSpec trainer_spec_from_json(const nlohmann::json& doc);

/// Fitted model of any kind with its feature names.
class Model {
 public:
  using Variant = std::variant<GbdtModel, ForestModel, Tree, KnnModel>;

  Model() = default;
  Model(ModelKind kind, Variant impl, std::vector<std::string> features, bool log_target)
      : kind_(kind), impl_(std::move(impl)), features_(std::move(features)), log_target_(log_target) {}

  ModelKind kind() const { return kind_; }
  const Variant& impl() const { return impl_; }
  const std::vector<std::string>& features() const { return features_; }
  bool log_target() const { return log_target_; }
  std::string target;

  Vector predict(const Matrix& x) const;

 private:
  ModelKind kind_ = ModelKind::gbdt;
  Variant impl_;
  std::vector<std::string> features_;
  bool log_target_ = false;
};

Model train(const TrainerSpec& spec, const Matrix& x, const Vector& y, std::vector<std::string> features,
            std::uint64_t seed);

/// Fully observed numeric design matrix and target from a table.
struct Dataset {
  Matrix x;
  Vector y;
  std::vector<std::string> features;
  std::string target;
};

Dataset make_dataset(const FieldTable& table, std::string_view target);
Dataset make_dataset(const FieldTable& table, std::string_view target, const std::vector<std::string>& features);
Dataset subset(const Dataset& d, std::span<const std::size_t> rows);
Dataset select_features(const Dataset& d, const std::vector<std::string>& features);

/// Number of quantile bins used for target stratification.
inline constexpr std::size_t kStratBins = 10;

struct HoldoutSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

HoldoutSplit holdout_split(const Vector& y, double test_frac, std::uint64_t seed);

struct CvReport {
  std::vector<double> fold_r2;
  std::vector<std::size_t> fold_sizes;
  double mean = 0.0;
  double std = 0.0;
  double test_r2 = 0.0;
  /// Held-out predictions and targets, kept for ensembling.
  std::vector<double> test_pred;
  std::vector<double> test_y;

  nlohmann::json to_json() const;
};

struct CvOptions {
  std::size_t k = 5;
  double test_frac = 0.2;
  bool evaluate_test = true;
};

/// Contiguous fold sizes for n rows: the first n % k folds are one larger.
std::vector<std::size_t> fold_sizes(std::size_t n, std::size_t k);

CvReport kfold_cv(const Dataset& data, const TrainerSpec& spec, const CvOptions& options, std::uint64_t seed);
CvReport kfold_cv(const FieldTable& table, std::string_view target, const TrainerSpec& spec, std::size_t k,
                  std::uint64_t seed);

struct Grid {
  std::vector<int> depth;
  std::vector<double> l2_leaf;

  /// Depth 2..16, l2 0..2 step 0.1.
  static Grid full_default();
};

struct GridCell {
  int depth = 0;
  double l2_leaf = 0.0;
  double cv_mean = 0.0;
  double cv_std = 0.0;
};

struct GridResult {
  GbdtParams best;
  std::vector<GridCell> cells;
  std::size_t best_index = 0;

  /// CSV rows: depth, l2_leaf, cv_mean, cv_std.
  std::vector<std::vector<std::string>> table() const;
};

GridResult grid_search(const Dataset& data, const Grid& grid, const TrainerSpec& fixed, const CvOptions& options,
                       std::uint64_t seed);

struct Candidate {
  std::string name;
  CvReport report;
};

struct Selection {
  std::string name;
  double test_r2 = 0.0;
  /// Averaging ensemble of the top candidates.
  double ensemble_r2 = 0.0;
  std::vector<std::string> ensemble_members;
};

inline constexpr std::string_view kEnsembleName = "ensemble";

Selection select_model(const std::vector<Candidate>& candidates, std::size_t ensemble_size = 3);

/// Versioned JSON model format.
nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& doc);
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace fracflow::regress
