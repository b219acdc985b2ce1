#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracflow/regress.hpp"

namespace fracflow::analysis {

struct Importance {
  std::string feature;
  double importance = 0.0;
};

/// Total split gain per feature normalized to sum 1, descending, ties by
/// feature index. GBDT models count only the trees used for prediction.
std::vector<Importance> gain_importance(const regress::Model& model);
std::vector<Importance> gain_importance(const std::vector<regress::Tree>& trees,
                                        const std::vector<std::string>& features);

/// Held-out R² of one fit: stratified split of the rows, train, score.
double holdout_r2(const regress::Dataset& data, const regress::TrainerSpec& spec, double test_frac,
                  std::uint64_t seed);

struct RfePoint {
  std::size_t n_features = 0;
  double r2 = 0.0;
};

struct RfeResult {
  std::vector<RfePoint> curve;
  std::size_t selected = 0;
  double tolerance = 0.005;
  std::vector<std::string> selected_features;
};

/// Retrains on the top-n features of `order` for every n in `grid` (the
/// selected columns keep their original order) and records held-out R².
/// Selected count = smallest n within `tolerance` of the best R².
RfeResult rfe_curve(const regress::Dataset& data, const std::vector<std::string>& order,
                    std::vector<std::size_t> grid, const regress::TrainerSpec& spec, double test_frac,
                    double tolerance, std::uint64_t seed);

struct TornadoEntry {
  std::string feature;
  double baseline = 0.0;
  double low = 0.0;
  double high = 0.0;
  double delta = 0.5;

  double swing() const;
};

using Predictor = std::function<Vector(const Matrix&)>;

/// One-at-a-time sensitivity around the all-means row of x.
std::vector<TornadoEntry> ovat_tornado(const Predictor& predict, const Matrix& x,
                                       const std::vector<std::string>& features,
                                       const std::vector<std::string>& perturbed, double delta = 0.5);
std::vector<TornadoEntry> ovat_tornado(const regress::Model& model, const regress::Dataset& data,
                                       const std::vector<std::string>& perturbed, double delta = 0.5);

struct BootstrapCi {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  std::vector<double> samples;
};

struct BootstrapOptions {
  int iters = 100;
  double frac = 0.75;
  double level = 0.95;
  double test_frac = 0.2;
};

/// Percentile interval of held-out R² over subsamples drawn without
/// replacement.
BootstrapCi bootstrap_r2_ci(const regress::Dataset& data, const regress::TrainerSpec& spec,
                            const BootstrapOptions& options, std::uint64_t seed);

/// Linear-interpolation percentile, q in [0, 1].
double percentile(std::vector<double> values, double q);

struct AnalysisReport {
  std::vector<Importance> importance;
  std::optional<RfeResult> rfe;
  std::vector<TornadoEntry> tornado;
  std::optional<BootstrapCi> bootstrap;

  nlohmann::json to_json() const;
  /// report.json plus importance.csv, rfe.csv, tornado.csv and
  /// bootstrap_samples.csv.
  void write(const std::string& dir) const;
};

}  // namespace fracflow::analysis
