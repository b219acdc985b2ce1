#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracflow/ingest.hpp"
#include "fracflow/structure.hpp"
#include "fracflow/table.hpp"

namespace fracflow::synth {

/// Standardization constants of the planted target. Pinning them in a
/// config keeps the target function identical across row samples.
struct TargetStats {
  std::vector<double> mean;
  std::vector<double> std;
  double pad_share_median = 0.0;
  /// Standard deviation of the noiseless target; the noise std is
  /// noise_frac times this value.
  double target_std = 0.0;

  nlohmann::json to_json() const;
  static TargetStats from_json(const nlohmann::json& doc);
};

struct SynthConfig {
  int n_wells = 5000;
  int n_fields = 23;
  int n_numeric = 50;
  int latent_rank = 5;
  int n_clusters = 3;
  double missing_frac = 0.2;
  double typo_rate = 0.05;
  double outlier_rate = 0.005;
  /// Target noise std as a fraction of the noiseless target std.
  double noise_frac = 0.3;
  /// Std of the per-cell latent noise (latent values span roughly 0.5 to 6).
  double feature_noise = 0.05;
  double duplicate_rate = 0.01;
  double orphan_rate = 0.01;
  double range_rate = 0.01;
  /// Share of missing cells written as junk text instead of blanks.
  double noise_token_rate = 0.3;
  /// Share of operations with production history before the job.
  double prefrac_frac = 0.36;
  std::uint64_t seed = 7;
  /// Separate seed for the row sample; the planted structure follows `seed`.
  std::optional<std::uint64_t> row_seed;
  std::optional<TargetStats> target_stats;

  /// Throws Error naming the offending field.
  void validate() const;
  nlohmann::json to_json() const;
  static SynthConfig from_json(const nlohmann::json& doc);
  /// All noise and corruption switched off.
  static SynthConfig noiseless(SynthConfig base);
};

enum class CorruptionKind { missing, typo, outlier };
std::string_view to_string(CorruptionKind kind);

struct LedgerEntry {
  std::size_t row = 0;
  std::string column;
  CorruptionKind kind = CorruptionKind::missing;
  /// Clean value; exactly one of the two is set.
  std::optional<double> number;
  std::optional<std::string> token;
};

/// The ten features the planted target depends on, in the order taken by
/// planted_target().
const std::vector<std::string>& relevant_features();

/// 3000 + 350 z(proppant_mass) + 200 z(fluid_volume) - 150 z(oil_viscosity)
///  + 120 z(perf_interval) + 180 z(permeability_mean_perf) z(ntg_perf)
///  + 120 z(porosity_mean_perf) z(formation_pressure)
///  + 400 (1 - exp(-n_stages / 2)) - 250 [pad_share > median]
double planted_target(const TargetStats& stats, std::span<const double> values);
Vector planted_target(const TargetStats& stats, const Matrix& values);

struct GroundTruth {
  SynthConfig config;
  std::vector<std::string> base_columns;
  /// Row latent factors (N x rank), loadings (rank x bases) and cluster
  /// offsets (clusters x bases).
  Matrix latent;
  Matrix loadings;
  Matrix offsets;
  std::vector<int> cluster;
  std::vector<double> true_target;
  std::vector<double> noisy_target;
  TargetStats stats;
  double noise_std = 0.0;
  std::vector<LedgerEntry> ledger;
  /// Table before corruption (same rows and schema as the output table).
  FieldTable clean;

  nlohmann::json to_json() const;
};

struct SynthDb {
  FieldTable table;
  GroundTruth truth;
  std::vector<ingest::SourceDoc> sources;
  ingest::DictionaryMap dictionaries;
};

SynthDb generate_synth_db(const SynthConfig& config);
SynthDb generate_synth_db(SynthConfig config, std::uint64_t seed);

/// Noiseless planted target of a row.
double true_target(const GroundTruth& truth, std::size_t row);

/// Missing ledger entries over input numeric cells / (rows x n_numeric).
double realized_missing_fraction(const GroundTruth& truth);

/// Names of the numeric input columns (everything but production).
std::vector<std::string> input_columns(const FieldTable& table);

/// Restores every ledger cell to its clean value, newest entry first.
FieldTable replay_ledger(const FieldTable& table, const std::vector<LedgerEntry>& ledger);

/// Frobenius error of the best rank-k approximation (exact SVD).
double best_rank_k_error(const Matrix& x, std::size_t k);

/// Reference DBSCAN by explicit transitive closure of core reachability.
structure::ClusterLabels brute_force_dbscan(const Matrix& x, double eps, std::size_t min_pts);

/// table.csv (+ schema), ground_truth.json, sources/<kind>.csv and
/// dicts/<column>.json under dir.
void write_synth_db(const SynthDb& db, const std::string& dir);

}  // namespace fracflow::synth
