#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracflow/feature_catalog.hpp"
#include "fracflow/table.hpp"

namespace fracflow::ingest {

/// Edit distance with unit-cost insertions, deletions and substitutions.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// Canonical spellings for one categorical column. Canonical tokens are
/// stored lowercased and must be pairwise farther apart than max_distance.
struct CategoryDictionary {
  std::vector<std::string> canonical;
  std::size_t max_distance = 2;

  CategoryDictionary() = default;
  CategoryDictionary(std::vector<std::string> tokens, std::size_t max_dist);

  /// Throws if two canonical tokens are within max_distance of each other.
  void validate() const;
};

using DictionaryMap = std::map<std::string, CategoryDictionary>;

DictionaryMap dictionaries_from_json(const nlohmann::json& doc);
nlohmann::json dictionaries_to_json(const DictionaryMap& dicts);
/// Merges every *.json file in a directory (sorted by filename).
DictionaryMap load_dictionaries(const std::string& dir);

struct Normalized {
  std::string token;
  bool matched = false;
};

std::string fold_case(std::string_view token);

/// Lowercases and trims the token, then brute-force scans the dictionary.
/// Returns the unique nearest canonical token within max_distance, else the
/// input token unchanged with matched = false. Throws "ambiguous dictionary"
/// when two canonical tokens tie at the minimal distance.
Normalized normalize_category(std::string_view token, const CategoryDictionary& dict);

/// Day number from "YYYY-MM-DD" or a plain integer day count.
std::optional<std::int64_t> parse_date(std::string_view text);
std::string format_date(std::int64_t days);

/// Plain numeral -> value; "A-B" with A < B -> midpoint; anything else missing.
std::optional<double> parse_cell(std::string_view text);

struct LogInterval {
  double top = 0.0;
  double bottom = 0.0;
  std::optional<double> porosity;
  std::optional<double> permeability;
  std::optional<double> clay;
  std::optional<double> oil_saturation;
  bool pay = false;
};

/// Logging resolution: shorter impermeable runs are not detectable.
inline constexpr double kLogResolution = 0.3;

struct PropertyStats {
  std::optional<double> mean;
  std::optional<double> median;
};

struct ScopeFeatures {
  PropertyStats porosity;
  PropertyStats permeability;
  PropertyStats clay;
  PropertyStats oil_saturation;
  std::optional<double> kh_median;
  std::optional<double> ntg;
  std::optional<double> strat_factor;
};

struct WellLogFeatures {
  ScopeFeatures perforation;
  ScopeFeatures layer;

  /// Flattened in well_log_feature_columns() order.
  std::vector<std::pair<std::string, std::optional<double>>> named() const;
};

/// Length-weighted median: the first value whose cumulative weight reaches
/// half the total; an exact half-way hit averages with the next value so
/// equal weights reproduce the ordinary median.
double weighted_median(std::vector<std::pair<double, double>> value_weight);

/// Aggregates well-log intervals of one layer over the perforation window
/// (intervals clipped to the window, weighted by overlap) and over the
/// whole layer.
WellLogFeatures aggregate_well_logs(const std::vector<LogInterval>& intervals, double perf_top, double perf_bottom);
/// Layer-only variant used when the perforation window is unknown.
WellLogFeatures aggregate_well_logs(const std::vector<LogInterval>& intervals);

using NumericFields = std::vector<std::pair<std::string, std::optional<double>>>;
using CategoricalFields = std::vector<std::pair<std::string, std::optional<std::string>>>;

struct StageRecord {
  RowKey key;
  int stage = 1;
  NumericFields numeric;
  CategoricalFields categorical;
};

struct OperationRecord {
  RowKey key;
  NumericFields numeric;
  CategoricalFields categorical;
};

/// Sums volumes/masses/breakers/fracture dimensions over stages, averages
/// every other numeric field over observed stage values, sets n_stages, and
/// spreads per-stage proppant names into proppant_<stage> columns.
OperationRecord consolidate_stages(std::vector<StageRecord> stages);

struct MonthlyRecord {
  /// Month index, see month_index().
  std::int64_t month = 0;
  std::optional<double> oil;
  std::optional<double> fluid;
  std::optional<double> gas;
  std::optional<double> watercut;
  std::optional<double> hours;
};

/// Production outputs over the 3/6/12 calendar months after the frac month
/// plus the pre-frac mean monthly oil, in production_columns() order.
NumericFields compute_production_targets(const std::vector<MonthlyRecord>& records, std::int64_t frac_date);

/// Raw source document: a header and text cells.
struct SourceDoc {
  SourceKind kind;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Header columns each source kind must carry.
const std::vector<std::string>& required_columns(SourceKind kind);

SourceDoc read_source(const std::string& path, SourceKind kind);
void write_source(const SourceDoc& doc, const std::string& path);
/// Reads <dir>/<kind>.csv for every kind present.
std::vector<SourceDoc> read_source_dir(const std::string& dir);

struct NormalizationStats {
  std::size_t tokens = 0;
  std::size_t exact = 0;
  std::size_t corrected = 0;
  std::size_t unmatched = 0;
  std::size_t ambiguous = 0;
};

struct MergeLog {
  std::map<std::string, std::size_t> unmatched_records;
  std::map<std::string, std::size_t> duplicate_records;
  std::map<std::string, NormalizationStats> normalization;
  std::size_t range_cells = 0;
  std::size_t noise_cells = 0;
  std::size_t operations = 0;

  nlohmann::json to_json() const;
};

struct MergeResult {
  FieldTable table;
  MergeLog log;
};

/// Builds one row per distinct frac-list key (sorted), joining the other
/// sources on their key subsets after category normalization.
MergeResult merge_sources(const std::vector<SourceDoc>& docs, const DictionaryMap& dictionaries);

enum class EncodingPolicy { full_one_hot, reduced };

/// Replaces categorical columns by 0/1 indicator columns named
/// "<column>=<level>". Missing cells become the level "unknown". Under the
/// reduced policy proppant columns keep only the manufacturer prefix (text
/// before the first space, hyphen or slash).
FieldTable encode_categories(const FieldTable& table, EncodingPolicy policy);

std::string manufacturer_prefix(std::string_view proppant_name);

}  // namespace fracflow::ingest
