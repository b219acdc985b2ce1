#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracflow/table.hpp"

namespace fracflow {

enum class SourceKind {
  frac_list,
  monthly_production,
  operating_practice,
  geomechanics,
  pvt,
  layer_intersection,
  well_log
};

inline constexpr SourceKind kAllSourceKinds[] = {
    SourceKind::frac_list,   SourceKind::monthly_production, SourceKind::operating_practice,
    SourceKind::geomechanics, SourceKind::pvt,              SourceKind::layer_intersection,
    SourceKind::well_log};

std::string_view to_string(SourceKind kind);
std::optional<SourceKind> parse_source_kind(std::string_view text);

/// Well-level features with known provenance. Columns outside the catalog
/// are still accepted by ingest; they take their group from the source
/// kind and an empty unit.
struct CatalogEntry {
  std::string name;
  ColumnGroup group;
  std::string unit;
  SourceKind source;
};

const std::vector<CatalogEntry>& feature_catalog();
const CatalogEntry* find_catalog_entry(std::string_view name);

/// Per-stage design fields that are summed across stages (volumes, masses,
/// breaker amounts, fracture dimensions); all others are averaged.
bool is_summed_stage_field(std::string_view name);

/// Frac-list columns holding categorical tokens (suffix _name or _type).
bool is_categorical_source_field(std::string_view name);

/// Name of the stage-indexed proppant column ("proppant_3").
std::string proppant_column(std::size_t stage);
bool is_proppant_column(std::string_view name);
inline constexpr std::size_t kMaxProppantStages = 4;

inline constexpr std::string_view kTargetColumn = "cum_oil_3m";

/// Production outputs in emission order.
const std::vector<std::string>& production_columns();
/// Well-log aggregates in emission order.
const std::vector<std::string>& well_log_feature_columns();

}  // namespace fracflow
