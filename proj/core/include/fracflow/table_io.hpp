#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "fracflow/table.hpp"

namespace fracflow {

inline constexpr int kSchemaVersion = 1;

/// Sidecar path for a table CSV: "dir/name.csv" -> "dir/name.schema.json".
std::string schema_path_for(const std::string& csv_path);

nlohmann::json schema_to_json(const std::vector<ColumnMeta>& schema);
std::vector<ColumnMeta> schema_from_json(const nlohmann::json& doc);

/// Writes the table CSV (four key columns, then schema columns; missing
/// cells as empty strings) and its schema sidecar.
void write_table(const FieldTable& table, const std::string& csv_path);
FieldTable read_table(const std::string& csv_path);

/// Boolean flag matrix as 0/1 CSV with the key columns leading.
void write_flags(const FieldTable& table, const Mask& flags, const std::string& csv_path);

void write_json(const nlohmann::json& doc, const std::string& path);
nlohmann::json read_json(const std::string& path);

}  // namespace fracflow
