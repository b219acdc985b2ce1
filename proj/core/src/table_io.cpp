#include "fracflow/table_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "fracflow/csv.hpp"
#include "fracflow/error.hpp"

namespace fracflow {

namespace {

const std::vector<std::string> kKeyColumns = {"field_id", "well_id", "layer_id", "op_date"};

std::vector<std::string> key_fields(const RowKey& k) {
  return {k.field_id, k.well_id, k.layer_id, std::to_string(k.op_date)};
}

double parse_stored_number(const std::string& text, const std::string& column) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
    throw Error("column '" + column + "': malformed numeric cell '" + text + "'");
  return v;
}

}  // namespace

std::string schema_path_for(const std::string& csv_path) {
  const std::string ext = ".csv";
  if (csv_path.size() >= ext.size() && csv_path.compare(csv_path.size() - ext.size(), ext.size(), ext) == 0)
    return csv_path.substr(0, csv_path.size() - ext.size()) + ".schema.json";
  return csv_path + ".schema.json";
}

nlohmann::json schema_to_json(const std::vector<ColumnMeta>& schema) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& k : kKeyColumns)
    cols.push_back({{"name", k},
                    {"kind", k == "op_date" ? "numeric" : "categorical"},
                    {"group", "key"},
                    {"unit", k == "op_date" ? "days since 1970-01-01" : ""},
                    {"target", false}});
  for (const auto& c : schema)
    cols.push_back({{"name", c.name},
                    {"kind", to_string(c.kind)},
                    {"group", to_string(c.group)},
                    {"unit", c.unit},
                    {"target", c.is_target}});
  return {{"schema_version", kSchemaVersion}, {"columns", cols}};
}

std::vector<ColumnMeta> schema_from_json(const nlohmann::json& doc) {
  if (!doc.contains("columns")) throw Error("schema: missing 'columns'");
  std::vector<ColumnMeta> out;
  for (const auto& c : doc.at("columns")) {
    ColumnMeta meta;
    meta.name = c.at("name").get<std::string>();
    meta.group = parse_column_group(c.value("group", std::string("formation")));
    if (meta.group == ColumnGroup::key) continue;
    meta.kind = parse_column_kind(c.at("kind").get<std::string>());
    meta.unit = c.value("unit", std::string());
    meta.is_target = c.value("target", false);
    out.push_back(std::move(meta));
  }
  return out;
}

void write_table(const FieldTable& table, const std::string& csv_path) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw Error("cannot write '" + csv_path + "'");
  std::vector<std::string> header = kKeyColumns;
  for (const auto& c : table.schema()) header.push_back(c.name);
  csv::write_row(out, header);

  std::vector<std::size_t> slot(table.columns());
  for (std::size_t j = 0; j < table.numeric_count(); ++j) slot[table.numeric_columns()[j]] = j;
  for (std::size_t j = 0; j < table.categorical_count(); ++j) slot[table.categorical_columns()[j]] = j;

  for (std::size_t i = 0; i < table.rows(); ++i) {
    auto fields = key_fields(table.keys()[i]);
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t c = 0; c < table.columns(); ++c) {
      const auto j = static_cast<Eigen::Index>(slot[c]);
      if (table.schema()[c].kind == ColumnKind::numeric)
        fields.push_back(table.numeric_missing()(r, j) ? std::string() : csv::format_double(table.numeric()(r, j)));
      else
        fields.push_back(table.categorical_missing()(r, j) ? std::string() : table.categorical()[slot[c]][i]);
    }
    csv::write_row(out, fields);
  }
  if (!out) throw Error("write failed for '" + csv_path + "'");
  write_json(schema_to_json(table.schema()), schema_path_for(csv_path));
}

FieldTable read_table(const std::string& csv_path) {
  const auto schema = schema_from_json(read_json(schema_path_for(csv_path)));
  const auto doc = csv::read_file(csv_path);
  for (std::size_t k = 0; k < kKeyColumns.size(); ++k)
    if (doc.header.size() <= k || doc.header[k] != kKeyColumns[k])
      throw Error(csv_path + ": expected leading key column '" + kKeyColumns[k] + "'");
  if (doc.header.size() != kKeyColumns.size() + schema.size())
    throw Error(csv_path + ": header does not match schema sidecar");
  for (std::size_t c = 0; c < schema.size(); ++c)
    if (doc.header[kKeyColumns.size() + c] != schema[c].name)
      throw Error(csv_path + ": column '" + doc.header[kKeyColumns.size() + c] + "' does not match schema '" +
                  schema[c].name + "'");

  const auto n = static_cast<Eigen::Index>(doc.rows.size());
  std::size_t n_num = 0, n_cat = 0;
  for (const auto& c : schema) (c.kind == ColumnKind::numeric ? n_num : n_cat)++;
  Matrix num(n, static_cast<Eigen::Index>(n_num));
  Mask num_mask = Mask::Constant(n, static_cast<Eigen::Index>(n_num), false);
  std::vector<std::vector<std::string>> cat(n_cat, std::vector<std::string>(doc.rows.size()));
  Mask cat_mask = Mask::Constant(n, static_cast<Eigen::Index>(n_cat), false);
  std::vector<RowKey> keys;
  keys.reserve(doc.rows.size());

  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    const auto& row = doc.rows[i];
    RowKey key{row[0], row[1], row[2], 0};
    std::int64_t date = 0;
    auto [ptr, ec] = std::from_chars(row[3].data(), row[3].data() + row[3].size(), date);
    if (ec != std::errc{} || ptr != row[3].data() + row[3].size())
      throw Error(csv_path + ": malformed op_date '" + row[3] + "'");
    key.op_date = date;
    keys.push_back(std::move(key));
    std::size_t jn = 0, jc = 0;
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const auto& cell = row[kKeyColumns.size() + c];
      if (schema[c].kind == ColumnKind::numeric) {
        const auto j = static_cast<Eigen::Index>(jn++);
        if (cell.empty()) {
          num_mask(r, j) = true;
          num(r, j) = 0.0;
        } else {
          num(r, j) = parse_stored_number(cell, schema[c].name);
        }
      } else {
        const auto j = jc++;
        if (cell.empty())
          cat_mask(r, static_cast<Eigen::Index>(j)) = true;
        else
          cat[j][i] = cell;
      }
    }
  }
  return FieldTable(std::move(keys), schema, std::move(num), std::move(num_mask), std::move(cat), std::move(cat_mask));
}

void write_flags(const FieldTable& table, const Mask& flags, const std::string& csv_path) {
  if (flags.rows() != static_cast<Eigen::Index>(table.rows()) ||
      flags.cols() != static_cast<Eigen::Index>(table.numeric_count()))
    throw Error("flag matrix shape does not match numeric block");
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw Error("cannot write '" + csv_path + "'");
  std::vector<std::string> header = kKeyColumns;
  for (const auto& name : table.numeric_names()) header.push_back(name);
  csv::write_row(out, header);
  for (std::size_t i = 0; i < table.rows(); ++i) {
    auto fields = key_fields(table.keys()[i]);
    for (Eigen::Index j = 0; j < flags.cols(); ++j)
      fields.push_back(flags(static_cast<Eigen::Index>(i), j) ? "1" : "0");
    csv::write_row(out, fields);
  }
}

void write_json(const nlohmann::json& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw Error("write failed for '" + path + "'");
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace fracflow
