#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <map>
#include <set>

#include "fracflow/csv.hpp"
#include "fracflow/error.hpp"
#include "fracflow/ingest.hpp"

namespace fracflow::ingest {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <class T>
std::optional<T> parse_int(std::string_view s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::optional<std::int64_t> parse_date(std::string_view text) {
  const auto s = trim(text);
  if (s.empty()) return std::nullopt;
  if (auto d = parse_int<std::int64_t>(s)) return d;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto y = parse_int<int>(s.substr(0, 4));
  auto m = parse_int<unsigned>(s.substr(5, 2));
  auto d = parse_int<unsigned>(s.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{*m}, std::chrono::day{*d}};
  if (!ymd.ok()) return std::nullopt;
  return days_from_civil(*y, *m, *d);
}

std::string format_date(std::int64_t days) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

const std::vector<std::string>& required_columns(SourceKind kind) {
  static const std::map<SourceKind, std::vector<std::string>> req = {
      {SourceKind::frac_list, {"field_id", "well_id", "layer_id", "op_date"}},
      {SourceKind::monthly_production, {"field_id", "well_id", "layer_id", "month"}},
      {SourceKind::operating_practice, {"field_id", "well_id", "op_date"}},
      {SourceKind::geomechanics, {"field_id", "well_id", "layer_id"}},
      {SourceKind::pvt, {"field_id", "well_id", "layer_id"}},
      {SourceKind::layer_intersection, {"field_id", "well_id", "layer_id"}},
      {SourceKind::well_log, {"field_id", "well_id", "layer_id", "top", "bottom"}},
  };
  return req.at(kind);
}

SourceDoc read_source(const std::string& path, SourceKind kind) {
  auto doc = csv::read_file(path);
  for (const auto& c : required_columns(kind)) doc.require(c, path);
  return {kind, std::move(doc.header), std::move(doc.rows)};
}

void write_source(const SourceDoc& doc, const std::string& path) {
  csv::write_file(path, csv::Document{doc.columns, doc.rows});
}

std::vector<SourceDoc> read_source_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("source directory not found: " + dir);
  std::vector<SourceDoc> out;
  for (auto kind : kAllSourceKinds) {
    const auto path = fs::path(dir) / (std::string(to_string(kind)) + ".csv");
    if (fs::exists(path)) out.push_back(read_source(path.string(), kind));
  }
  return out;
}

nlohmann::json MergeLog::to_json() const {
  nlohmann::json norm = nlohmann::json::object();
  for (const auto& [col, s] : normalization)
    norm[col] = {{"tokens", s.tokens},
                 {"exact", s.exact},
                 {"corrected", s.corrected},
                 {"unmatched", s.unmatched},
                 {"ambiguous", s.ambiguous}};
  return {{"schema_version", 1},
          {"operations", operations},
          {"unmatched_records", unmatched_records},
          {"duplicate_records", duplicate_records},
          {"normalization", norm},
          {"range_cells", range_cells},
          {"noise_cells", noise_cells}};
}

namespace {

using Cells = std::vector<std::optional<double>>;

bool is_key_column(std::string_view name) {
  return name == "field_id" || name == "well_id" || name == "layer_id" || name == "op_date";
}

bool is_range(std::string_view s) {
  double v;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return !(ec == std::errc() && ptr == s.data() + s.size());
}

std::optional<double> parse_numeric_cell(std::string_view text, MergeLog& log) {
  auto s = trim(text);
  if (s.empty()) return std::nullopt;
  auto v = parse_cell(s);
  if (!v) {
    ++log.noise_cells;
    return v;
  }
  if (s.front() == '+') s.remove_prefix(1);
  if (is_range(s)) ++log.range_cells;
  return v;
}

std::string require_text(const std::vector<std::string>& row, std::size_t col, std::string_view what) {
  auto s = trim(row[col]);
  if (s.empty()) throw Error("source record lacks " + std::string(what));
  return std::string(s);
}

std::int64_t require_date(const std::vector<std::string>& row, std::size_t col, std::string_view what) {
  auto d = parse_date(row[col]);
  if (!d) throw Error("source record has an invalid " + std::string(what) + " '" + row[col] + "'");
  return *d;
}

/// One auxiliary document flattened to key -> numeric value cells.
struct AuxTable {
  std::vector<std::string> columns;
  std::map<RowKey, Cells> records;
};

std::size_t missing_count(const Cells& cells) {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::nullopt));
}

RowKey aux_key(const SourceDoc& doc, const csv::Document& view, const std::vector<std::string>& row) {
  RowKey k;
  k.field_id = require_text(row, view.require("field_id", to_string(doc.kind)), "field_id");
  k.well_id = require_text(row, view.require("well_id", to_string(doc.kind)), "well_id");
  if (auto c = view.find("layer_id"); c && doc.kind != SourceKind::operating_practice)
    k.layer_id = require_text(row, *c, "layer_id");
  if (doc.kind == SourceKind::operating_practice) k.op_date = require_date(row, view.require("op_date", "operating_practice"), "op_date");
  return k;
}

AuxTable read_aux(const std::vector<const SourceDoc*>& docs, MergeLog& log) {
  AuxTable t;
  for (const auto* doc : docs) {
    csv::Document view{doc->columns, {}};
    std::vector<std::size_t> value_cols;
    for (std::size_t c = 0; c < doc->columns.size(); ++c) {
      const auto& name = doc->columns[c];
      if (is_key_column(name)) continue;
      value_cols.push_back(c);
      if (std::find(t.columns.begin(), t.columns.end(), name) == t.columns.end()) t.columns.push_back(name);
    }
    for (const auto& row : doc->rows) {
      const auto key = aux_key(*doc, view, row);
      Cells cells(t.columns.size());
      for (auto c : value_cols) {
        const auto pos = static_cast<std::size_t>(
            std::find(t.columns.begin(), t.columns.end(), doc->columns[c]) - t.columns.begin());
        cells[pos] = parse_numeric_cell(row[c], log);
      }
      auto [it, inserted] = t.records.try_emplace(key, cells);
      if (!inserted) {
        ++log.duplicate_records[std::string(to_string(doc->kind))];
        if (missing_count(cells) < missing_count(it->second)) it->second = std::move(cells);
      }
    }
  }
  for (auto& [k, cells] : t.records) cells.resize(t.columns.size());
  return t;
}

std::optional<double> cell(const AuxTable& t, const Cells& cells, std::string_view name) {
  auto it = std::find(t.columns.begin(), t.columns.end(), name);
  if (it == t.columns.end()) return std::nullopt;
  return cells[static_cast<std::size_t>(it - t.columns.begin())];
}

RowKey layer_key(const RowKey& k) { return {k.field_id, k.well_id, k.layer_id, 0}; }
RowKey practice_key(const RowKey& k) { return {k.field_id, k.well_id, "", k.op_date}; }

ColumnGroup default_group(SourceKind kind) {
  switch (kind) {
    case SourceKind::geomechanics:
    case SourceKind::pvt:
    case SourceKind::well_log: return ColumnGroup::formation;
    case SourceKind::layer_intersection:
    case SourceKind::operating_practice: return ColumnGroup::well;
    case SourceKind::frac_list: return ColumnGroup::design;
    case SourceKind::monthly_production: return ColumnGroup::production;
  }
  return ColumnGroup::formation;
}

struct Builder {
  std::size_t n = 0;
  std::vector<ColumnMeta> schema;
  std::deque<Cells> numeric;
  std::deque<std::vector<std::optional<std::string>>> categorical;

  Cells& add_numeric(const std::string& name, SourceKind kind) {
    ColumnMeta m{name, ColumnKind::numeric, default_group(kind), "", name == kTargetColumn};
    if (const auto* e = find_catalog_entry(name)) {
      m.group = e->group;
      m.unit = e->unit;
    }
    schema.push_back(std::move(m));
    return numeric.emplace_back(n);
  }

  std::vector<std::optional<std::string>>& add_categorical(const std::string& name) {
    schema.push_back({name, ColumnKind::categorical, ColumnGroup::design, "", false});
    return categorical.emplace_back(n);
  }

  FieldTable build(std::vector<RowKey> keys) {
    const auto rows = static_cast<Eigen::Index>(n);
    Matrix x(rows, static_cast<Eigen::Index>(numeric.size()));
    Mask xm(rows, static_cast<Eigen::Index>(numeric.size()));
    for (std::size_t j = 0; j < numeric.size(); ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const auto& v = numeric[j][i];
        xm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = !v;
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v.value_or(0.0);
      }
    std::vector<std::vector<std::string>> cats(categorical.size(), std::vector<std::string>(n));
    Mask cm(rows, static_cast<Eigen::Index>(categorical.size()));
    for (std::size_t j = 0; j < categorical.size(); ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const auto& v = categorical[j][i];
        cm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = !v;
        if (v) cats[j][i] = *v;
      }
    return FieldTable(std::move(keys), std::move(schema), std::move(x), std::move(xm), std::move(cats), std::move(cm));
  }
};

std::optional<std::string> normalize_token(std::string_view raw, const std::string& column,
                                           const DictionaryMap& dicts, MergeLog& log) {
  const auto s = trim(raw);
  if (s.empty()) return std::nullopt;
  auto it = dicts.find(column);
  if (it == dicts.end() || it->second.canonical.empty()) return std::string(s);
  auto& stats = log.normalization[column];
  ++stats.tokens;
  try {
    auto r = normalize_category(s, it->second);
    if (!r.matched) {
      ++stats.unmatched;
      return std::string(s);
    }
    if (r.token == s) ++stats.exact;
    else ++stats.corrected;
    return r.token;
  } catch (const Error&) {
    ++stats.ambiguous;
    return std::string(s);
  }
}

}  // namespace

MergeResult merge_sources(const std::vector<SourceDoc>& docs, const DictionaryMap& dictionaries) {
  std::map<SourceKind, std::vector<const SourceDoc*>> by_kind;
  for (const auto& d : docs) {
    for (const auto& c : required_columns(d.kind))
      if (std::find(d.columns.begin(), d.columns.end(), c) == d.columns.end())
        throw Error(std::string(to_string(d.kind)) + " lacks required column '" + c + "'");
    for (const auto& row : d.rows)
      if (row.size() != d.columns.size()) throw Error(std::string(to_string(d.kind)) + " row width mismatch");
    by_kind[d.kind].push_back(&d);
  }
  if (!by_kind.contains(SourceKind::frac_list)) throw Error("missing key source");

  MergeLog log;

  // Frac-list: stage rows grouped by operation key.
  std::vector<std::string> design_numeric, design_categorical;
  bool has_proppant = false;
  std::map<RowKey, std::vector<StageRecord>> stage_groups;
  for (const auto* doc : by_kind.at(SourceKind::frac_list)) {
    csv::Document view{doc->columns, {}};
    const auto c_field = view.require("field_id", "frac_list");
    const auto c_well = view.require("well_id", "frac_list");
    const auto c_layer = view.require("layer_id", "frac_list");
    const auto c_date = view.require("op_date", "frac_list");
    const auto c_stage = view.find("stage");
    for (std::size_t c = 0; c < doc->columns.size(); ++c) {
      const auto& name = doc->columns[c];
      if (is_key_column(name) || name == "stage" || name == "n_stages") continue;
      if (name == "proppant_name") {
        has_proppant = true;
        continue;
      }
      auto& list = is_categorical_source_field(name) ? design_categorical : design_numeric;
      if (std::find(list.begin(), list.end(), name) == list.end()) list.push_back(name);
    }
    for (const auto& row : doc->rows) {
      StageRecord s;
      s.key = {require_text(row, c_field, "field_id"), require_text(row, c_well, "well_id"),
               require_text(row, c_layer, "layer_id"), require_date(row, c_date, "op_date")};
      auto& group = stage_groups[s.key];
      s.stage = static_cast<int>(group.size()) + 1;
      if (c_stage) {
        auto v = parse_cell(row[*c_stage]);
        if (v) s.stage = static_cast<int>(std::lround(*v));
      }
      for (std::size_t c = 0; c < doc->columns.size(); ++c) {
        const auto& name = doc->columns[c];
        if (is_key_column(name) || name == "stage" || name == "n_stages") continue;
        if (is_categorical_source_field(name)) s.categorical.emplace_back(name, normalize_token(row[c], name, dictionaries, log));
        else s.numeric.emplace_back(name, parse_numeric_cell(row[c], log));
      }
      group.push_back(std::move(s));
    }
  }

  std::vector<RowKey> keys;
  std::vector<OperationRecord> ops;
  for (auto& [key, stages] : stage_groups) {
    keys.push_back(key);
    ops.push_back(consolidate_stages(std::move(stages)));
  }
  log.operations = keys.size();

  std::set<RowKey> layer_keys, practice_keys;
  for (const auto& k : keys) {
    layer_keys.insert(layer_key(k));
    practice_keys.insert(practice_key(k));
  }

  Builder b;
  b.n = keys.size();
  auto kind_docs = [&](SourceKind k) {
    auto it = by_kind.find(k);
    return it == by_kind.end() ? std::vector<const SourceDoc*>{} : it->second;
  };
  auto count_unmatched = [&](SourceKind kind, const std::set<RowKey>& aux, const std::set<RowKey>& targets) {
    std::size_t miss = 0;
    for (const auto& k : aux)
      if (!targets.contains(k)) ++miss;
    if (miss) log.unmatched_records[std::string(to_string(kind))] += miss;
  };
  auto join_layer_table = [&](SourceKind kind, const AuxTable& t, const std::vector<std::string>& skip) {
    std::set<RowKey> aux;
    for (const auto& [k, c] : t.records) aux.insert(k);
    count_unmatched(kind, aux, layer_keys);
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      if (std::find(skip.begin(), skip.end(), t.columns[j]) != skip.end()) continue;
      auto& col = b.add_numeric(t.columns[j], kind);
      for (std::size_t i = 0; i < keys.size(); ++i)
        if (auto it = t.records.find(layer_key(keys[i])); it != t.records.end()) col[i] = it->second[j];
    }
  };

  // Formation: geomechanics, PVT, well-log aggregates.
  for (auto kind : {SourceKind::geomechanics, SourceKind::pvt}) {
    auto d = kind_docs(kind);
    if (!d.empty()) join_layer_table(kind, read_aux(d, log), {});
  }

  AuxTable layer_table;
  const bool has_layers = by_kind.contains(SourceKind::layer_intersection);
  if (has_layers) layer_table = read_aux(kind_docs(SourceKind::layer_intersection), log);

  if (auto d = kind_docs(SourceKind::well_log); !d.empty()) {
    std::map<RowKey, std::vector<LogInterval>> logs;
    for (const auto* doc : d) {
      csv::Document view{doc->columns, {}};
      const auto c_top = view.require("top", "well_log");
      const auto c_bottom = view.require("bottom", "well_log");
      auto opt_col = [&](const char* name) { return view.find(name); };
      const auto c_por = opt_col("porosity"), c_perm = opt_col("permeability"), c_clay = opt_col("clay"),
                 c_so = opt_col("oil_saturation"), c_pay = opt_col("pay");
      for (const auto& row : doc->rows) {
        const auto key = aux_key(*doc, view, row);
        LogInterval iv;
        auto top = parse_numeric_cell(row[c_top], log);
        auto bottom = parse_numeric_cell(row[c_bottom], log);
        if (!top || !bottom || !(*bottom > *top)) continue;
        iv.top = *top;
        iv.bottom = *bottom;
        if (c_por) iv.porosity = parse_numeric_cell(row[*c_por], log);
        if (c_perm) iv.permeability = parse_numeric_cell(row[*c_perm], log);
        if (c_clay) iv.clay = parse_numeric_cell(row[*c_clay], log);
        if (c_so) iv.oil_saturation = parse_numeric_cell(row[*c_so], log);
        if (c_pay) {
          auto p = parse_numeric_cell(row[*c_pay], log);
          iv.pay = p && *p != 0.0;
        }
        logs[key].push_back(iv);
      }
    }
    std::set<RowKey> aux;
    for (const auto& [k, v] : logs) aux.insert(k);
    count_unmatched(SourceKind::well_log, aux, layer_keys);
    const auto& names = well_log_feature_columns();
    std::vector<Cells*> cols;
    for (const auto& name : names) cols.push_back(&b.add_numeric(name, SourceKind::well_log));
    for (std::size_t i = 0; i < keys.size(); ++i) {
      auto it = logs.find(layer_key(keys[i]));
      if (it == logs.end()) continue;
      std::optional<double> top, bottom;
      if (auto lt = layer_table.records.find(layer_key(keys[i])); lt != layer_table.records.end()) {
        top = cell(layer_table, lt->second, "perf_top");
        bottom = cell(layer_table, lt->second, "perf_bottom");
      }
      const auto feats = (top && bottom && *bottom > *top) ? aggregate_well_logs(it->second, *top, *bottom)
                                                           : aggregate_well_logs(it->second);
      const auto named = feats.named();
      for (std::size_t j = 0; j < named.size(); ++j) (*cols[j])[i] = named[j].second;
    }
  }

  // Well: layer geometry, then operating practice.
  if (has_layers) {
    const bool perf = std::count(layer_table.columns.begin(), layer_table.columns.end(), "perf_top") &&
                      std::count(layer_table.columns.begin(), layer_table.columns.end(), "perf_bottom");
    const bool layer = std::count(layer_table.columns.begin(), layer_table.columns.end(), "layer_top") &&
                       std::count(layer_table.columns.begin(), layer_table.columns.end(), "layer_bottom");
    auto lookup = [&](std::size_t i) -> const Cells* {
      auto it = layer_table.records.find(layer_key(keys[i]));
      return it == layer_table.records.end() ? nullptr : &it->second;
    };
    auto diff = [](std::optional<double> hi, std::optional<double> lo) -> std::optional<double> {
      if (!hi || !lo) return std::nullopt;
      return *hi - *lo;
    };
    if (perf) {
      auto& md = b.add_numeric("perf_depth_md", SourceKind::layer_intersection);
      auto& interval = b.add_numeric("perf_interval", SourceKind::layer_intersection);
      for (std::size_t i = 0; i < keys.size(); ++i)
        if (const auto* c = lookup(i)) {
          md[i] = cell(layer_table, *c, "perf_top");
          interval[i] = diff(cell(layer_table, *c, "perf_bottom"), cell(layer_table, *c, "perf_top"));
        }
    }
    if (layer) {
      auto& thick = b.add_numeric("formation_thickness", SourceKind::layer_intersection);
      for (std::size_t i = 0; i < keys.size(); ++i)
        if (const auto* c = lookup(i))
          thick[i] = diff(cell(layer_table, *c, "layer_bottom"), cell(layer_table, *c, "layer_top"));
    }
    join_layer_table(SourceKind::layer_intersection, layer_table, {"perf_top", "perf_bottom", "layer_top", "layer_bottom"});
  }

  if (auto d = kind_docs(SourceKind::operating_practice); !d.empty()) {
    const auto t = read_aux(d, log);
    std::set<RowKey> aux;
    for (const auto& [k, c] : t.records) aux.insert(k);
    count_unmatched(SourceKind::operating_practice, aux, practice_keys);
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      auto& col = b.add_numeric(t.columns[j], SourceKind::operating_practice);
      for (std::size_t i = 0; i < keys.size(); ++i)
        if (auto it = t.records.find(practice_key(keys[i])); it != t.records.end()) col[i] = it->second[j];
    }
  }

  // Design.
  design_numeric.push_back("n_stages");
  for (const auto& name : design_numeric) {
    auto& col = b.add_numeric(name, SourceKind::frac_list);
    for (std::size_t i = 0; i < ops.size(); ++i)
      for (const auto& [n, v] : ops[i].numeric)
        if (n == name) col[i] = v;
  }
  std::vector<std::string> cat_columns;
  if (has_proppant)
    for (std::size_t s = 1; s <= kMaxProppantStages; ++s) cat_columns.push_back(proppant_column(s));
  cat_columns.insert(cat_columns.end(), design_categorical.begin(), design_categorical.end());
  for (const auto& name : cat_columns) {
    auto& col = b.add_categorical(name);
    for (std::size_t i = 0; i < ops.size(); ++i)
      for (const auto& [n, v] : ops[i].categorical)
        if (n == name) col[i] = v;
  }

  // Production.
  if (auto d = kind_docs(SourceKind::monthly_production); !d.empty()) {
    std::map<RowKey, std::map<std::int64_t, std::pair<MonthlyRecord, std::size_t>>> months;
    for (const auto* doc : d) {
      csv::Document view{doc->columns, {}};
      const auto c_month = view.require("month", "monthly_production");
      auto opt_col = [&](const char* name) { return view.find(name); };
      const auto c_oil = opt_col("oil"), c_fluid = opt_col("fluid"), c_gas = opt_col("gas"),
                 c_wc = opt_col("watercut"), c_hours = opt_col("hours");
      for (const auto& row : doc->rows) {
        const auto key = aux_key(*doc, view, row);
        MonthlyRecord r;
        r.month = month_index(require_date(row, c_month, "month"));
        std::size_t missing = 0;
        auto read = [&](std::optional<std::size_t> c) -> std::optional<double> {
          std::optional<double> v;
          if (c) v = parse_numeric_cell(row[*c], log);
          if (!v) ++missing;
          return v;
        };
        r.oil = read(c_oil);
        r.fluid = read(c_fluid);
        r.gas = read(c_gas);
        r.watercut = read(c_wc);
        r.hours = read(c_hours);
        auto& slot = months[key];
        auto [it, inserted] = slot.try_emplace(r.month, r, missing);
        if (!inserted) {
          ++log.duplicate_records["monthly_production"];
          if (missing < it->second.second) it->second = {r, missing};
        }
      }
    }
    std::set<RowKey> aux;
    for (const auto& [k, v] : months) aux.insert(k);
    count_unmatched(SourceKind::monthly_production, aux, layer_keys);
    std::vector<Cells*> cols;
    for (const auto& name : production_columns()) cols.push_back(&b.add_numeric(name, SourceKind::monthly_production));
    for (std::size_t i = 0; i < keys.size(); ++i) {
      auto it = months.find(layer_key(keys[i]));
      if (it == months.end()) continue;
      std::vector<MonthlyRecord> records;
      for (const auto& [m, r] : it->second) records.push_back(r.first);
      const auto out = compute_production_targets(records, keys[i].op_date);
      for (std::size_t j = 0; j < out.size(); ++j) (*cols[j])[i] = out[j].second;
    }
  }

  return {b.build(std::move(keys)), std::move(log)};
}

}  // namespace fracflow::ingest
