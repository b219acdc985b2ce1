#include "fracflow/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "fracflow/error.hpp"

namespace fracflow::ingest {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string fold_case(std::string_view token) {
  std::string out(trim(token));
  for (auto& ch : out)
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  return out;
}

CategoryDictionary::CategoryDictionary(std::vector<std::string> tokens, std::size_t max_dist)
    : max_distance(max_dist) {
  std::set<std::string> seen;
  for (auto& t : tokens) {
    auto folded = fold_case(t);
    if (folded.empty()) throw Error("empty canonical token");
    if (seen.insert(folded).second) canonical.push_back(std::move(folded));
  }
  validate();
}

void CategoryDictionary::validate() const {
  for (std::size_t i = 0; i < canonical.size(); ++i)
    for (std::size_t j = i + 1; j < canonical.size(); ++j)
      if (levenshtein(canonical[i], canonical[j]) <= max_distance)
        throw Error("ambiguous dictionary: '" + canonical[i] + "' and '" + canonical[j] + "' are within distance " +
                    std::to_string(max_distance));
}

DictionaryMap dictionaries_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error("dictionary file must hold a JSON object");
  DictionaryMap out;
  for (const auto& [column, spec] : doc.items()) {
    if (!spec.is_object() || !spec.contains("canonical")) throw Error("dictionary '" + column + "' lacks 'canonical'");
    auto tokens = spec.at("canonical").get<std::vector<std::string>>();
    const auto max_dist = spec.value("max_distance", std::size_t{2});
    out.emplace(column, CategoryDictionary(std::move(tokens), max_dist));
  }
  return out;
}

nlohmann::json dictionaries_to_json(const DictionaryMap& dicts) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [column, d] : dicts) doc[column] = {{"canonical", d.canonical}, {"max_distance", d.max_distance}};
  return doc;
}

DictionaryMap load_dictionaries(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("dictionary directory not found: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  DictionaryMap out;
  for (const auto& f : files) {
    std::ifstream in(f);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& ex) {
      throw Error("cannot parse dictionary " + f.string() + ": " + ex.what());
    }
    for (auto& [column, d] : dictionaries_from_json(doc)) out.insert_or_assign(column, std::move(d));
  }
  return out;
}

Normalized normalize_category(std::string_view token, const CategoryDictionary& dict) {
  if (dict.canonical.empty()) throw Error("empty dictionary");
  const std::string folded = fold_case(token);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  const std::string* best_token = nullptr;
  bool tie = false;
  for (const auto& c : dict.canonical) {
    const auto d = levenshtein(folded, c);
    if (d < best) {
      best = d;
      best_token = &c;
      tie = false;
    } else if (d == best) {
      tie = true;
    }
  }
  if (best > dict.max_distance) return {std::string(token), false};
  if (tie) throw Error("ambiguous dictionary");
  return {*best_token, true};
}

std::optional<double> parse_cell(std::string_view text) {
  const auto s = trim(text);
  if (s.empty()) return std::nullopt;
  if (auto v = parse_number(s)) return v;
  for (std::size_t pos = 1; pos < s.size(); ++pos) {
    if (s[pos] != '-') continue;
    const char prev = s[pos - 1];
    if (!((prev >= '0' && prev <= '9') || prev == '.')) continue;
    auto lo = parse_number(trim(s.substr(0, pos)));
    auto hi = parse_number(trim(s.substr(pos + 1)));
    if (lo && hi && *lo < *hi) return (*lo + *hi) / 2.0;
    return std::nullopt;
  }
  return std::nullopt;
}

double weighted_median(std::vector<std::pair<double, double>> vw) {
  std::erase_if(vw, [](const auto& p) { return !(p.second > 0.0); });
  if (vw.empty()) throw Error("weighted median of empty input");
  std::stable_sort(vw.begin(), vw.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double total = 0.0;
  for (const auto& p : vw) total += p.second;
  const double half = total / 2.0;
  double cum = 0.0;
  for (std::size_t i = 0; i < vw.size(); ++i) {
    cum += vw[i].second;
    if (cum >= half) {
      if (std::abs(cum - half) <= 1e-12 * total && i + 1 < vw.size()) return (vw[i].first + vw[i + 1].first) / 2.0;
      return vw[i].first;
    }
  }
  return vw.back().first;
}

std::vector<std::pair<std::string, std::optional<double>>> WellLogFeatures::named() const {
  std::vector<std::pair<std::string, std::optional<double>>> out;
  const auto& names = well_log_feature_columns();
  std::size_t k = 0;
  for (const ScopeFeatures* s : {&perforation, &layer}) {
    for (const PropertyStats* p : {&s->porosity, &s->permeability, &s->clay, &s->oil_saturation}) {
      out.emplace_back(names[k++], p->mean);
      out.emplace_back(names[k++], p->median);
    }
    out.emplace_back(names[k++], s->kh_median);
    out.emplace_back(names[k++], s->ntg);
    out.emplace_back(names[k++], s->strat_factor);
  }
  return out;
}

namespace {

struct Clipped {
  const LogInterval* iv;
  double length;
};

PropertyStats property_stats(const std::vector<Clipped>& parts, std::optional<double> LogInterval::*field) {
  std::vector<std::pair<double, double>> vw;
  double sum = 0.0, w = 0.0;
  for (const auto& c : parts) {
    const auto& v = c.iv->*field;
    if (!v) continue;
    vw.emplace_back(*v, c.length);
    sum += *v * c.length;
    w += c.length;
  }
  if (vw.empty()) return {};
  return {sum / w, weighted_median(std::move(vw))};
}

ScopeFeatures scope_features(const std::vector<Clipped>& parts) {
  ScopeFeatures f;
  if (parts.empty()) return f;
  f.porosity = property_stats(parts, &LogInterval::porosity);
  f.permeability = property_stats(parts, &LogInterval::permeability);
  f.clay = property_stats(parts, &LogInterval::clay);
  f.oil_saturation = property_stats(parts, &LogInterval::oil_saturation);

  std::vector<std::pair<double, double>> kh;
  for (const auto& c : parts)
    if (c.iv->permeability) kh.emplace_back(*c.iv->permeability * c.length, c.length);
  if (!kh.empty()) f.kh_median = weighted_median(std::move(kh));

  double total = 0.0, pay = 0.0;
  for (const auto& c : parts) {
    total += c.length;
    if (c.iv->pay) pay += c.length;
  }
  f.ntg = pay / total;

  double runs = 0.0, run_length = 0.0;
  for (const auto& c : parts) {
    if (c.iv->pay) {
      if (run_length >= kLogResolution - 1e-9) runs += 1.0;
      run_length = 0.0;
    } else {
      run_length += c.length;
    }
  }
  if (run_length >= kLogResolution - 1e-9) runs += 1.0;
  f.strat_factor = runs;
  return f;
}

std::vector<const LogInterval*> sorted_intervals(const std::vector<LogInterval>& intervals) {
  if (intervals.empty()) throw Error("no log intervals");
  std::vector<const LogInterval*> out;
  for (const auto& iv : intervals) {
    if (!std::isfinite(iv.top) || !std::isfinite(iv.bottom) || !(iv.bottom > iv.top))
      throw Error("log interval bottom must exceed top");
    out.push_back(&iv);
  }
  std::stable_sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->top < b->top; });
  return out;
}

}  // namespace

WellLogFeatures aggregate_well_logs(const std::vector<LogInterval>& intervals, double perf_top, double perf_bottom) {
  if (!(perf_bottom > perf_top)) throw Error("perforation bottom must exceed top");
  const auto sorted = sorted_intervals(intervals);
  std::vector<Clipped> layer, perf;
  for (const auto* iv : sorted) {
    layer.push_back({iv, iv->bottom - iv->top});
    const double overlap = std::min(iv->bottom, perf_bottom) - std::max(iv->top, perf_top);
    if (overlap > 0.0) perf.push_back({iv, overlap});
  }
  return {scope_features(perf), scope_features(layer)};
}

WellLogFeatures aggregate_well_logs(const std::vector<LogInterval>& intervals) {
  const auto sorted = sorted_intervals(intervals);
  std::vector<Clipped> layer;
  for (const auto* iv : sorted) layer.push_back({iv, iv->bottom - iv->top});
  return {ScopeFeatures{}, scope_features(layer)};
}

OperationRecord consolidate_stages(std::vector<StageRecord> stages) {
  if (stages.empty()) throw Error("no stages to consolidate");
  for (const auto& s : stages)
    if (s.key != stages.front().key) throw Error("inconsistent stage group");
  std::stable_sort(stages.begin(), stages.end(), [](const auto& a, const auto& b) { return a.stage < b.stage; });

  OperationRecord out;
  out.key = stages.front().key;

  std::vector<std::string> numeric_names;
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& s : stages)
    for (const auto& [name, v] : s.numeric) {
      if (name == "n_stages") continue;
      auto [it, inserted] = acc.try_emplace(name, 0.0, 0);
      if (inserted) numeric_names.push_back(name);
      if (v) {
        it->second.first += *v;
        ++it->second.second;
      }
    }
  for (const auto& name : numeric_names) {
    const auto& [sum, count] = acc.at(name);
    std::optional<double> v;
    if (count > 0) v = is_summed_stage_field(name) ? sum : sum / static_cast<double>(count);
    out.numeric.emplace_back(name, v);
  }
  out.numeric.emplace_back("n_stages", static_cast<double>(stages.size()));

  bool has_proppant = false;
  std::vector<std::string> cat_names;
  std::map<std::string, std::optional<std::string>> first;
  for (const auto& s : stages)
    for (const auto& [name, v] : s.categorical) {
      if (name == "proppant_name") {
        has_proppant = true;
        continue;
      }
      auto [it, inserted] = first.try_emplace(name);
      if (inserted) cat_names.push_back(name);
      if (!it->second && v) it->second = v;
    }
  if (has_proppant) {
    for (std::size_t s = 1; s <= kMaxProppantStages; ++s) {
      std::optional<std::string> v;
      if (s <= stages.size())
        for (const auto& [name, tok] : stages[s - 1].categorical)
          if (name == "proppant_name") v = tok;
      out.categorical.emplace_back(proppant_column(s), v);
    }
  }
  for (const auto& name : cat_names) out.categorical.emplace_back(name, first.at(name));
  return out;
}

NumericFields compute_production_targets(const std::vector<MonthlyRecord>& records, std::int64_t frac_date) {
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].month <= records[i - 1].month) throw Error("production records must be sorted by month");
  const std::int64_t m0 = month_index(frac_date);

  std::map<std::int64_t, const MonthlyRecord*> by_month;
  for (const auto& r : records) by_month[r.month] = &r;

  using Field = std::optional<double> MonthlyRecord::*;
  auto window = [&](Field f, int months, bool average) -> std::optional<double> {
    double sum = 0.0;
    for (int k = 1; k <= months; ++k) {
      auto it = by_month.find(m0 + k);
      if (it == by_month.end() || !(it->second->*f)) return std::nullopt;
      sum += *(it->second->*f);
    }
    return average ? sum / months : sum;
  };

  NumericFields out;
  const std::pair<const char*, Field> fields[] = {{"cum_oil", &MonthlyRecord::oil},
                                                  {"cum_fluid", &MonthlyRecord::fluid},
                                                  {"cum_gas", &MonthlyRecord::gas},
                                                  {"watercut", &MonthlyRecord::watercut},
                                                  {"hours", &MonthlyRecord::hours}};
  for (const auto& [base, f] : fields)
    for (int m : {3, 6, 12})
      out.emplace_back(std::string(base) + "_" + std::to_string(m) + "m", window(f, m, f == &MonthlyRecord::watercut));

  double pre = 0.0;
  std::size_t n_pre = 0;
  for (const auto& r : records)
    if (r.month < m0 && r.oil) {
      pre += *r.oil;
      ++n_pre;
    }
  out.emplace_back("prefrac_oil_rate", n_pre ? std::optional<double>(pre / static_cast<double>(n_pre)) : std::nullopt);
  return out;
}

std::string manufacturer_prefix(std::string_view proppant_name) {
  const std::string folded = fold_case(proppant_name);
  const auto cut = folded.find_first_of(" -/");
  return cut == std::string::npos ? folded : folded.substr(0, cut);
}

FieldTable encode_categories(const FieldTable& table, EncodingPolicy policy) {
  if (table.categorical_count() == 0) return table;
  const std::size_t n = table.rows();
  std::vector<ColumnMeta> schema;
  std::vector<Eigen::VectorXd> cols;
  std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>> masks;

  std::size_t num_pos = 0, cat_pos = 0;
  for (const auto& meta : table.schema()) {
    if (meta.kind == ColumnKind::numeric) {
      schema.push_back(meta);
      cols.push_back(table.numeric().col(static_cast<Eigen::Index>(num_pos)));
      masks.push_back(table.numeric_missing().col(static_cast<Eigen::Index>(num_pos)));
      ++num_pos;
      continue;
    }
    const bool reduce = policy == EncodingPolicy::reduced && is_proppant_column(meta.name);
    std::vector<std::string> values(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (table.categorical_missing()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cat_pos))) {
        values[i] = "unknown";
      } else {
        const auto& raw = table.categorical()[cat_pos][i];
        values[i] = reduce ? manufacturer_prefix(raw) : raw;
      }
    }
    std::set<std::string> levels(values.begin(), values.end());
    for (const auto& level : levels) {
      schema.push_back({meta.name + "=" + level, ColumnKind::numeric, meta.group, "", false});
      Eigen::VectorXd c(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) c(static_cast<Eigen::Index>(i)) = values[i] == level ? 1.0 : 0.0;
      cols.push_back(std::move(c));
      masks.push_back(Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(static_cast<Eigen::Index>(n), false));
    }
    ++cat_pos;
  }
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols.size()));
  Mask m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    x.col(static_cast<Eigen::Index>(j)) = cols[j];
    m.col(static_cast<Eigen::Index>(j)) = masks[j];
  }
  return FieldTable::numeric_only(table.keys(), std::move(schema), std::move(x), std::move(m));
}

}  // namespace fracflow::ingest
