#include "fracflow/feature_catalog.hpp"

#include <algorithm>

namespace fracflow {

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::frac_list: return "frac_list";
    case SourceKind::monthly_production: return "monthly_production";
    case SourceKind::operating_practice: return "operating_practice";
    case SourceKind::geomechanics: return "geomechanics";
    case SourceKind::pvt: return "pvt";
    case SourceKind::layer_intersection: return "layer_intersection";
    case SourceKind::well_log: return "well_log";
  }
  return "frac_list";
}

std::optional<SourceKind> parse_source_kind(std::string_view text) {
  for (auto k : kAllSourceKinds)
    if (to_string(k) == text) return k;
  return std::nullopt;
}

namespace {

std::vector<CatalogEntry> build_catalog() {
  using G = ColumnGroup;
  using S = SourceKind;
  std::vector<CatalogEntry> c = {
      {"stress_anisotropy", G::formation, "MPa", S::geomechanics},
      {"poisson_ratio", G::formation, "", S::geomechanics},
      {"young_modulus", G::formation, "GPa", S::geomechanics},
      {"formation_pressure", G::formation, "MPa", S::geomechanics},
      {"oil_viscosity", G::formation, "cP", S::pvt},
      {"oil_density", G::formation, "kg/m3", S::pvt},
      {"bubble_point_pressure", G::formation, "MPa", S::pvt},
      {"oil_fvf", G::formation, "m3/m3", S::pvt},
  };
  for (const auto& name : well_log_feature_columns()) {
    std::string unit;
    if (name.starts_with("permeability")) unit = "mD";
    else if (name.starts_with("kh")) unit = "mD*m";
    c.push_back({name, G::formation, unit, S::well_log});
  }
  const std::vector<CatalogEntry> rest = {
      {"perf_depth_md", G::well, "m", S::layer_intersection},
      {"perf_interval", G::well, "m", S::layer_intersection},
      {"formation_thickness", G::well, "m", S::layer_intersection},
      {"perf_depth_tvd", G::well, "m", S::layer_intersection},
      {"inclination", G::well, "deg", S::layer_intersection},
      {"tubing_diameter", G::well, "mm", S::operating_practice},
      {"perf_density", G::well, "1/m", S::operating_practice},
      {"skin_factor", G::well, "", S::operating_practice},
      {"fluid_volume", G::design, "m3", S::frac_list},
      {"pad_volume", G::design, "m3", S::frac_list},
      {"proppant_mass", G::design, "t", S::frac_list},
      {"breaker_amount", G::design, "kg", S::frac_list},
      {"fracture_length", G::design, "m", S::frac_list},
      {"pad_share", G::design, "", S::frac_list},
      {"avg_pressure", G::design, "MPa", S::frac_list},
      {"pump_rate", G::design, "m3/min", S::frac_list},
      {"proppant_concentration", G::design, "kg/m3", S::frac_list},
      {"polymer_concentration", G::design, "kg/m3", S::frac_list},
      {"isip", G::design, "MPa", S::frac_list},
      {"n_stages", G::design, "", S::frac_list},
  };
  c.insert(c.end(), rest.begin(), rest.end());
  for (const auto& name : production_columns()) {
    std::string unit;
    if (name.starts_with("cum_oil") || name.starts_with("cum_fluid")) unit = "t";
    else if (name.starts_with("cum_gas")) unit = "m3";
    else if (name.starts_with("hours")) unit = "h";
    else if (name == "prefrac_oil_rate") unit = "t/month";
    c.push_back({name, G::production, unit, S::monthly_production});
  }
  return c;
}

}  // namespace

const std::vector<CatalogEntry>& feature_catalog() {
  static const std::vector<CatalogEntry> catalog = build_catalog();
  return catalog;
}

const CatalogEntry* find_catalog_entry(std::string_view name) {
  const auto& c = feature_catalog();
  auto it = std::find_if(c.begin(), c.end(), [&](const CatalogEntry& e) { return e.name == name; });
  return it == c.end() ? nullptr : &*it;
}

bool is_summed_stage_field(std::string_view name) {
  return name == "fluid_volume" || name == "pad_volume" || name == "proppant_mass" || name.starts_with("breaker") ||
         name == "fracture_width" || name == "fracture_length" || name == "fracture_height";
}

bool is_categorical_source_field(std::string_view name) {
  return name.ends_with("_name") || name.ends_with("_type");
}

std::string proppant_column(std::size_t stage) { return "proppant_" + std::to_string(stage); }

bool is_proppant_column(std::string_view name) {
  constexpr std::string_view prefix = "proppant_";
  if (!name.starts_with(prefix) || name.size() == prefix.size()) return false;
  return std::all_of(name.begin() + prefix.size(), name.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
}

const std::vector<std::string>& production_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> out;
    for (const char* base : {"cum_oil", "cum_fluid", "cum_gas", "watercut", "hours"})
      for (int m : {3, 6, 12}) out.push_back(std::string(base) + "_" + std::to_string(m) + "m");
    out.push_back("prefrac_oil_rate");
    return out;
  }();
  return cols;
}

const std::vector<std::string>& well_log_feature_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> out;
    for (const char* scope : {"perf", "layer"}) {
      for (const char* prop : {"porosity", "permeability", "clay", "oil_saturation"})
        for (const char* stat : {"mean", "median"})
          out.push_back(std::string(prop) + "_" + stat + "_" + scope);
      out.push_back(std::string("kh_median_") + scope);
      out.push_back(std::string("ntg_") + scope);
      out.push_back(std::string("strat_factor_") + scope);
    }
    return out;
  }();
  return cols;
}

}  // namespace fracflow
