#include "fracflow/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <utility>

#include <Eigen/SVD>

#include "fracflow/csv.hpp"
#include "fracflow/error.hpp"
#include "fracflow/rng.hpp"
#include "fracflow/table_io.hpp"

namespace fracflow::synth {

namespace {

using nlohmann::json;
using ingest::SourceDoc;

struct BaseDef {
  const char* name;
  double offset;
  double scale;
};

// Latent-linear quantities: value = offset + scale * latent.
constexpr BaseDef kBases[] = {
    {"stress_anisotropy", 0.5, 1.5},   {"poisson_ratio", 0.15, 0.03},   {"young_modulus", 10.0, 5.0},
    {"formation_pressure", 12.0, 4.0}, {"oil_viscosity", 0.5, 1.2},     {"oil_density", 780.0, 20.0},
    {"bubble_point_pressure", 4.0, 2.0}, {"oil_fvf", 1.0, 0.05},        {"layer_depth", 1800.0, 150.0},
    {"perf_interval", 0.0, 1.0},       {"extra_thickness", 0.0, 1.2},   {"inclination", 0.0, 4.0},
    {"tubing_diameter", 50.0, 5.0},    {"perf_density", 4.0, 2.0},      {"skin_factor", -3.0, 1.0},
    {"porosity", 0.05, 0.03},          {"permeability", 0.0, 8.0},      {"clay", 0.02, 0.03},
    {"oil_saturation", 0.3, 0.07},     {"ntg", 0.2, 0.11},              {"fluid_volume", 0.0, 60.0},
    {"pad_volume", 0.0, 15.0},         {"proppant_mass", 0.0, 12.0},    {"breaker_amount", 0.0, 8.0},
    {"fracture_length", 0.0, 25.0},    {"pad_share", 0.05, 0.07},       {"avg_pressure", 20.0, 5.0},
    {"pump_rate", 2.0, 0.5},           {"proppant_concentration", 200.0, 60.0},
    {"polymer_concentration", 2.0, 0.5}, {"isip", 15.0, 3.0}};

const std::vector<std::string> kGeomech = {"stress_anisotropy", "poisson_ratio", "young_modulus", "formation_pressure"};
const std::vector<std::string> kPvt = {"oil_viscosity", "oil_density", "bubble_point_pressure", "oil_fvf"};
const std::vector<std::string> kPractice = {"tubing_diameter", "perf_density", "skin_factor"};
const std::vector<std::string> kDesign = {"fluid_volume",  "pad_volume",   "proppant_mass",
                                          "breaker_amount", "fracture_length", "pad_share",
                                          "avg_pressure",  "pump_rate",    "proppant_concentration",
                                          "polymer_concentration", "isip"};

// Removal order when fewer than 50 numeric inputs are requested.
const std::vector<std::string> kDropOrder = {
    "isip",          "polymer_concentration", "pump_rate",         "avg_pressure",  "breaker_amount",
    "fracture_length", "pad_volume",          "perf_density",      "tubing_diameter", "skin_factor",
    "inclination",   "perf_depth_tvd",        "young_modulus",     "poisson_ratio", "stress_anisotropy",
    "oil_fvf",       "bubble_point_pressure", "oil_density"};

constexpr int kFullNumeric = 50;

const std::vector<std::string> kManufacturers = {"carbo", "borovichi", "fores", "santrol", "hexion"};
const std::vector<std::string> kMeshes = {"12/18", "16/20", "20/40"};
const std::vector<std::string> kFluids = {"crosslinked gel", "linear gel", "slickwater"};
const std::vector<std::string> kPolymers = {"guar", "carboxymethyl guar", "hydroxypropyl guar"};
const std::vector<std::string> kNoiseTokens = {"n/a", "-", "?"};

std::string fmt(double v) { return csv::format_double(v); }

std::size_t pick(Rng& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return weights.size() - 1;
}

std::string typo(const std::string& token, Rng& rng) {
  for (;;) {
    std::string t = token;
    const std::size_t edits = 1 + rng.index(2);
    for (std::size_t e = 0; e < edits; ++e) {
      std::vector<std::size_t> letters;
      for (std::size_t p = 0; p < t.size(); ++p)
        if (std::isalpha(static_cast<unsigned char>(t[p]))) letters.push_back(p);
      if (letters.empty()) break;
      const std::size_t p = letters[rng.index(letters.size())];
      const char c = static_cast<char>('a' + rng.index(26));
      switch (rng.index(3)) {
        case 0: t[p] = c; break;
        case 1: t.erase(p, 1); break;
        default: t.insert(t.begin() + static_cast<std::ptrdiff_t>(p + rng.index(2)), c); break;
      }
    }
    if (t != token && !t.empty()) return t;
  }
}

double population_std(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size()));
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void check_rate(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw Error(std::string(name) + " must lie in [0, 1]");
}

// Clean and corrupted renderings of one source, filled in lockstep.
struct DocPair {
  SourceDoc clean;
  SourceDoc dirty;

  DocPair(SourceKind kind, std::vector<std::string> columns)
      : clean{kind, columns, {}}, dirty{kind, std::move(columns), {}} {}

  void add(std::vector<std::string> c, std::vector<std::string> d) {
    clean.rows.push_back(std::move(c));
    dirty.rows.push_back(std::move(d));
  }
};

struct MissingUnit {
  std::string name;
  std::size_t cells;
};

const std::vector<std::string> kLogProps = {"porosity", "permeability", "clay", "oil_saturation"};

}  // namespace

// ---------------------------------------------------------------- config

json TargetStats::to_json() const {
  return {{"mean", mean}, {"std", std}, {"pad_share_median", pad_share_median}, {"target_std", target_std}};
}

TargetStats TargetStats::from_json(const json& doc) {
  TargetStats s;
  s.mean = doc.at("mean").get<std::vector<double>>();
  s.std = doc.at("std").get<std::vector<double>>();
  s.pad_share_median = doc.at("pad_share_median").get<double>();
  s.target_std = doc.at("target_std").get<double>();
  if (s.mean.size() != 8 || s.std.size() != 8) throw Error("target_stats needs 8 means and stds");
  return s;
}

void SynthConfig::validate() const {
  if (n_wells < 1) throw Error("n_wells must be positive");
  if (n_fields < 1) throw Error("n_fields must be positive");
  if (n_fields > n_wells) throw Error("n_fields must not exceed n_wells");
  if (n_numeric < kFullNumeric - static_cast<int>(kDropOrder.size()))
    throw Error("n_numeric must be at least " + std::to_string(kFullNumeric - kDropOrder.size()));
  if (latent_rank < 1 || latent_rank > n_numeric) throw Error("latent_rank must lie in [1, n_numeric]");
  if (n_clusters < 1 || n_clusters > n_fields) throw Error("n_clusters must lie in [1, n_fields]");
  check_rate(missing_frac, "missing_frac");
  check_rate(typo_rate, "typo_rate");
  check_rate(outlier_rate, "outlier_rate");
  check_rate(feature_noise, "feature_noise");
  check_rate(duplicate_rate, "duplicate_rate");
  check_rate(orphan_rate, "orphan_rate");
  check_rate(range_rate, "range_rate");
  check_rate(noise_token_rate, "noise_token_rate");
  check_rate(prefrac_frac, "prefrac_frac");
  if (!(noise_frac >= 0.0) || !std::isfinite(noise_frac)) throw Error("noise_frac must be non-negative");
}

json SynthConfig::to_json() const {
  json doc = {{"n_wells", n_wells},
              {"n_fields", n_fields},
              {"n_numeric", n_numeric},
              {"latent_rank", latent_rank},
              {"n_clusters", n_clusters},
              {"missing_frac", missing_frac},
              {"typo_rate", typo_rate},
              {"outlier_rate", outlier_rate},
              {"noise_frac", noise_frac},
              {"feature_noise", feature_noise},
              {"duplicate_rate", duplicate_rate},
              {"orphan_rate", orphan_rate},
              {"range_rate", range_rate},
              {"noise_token_rate", noise_token_rate},
              {"prefrac_frac", prefrac_frac},
              {"seed", seed}};
  if (row_seed) doc["row_seed"] = *row_seed;
  if (target_stats) doc["target_stats"] = target_stats->to_json();
  return doc;
}

SynthConfig SynthConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw Error("synth config must be a JSON object");
  SynthConfig c;
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "n_wells") c.n_wells = value.get<int>();
      else if (key == "n_fields") c.n_fields = value.get<int>();
      else if (key == "n_numeric") c.n_numeric = value.get<int>();
      else if (key == "latent_rank") c.latent_rank = value.get<int>();
      else if (key == "n_clusters") c.n_clusters = value.get<int>();
      else if (key == "missing_frac") c.missing_frac = value.get<double>();
      else if (key == "typo_rate") c.typo_rate = value.get<double>();
      else if (key == "outlier_rate") c.outlier_rate = value.get<double>();
      else if (key == "noise_frac") c.noise_frac = value.get<double>();
      else if (key == "feature_noise") c.feature_noise = value.get<double>();
      else if (key == "duplicate_rate") c.duplicate_rate = value.get<double>();
      else if (key == "orphan_rate") c.orphan_rate = value.get<double>();
      else if (key == "range_rate") c.range_rate = value.get<double>();
      else if (key == "noise_token_rate") c.noise_token_rate = value.get<double>();
      else if (key == "prefrac_frac") c.prefrac_frac = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "row_seed") c.row_seed = value.get<std::uint64_t>();
      else if (key == "target_stats") c.target_stats = TargetStats::from_json(value);
      else throw Error("unknown synth config key '" + key + "'");
    } catch (const json::exception&) {
      throw Error("synth config key '" + key + "' has the wrong type");
    }
  }
  c.validate();
  return c;
}

SynthConfig SynthConfig::noiseless(SynthConfig base) {
  base.missing_frac = 0.0;
  base.typo_rate = 0.0;
  base.outlier_rate = 0.0;
  base.noise_frac = 0.0;
  base.feature_noise = 0.0;
  base.duplicate_rate = 0.0;
  base.orphan_rate = 0.0;
  base.range_rate = 0.0;
  base.noise_token_rate = 0.0;
  return base;
}

std::string_view to_string(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::missing: return "missing";
    case CorruptionKind::typo: return "typo";
    case CorruptionKind::outlier: return "outlier";
  }
  return "?";
}

// ---------------------------------------------------------------- target

const std::vector<std::string>& relevant_features() {
  static const std::vector<std::string> names = {
      "proppant_mass",      "fluid_volume", "oil_viscosity", "perf_interval", "permeability_mean_perf",
      "ntg_perf", "porosity_mean_perf", "formation_pressure", "n_stages",     "pad_share"};
  return names;
}

double planted_target(const TargetStats& s, std::span<const double> v) {
  if (v.size() != 10) throw Error("planted target takes 10 feature values");
  double z[8];
  for (int j = 0; j < 8; ++j) z[j] = s.std[j] > 0.0 ? (v[j] - s.mean[j]) / s.std[j] : 0.0;
  return 3000.0 + 350.0 * z[0] + 200.0 * z[1] - 150.0 * z[2] + 120.0 * z[3] + 180.0 * z[4] * z[5] +
         120.0 * z[6] * z[7] + 400.0 * (1.0 - std::exp(-v[8] / 2.0)) - (v[9] > s.pad_share_median ? 250.0 : 0.0);
}

Vector planted_target(const TargetStats& s, const Matrix& x) {
  if (x.cols() != 10) throw Error("planted target takes 10 feature columns");
  Vector out(x.rows());
  double v[10];
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < 10; ++j) v[j] = x(i, j);
    out(i) = planted_target(s, v);
  }
  return out;
}

namespace {

Matrix relevant_matrix(const FieldTable& t) {
  const auto& names = relevant_features();
  Matrix x(static_cast<Eigen::Index>(t.rows()), 10);
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto c = t.numeric_index(names[j]);
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const auto v = t.value(i, c);
      if (!v) throw Error("planted feature '" + names[j] + "' missing in clean table");
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *v;
    }
  }
  return x;
}

TargetStats fit_target_stats(const Matrix& x) {
  TargetStats s;
  for (int j = 0; j < 8; ++j) {
    std::vector<double> col(x.col(j).data(), x.col(j).data() + x.rows());
    const double m = x.col(j).mean();
    s.mean.push_back(m);
    s.std.push_back(population_std(col, m));
  }
  s.pad_share_median = median_of(std::vector<double>(x.col(9).data(), x.col(9).data() + x.rows()));
  const Vector f = planted_target(s, x);
  std::vector<double> fv(f.data(), f.data() + f.size());
  s.target_std = population_std(fv, f.mean());
  return s;
}

}  // namespace

// ---------------------------------------------------------------- generation

SynthDb generate_synth_db(SynthConfig config, std::uint64_t seed) {
  config.seed = seed;
  return generate_synth_db(config);
}

SynthDb generate_synth_db(const SynthConfig& cfg) {
  cfg.validate();
  Rng srng(derive_seed(cfg.seed, "structure"));
  Rng rrng(derive_seed(cfg.row_seed.value_or(cfg.seed), "rows"));
  const auto N = static_cast<std::size_t>(cfg.n_wells);
  const auto K = static_cast<std::size_t>(cfg.n_clusters);
  const auto R = static_cast<std::size_t>(cfg.latent_rank);
  const double fn = cfg.feature_noise;
  const double jitter = 2.0 * fn;

  // Emitted columns.
  std::set<std::string> dropped;
  const int extra = std::max(0, cfg.n_numeric - kFullNumeric);
  for (int k = 0; k < kFullNumeric - cfg.n_numeric; ++k) dropped.insert(kDropOrder[static_cast<std::size_t>(k)]);
  auto emitted = [&](const std::string& n) { return !dropped.contains(n); };

  std::vector<BaseDef> bases(std::begin(kBases), std::end(kBases));
  std::vector<std::string> aux_names;
  for (int k = 1; k <= extra; ++k) aux_names.push_back("aux_" + std::to_string(k));
  for (const auto& n : aux_names) bases.push_back({n.c_str(), 0.0, 1.0});
  const std::size_t B = bases.size();
  std::map<std::string, std::size_t> base_index;
  for (std::size_t b = 0; b < B; ++b) base_index[bases[b].name] = b;

  // Planted structure.
  GroundTruth truth;
  truth.config = cfg;
  for (const auto& b : bases) truth.base_columns.emplace_back(b.name);
  truth.loadings.resize(static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(B));
  for (Eigen::Index k = 0; k < truth.loadings.rows(); ++k)
    for (Eigen::Index b = 0; b < truth.loadings.cols(); ++b) truth.loadings(k, b) = srng.uniform();
  truth.offsets.resize(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(B));
  for (Eigen::Index c = 0; c < truth.offsets.rows(); ++c)
    for (Eigen::Index b = 0; b < truth.offsets.cols(); ++b) truth.offsets(c, b) = 2.5 * srng.uniform();
  auto cluster_weights = [&](std::size_t n) {
    std::vector<std::vector<double>> w(K, std::vector<double>(n));
    for (auto& row : w)
      for (auto& x : row) x = 0.2 + srng.uniform();
    return w;
  };
  const auto manufacturer_w = cluster_weights(kManufacturers.size());
  const auto fluid_w = cluster_weights(kFluids.size());
  const auto polymer_w = cluster_weights(kPolymers.size());

  // Missing-capable units and their rates.
  std::vector<MissingUnit> units;
  for (const auto* group : {&kGeomech, &std::as_const(aux_names), &kPvt})
    for (const auto& n : *group)
      if (emitted(n)) units.push_back({n, 1});
  for (const char* n : {"perf_depth_tvd", "inclination"})
    if (emitted(n)) units.push_back({n, 1});
  for (const auto& n : kPractice)
    if (emitted(n)) units.push_back({n, 1});
  for (const auto& n : kDesign)
    if (emitted(n)) units.push_back({n, 1});
  for (const auto& p : kLogProps) units.push_back({"log:" + p, p == "permeability" ? 6u : 4u});
  std::vector<double> raw_rate;
  for (std::size_t u = 0; u < units.size(); ++u) raw_rate.push_back(srng.beta(0.7, 2.0));
  const double target_cells = cfg.missing_frac * cfg.n_numeric;
  constexpr double kMaxRate = 0.95;
  auto expected = [&](double scale) {
    double s = 0.0;
    for (std::size_t u = 0; u < units.size(); ++u) s += std::min(scale * raw_rate[u], kMaxRate) * units[u].cells;
    return s;
  };
  double capacity = 0.0;
  for (const auto& u : units) capacity += kMaxRate * u.cells;
  if (target_cells > capacity) throw Error("missing_frac exceeds what the missing-capable columns allow");
  double lo = 0.0, hi = 1.0;
  while (expected(hi) < target_cells && hi < 1e12) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (expected(mid) < target_cells ? lo : hi) = mid;
  }
  std::vector<double> unit_rate(units.size());
  for (std::size_t u = 0; u < units.size(); ++u) unit_rate[u] = cfg.missing_frac > 0.0 ? std::min(hi * raw_rate[u], kMaxRate) : 0.0;

  // Keys, sorted, then cluster membership by field.
  const int field_width = std::max<int>(2, static_cast<int>(std::to_string(cfg.n_fields).size()));
  const int well_width = std::max<int>(5, static_cast<int>(std::to_string(cfg.n_wells).size()));
  auto padded = [](char prefix, std::size_t v, int width) {
    std::string s = std::to_string(v);
    return std::string(1, prefix) + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
  };
  struct KeyDraw {
    RowKey key;
    std::size_t field;
  };
  std::vector<KeyDraw> draws(N);
  const std::int64_t first_day = days_from_civil(2012, 1, 1);
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t f = i < static_cast<std::size_t>(cfg.n_fields) ? i : rrng.index(static_cast<std::size_t>(cfg.n_fields));
    draws[i].field = f;
    draws[i].key = {padded('F', f + 1, field_width), padded('W', i + 1, well_width), "L" + std::to_string(1 + rrng.index(3)),
                    first_day + static_cast<std::int64_t>(rrng.index(2922))};
  }
  std::sort(draws.begin(), draws.end(), [](const KeyDraw& a, const KeyDraw& b) { return a.key < b.key; });
  truth.cluster.resize(N);
  for (std::size_t i = 0; i < N; ++i) truth.cluster[i] = static_cast<int>(draws[i].field % K);

  // Latent values.
  truth.latent.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(R));
  for (Eigen::Index i = 0; i < truth.latent.rows(); ++i)
    for (Eigen::Index k = 0; k < truth.latent.cols(); ++k) truth.latent(i, k) = rrng.uniform();
  Matrix value(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(B));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t b = 0; b < B; ++b) {
      const auto ii = static_cast<Eigen::Index>(i), bb = static_cast<Eigen::Index>(b);
      double lat = truth.latent.row(ii).dot(truth.loadings.col(bb)) + truth.offsets(truth.cluster[i], bb) + 0.5;
      if (fn > 0.0) lat += fn * rrng.normal();
      value(ii, bb) = bases[b].offset + bases[b].scale * lat;
    }
  auto val = [&](std::size_t i, const std::string& name) -> double& {
    return value(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(base_index.at(name)));
  };
  for (std::size_t i = 0; i < N; ++i) {
    val(i, "perf_interval") = std::max(val(i, "perf_interval"), 0.5);
    val(i, "extra_thickness") = std::max(val(i, "extra_thickness"), 0.5);
    val(i, "inclination") = std::clamp(val(i, "inclination"), 0.0, 80.0);
    val(i, "porosity") = std::clamp(val(i, "porosity"), 0.01, 0.4);
    val(i, "permeability") = std::max(val(i, "permeability"), 0.01);
    val(i, "clay") = std::clamp(val(i, "clay"), 0.0, 0.6);
    val(i, "oil_saturation") = std::clamp(val(i, "oil_saturation"), 0.05, 0.95);
    val(i, "ntg") = std::clamp(val(i, "ntg"), 0.05, 0.95);
    val(i, "pad_share") = std::clamp(val(i, "pad_share"), 0.01, 0.9);
  }
  std::vector<double> base_sd(B);
  for (std::size_t b = 0; b < B; ++b) {
    const auto col = value.col(static_cast<Eigen::Index>(b));
    std::vector<double> v(col.data(), col.data() + col.size());
    base_sd[b] = population_std(v, col.mean());
  }

  // Per-row corruption plan.
  std::map<std::string, std::vector<char>> missing;
  for (std::size_t u = 0; u < units.size(); ++u) {
    auto& m = missing[units[u].name];
    m.assign(N, 0);
    const auto k = static_cast<std::size_t>(std::llround(unit_rate[u] * static_cast<double>(N)));
    for (auto r : rrng.sample_without_replacement(N, std::min(k, N))) m[r] = 1;
  }
  auto is_missing = [&](const std::string& unit, std::size_t i) {
    auto it = missing.find(unit);
    return it != missing.end() && it->second[i];
  };
  auto blank = [&]() -> std::string {
    if (cfg.noise_token_rate > 0.0 && rrng.uniform() < cfg.noise_token_rate) return kNoiseTokens[rrng.index(kNoiseTokens.size())];
    return "";
  };
  std::vector<std::string> outlier_pool;
  for (const auto* group : {&kGeomech, &std::as_const(aux_names), &kPvt, &kPractice})
    for (const auto& n : *group)
      if (emitted(n)) outlier_pool.push_back(n);
  if (emitted("inclination")) outlier_pool.push_back("inclination");
  std::vector<std::string> outlier_col(N);
  if (cfg.outlier_rate > 0.0)
    for (std::size_t i = 0; i < N; ++i)
      if (rrng.uniform() < cfg.outlier_rate) outlier_col[i] = outlier_pool[rrng.index(outlier_pool.size())];

  // Renders an auxiliary numeric cell: clean text, corrupted text.
  auto aux_cell = [&](std::size_t i, const std::string& name, double v) {
    std::string clean = fmt(v);
    if (cfg.range_rate > 0.0 && v > 0.0 && rrng.uniform() < cfg.range_rate) clean = fmt(0.9 * v) + "-" + fmt(1.1 * v);
    std::string dirty = clean;
    if (outlier_col[i] == name) {
      const auto cv = ingest::parse_cell(clean);
      dirty = fmt(cv.value_or(v) + 10.0 * base_sd[base_index.at(name)]);
    }
    if (is_missing(name, i)) dirty = blank();
    return std::pair{clean, dirty};
  };

  auto key3 = [&](std::size_t i) {
    const auto& k = draws[i].key;
    return std::vector<std::string>{k.field_id, k.well_id, k.layer_id};
  };

  // Formation and well sources.
  std::vector<std::string> geo_cols = {"field_id", "well_id", "layer_id"};
  for (const auto* group : {&kGeomech, &std::as_const(aux_names)})
    for (const auto& n : *group)
      if (emitted(n)) geo_cols.push_back(n);
  std::vector<std::string> pvt_cols = {"field_id", "well_id", "layer_id"};
  for (const auto& n : kPvt)
    if (emitted(n)) pvt_cols.push_back(n);
  std::vector<std::string> layer_cols = {"field_id", "well_id", "layer_id", "layer_top", "layer_bottom", "perf_top", "perf_bottom"};
  for (const char* n : {"perf_depth_tvd", "inclination"})
    if (emitted(n)) layer_cols.emplace_back(n);
  std::vector<std::string> practice_cols = {"field_id", "well_id", "op_date"};
  for (const auto& n : kPractice)
    if (emitted(n)) practice_cols.push_back(n);

  DocPair geo(SourceKind::geomechanics, geo_cols), pvt(SourceKind::pvt, pvt_cols),
      layer(SourceKind::layer_intersection, layer_cols), practice(SourceKind::operating_practice, practice_cols),
      logs(SourceKind::well_log, {"field_id", "well_id", "layer_id", "top", "bottom", "porosity", "permeability", "clay",
                                  "oil_saturation", "pay"});
  std::vector<std::string> frac_cols = {"field_id", "well_id", "layer_id", "op_date", "stage", "proppant_name", "fluid_type",
                                        "polymer_type"};
  std::vector<std::string> design_cols;
  for (const auto& n : kDesign)
    if (emitted(n)) design_cols.push_back(n);
  frac_cols.insert(frac_cols.end(), design_cols.begin(), design_cols.end());
  DocPair frac(SourceKind::frac_list, frac_cols);

  auto simple_doc = [&](DocPair& doc, std::size_t i, std::vector<std::string> key, const std::vector<std::string>& cols,
                        std::size_t first) {
    auto c = key, d = key;
    for (std::size_t j = first; j < cols.size(); ++j) {
      auto [ct, dt] = aux_cell(i, cols[j], val(i, cols[j]));
      c.push_back(ct);
      d.push_back(dt);
    }
    doc.add(std::move(c), std::move(d));
  };

  for (std::size_t i = 0; i < N; ++i) {
    const auto& key = draws[i].key;
    simple_doc(geo, i, key3(i), geo_cols, 3);
    simple_doc(pvt, i, key3(i), pvt_cols, 3);
    simple_doc(practice, i, {key.field_id, key.well_id, ingest::format_date(key.op_date)}, practice_cols, 3);

    // Layer geometry: the perforation window sits mid-layer.
    const double depth = val(i, "layer_depth"), p = val(i, "perf_interval"), e = val(i, "extra_thickness");
    const double layer_top = depth, layer_bottom = depth + p + e, perf_top = depth + 0.5 * e, perf_bottom = perf_top + p;
    {
      auto c = key3(i);
      for (double v : {layer_top, layer_bottom, perf_top, perf_bottom}) c.push_back(fmt(v));
      auto d = c;
      if (emitted("perf_depth_tvd")) {
        const double tvd = perf_top * std::cos(val(i, "inclination") * std::numbers::pi / 180.0);
        c.push_back(fmt(tvd));
        d.push_back(is_missing("perf_depth_tvd", i) ? blank() : fmt(tvd));
      }
      if (emitted("inclination")) {
        auto [ct, dt] = aux_cell(i, "inclination", val(i, "inclination"));
        c.push_back(ct);
        d.push_back(dt);
      }
      layer.add(std::move(c), std::move(d));
    }

    // Well-log intervals over the layer, pay spread evenly at the NTG rate.
    const double h = layer_bottom - layer_top;
    const auto n_int = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(h / 0.8)));
    const double len = h / static_cast<double>(n_int);
    const double t = val(i, "ntg");
    const double phase = fn > 0.0 ? rrng.uniform() : 0.0;
    for (std::size_t k = 0; k < n_int; ++k) {
      const bool pay = std::floor((k + 1) * t + phase) - std::floor(k * t + phase) >= 1.0;
      auto jit = [&] { return jitter > 0.0 ? jitter * rrng.normal() : 0.0; };
      const double por = std::max(0.005, val(i, "porosity") * (1.0 + jit()) * (pay ? 1.0 : 0.6));
      const double perm = val(i, "permeability") * std::exp(jit()) * (pay ? 1.0 : 0.2);
      const double clay = std::clamp(val(i, "clay") * (1.0 + jit()) * (pay ? 1.0 : 1.8), 0.0, 0.9);
      const double so = std::clamp(val(i, "oil_saturation") * (1.0 + jit()) * (pay ? 1.0 : 0.5), 0.0, 1.0);
      auto c = key3(i);
      c.push_back(fmt(layer_top + static_cast<double>(k) * len));
      c.push_back(fmt(k + 1 == n_int ? layer_bottom : layer_top + static_cast<double>(k + 1) * len));
      auto d = c;
      const double props[] = {por, perm, clay, so};
      for (std::size_t q = 0; q < kLogProps.size(); ++q) {
        c.push_back(fmt(props[q]));
        d.push_back(is_missing("log:" + kLogProps[q], i) ? blank() : fmt(props[q]));
      }
      c.push_back(pay ? "1" : "0");
      d.push_back(pay ? "1" : "0");
      logs.add(std::move(c), std::move(d));
    }

    // Frac stages.
    const int c_idx = truth.cluster[i];
    const std::size_t n_stages = 1 + rrng.index(4);
    const auto& manufacturer = kManufacturers[pick(rrng, manufacturer_w[static_cast<std::size_t>(c_idx)])];
    const auto& fluid = kFluids[pick(rrng, fluid_w[static_cast<std::size_t>(c_idx)])];
    const auto& polymer = kPolymers[pick(rrng, polymer_w[static_cast<std::size_t>(c_idx)])];
    std::vector<double> weights(n_stages);
    double wsum = 0.0;
    for (auto& w : weights) {
      w = 1.0 + (jitter > 0.0 ? std::min(jitter, 0.5) * rrng.uniform(-1.0, 1.0) : 0.0);
      wsum += w;
    }
    std::vector<std::vector<std::string>> stage_clean(n_stages), stage_dirty(n_stages);
    for (std::size_t s = 0; s < n_stages; ++s) {
      const std::string proppant = manufacturer + " " + kMeshes[rrng.index(kMeshes.size())];
      auto c = std::vector<std::string>{key.field_id, key.well_id, key.layer_id, ingest::format_date(key.op_date),
                                        std::to_string(s + 1), proppant, fluid, polymer};
      auto d = c;
      auto maybe_typo = [&](std::size_t col) {
        if (cfg.typo_rate > 0.0 && rrng.uniform() < cfg.typo_rate) d[col] = typo(c[col], rrng);
      };
      maybe_typo(5);
      if (s == 0) {
        maybe_typo(6);
        maybe_typo(7);
      }
      for (const auto& name : design_cols) {
        const double base = val(i, name);
        const double v = is_summed_stage_field(name) ? base * weights[s] / wsum
                                                     : base * (1.0 + (jitter > 0.0 ? 0.5 * jitter * rrng.normal() : 0.0));
        c.push_back(fmt(v));
        d.push_back(is_missing(name, i) ? blank() : fmt(v));
      }
      stage_clean[s] = std::move(c);
      stage_dirty[s] = std::move(d);
    }
    for (std::size_t s = 0; s < n_stages; ++s) frac.add(std::move(stage_clean[s]), std::move(stage_dirty[s]));
  }

  // Target from the clean features.
  std::vector<SourceDoc> clean_docs = {frac.clean, geo.clean, pvt.clean, layer.clean, practice.clean, logs.clean};
  const auto clean0 = ingest::merge_sources(clean_docs, {}).table;
  if (clean0.rows() != N) throw Error("synthetic keys collided");
  const Matrix rel = relevant_matrix(clean0);
  truth.stats = cfg.target_stats ? *cfg.target_stats : fit_target_stats(rel);
  truth.noise_std = cfg.noise_frac * truth.stats.target_std;
  const Vector f = planted_target(truth.stats, rel);
  truth.true_target.assign(f.data(), f.data() + f.size());
  std::vector<double> y(N);
  for (std::size_t i = 0; i < N; ++i) y[i] = f(static_cast<Eigen::Index>(i)) + (truth.noise_std > 0.0 ? truth.noise_std * rrng.normal() : 0.0);

  // Monthly production: months 1-3 after the job sum to the target.
  DocPair prod(SourceKind::monthly_production, {"field_id", "well_id", "layer_id", "month", "oil", "fluid", "gas", "watercut", "hours"});
  for (std::size_t i = 0; i < N; ++i) {
    const auto m0 = month_index(draws[i].key.op_date);
    const double wc0 = rrng.uniform(0.15, 0.45), gor = rrng.uniform(80.0, 120.0);
    auto emit = [&](std::int64_t m, double oil, double wc) {
      auto c = key3(i);
      c.push_back(ingest::format_date(month_start(m)));
      for (double v : {oil, oil / (1.0 - wc), oil * gor, wc, rrng.uniform(600.0, 720.0)}) c.push_back(fmt(v));
      prod.add(c, c);
    };
    const double scale = std::abs(y[i]) / 3.0;
    if (rrng.uniform() < cfg.prefrac_frac) {
      const auto hist = static_cast<std::int64_t>(1 + rrng.index(12));
      for (std::int64_t m = m0 - hist; m < m0; ++m) emit(m, 0.3 * scale * rrng.uniform(0.8, 1.2), wc0);
    }
    emit(m0, 0.1 * scale, wc0);
    const auto post = static_cast<std::int64_t>(3 + rrng.index(10));
    const double m1 = 0.38 * y[i], m2 = 0.33 * y[i], m3 = y[i] - m1 - m2;
    for (std::int64_t k = 1; k <= post; ++k) {
      const double oil = k == 1 ? m1 : k == 2 ? m2 : m3 * std::pow(0.93, static_cast<double>(k - 3));
      emit(m0 + k, oil, std::min(0.95, wc0 + 0.01 * static_cast<double>(k)));
    }
  }

  // Duplicates with extra blanks, and orphans, in the corrupted copies.
  auto add_duplicates = [&](SourceDoc& doc, std::size_t key_cols) {
    if (cfg.duplicate_rate <= 0.0 && cfg.orphan_rate <= 0.0) return;
    std::vector<std::vector<std::string>> out;
    for (const auto& row : doc.rows) {
      bool before = false;
      std::optional<std::vector<std::string>> dup;
      if (cfg.duplicate_rate > 0.0 && rrng.uniform() < cfg.duplicate_rate) {
        std::vector<std::size_t> observed;
        for (std::size_t c = key_cols; c < row.size(); ++c)
          if (ingest::parse_cell(row[c])) observed.push_back(c);
        if (!observed.empty()) {
          dup = row;
          (*dup)[observed[rrng.index(observed.size())]] = "";
          before = rrng.uniform() < 0.5;
        }
      }
      if (dup && before) out.push_back(*dup);
      out.push_back(row);
      if (dup && !before) out.push_back(*dup);
      if (cfg.orphan_rate > 0.0 && rrng.uniform() < cfg.orphan_rate) {
        auto orphan = row;
        orphan[1] = "X" + orphan[1];
        out.push_back(std::move(orphan));
      }
    }
    doc.rows = std::move(out);
  };
  add_duplicates(geo.dirty, 3);
  add_duplicates(pvt.dirty, 3);
  add_duplicates(layer.dirty, 7);
  add_duplicates(practice.dirty, 3);
  if (cfg.orphan_rate > 0.0) {
    std::vector<std::vector<std::string>> extra_rows;
    for (const auto& row : prod.dirty.rows)
      if (rrng.uniform() < cfg.orphan_rate) {
        auto orphan = row;
        orphan[1] = "X" + orphan[1];
        extra_rows.push_back(std::move(orphan));
      }
    prod.dirty.rows.insert(prod.dirty.rows.end(), extra_rows.begin(), extra_rows.end());
  }

  clean_docs.push_back(prod.clean);
  truth.clean = ingest::merge_sources(clean_docs, {}).table;

  SynthDb db;
  db.sources = {frac.dirty, prod.dirty, practice.dirty, geo.dirty, pvt.dirty, layer.dirty, logs.dirty};
  db.table = ingest::merge_sources(db.sources, {}).table;
  if (db.table.schema() != truth.clean.schema() || db.table.keys() != truth.clean.keys())
    throw Error("synthetic corruption changed the table layout");

  // Ledger by cell comparison.
  const auto& table = db.table;
  const auto& clean = truth.clean;
  for (std::size_t j = 0; j < table.numeric_count(); ++j) {
    const auto& meta = table.numeric_meta(j);
    if (meta.group == ColumnGroup::production) continue;
    for (std::size_t i = 0; i < N; ++i) {
      const auto cv = clean.value(i, j), tv = table.value(i, j);
      if (cv == tv || !cv) continue;
      truth.ledger.push_back({i, meta.name, tv ? CorruptionKind::outlier : CorruptionKind::missing, cv, std::nullopt});
    }
  }
  for (std::size_t j = 0; j < table.categorical_count(); ++j) {
    const auto& meta = table.categorical_meta(j);
    const auto jj = static_cast<Eigen::Index>(j);
    for (std::size_t i = 0; i < N; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      if (clean.categorical_missing()(ii, jj)) continue;
      const auto& ct = clean.categorical()[j][i];
      if (table.categorical_missing()(ii, jj))
        truth.ledger.push_back({i, meta.name, CorruptionKind::missing, std::nullopt, ct});
      else if (table.categorical()[j][i] != ct)
        truth.ledger.push_back({i, meta.name, CorruptionKind::typo, std::nullopt, ct});
    }
  }
  const auto target_col = table.require_target();
  for (std::size_t i = 0; i < N; ++i) truth.noisy_target.push_back(*table.value(i, target_col));

  std::vector<std::string> proppants;
  for (const auto& m : kManufacturers)
    for (const auto& mesh : kMeshes) proppants.push_back(m + " " + mesh);
  db.dictionaries["proppant_name"] = ingest::CategoryDictionary(proppants, 2);
  db.dictionaries["fluid_type"] = ingest::CategoryDictionary(kFluids, 2);
  db.dictionaries["polymer_type"] = ingest::CategoryDictionary(kPolymers, 2);
  db.truth = std::move(truth);
  return db;
}

// ---------------------------------------------------------------- oracles

double true_target(const GroundTruth& truth, std::size_t row) {
  if (row >= truth.true_target.size()) throw Error("row out of range");
  return truth.true_target[row];
}

std::vector<std::string> input_columns(const FieldTable& table) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < table.numeric_count(); ++j)
    if (table.numeric_meta(j).group != ColumnGroup::production) out.push_back(table.numeric_meta(j).name);
  return out;
}

double realized_missing_fraction(const GroundTruth& truth) {
  const auto inputs = input_columns(truth.clean);
  const std::set<std::string> names(inputs.begin(), inputs.end());
  std::size_t miss = 0;
  for (const auto& e : truth.ledger)
    if (e.kind == CorruptionKind::missing && names.contains(e.column)) ++miss;
  return static_cast<double>(miss) / static_cast<double>(truth.clean.rows() * inputs.size());
}

FieldTable replay_ledger(const FieldTable& table, const std::vector<LedgerEntry>& ledger) {
  Matrix num = table.numeric();
  Mask num_missing = table.numeric_missing();
  auto cat = table.categorical();
  Mask cat_missing = table.categorical_missing();
  for (auto it = ledger.rbegin(); it != ledger.rend(); ++it) {
    const auto i = static_cast<Eigen::Index>(it->row);
    const auto col = table.find_column(it->column);
    if (!col || it->row >= table.rows()) throw Error("ledger entry outside the table: " + it->column);
    if (table.schema()[*col].kind == ColumnKind::numeric) {
      if (!it->number) throw Error("numeric ledger entry without a value");
      const auto j = static_cast<Eigen::Index>(table.numeric_index(it->column));
      num(i, j) = *it->number;
      num_missing(i, j) = false;
    } else {
      if (!it->token) throw Error("categorical ledger entry without a token");
      const auto j = table.categorical_index(it->column);
      cat[j][it->row] = *it->token;
      cat_missing(i, static_cast<Eigen::Index>(j)) = false;
    }
  }
  return FieldTable(table.keys(), table.schema(), std::move(num), std::move(num_missing), std::move(cat), std::move(cat_missing));
}

double best_rank_k_error(const Matrix& x, std::size_t k) {
  Eigen::BDCSVD<Matrix> svd(x);
  const auto& s = svd.singularValues();
  double err = 0.0;
  for (Eigen::Index i = static_cast<Eigen::Index>(k); i < s.size(); ++i) err += s(i) * s(i);
  return std::sqrt(err);
}

structure::ClusterLabels brute_force_dbscan(const Matrix& x, double eps, std::size_t min_pts) {
  const auto n = static_cast<std::size_t>(x.rows());
  const double e2 = eps * eps;
  std::vector<std::vector<char>> near(n, std::vector<char>(n, 0));
  std::vector<char> core(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      near[i][j] = (x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(j))).squaredNorm() <= e2;
      count += near[i][j];
    }
    core[i] = count >= min_pts;
  }
  auto reach = near;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) reach[i][j] = core[i] && core[j] && near[i][j];
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = 1;
  structure::ClusterLabels out;
  out.labels.assign(n, -1);
  out.eps = eps;
  out.min_pts = min_pts;
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || out.labels[i] >= 0) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (j == i || reach[i][j]) out.labels[j] = next;
    ++next;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (core[j] && near[i][j]) {
        out.labels[i] = out.labels[j];
        break;
      }
  }
  return out;
}

// ---------------------------------------------------------------- output

json GroundTruth::to_json() const {
  auto matrix = [](const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json r = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
      rows.push_back(std::move(r));
    }
    return rows;
  };
  json entries = json::array();
  for (const auto& e : ledger) {
    json o = {{"row", e.row}, {"column", e.column}, {"kind", to_string(e.kind)}};
    if (e.number) o["original"] = *e.number;
    else o["original"] = *e.token;
    entries.push_back(std::move(o));
  }
  return {{"schema_version", 1},
          {"config", config.to_json()},
          {"relevant_features", relevant_features()},
          {"target_stats", stats.to_json()},
          {"noise_std", noise_std},
          {"base_columns", base_columns},
          {"latent", matrix(latent)},
          {"loadings", matrix(loadings)},
          {"offsets", matrix(offsets)},
          {"cluster", cluster},
          {"true_target", true_target},
          {"noisy_target", noisy_target},
          {"realized_missing_fraction", realized_missing_fraction(*this)},
          {"ledger", entries}};
}

void write_synth_db(const SynthDb& db, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "sources");
  fs::create_directories(fs::path(dir) / "dicts");
  write_table(db.table, (fs::path(dir) / "table.csv").string());
  {
    std::ofstream out(fs::path(dir) / "ground_truth.json");
    if (!out) throw Error("cannot write ground truth in " + dir);
    out << db.truth.to_json().dump() << '\n';
  }
  for (const auto& doc : db.sources)
    ingest::write_source(doc, (fs::path(dir) / "sources" / (std::string(to_string(doc.kind)) + ".csv")).string());
  for (const auto& [column, dict] : db.dictionaries) {
    std::ofstream out(fs::path(dir) / "dicts" / (column + ".json"));
    if (!out) throw Error("cannot write dictionary " + column);
    out << ingest::dictionaries_to_json({{column, dict}}).dump(2) << '\n';
  }
}

}  // namespace fracflow::synth
