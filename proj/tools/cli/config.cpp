#include "config.hpp"

#include <filesystem>

#include "fracflow/table_io.hpp"

namespace fracflow::cli {

using nlohmann::json;

json default_config() {
  return json::parse(R"({
    "schema_version": 1,
    "seed": 7,
    "synth": {},
    "impute": {
      "method": "tsvd",
      "rank": null,
      "max_missing_frac": 0.65,
      "max_missing_cells": null,
      "max_iters": 500,
      "tol": 1e-6,
      "encoding": "reduced"
    },
    "cluster": {
      "eps": null,
      "min_pts": null,
      "eps_quantile": 0.95,
      "forest_trees": 100,
      "forest_subsample": 256,
      "tsne": {"enabled": true, "perplexity": 30, "learning_rate": 200, "iters": 1000, "max_rows": 1500}
    },
    "train": {
      "spec": {"kind": "gbdt", "gbdt": {"learning_rate": 0.2, "min_leaf": 5, "max_bins": 64}},
      "grid": {"depth": [2, 4, 6, 8], "l2_leaf": [0.0, 1.0, 2.0]},
      "folds": 5,
      "test_frac": 0.2,
      "log_target": false,
      "min_cluster_rows": 30
    },
    "analyze": {
      "test_frac": 0.2,
      "rfe": {"enabled": true, "step": 5, "tolerance": 0.005},
      "tornado": {"delta": 0.5, "groups": ["design"]},
      "bootstrap": {"enabled": true, "iters": 100, "frac": 0.75, "level": 0.95}
    },
    "report": {
      "models": ["gbdt", "random_forest", "extra_trees", "decision_tree", "knn"],
      "ensemble_size": 3,
      "histogram_bins": 20
    }
  })");
}

namespace {

bool free_form(const std::string& path) {
  return path == "synth" || path == "train.spec" || path == "train.grid";
}

bool compatible(const json& def, const json& val) {
  if (def.is_null()) return true;
  if (def.is_number()) return val.is_number();
  if (def.is_array()) return val.is_array();
  return def.type() == val.type();
}

void overlay(json& base, const json& user, const std::string& prefix) {
  if (!user.is_object()) throw UsageError("config" + (prefix.empty() ? "" : " '" + prefix + "'") + " must be an object");
  for (const auto& [key, val] : user.items()) {
    const auto path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) throw UsageError("unknown config key '" + path + "'");
    auto& slot = base[key];
    if (free_form(path)) {
      if (!val.is_object()) throw UsageError("config '" + path + "' must be an object");
      slot = val;
    } else if (slot.is_object()) {
      overlay(slot, val, path);
    } else if (val.is_null() || compatible(slot, val)) {
      slot = val;
    } else {
      throw UsageError("config '" + path + "' has the wrong type");
    }
  }
}

}  // namespace

json merge_config(const json& user) {
  auto cfg = default_config();
  overlay(cfg, user, "");
  if (cfg["schema_version"] != kSchemaVersion) throw UsageError("unsupported config schema_version");
  return cfg;
}

json load_config(const std::optional<std::string>& path) {
  if (!path) return default_config();
  if (!std::filesystem::is_regular_file(*path)) throw UsageError("config file not found: " + *path);
  json doc;
  try {
    doc = read_json(*path);
  } catch (const std::exception& e) {
    throw UsageError(std::string("cannot parse config: ") + e.what());
  }
  return merge_config(doc);
}

std::uint64_t root_seed(const json& config, std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  const auto& s = config.at("seed");
  if (!s.is_number_unsigned()) throw UsageError("config 'seed' must be a non-negative integer");
  return s.get<std::uint64_t>();
}

}  // namespace fracflow::cli
