#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include <spdlog/spdlog.h>

#include "config.hpp"
#include "fracflow/analysis.hpp"
#include "fracflow/csv.hpp"
#include "fracflow/impute.hpp"
#include "fracflow/ingest.hpp"
#include "fracflow/regress.hpp"
#include "fracflow/rng.hpp"
#include "fracflow/structure.hpp"
#include "fracflow/synthgen.hpp"
#include "fracflow/table_io.hpp"
#include "manifest.hpp"

namespace fracflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string out_dir(const Context& ctx) {
  if (ctx.out.empty()) throw UsageError("--out is required");
  fs::create_directories(ctx.out);
  return ctx.out;
}

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

/// Runs an input-loading step; any failure is the caller's to fix.
template <class Fn>
auto loading(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

void require_file(const std::string& path, const std::string& what) {
  if (!fs::is_regular_file(path)) throw UsageError(what + " not found: " + path);
}

void finish(RunManifest& manifest, const std::string& dir) {
  manifest.add_outputs(dir);
  manifest.write(dir);
  spdlog::info("wrote {}", dir);
}

std::map<RowKey, int> read_labels(const std::string& path) {
  require_file(path, "labels file");
  return loading([&] {
    const auto doc = csv::read_file(path);
    const auto cf = doc.require("field_id", path), cw = doc.require("well_id", path), cl = doc.require("layer_id", path),
               cd = doc.require("op_date", path), cc = doc.require("cluster", path);
    std::map<RowKey, int> out;
    for (const auto& row : doc.rows)
      out[RowKey{row.at(cf), row.at(cw), row.at(cl), std::stoll(row.at(cd))}] = std::stoi(row.at(cc));
    return out;
  });
}

std::string target_name(const FieldTable& table) {
  const auto t = table.target_index();
  if (!t) throw UsageError("target column absent");
  return table.numeric_meta(*t).name;
}

/// Numeric inputs: everything except the target and other production outputs.
std::vector<std::string> input_features(const FieldTable& table) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < table.numeric_count(); ++j) {
    const auto& m = table.numeric_meta(j);
    if (!m.is_target && m.group != ColumnGroup::production) out.push_back(m.name);
  }
  return out;
}

regress::Grid parse_grid(const json& doc) {
  if (doc.value("preset", std::string()) == "full") return regress::Grid::full_default();
  regress::Grid g;
  try {
    g.depth = doc.at("depth").get<std::vector<int>>();
    g.l2_leaf = doc.at("l2_leaf").get<std::vector<double>>();
  } catch (const std::exception& e) {
    throw UsageError(std::string("grid needs 'depth' and 'l2_leaf' lists: ") + e.what());
  }
  if (g.depth.empty() || g.l2_leaf.empty()) throw UsageError("grid lists must be non-empty");
  return g;
}

regress::TrainerSpec spec_from_config(const json& config) {
  return loading([&] { return regress::trainer_spec_from_json(config.at("train").at("spec")); });
}

void write_csv(const std::string& path, std::vector<std::string> header, std::vector<std::vector<std::string>> rows) {
  csv::write_file(path, csv::Document{std::move(header), std::move(rows)});
}

std::string num(double v) { return csv::format_double(v); }

}  // namespace

void cmd_synth(const Context& ctx) {
  const auto cfg = loading([&] {
    auto c = synth::SynthConfig::from_json(ctx.config.at("synth"));
    c.validate();
    return c;
  });
  auto seeded = cfg;
  seeded.seed = ctx.seed;
  const auto dir = out_dir(ctx);
  RunManifest manifest("synth", ctx.config, ctx.seed, seeded.seed);
  {
    auto t = manifest.time("generate");
    const auto db = synth::generate_synth_db(seeded);
    spdlog::info("generated {} rows, {} ledger entries", db.table.rows(), db.truth.ledger.size());
    write_synth_db(db, dir);
  }
  finish(manifest, dir);
}

void cmd_ingest(const Context& ctx, const IngestArgs& args) {
  if (!fs::is_directory(args.sources)) throw UsageError("source directory not found: " + args.sources);
  if (!fs::is_regular_file(path_in(args.sources, std::string(to_string(SourceKind::frac_list)) + ".csv")))
    throw UsageError("frac-list source missing in " + args.sources);
  if (args.dicts && !fs::is_directory(*args.dicts)) throw UsageError("dictionary directory not found: " + *args.dicts);
  const auto dir = out_dir(ctx);
  RunManifest manifest("ingest", ctx.config, ctx.seed, ctx.seed);
  manifest.add_input(args.sources);
  if (args.dicts) manifest.add_input(*args.dicts);

  const auto docs = loading([&] { return ingest::read_source_dir(args.sources); });
  const auto dicts = loading([&] { return args.dicts ? ingest::load_dictionaries(*args.dicts) : ingest::DictionaryMap{}; });
  ingest::MergeResult merged;
  {
    auto t = manifest.time("merge");
    merged = loading([&] { return ingest::merge_sources(docs, dicts); });
  }
  write_table(merged.table, path_in(dir, "table.csv"));
  auto log = merged.log.to_json();
  log["schema_version"] = kSchemaVersion;
  write_json(log, path_in(dir, "merge_log.json"));
  spdlog::info("merged {} rows x {} columns", merged.table.rows(), merged.table.columns());
  finish(manifest, dir);
}

void cmd_impute(const Context& ctx, const ImputeArgs& args) {
  const auto& cfg = ctx.config.at("impute");
  const auto method = args.method.value_or(cfg.at("method").get<std::string>());
  static const std::set<std::string> kMethods = {"drop", "mean", "pad_mean", "cluster_mean", "nnmf", "tsvd"};
  if (!kMethods.contains(method)) throw UsageError("unknown impute method '" + method + "'");
  const bool factorizes = method == "nnmf" || method == "tsvd";
  const std::optional<std::size_t> cfg_rank =
      cfg.at("rank").is_null() ? std::nullopt : std::optional<std::size_t>(cfg.at("rank").get<std::size_t>());
  if ((args.rank || cfg_rank) && !factorizes) throw UsageError("--rank applies only to nnmf and tsvd");
  if ((args.max_iters || args.tol) && !factorizes) throw UsageError("--max-iters and --tol apply only to nnmf and tsvd");
  if ((args.threshold || args.max_missing_cells) && method != "drop")
    throw UsageError("--threshold and --max-missing-cells apply only to drop");
  if (args.labels && method != "cluster_mean") throw UsageError("--labels applies only to cluster_mean");
  if (method == "cluster_mean" && !args.labels) throw UsageError("cluster_mean requires --labels");

  impute::ImputeOptions opt;
  opt.method = method == "drop"       ? impute::ImputeMethod::drop_rows
               : method == "mean"     ? impute::ImputeMethod::column_mean
               : method == "nnmf"     ? impute::ImputeMethod::nnmf
               : method == "tsvd"     ? impute::ImputeMethod::tsvd
                                      : impute::ImputeMethod::group_mean;
  opt.max_missing_frac = args.threshold.value_or(cfg.at("max_missing_frac").get<double>());
  if (!(opt.max_missing_frac >= 0.0 && opt.max_missing_frac <= 1.0)) throw UsageError("--threshold must lie in [0, 1]");
  if (args.max_missing_cells) opt.max_missing_cells = args.max_missing_cells;
  else if (!cfg.at("max_missing_cells").is_null()) opt.max_missing_cells = cfg.at("max_missing_cells").get<std::size_t>();
  opt.rank = args.rank ? args.rank : cfg_rank;
  if (opt.rank && *opt.rank == 0) throw UsageError("--rank must be positive");
  opt.max_iters = args.max_iters.value_or(cfg.at("max_iters").get<int>());
  opt.tol = args.tol.value_or(cfg.at("tol").get<double>());
  if (opt.max_iters < 1 || !(opt.tol >= 0.0)) throw UsageError("--max-iters must be positive and --tol non-negative");
  const auto encoding = cfg.at("encoding").get<std::string>();
  if (encoding != "reduced" && encoding != "full_one_hot") throw UsageError("impute.encoding must be reduced or full_one_hot");
  const auto stage_seed = derive_seed(ctx.seed, "impute");
  opt.seed = stage_seed;

  require_file(args.input, "input table");
  const auto table = loading([&] { return read_table(args.input); });
  if (method == "pad_mean") {
    for (const auto& k : table.keys()) opt.groups.push_back(k.field_id);
  } else if (method == "cluster_mean") {
    const auto labels = read_labels(*args.labels);
    for (const auto& k : table.keys()) {
      auto it = labels.find(k);
      opt.groups.push_back(it == labels.end() ? "unlabeled" : std::to_string(it->second));
    }
  }
  const auto dir = out_dir(ctx);
  RunManifest manifest("impute", ctx.config, ctx.seed, stage_seed);
  manifest.add_input(args.input);
  if (args.labels) manifest.add_input(*args.labels);

  impute::CompletedTable done;
  {
    auto t = manifest.time("impute");
    done = impute::impute_features(table, opt);
  }
  write_flags(done.table, done.imputed, path_in(dir, "imputed_flags.csv"));
  const auto policy = encoding == "reduced" ? ingest::EncodingPolicy::reduced : ingest::EncodingPolicy::full_one_hot;
  write_table(ingest::encode_categories(done.table, policy), path_in(dir, "table.csv"));
  auto record = done.record();
  record["method_flag"] = method;
  record["rows_in"] = table.rows();
  record["rows_out"] = done.table.rows();
  write_json(record, path_in(dir, "impute.json"));
  spdlog::info("imputed {} cells with {}, {} of {} rows kept", done.imputed.count(), method, done.table.rows(),
               table.rows());
  finish(manifest, dir);
}

void cmd_cluster(const Context& ctx, const ClusterArgs& args) {
  const auto& cfg = ctx.config.at("cluster");
  require_file(args.input, "input table");
  const auto table = loading([&] { return read_table(args.input); });
  std::vector<std::string> features;
  for (const auto& f : input_features(table))
    if (f.find('=') == std::string::npos) features.push_back(f);
  if (features.empty()) throw UsageError("no numeric input columns to cluster");
  const auto n = static_cast<Eigen::Index>(table.rows());
  if (n < 3) throw UsageError("cluster needs at least three rows");
  Matrix x(n, static_cast<Eigen::Index>(features.size()));
  for (std::size_t f = 0; f < features.size(); ++f) {
    const auto j = table.numeric_index(features[f]);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (table.missing(static_cast<std::size_t>(i), j))
        throw UsageError("feature '" + features[f] + "' has missing cells; impute first");
      x(i, static_cast<Eigen::Index>(f)) = table.numeric()(i, static_cast<Eigen::Index>(j));
    }
  }
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double mean = x.col(c).mean();
    const double sd = std::sqrt((x.col(c).array() - mean).square().mean());
    x.col(c) = sd > 0.0 ? Vector((x.col(c).array() - mean) / sd) : Vector::Zero(n);
  }

  const auto stage_seed = derive_seed(ctx.seed, "cluster");
  const auto dir = out_dir(ctx);
  RunManifest manifest("cluster", ctx.config, ctx.seed, stage_seed);
  manifest.add_input(args.input);

  const auto min_pts = cfg.at("min_pts").is_null() ? 2 * features.size() : cfg.at("min_pts").get<std::size_t>();
  if (min_pts < 1) throw UsageError("cluster.min_pts must be positive");
  structure::ClusterLabels labels;
  {
    auto t = manifest.time("dbscan");
    const double eps = cfg.at("eps").is_null()
                           ? structure::default_eps(x, std::min<std::size_t>(min_pts, table.rows()),
                                                    cfg.at("eps_quantile").get<double>())
                           : cfg.at("eps").get<double>();
    if (!(eps > 0.0)) throw UsageError("cluster.eps must be positive");
    labels = structure::dbscan(x, eps, min_pts);
  }
  structure::AnomalyScores anomaly;
  {
    auto t = manifest.time("isolation_forest");
    const auto sub = std::min<std::size_t>(cfg.at("forest_subsample").get<std::size_t>(), table.rows());
    anomaly = structure::isolation_forest_scores(x, cfg.at("forest_trees").get<std::size_t>(), sub,
                                                 derive_seed(stage_seed, "isolation_forest"));
  }
  json kurt = json::object();
  for (std::size_t f = 0; f < features.size(); ++f) {
    const auto col = table.numeric().col(static_cast<Eigen::Index>(table.numeric_index(features[f])));
    std::vector<double> v(col.data(), col.data() + col.size());
    kurt[features[f]] = structure::kurtosis(v);
  }

  std::vector<std::vector<std::string>> label_rows;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const auto& k = table.keys()[i];
    label_rows.push_back({k.field_id, k.well_id, k.layer_id, std::to_string(k.op_date), std::to_string(labels.labels[i]),
                          num(anomaly.scores[i])});
  }
  write_csv(path_in(dir, "labels.csv"), {"field_id", "well_id", "layer_id", "op_date", "cluster", "anomaly_score"},
            std::move(label_rows));

  std::map<int, std::size_t> sizes;
  for (int l : labels.labels) ++sizes[l];
  json size_doc = json::object();
  for (const auto& [l, c] : sizes) size_doc[std::to_string(l)] = c;
  json summary = {{"schema_version", kSchemaVersion},
                  {"features", features},
                  {"eps", labels.eps},
                  {"min_pts", labels.min_pts},
                  {"clusters", labels.cluster_count()},
                  {"cluster_sizes", size_doc},
                  {"kurtosis", kurt},
                  {"isolation_forest", {{"trees", anomaly.n_trees}, {"subsample", anomaly.subsample}}}};

  const auto& ts = cfg.at("tsne");
  if (ts.at("enabled").get<bool>()) {
    auto t = manifest.time("tsne");
    std::vector<std::size_t> rows(table.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const auto max_rows = ts.at("max_rows").get<std::size_t>();
    if (max_rows < 3) throw UsageError("cluster.tsne.max_rows must be at least 3");
    if (rows.size() > max_rows) {
      Rng rng(derive_seed(stage_seed, "tsne_rows"));
      rows = rng.sample_without_replacement(rows.size(), max_rows);
      std::sort(rows.begin(), rows.end());
    }
    Matrix sub(static_cast<Eigen::Index>(rows.size()), x.cols());
    std::vector<RowKey> keys;
    std::vector<int> sub_labels;
    std::vector<double> sub_scores;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      sub.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
      keys.push_back(table.keys()[rows[r]]);
      sub_labels.push_back(labels.labels[rows[r]]);
      sub_scores.push_back(anomaly.scores[rows[r]]);
    }
    structure::TsneOptions o;
    o.perplexity = std::min(ts.at("perplexity").get<double>(), static_cast<double>(rows.size() - 1) / 3.0);
    o.learning_rate = ts.at("learning_rate").get<double>();
    o.iters = ts.at("iters").get<int>();
    o.seed = derive_seed(stage_seed, "tsne");
    const auto emb = structure::tsne(sub, o);
    structure::write_embedding_csv(keys, emb.embedding, sub_labels, sub_scores, path_in(dir, "embedding.csv"));
    summary["tsne"] = {{"rows", rows.size()}, {"perplexity", o.perplexity}, {"iters", o.iters}};
  }
  write_json(summary, path_in(dir, "cluster.json"));
  spdlog::info("{} clusters, {} noise points", labels.cluster_count(), sizes.contains(-1) ? sizes[-1] : 0);
  finish(manifest, dir);
}

void cmd_train(const Context& ctx, const TrainArgs& args) {
  const auto& cfg = ctx.config.at("train");
  auto spec = spec_from_config(ctx.config);
  if (args.model) spec.kind = loading([&] { return regress::parse_model_kind(*args.model); });
  const bool log_report = args.log_target || cfg.at("log_target").get<bool>();
  regress::CvOptions cv_opt;
  cv_opt.k = cfg.at("folds").get<std::size_t>();
  cv_opt.test_frac = cfg.at("test_frac").get<double>();
  if (cv_opt.k < 2) throw UsageError("train.folds must be at least 2");
  if (!(cv_opt.test_frac > 0.0 && cv_opt.test_frac < 1.0)) throw UsageError("train.test_frac must lie in (0, 1)");
  std::optional<regress::Grid> grid;
  if (args.grid) {
    require_file(*args.grid, "grid file");
    grid = parse_grid(loading([&] { return read_json(*args.grid); }));
  } else if (!cfg.at("grid").empty()) {
    grid = parse_grid(cfg.at("grid"));
  }

  require_file(args.input, "input table");
  const auto table = loading([&] { return read_table(args.input); });
  const auto target = target_name(table);
  const auto data = loading([&] { return regress::make_dataset(table, target, input_features(table)); });
  std::optional<std::map<RowKey, int>> labels;
  if (args.labels) labels = read_labels(*args.labels);

  const auto stage_seed = derive_seed(ctx.seed, "train");
  const auto dir = out_dir(ctx);
  RunManifest manifest("train", ctx.config, ctx.seed, stage_seed);
  manifest.add_input(args.input);
  if (args.grid) manifest.add_input(*args.grid);
  if (args.labels) manifest.add_input(*args.labels);

  json report = {{"schema_version", kSchemaVersion}, {"target", target}, {"rows", data.y.size()},
                 {"features", data.features.size()}};
  if (grid && spec.kind == regress::ModelKind::gbdt) {
    auto t = manifest.time("grid_search");
    auto opt = cv_opt;
    opt.evaluate_test = false;
    const auto res = regress::grid_search(data, *grid, spec, opt, derive_seed(stage_seed, "grid"));
    spec.gbdt = res.best;
    write_csv(path_in(dir, "grid.csv"), {"depth", "l2_leaf", "cv_mean", "cv_std"}, res.table());
    report["grid"] = {{"cells", res.cells.size()}, {"best_depth", res.best.depth}, {"best_l2_leaf", res.best.l2_leaf}};
  }

  const auto cv_seed = derive_seed(stage_seed, "cv");
  regress::CvReport cv;
  {
    auto t = manifest.time("cross_validation");
    cv = regress::kfold_cv(data, spec, cv_opt, cv_seed);
  }
  report["model"] = regress::to_json(spec);
  report["cv"] = cv.to_json();
  {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < cv.test_y.size(); ++i) rows.push_back({num(cv.test_y[i]), num(cv.test_pred[i])});
    write_csv(path_in(dir, "predictions.csv"), {"actual", "predicted"}, std::move(rows));
  }
  {
    // Same rows and seed as the final fit inside kfold_cv.
    auto t = manifest.time("final_fit");
    auto rows = regress::holdout_split(data.y, cv_opt.test_frac, derive_seed(cv_seed, "holdout")).train;
    std::sort(rows.begin(), rows.end());
    const auto train_rows = regress::subset(data, rows);
    auto model = regress::train(spec, train_rows.x, train_rows.y, data.features, derive_seed(cv_seed, "final"));
    model.target = target;
    regress::save_model(model, path_in(dir, "model.json"));
    write_json(regress::to_json(spec), path_in(dir, "trainer.json"));
  }
  if (log_report) {
    auto t = manifest.time("cross_validation_log");
    auto log_spec = spec;
    log_spec.log_target = true;
    const auto log_cv = regress::kfold_cv(data, log_spec, cv_opt, cv_seed);
    report["log_target_cv"] = log_cv.to_json();
    spdlog::info("log-target test R2 {:.4f}", log_cv.test_r2);
  }
  if (labels) {
    auto t = manifest.time("per_cluster");
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < table.rows(); ++i)
      if (auto it = labels->find(table.keys()[i]); it != labels->end() && it->second >= 0) members[it->second].push_back(i);
    json per = json::array();
    const auto min_rows = cfg.at("min_cluster_rows").get<std::size_t>();
    for (const auto& [label, rows] : members) {
      json entry = {{"cluster", label}, {"rows", rows.size()}};
      if (rows.size() >= std::max<std::size_t>(min_rows, 2 * cv_opt.k)) {
        const auto r = regress::kfold_cv(regress::subset(data, rows), spec, cv_opt,
                                         derive_seed(stage_seed, static_cast<std::uint64_t>(label)));
        entry["cv"] = r.to_json();
      }
      per.push_back(entry);
    }
    report["per_cluster"] = per;
  }
  write_json(report, path_in(dir, "cv_report.json"));
  spdlog::info("cv R2 {:.4f} +/- {:.4f}, test R2 {:.4f}", cv.mean, cv.std, cv.test_r2);
  finish(manifest, dir);
}

void cmd_analyze(const Context& ctx, const AnalyzeArgs& args) {
  const auto& cfg = ctx.config.at("analyze");
  require_file(args.model, "model file");
  require_file(args.input, "input table");
  const auto model = loading([&] { return regress::load_model(args.model); });
  const auto table = loading([&] { return read_table(args.input); });
  for (const auto& f : model.features()) {
    const auto c = table.find_column(f);
    if (!c || table.schema()[*c].kind != ColumnKind::numeric)
      throw UsageError("feature mismatch: table lacks model feature '" + f + "'");
  }
  if (model.target.empty() || !table.find_column(model.target))
    throw UsageError("feature mismatch: table lacks target '" + model.target + "'");
  const auto data = loading([&] { return regress::make_dataset(table, model.target, model.features()); });

  const auto trainer_path = (fs::path(args.model).parent_path() / "trainer.json").string();
  auto spec = fs::is_regular_file(trainer_path)
                  ? loading([&] { return regress::trainer_spec_from_json(read_json(trainer_path)); })
                  : spec_from_config(ctx.config);
  spec.log_target = model.log_target();
  const double test_frac = cfg.at("test_frac").get<double>();
  if (!(test_frac > 0.0 && test_frac < 1.0)) throw UsageError("analyze.test_frac must lie in (0, 1)");

  const auto stage_seed = derive_seed(ctx.seed, "analyze");
  const auto dir = out_dir(ctx);
  RunManifest manifest("analyze", ctx.config, ctx.seed, stage_seed);
  manifest.add_input(args.model);
  manifest.add_input(args.input);

  analysis::AnalysisReport rep;
  rep.importance = analysis::gain_importance(model);
  {
    auto t = manifest.time("tornado");
    const auto groups = cfg.at("tornado").at("groups").get<std::vector<std::string>>();
    std::vector<std::string> perturbed;
    for (const auto& f : model.features()) {
      const auto g = std::string(to_string(table.schema()[*table.find_column(f)].group));
      if (std::find(groups.begin(), groups.end(), g) != groups.end()) perturbed.push_back(f);
    }
    if (perturbed.empty()) perturbed = model.features();
    rep.tornado = analysis::ovat_tornado(model, data, perturbed, cfg.at("tornado").at("delta").get<double>());
  }
  if (cfg.at("rfe").at("enabled").get<bool>()) {
    auto t = manifest.time("rfe");
    const auto step = cfg.at("rfe").at("step").get<std::size_t>();
    if (step == 0) throw UsageError("analyze.rfe.step must be positive");
    std::vector<std::string> order;
    for (const auto& imp : rep.importance) order.push_back(imp.feature);
    std::vector<std::size_t> grid;
    for (std::size_t k = step; k < order.size(); k += step) grid.push_back(k);
    grid.push_back(order.size());
    rep.rfe = analysis::rfe_curve(data, order, grid, spec, test_frac, cfg.at("rfe").at("tolerance").get<double>(),
                                  derive_seed(stage_seed, "rfe"));
  }
  if (cfg.at("bootstrap").at("enabled").get<bool>()) {
    auto t = manifest.time("bootstrap");
    analysis::BootstrapOptions o;
    o.iters = cfg.at("bootstrap").at("iters").get<int>();
    o.frac = cfg.at("bootstrap").at("frac").get<double>();
    o.level = cfg.at("bootstrap").at("level").get<double>();
    o.test_frac = test_frac;
    rep.bootstrap = analysis::bootstrap_r2_ci(data, spec, o, derive_seed(stage_seed, "bootstrap"));
  }
  rep.write(dir);
  if (rep.bootstrap) spdlog::info("bootstrap R2 interval [{:.4f}, {:.4f}]", rep.bootstrap->lower, rep.bootstrap->upper);
  finish(manifest, dir);
}

void cmd_report(const Context& ctx, const ReportArgs& args) {
  const auto& cfg = ctx.config.at("report");
  require_file(args.input, "input table");
  const auto table = loading([&] { return read_table(args.input); });
  const auto raw = args.raw ? loading([&] {
    require_file(*args.raw, "raw table");
    return read_table(*args.raw);
  })
                            : table;
  const auto target = target_name(table);
  const auto data = loading([&] { return regress::make_dataset(table, target, input_features(table)); });
  const auto base_spec = spec_from_config(ctx.config);
  const auto kinds = cfg.at("models").get<std::vector<std::string>>();
  if (kinds.empty()) throw UsageError("report.models must not be empty");
  std::vector<regress::ModelKind> parsed;
  for (const auto& k : kinds) parsed.push_back(loading([&] { return regress::parse_model_kind(k); }));
  const auto bins = cfg.at("histogram_bins").get<std::size_t>();
  if (bins == 0) throw UsageError("report.histogram_bins must be positive");

  const auto stage_seed = derive_seed(ctx.seed, "report");
  const auto dir = out_dir(ctx);
  RunManifest manifest("report", ctx.config, ctx.seed, stage_seed);
  manifest.add_input(args.input);
  if (args.raw) manifest.add_input(*args.raw);

  {
    const auto frac = missing_fraction(raw, Axis::per_column);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t c = 0; c < raw.columns(); ++c)
      rows.push_back({raw.schema()[c].name, std::string(to_string(raw.schema()[c].group)), num(frac[c])});
    write_csv(path_in(dir, "missing_by_column.csv"), {"column", "group", "missing_fraction"}, std::move(rows));
  }
  {
    const double lo = data.y.minCoeff(), hi = data.y.maxCoeff();
    const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
    std::vector<std::size_t> counts(bins, 0);
    for (Eigen::Index i = 0; i < data.y.size(); ++i)
      ++counts[std::min(bins - 1, static_cast<std::size_t>((data.y(i) - lo) / width))];
    std::vector<std::vector<std::string>> rows;
    for (std::size_t b = 0; b < bins; ++b)
      rows.push_back({num(lo + width * static_cast<double>(b)), num(lo + width * static_cast<double>(b + 1)),
                      std::to_string(counts[b])});
    write_csv(path_in(dir, "target_distribution.csv"), {"bin_low", "bin_high", "count"}, std::move(rows));
  }
  regress::CvOptions cv_opt;
  cv_opt.k = ctx.config.at("train").at("folds").get<std::size_t>();
  cv_opt.test_frac = ctx.config.at("train").at("test_frac").get<double>();
  std::vector<regress::Candidate> candidates;
  {
    auto t = manifest.time("model_comparison");
    for (std::size_t m = 0; m < parsed.size(); ++m) {
      auto spec = base_spec;
      spec.kind = parsed[m];
      candidates.push_back({kinds[m], regress::kfold_cv(data, spec, cv_opt, derive_seed(stage_seed, "cv"))});
    }
  }
  const auto sel = regress::select_model(candidates, cfg.at("ensemble_size").get<std::size_t>());
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : candidates)
      rows.push_back({c.name, num(c.report.mean), num(c.report.std), num(c.report.test_r2)});
    rows.push_back({std::string(regress::kEnsembleName), "", "", num(sel.ensemble_r2)});
    write_csv(path_in(dir, "model_comparison.csv"), {"model", "cv_mean", "cv_std", "test_r2"}, std::move(rows));
  }
  json summary = {{"schema_version", kSchemaVersion},
                  {"rows", data.y.size()},
                  {"features", data.features.size()},
                  {"target", target},
                  {"target_mean", data.y.mean()},
                  {"selected", sel.name},
                  {"selected_test_r2", sel.test_r2},
                  {"ensemble_r2", sel.ensemble_r2},
                  {"ensemble_members", sel.ensemble_members}};
  write_json(summary, path_in(dir, "summary.json"));
  spdlog::info("selected {} (test R2 {:.4f})", sel.name, sel.test_r2);
  finish(manifest, dir);
}

}  // namespace fracflow::cli
