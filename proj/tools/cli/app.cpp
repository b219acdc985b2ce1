#include "app.hpp"

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "config.hpp"
#include "fracflow/parallel.hpp"

namespace fracflow::cli {

namespace {

void setup_logging() {
  auto logger = spdlog::get("fracflow");
  if (!logger) logger = spdlog::stderr_color_mt("fracflow");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("FRACFLOW_LOG");
  const std::string level = env ? env : "info";
  if (level == "error") spdlog::set_level(spdlog::level::err);
  else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else spdlog::set_level(spdlog::level::info);
  if (level != "error" && level != "info" && level != "debug")
    spdlog::warn("FRACFLOW_LOG='{}' is not one of error, info, debug; using info", level);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  setup_logging();
  CLI::App app{"Hydraulic-fracturing production forecasting pipeline", "fracflow"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string out;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "Root seed");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "Output directory");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic field database");

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Merge raw sources into one table");
  ingest_cmd->add_option("--sources", ingest.sources, "Directory of source CSVs")->required();
  ingest_cmd->add_option("--dicts", ingest.dicts, "Directory of category dictionaries");

  ImputeArgs impute;
  auto* impute_cmd = app.add_subcommand("impute", "Fill missing numeric cells");
  impute_cmd->add_option("--in", impute.input, "Merged table CSV")->required();
  impute_cmd->add_option("--method", impute.method, "drop, mean, pad_mean, cluster_mean, nnmf or tsvd");
  impute_cmd->add_option("--rank", impute.rank, "Factorization rank");
  impute_cmd->add_option("--threshold", impute.threshold, "Row missing-fraction cut for drop");
  impute_cmd->add_option("--max-missing-cells", impute.max_missing_cells, "Row missing-cell cut for drop");
  impute_cmd->add_option("--labels", impute.labels, "labels.csv from cluster, for cluster_mean");
  impute_cmd->add_option("--max-iters", impute.max_iters, "Factorization iteration cap");
  impute_cmd->add_option("--tol", impute.tol, "Relative objective tolerance");

  ClusterArgs cluster;
  auto* cluster_cmd = app.add_subcommand("cluster", "DBSCAN, isolation forest and t-SNE on the inputs");
  cluster_cmd->add_option("--in", cluster.input, "Completed table CSV")->required();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Grid search, cross-validate and fit a model");
  train_cmd->add_option("--in", train.input, "Completed table CSV")->required();
  train_cmd->add_option("--model", train.model, "gbdt, random_forest, extra_trees, decision_tree or knn");
  train_cmd->add_option("--grid", train.grid, "Grid JSON with depth and l2_leaf lists");
  train_cmd->add_option("--labels", train.labels, "labels.csv for per-cluster scores");
  train_cmd->add_flag("--log-target", train.log_target, "Also report a log-target fit");

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Importance, tornado, RFE and bootstrap interval");
  analyze_cmd->add_option("--model", analyze.model, "model.json from train")->required();
  analyze_cmd->add_option("--in", analyze.input, "Completed table CSV")->required();

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Summary tables and model comparison");
  report_cmd->add_option("--in", report.input, "Completed table CSV")->required();
  report_cmd->add_option("--raw", report.raw, "Merged table before imputation");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cout, std::cerr);
    return kExitUsage;
  }

  try {
    Context ctx;
    ctx.config = load_config(config_path);
    ctx.seed = root_seed(ctx.config, seed);
    ctx.config["seed"] = ctx.seed;
    ctx.out = out;
    if (jobs) set_max_jobs(*jobs);
    if (synth->parsed()) cmd_synth(ctx);
    else if (ingest_cmd->parsed()) cmd_ingest(ctx, ingest);
    else if (impute_cmd->parsed()) cmd_impute(ctx, impute);
    else if (cluster_cmd->parsed()) cmd_cluster(ctx, cluster);
    else if (train_cmd->parsed()) cmd_train(ctx, train);
    else if (analyze_cmd->parsed()) cmd_analyze(ctx, analyze);
    else if (report_cmd->parsed()) cmd_report(ctx, report);
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace fracflow::cli
