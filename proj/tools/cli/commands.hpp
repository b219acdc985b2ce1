#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace fracflow::cli {

/// Settings shared by every subcommand after config and flags are merged.
struct Context {
  nlohmann::json config;
  std::uint64_t seed = 7;
  std::string out;
};

struct IngestArgs {
  std::string sources;
  std::optional<std::string> dicts;
};

struct ImputeArgs {
  std::string input;
  std::optional<std::string> method;
  std::optional<std::size_t> rank;
  std::optional<double> threshold;
  std::optional<std::size_t> max_missing_cells;
  std::optional<std::string> labels;
  std::optional<int> max_iters;
  std::optional<double> tol;
};

struct ClusterArgs {
  std::string input;
};

struct TrainArgs {
  std::string input;
  std::optional<std::string> model;
  std::optional<std::string> grid;
  std::optional<std::string> labels;
  bool log_target = false;
};

struct AnalyzeArgs {
  std::string model;
  std::string input;
};

struct ReportArgs {
  std::string input;
  std::optional<std::string> raw;
};

void cmd_synth(const Context& ctx);
void cmd_ingest(const Context& ctx, const IngestArgs& args);
void cmd_impute(const Context& ctx, const ImputeArgs& args);
void cmd_cluster(const Context& ctx, const ClusterArgs& args);
void cmd_train(const Context& ctx, const TrainArgs& args);
void cmd_analyze(const Context& ctx, const AnalyzeArgs& args);
void cmd_report(const Context& ctx, const ReportArgs& args);

}  // namespace fracflow::cli
