#include "fracflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "fracflow/csv.hpp"
#include "fracflow/error.hpp"
#include "fracflow/parallel.hpp"
#include "fracflow/rng.hpp"
#include "fracflow/table_io.hpp"

namespace fracflow::analysis {

using regress::Dataset;
using regress::Model;
using regress::TrainerSpec;

std::vector<Importance> gain_importance(const std::vector<regress::Tree>& trees,
                                        const std::vector<std::string>& features) {
  std::vector<double> total(features.size(), 0.0);
  for (const auto& t : trees)
    for (const auto& n : t.nodes())
      if (!n.is_leaf()) {
        if (n.feature >= static_cast<int>(features.size())) throw Error("tree references an unknown feature");
        total[static_cast<std::size_t>(n.feature)] += n.gain;
      }
  const double sum = std::accumulate(total.begin(), total.end(), 0.0);
  std::vector<Importance> out;
  for (std::size_t f = 0; f < features.size(); ++f) out.push_back({features[f], sum > 0.0 ? total[f] / sum : 0.0});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.importance > b.importance; });
  return out;
}

std::vector<Importance> gain_importance(const Model& model) {
  return std::visit(
      [&](const auto& m) -> std::vector<Importance> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, regress::GbdtModel>) {
          if (m.trees.empty() && m.best_iteration == 0) return gain_importance({}, model.features());
          std::vector<regress::Tree> used(m.trees.begin(), m.trees.begin() + m.best_iteration);
          return gain_importance(used, model.features());
        } else if constexpr (std::is_same_v<T, regress::ForestModel>) {
          if (m.trees.empty()) throw Error("model is not fitted");
          return gain_importance(m.trees, model.features());
        } else if constexpr (std::is_same_v<T, regress::Tree>) {
          if (m.empty()) throw Error("model is not fitted");
          return gain_importance({m}, model.features());
        } else {
          throw Error("gain importance needs a tree model");
        }
      },
      model.impl());
}

double holdout_r2(const Dataset& data, const TrainerSpec& spec, double test_frac, std::uint64_t seed) {
  const auto split = regress::holdout_split(data.y, test_frac, derive_seed(seed, "holdout"));
  if (split.train.empty() || split.test.size() < 2) throw Error("resample too small to split");
  const auto tr = regress::subset(data, split.train);
  const auto te = regress::subset(data, split.test);
  const auto model = regress::train(spec, tr.x, tr.y, tr.features, derive_seed(seed, "fit"));
  return regress::r2_score(te.y, model.predict(te.x));
}

RfeResult rfe_curve(const Dataset& data, const std::vector<std::string>& order, std::vector<std::size_t> grid,
                    const TrainerSpec& spec, double test_frac, double tolerance, std::uint64_t seed) {
  if (grid.empty()) throw Error("feature-count grid is empty");
  if (order.size() != data.features.size()) throw Error("importance order must cover all features");
  for (const auto& f : order)
    if (std::find(data.features.begin(), data.features.end(), f) == data.features.end())
      throw Error("importance order names unknown feature '" + f + "'");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.front() < 1 || grid.back() > order.size()) throw Error("feature counts must lie in [1, M]");

  RfeResult res;
  res.tolerance = tolerance;
  res.curve.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t g) {
    const std::vector<std::string> top(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(grid[g]));
    std::vector<std::string> kept;
    for (const auto& f : data.features)
      if (std::find(top.begin(), top.end(), f) != top.end()) kept.push_back(f);
    res.curve[g] = {grid[g], holdout_r2(regress::select_features(data, kept), spec, test_frac, seed)};
  });
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : res.curve) best = std::max(best, p.r2);
  for (const auto& p : res.curve)
    if (p.r2 >= best - tolerance) {
      res.selected = p.n_features;
      break;
    }
  res.selected_features.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(res.selected));
  return res;
}

double TornadoEntry::swing() const { return std::max(std::abs(low - baseline), std::abs(high - baseline)); }

std::vector<TornadoEntry> ovat_tornado(const Predictor& predict, const Matrix& x,
                                       const std::vector<std::string>& features,
                                       const std::vector<std::string>& perturbed, double delta) {
  if (!(delta > 0.0)) throw Error("delta must be positive");
  if (static_cast<std::size_t>(x.cols()) != features.size()) throw Error("feature names do not match X");
  if (x.rows() == 0) throw Error("empty input");
  const Eigen::RowVectorXd means = x.colwise().mean();
  Matrix rows(static_cast<Eigen::Index>(1 + 2 * perturbed.size()), x.cols());
  rows.rowwise() = means;
  for (std::size_t k = 0; k < perturbed.size(); ++k) {
    auto it = std::find(features.begin(), features.end(), perturbed[k]);
    if (it == features.end()) throw Error("feature '" + perturbed[k] + "' is not a model feature");
    const auto j = it - features.begin();
    rows(static_cast<Eigen::Index>(1 + 2 * k), j) = (1.0 - delta) * means(j);
    rows(static_cast<Eigen::Index>(2 + 2 * k), j) = (1.0 + delta) * means(j);
  }
  const Vector p = predict(rows);
  std::vector<TornadoEntry> out;
  for (std::size_t k = 0; k < perturbed.size(); ++k)
    out.push_back({perturbed[k], p(0), p(static_cast<Eigen::Index>(1 + 2 * k)), p(static_cast<Eigen::Index>(2 + 2 * k)),
                   delta});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.swing() > b.swing(); });
  return out;
}

std::vector<TornadoEntry> ovat_tornado(const Model& model, const Dataset& data,
                                       const std::vector<std::string>& perturbed, double delta) {
  if (model.features() != data.features) throw Error("model and table features differ");
  return ovat_tornado([&](const Matrix& m) { return model.predict(m); }, data.x, data.features, perturbed, delta);
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw Error("percentile of empty input");
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

BootstrapCi bootstrap_r2_ci(const Dataset& data, const TrainerSpec& spec, const BootstrapOptions& o,
                            std::uint64_t seed) {
  if (o.iters < 2) throw Error("bootstrap needs at least 2 iterations");
  if (!(o.frac > 0.0 && o.frac <= 1.0)) throw Error("frac must lie in (0, 1]");
  if (!(o.level > 0.0 && o.level < 1.0)) throw Error("level must lie in (0, 1)");
  const auto n = static_cast<std::size_t>(data.y.size());
  const auto m = static_cast<std::size_t>(std::floor(o.frac * static_cast<double>(n)));
  if (m < 10) throw Error("resample too small to split");

  BootstrapCi ci;
  ci.level = o.level;
  ci.samples.resize(static_cast<std::size_t>(o.iters));
  parallel_for(ci.samples.size(), [&](std::size_t it) {
    const auto s = derive_seed(seed, it);
    Rng rng(derive_seed(s, "rows"));
    auto rows = rng.sample_without_replacement(n, m);
    std::sort(rows.begin(), rows.end());
    ci.samples[it] = holdout_r2(regress::subset(data, rows), spec, o.test_frac, s);
  });
  ci.point = holdout_r2(data, spec, o.test_frac, derive_seed(seed, "point"));
  const double tail = (1.0 - o.level) / 2.0;
  ci.lower = percentile(ci.samples, tail);
  ci.upper = percentile(ci.samples, 1.0 - tail);
  return ci;
}

nlohmann::json AnalysisReport::to_json() const {
  nlohmann::json doc = {{"schema_version", 1}};
  doc["importance"] = nlohmann::json::array();
  for (const auto& i : importance) doc["importance"].push_back({{"feature", i.feature}, {"importance", i.importance}});
  doc["rfe"] = nlohmann::json::array();
  if (rfe) {
    for (const auto& p : rfe->curve) doc["rfe"].push_back({{"n_features", p.n_features}, {"r2", p.r2}});
    doc["rfe_selected"] = rfe->selected;
    doc["rfe_tolerance"] = rfe->tolerance;
  }
  doc["tornado"] = nlohmann::json::array();
  for (const auto& t : tornado)
    doc["tornado"].push_back(
        {{"feature", t.feature}, {"baseline", t.baseline}, {"low", t.low}, {"high", t.high}, {"delta", t.delta}});
  if (bootstrap)
    doc["bootstrap"] = {{"point", bootstrap->point},
                        {"lower", bootstrap->lower},
                        {"upper", bootstrap->upper},
                        {"level", bootstrap->level},
                        {"samples", bootstrap->samples}};
  else
    doc["bootstrap"] = nullptr;
  return doc;
}

void AnalysisReport::write(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_json(to_json(), (fs::path(dir) / "report.json").string());
  using csv::format_double;
  csv::Document imp{{"feature", "importance"}, {}};
  for (const auto& i : importance) imp.rows.push_back({i.feature, format_double(i.importance)});
  csv::write_file((fs::path(dir) / "importance.csv").string(), imp);
  csv::Document r{{"n_features", "r2"}, {}};
  if (rfe)
    for (const auto& p : rfe->curve) r.rows.push_back({std::to_string(p.n_features), format_double(p.r2)});
  csv::write_file((fs::path(dir) / "rfe.csv").string(), r);
  csv::Document t{{"feature", "baseline", "low", "high", "delta"}, {}};
  for (const auto& e : tornado)
    t.rows.push_back({e.feature, format_double(e.baseline), format_double(e.low), format_double(e.high),
                      format_double(e.delta)});
  csv::write_file((fs::path(dir) / "tornado.csv").string(), t);
  csv::Document b{{"iteration", "r2"}, {}};
  if (bootstrap)
    for (std::size_t i = 0; i < bootstrap->samples.size(); ++i)
      b.rows.push_back({std::to_string(i), format_double(bootstrap->samples[i])});
  csv::write_file((fs::path(dir) / "bootstrap_samples.csv").string(), b);
}

}  // namespace fracflow::analysis
