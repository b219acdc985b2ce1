#include "fracflow/regress.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "fracflow/csv.hpp"
#include "fracflow/error.hpp"
#include "fracflow/parallel.hpp"
#include "fracflow/rng.hpp"

namespace fracflow::regress {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

std::span<const double> as_span(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

Matrix take_rows(const Matrix& x, std::span<const std::size_t> rows) {
  Matrix out(idx(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(idx(i)) = x.row(idx(rows[i]));
  return out;
}

Vector take(const Vector& y, std::span<const std::size_t> rows) {
  Vector out(idx(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(idx(i)) = y(idx(rows[i]));
  return out;
}

double mse(const Vector& y, const Vector& p) { return (y - p).squaredNorm() / static_cast<double>(y.size()); }

bool constant(const Vector& y) { return y.size() == 0 || (y.array() == y(0)).all(); }

}  // namespace

double r2_score(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw Error("r2_score: length mismatch");
  if (y.size() < 2) throw Error("r2_score needs at least 2 values");
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (ss_tot == 0.0) throw Error("undefined R²");
  return 1.0 - ss_res / ss_tot;
}

double r2_score(const Vector& y, const Vector& yhat) { return r2_score(as_span(y), as_span(yhat)); }

double mape(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw Error("mape: length mismatch");
  if (y.empty()) throw Error("mape of empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 0.0) throw Error("mape undefined for zero targets");
    s += std::abs(y[i] - yhat[i]) / std::abs(y[i]);
  }
  return 100.0 * s / static_cast<double>(y.size());
}

double mape(const Vector& y, const Vector& yhat) { return mape(as_span(y), as_span(yhat)); }

Vector ForestModel::predict(const Matrix& x) const {
  if (trees.empty()) throw Error("forest is not fitted");
  Vector out = Vector::Zero(x.rows());
  for (const auto& t : trees) out += t.predict(x);
  return out / static_cast<double>(trees.size());
}

ForestModel fit_forest(const Matrix& x, const Vector& y, const ForestParams& p) {
  if (p.n_trees < 1) throw Error("n_trees must be at least 1");
  if (x.rows() == 0 || x.rows() != y.size()) throw Error("fit_forest needs matching nonempty X and y");
  if (!(p.feature_frac > 0.0 && p.feature_frac <= 1.0)) throw Error("feature_frac must lie in (0, 1]");
  const auto n = static_cast<std::size_t>(x.rows());
  ForestModel model;
  model.trees.resize(static_cast<std::size_t>(p.n_trees));
  std::optional<BinnedMatrix> bins;
  if (p.mode == ForestMode::random_forest) bins.emplace(x, 256);
  const std::span<const double> g = as_span(y);
  parallel_for(model.trees.size(), [&](std::size_t t) {
    const auto seed = derive_seed(p.seed, t);
    GrowOptions o{{p.depth, p.min_leaf, 0.0, 256}, p.feature_frac, derive_seed(seed, "splits")};
    std::vector<std::uint32_t> rows(n);
    if (p.mode == ForestMode::random_forest && p.bootstrap) {
      Rng rng(derive_seed(seed, "rows"));
      for (auto& r : rows) r = static_cast<std::uint32_t>(rng.index(n));
      std::sort(rows.begin(), rows.end());
    } else {
      std::iota(rows.begin(), rows.end(), 0u);
    }
    model.trees[t] = p.mode == ForestMode::random_forest ? grow_tree(*bins, g, std::move(rows), o)
                                                         : grow_random_tree(x, g, std::move(rows), o);
  });
  return model;
}

bool EarlyStopper::observe(int round, double score) {
  if (score > best_) {
    best_ = score;
    best_round_ = round;
  }
  return od_wait_ > 0 && round - best_round_ >= od_wait_;
}

Vector GbdtModel::predict(const Matrix& x) const { return predict(x, best_iteration); }

Vector GbdtModel::predict(const Matrix& x, int n_trees) const {
  if (n_trees < 0 || static_cast<std::size_t>(n_trees) > trees.size()) throw Error("tree count out of range");
  Vector out = Vector::Constant(x.rows(), base_score);
  for (int t = 0; t < n_trees; ++t) out += learning_rate * trees[static_cast<std::size_t>(t)].predict(x);
  return out;
}

double GbdtModel::predict_row(const Eigen::RowVectorXd& row) const {
  double out = base_score;
  for (int t = 0; t < best_iteration; ++t) out += learning_rate * trees[static_cast<std::size_t>(t)].predict_row(row);
  return out;
}

GbdtModel fit_gbdt(const Matrix& x_train, const Vector& y_train, const Matrix& x_val, const Vector& y_val,
                   const GbdtParams& p) {
  if (x_train.rows() == 0 || x_train.rows() != y_train.size()) throw Error("fit_gbdt needs matching nonempty data");
  if (x_val.rows() != y_val.size()) throw Error("validation X and y differ in length");
  if (x_val.rows() > 0 && x_val.cols() != x_train.cols()) throw Error("validation feature count mismatch");
  if (p.od_wait > 0 && y_val.size() == 0) throw Error("early stopping requires validation data");
  if (p.n_rounds < 0 || p.od_wait < 0) throw Error("n_rounds and od_wait must be nonnegative");
  if (!(p.learning_rate > 0.0)) throw Error("learning_rate must be positive");
  if (p.l2_leaf < 0.0) throw Error("l2_leaf must be nonnegative");

  const auto n = static_cast<std::size_t>(x_train.rows());
  GbdtModel m;
  m.base_score = y_train.mean();
  m.learning_rate = p.learning_rate;
  m.depth = p.depth;
  m.l2_leaf = p.l2_leaf;

  const BinnedMatrix bins(x_train, p.max_bins);
  Vector f_train = Vector::Constant(idx(n), m.base_score);
  Vector f_val = Vector::Constant(y_val.size(), m.base_score);
  const bool has_val = y_val.size() > 0;
  const bool val_r2 = has_val && y_val.size() >= 2 && !constant(y_val);
  auto val_score = [&] { return val_r2 ? r2_score(y_val, f_val) : -mse(y_val, f_val); };

  EarlyStopper stopper(p.od_wait, has_val ? val_score() : 0.0);
  m.train_mse.push_back(mse(y_train, f_train));
  std::vector<double> resid(n), leaf(n);
  std::vector<std::uint32_t> all(n);
  std::iota(all.begin(), all.end(), 0u);
  const GrowOptions grow{{p.depth, p.min_leaf, p.l2_leaf, p.max_bins}, 1.0, 0};

  int rounds = 0;
  for (int r = 1; r <= p.n_rounds; ++r) {
    for (std::size_t i = 0; i < n; ++i) resid[i] = y_train(idx(i)) - f_train(idx(i));
    m.trees.push_back(grow_tree(bins, resid, all, grow, &leaf));
    for (std::size_t i = 0; i < n; ++i) f_train(idx(i)) += p.learning_rate * leaf[i];
    m.train_mse.push_back(mse(y_train, f_train));
    rounds = r;
    if (has_val) {
      const auto& tree = m.trees.back();
      for (Index i = 0; i < x_val.rows(); ++i) f_val(i) += p.learning_rate * tree.predict_row(x_val.row(i));
      const double s = val_score();
      m.validation_curve.push_back(s);
      if (stopper.observe(r, s)) break;
    }
  }
  m.best_iteration = has_val ? stopper.best_iteration() : rounds;
  return m;
}

Vector knn_regress(const Matrix& x_train, const Vector& y_train, const Matrix& x_query, std::size_t k) {
  if (k < 1) throw Error("k must be at least 1");
  const auto n = static_cast<std::size_t>(x_train.rows());
  if (k > n) throw Error("k exceeds the number of training rows");
  if (x_query.cols() != x_train.cols()) throw Error("query feature count mismatch");
  Vector out(x_query.rows());
  parallel_for(static_cast<std::size_t>(x_query.rows()), [&](std::size_t q) {
    std::vector<std::pair<double, std::size_t>> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = {(x_train.row(idx(i)) - x_query.row(idx(q))).squaredNorm(), i};
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += y_train(idx(d[i].second));
    out(idx(q)) = s / static_cast<double>(k);
  });
  return out;
}

Vector KnnModel::predict(const Matrix& q) const {
  Matrix z = (q.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
  return knn_regress(x, y, z, k);
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::gbdt: return "gbdt";
    case ModelKind::random_forest: return "random_forest";
    case ModelKind::extra_trees: return "extra_trees";
    case ModelKind::decision_tree: return "decision_tree";
    case ModelKind::knn: return "knn";
  }
  return "gbdt";
}

ModelKind parse_model_kind(std::string_view text) {
  for (auto k : {ModelKind::gbdt, ModelKind::random_forest, ModelKind::extra_trees, ModelKind::decision_tree,
                 ModelKind::knn})
    if (to_string(k) == text) return k;
  throw Error("unknown model kind '" + std::string(text) + "'");
}

nlohmann::json to_json(const TrainerSpec& s) {
  return {{"kind", to_string(s.kind)},
          {"gbdt",
           {{"n_rounds", s.gbdt.n_rounds},
            {"depth", s.gbdt.depth},
            {"l2_leaf", s.gbdt.l2_leaf},
            {"learning_rate", s.gbdt.learning_rate},
            {"od_wait", s.gbdt.od_wait},
            {"min_leaf", s.gbdt.min_leaf},
            {"max_bins", s.gbdt.max_bins}}},
          {"forest",
           {{"n_trees", s.forest.n_trees},
            {"depth", s.forest.depth},
            {"min_leaf", s.forest.min_leaf},
            {"feature_frac", s.forest.feature_frac},
            {"bootstrap", s.forest.bootstrap}}},
          {"tree", {{"depth", s.tree.depth}, {"min_leaf", s.tree.min_leaf}, {"l2", s.tree.l2}}},
          {"knn_k", s.knn_k},
          {"val_frac", s.val_frac},
          {"log_target", s.log_target}};
}

TrainerSpec trainer_spec_from_json(const nlohmann::json& doc) {
  TrainerSpec s;
  if (doc.contains("kind")) s.kind = parse_model_kind(doc.at("kind").get<std::string>());
  if (auto it = doc.find("gbdt"); it != doc.end()) {
    const auto& g = *it;
    s.gbdt.n_rounds = g.value("n_rounds", s.gbdt.n_rounds);
    s.gbdt.depth = g.value("depth", s.gbdt.depth);
    s.gbdt.l2_leaf = g.value("l2_leaf", s.gbdt.l2_leaf);
    s.gbdt.learning_rate = g.value("learning_rate", s.gbdt.learning_rate);
    s.gbdt.od_wait = g.value("od_wait", s.gbdt.od_wait);
    s.gbdt.min_leaf = g.value("min_leaf", s.gbdt.min_leaf);
    s.gbdt.max_bins = g.value("max_bins", s.gbdt.max_bins);
  }
  if (auto it = doc.find("forest"); it != doc.end()) {
    const auto& f = *it;
    s.forest.n_trees = f.value("n_trees", s.forest.n_trees);
    s.forest.depth = f.value("depth", s.forest.depth);
    s.forest.min_leaf = f.value("min_leaf", s.forest.min_leaf);
    s.forest.feature_frac = f.value("feature_frac", s.forest.feature_frac);
    s.forest.bootstrap = f.value("bootstrap", s.forest.bootstrap);
  }
  if (auto it = doc.find("tree"); it != doc.end()) {
    s.tree.depth = it->value("depth", s.tree.depth);
    s.tree.min_leaf = it->value("min_leaf", s.tree.min_leaf);
    s.tree.l2 = it->value("l2", s.tree.l2);
  }
  s.knn_k = doc.value("knn_k", s.knn_k);
  s.val_frac = doc.value("val_frac", s.val_frac);
  s.log_target = doc.value("log_target", s.log_target);
  return s;
}

Vector Model::predict(const Matrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != features_.size()) throw Error("feature count mismatch");
  Vector p = std::visit([&](const auto& m) -> Vector { return m.predict(x); }, impl_);
  if (log_target_) p = p.array().exp() - 1.0;
  return p;
}

HoldoutSplit holdout_split(const Vector& y, double test_frac, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(y.size());
  auto s = stratified_split_indices(as_span(y), test_frac, std::min(kStratBins, n), seed);
  return {std::move(s.train), std::move(s.test)};
}

Model train(const TrainerSpec& spec, const Matrix& x, const Vector& y_raw, std::vector<std::string> features,
            std::uint64_t seed) {
  if (x.rows() == 0 || x.rows() != y_raw.size()) throw Error("training data is empty or misaligned");
  if (static_cast<std::size_t>(x.cols()) != features.size()) throw Error("feature names do not match X");
  Vector y = y_raw;
  if (spec.log_target) {
    if ((y.array() <= -1.0).any()) throw Error("log target requires y > -1");
    y = y.array().log1p();
  }
  switch (spec.kind) {
    case ModelKind::gbdt: {
      if (spec.gbdt.od_wait > 0) {
        const auto split = holdout_split(y, spec.val_frac, derive_seed(seed, "early_stopping"));
        if (split.test.empty() || split.train.empty()) throw Error("too few rows for an early-stopping split");
        auto m = fit_gbdt(take_rows(x, split.train), take(y, split.train), take_rows(x, split.test),
                          take(y, split.test), spec.gbdt);
        return {spec.kind, std::move(m), std::move(features), spec.log_target};
      }
      auto m = fit_gbdt(x, y, Matrix(0, x.cols()), Vector(0), spec.gbdt);
      return {spec.kind, std::move(m), std::move(features), spec.log_target};
    }
    case ModelKind::random_forest:
    case ModelKind::extra_trees: {
      auto p = spec.forest;
      p.mode = spec.kind == ModelKind::random_forest ? ForestMode::random_forest : ForestMode::extra_trees;
      p.seed = seed;
      return {spec.kind, fit_forest(x, y, p), std::move(features), spec.log_target};
    }
    case ModelKind::decision_tree: return {spec.kind, fit_tree(x, y, spec.tree), std::move(features), spec.log_target};
    case ModelKind::knn: {
      KnnModel k;
      k.k = spec.knn_k;
      k.mean = x.colwise().mean().transpose();
      k.scale = ((x.rowwise() - k.mean.transpose()).array().square().colwise().mean()).sqrt().transpose();
      for (Index j = 0; j < k.scale.size(); ++j)
        if (!(k.scale(j) > 0.0)) k.scale(j) = 1.0;
      k.x = (x.rowwise() - k.mean.transpose()).array().rowwise() / k.scale.transpose().array();
      k.y = y;
      if (k.k < 1 || k.k > static_cast<std::size_t>(x.rows())) throw Error("k must lie in [1, N]");
      return {spec.kind, std::move(k), std::move(features), spec.log_target};
    }
  }
  throw Error("unknown model kind");
}

Dataset make_dataset(const FieldTable& table, std::string_view target) {
  std::vector<std::string> features;
  for (std::size_t j = 0; j < table.numeric_count(); ++j)
    if (table.numeric_meta(j).name != target) features.push_back(table.numeric_meta(j).name);
  return make_dataset(table, target, features);
}

Dataset make_dataset(const FieldTable& table, std::string_view target, const std::vector<std::string>& features) {
  if (!table.find_column(target)) throw Error("target column '" + std::string(target) + "' not found");
  const auto t = table.numeric_index(target);
  const auto n = table.rows();
  Dataset d;
  d.target = std::string(target);
  d.features = features;
  d.x.resize(idx(n), idx(features.size()));
  d.y.resize(idx(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (table.missing(i, t)) throw Error("target has missing cells");
    d.y(idx(i)) = table.numeric()(idx(i), idx(t));
  }
  for (std::size_t f = 0; f < features.size(); ++f) {
    const auto j = table.numeric_index(features[f]);
    for (std::size_t i = 0; i < n; ++i) {
      if (table.missing(i, j)) throw Error("feature '" + features[f] + "' has missing cells; impute first");
      d.x(idx(i), idx(f)) = table.numeric()(idx(i), idx(j));
    }
  }
  return d;
}

Dataset subset(const Dataset& d, std::span<const std::size_t> rows) {
  return {take_rows(d.x, rows), take(d.y, rows), d.features, d.target};
}

Dataset select_features(const Dataset& d, const std::vector<std::string>& features) {
  Dataset out{Matrix(d.x.rows(), idx(features.size())), d.y, features, d.target};
  for (std::size_t f = 0; f < features.size(); ++f) {
    auto it = std::find(d.features.begin(), d.features.end(), features[f]);
    if (it == d.features.end()) throw Error("unknown feature '" + features[f] + "'");
    out.x.col(idx(f)) = d.x.col(it - d.features.begin());
  }
  return out;
}

std::vector<std::size_t> fold_sizes(std::size_t n, std::size_t k) {
  if (k < 2) throw Error("k must be at least 2");
  if (k > n) throw Error("k exceeds the number of rows");
  std::vector<std::size_t> sizes(k, n / k);
  for (std::size_t f = 0; f < n % k; ++f) ++sizes[f];
  return sizes;
}

nlohmann::json CvReport::to_json() const {
  return {{"fold_r2", fold_r2}, {"fold_sizes", fold_sizes}, {"mean", mean}, {"std", std}, {"test_r2", test_r2}};
}

CvReport kfold_cv(const Dataset& data, const TrainerSpec& spec, const CvOptions& o, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(data.y.size());
  if (o.k < 2) throw Error("k must be at least 2");
  std::vector<std::size_t> cv_rows, test_rows;
  if (o.test_frac > 0.0) {
    auto split = holdout_split(data.y, o.test_frac, derive_seed(seed, "holdout"));
    cv_rows = std::move(split.train);
    test_rows = std::move(split.test);
  } else {
    cv_rows.resize(n);
    std::iota(cv_rows.begin(), cv_rows.end(), std::size_t{0});
  }
  Rng rng(derive_seed(seed, "folds"));
  rng.shuffle(cv_rows.begin(), cv_rows.end());
  CvReport rep;
  rep.fold_sizes = fold_sizes(cv_rows.size(), o.k);
  std::vector<std::size_t> start(o.k + 1, 0);
  for (std::size_t f = 0; f < o.k; ++f) start[f + 1] = start[f] + rep.fold_sizes[f];

  rep.fold_r2.resize(o.k);
  parallel_for(o.k, [&](std::size_t f) {
    std::vector<std::size_t> tr, va;
    for (std::size_t p = 0; p < cv_rows.size(); ++p) (p >= start[f] && p < start[f + 1] ? va : tr).push_back(cv_rows[p]);
    std::sort(tr.begin(), tr.end());
    std::sort(va.begin(), va.end());
    const auto model = train(spec, take_rows(data.x, tr), take(data.y, tr), data.features, derive_seed(seed, f));
    rep.fold_r2[f] = r2_score(take(data.y, va), model.predict(take_rows(data.x, va)));
  });
  rep.mean = std::accumulate(rep.fold_r2.begin(), rep.fold_r2.end(), 0.0) / static_cast<double>(o.k);
  double ss = 0.0;
  for (double r : rep.fold_r2) ss += (r - rep.mean) * (r - rep.mean);
  rep.std = std::sqrt(ss / static_cast<double>(o.k));

  if (o.evaluate_test && !test_rows.empty()) {
    std::vector<std::size_t> all = cv_rows;
    std::sort(all.begin(), all.end());
    const auto model = train(spec, take_rows(data.x, all), take(data.y, all), data.features, derive_seed(seed, "final"));
    const Vector yt = take(data.y, test_rows);
    const Vector pt = model.predict(take_rows(data.x, test_rows));
    rep.test_r2 = r2_score(yt, pt);
    rep.test_pred.assign(pt.data(), pt.data() + pt.size());
    rep.test_y.assign(yt.data(), yt.data() + yt.size());
  }
  return rep;
}

CvReport kfold_cv(const FieldTable& table, std::string_view target, const TrainerSpec& spec, std::size_t k,
                  std::uint64_t seed) {
  return kfold_cv(make_dataset(table, target), spec, CvOptions{k, 0.2, true}, seed);
}

Grid Grid::full_default() {
  Grid g;
  for (int d = 2; d <= 16; ++d) g.depth.push_back(d);
  for (int i = 0; i <= 20; ++i) g.l2_leaf.push_back(i / 10.0);
  return g;
}

std::vector<std::vector<std::string>> GridResult::table() const {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : cells)
    rows.push_back({std::to_string(c.depth), csv::format_double(c.l2_leaf), csv::format_double(c.cv_mean),
                    csv::format_double(c.cv_std)});
  return rows;
}

GridResult grid_search(const Dataset& data, const Grid& grid, const TrainerSpec& fixed, const CvOptions& options,
                       std::uint64_t seed) {
  if (grid.depth.empty() || grid.l2_leaf.empty()) throw Error("grid must be nonempty");
  auto depths = grid.depth;
  auto l2s = grid.l2_leaf;
  std::sort(depths.begin(), depths.end());
  std::sort(l2s.begin(), l2s.end());
  GridResult res;
  for (int d : depths)
    for (double l : l2s) res.cells.push_back({d, l, 0.0, 0.0});
  CvOptions o = options;
  o.evaluate_test = false;
  parallel_for(res.cells.size(), [&](std::size_t c) {
    auto spec = fixed;
    spec.kind = ModelKind::gbdt;
    spec.gbdt.depth = res.cells[c].depth;
    spec.gbdt.l2_leaf = res.cells[c].l2_leaf;
    const auto rep = kfold_cv(data, spec, o, seed);
    res.cells[c].cv_mean = rep.mean;
    res.cells[c].cv_std = rep.std;
  });
  for (std::size_t c = 1; c < res.cells.size(); ++c)
    if (res.cells[c].cv_mean > res.cells[res.best_index].cv_mean) res.best_index = c;
  res.best = fixed.gbdt;
  res.best.depth = res.cells[res.best_index].depth;
  res.best.l2_leaf = res.cells[res.best_index].l2_leaf;
  return res;
}

Selection select_model(const std::vector<Candidate>& candidates, std::size_t ensemble_size) {
  if (candidates.empty()) throw Error("no candidates to select from");
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = candidates[a].report;
    const auto& rb = candidates[b].report;
    if (ra.test_r2 != rb.test_r2) return ra.test_r2 > rb.test_r2;
    return candidates[a].name < candidates[b].name;
  });
  const auto& best = candidates[order.front()];
  Selection s{best.name, best.report.test_r2, best.report.test_r2, {best.name}};

  const auto m = std::min(ensemble_size, candidates.size());
  if (m < 2) return s;
  const auto& ref = best.report.test_y;
  std::vector<double> avg(ref.size(), 0.0);
  std::vector<std::string> members;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& r = candidates[order[i]].report;
    if (r.test_y != ref || r.test_pred.size() != ref.size()) throw Error("candidates were scored on different test sets");
    for (std::size_t k = 0; k < ref.size(); ++k) avg[k] += r.test_pred[k] / static_cast<double>(m);
    members.push_back(candidates[order[i]].name);
  }
  if (ref.size() < 2) return s;
  s.ensemble_r2 = r2_score(ref, avg);
  s.ensemble_members = std::move(members);
  if (s.ensemble_r2 > s.test_r2) {
    s.name = std::string(kEnsembleName);
    s.test_r2 = s.ensemble_r2;
  }
  return s;
}

}  // namespace fracflow::regress
