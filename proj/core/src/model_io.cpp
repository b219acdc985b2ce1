#include <fstream>

#include "fracflow/error.hpp"
#include "fracflow/regress.hpp"
#include "fracflow/table_io.hpp"

namespace fracflow::regress {

namespace {

constexpr int kModelFormat = 1;

nlohmann::json tree_to_json(const Tree& t) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : t.nodes()) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.count, n.gain});
  return nodes;
}

Tree tree_from_json(const nlohmann::json& doc) {
  std::vector<TreeNode> nodes;
  for (const auto& a : doc) {
    if (!a.is_array() || a.size() != 7) throw Error("malformed tree node");
    TreeNode n;
    n.feature = a[0].get<int>();
    n.threshold = a[1].get<double>();
    n.left = a[2].get<int>();
    n.right = a[3].get<int>();
    n.value = a[4].get<double>();
    n.count = a[5].get<std::size_t>();
    n.gain = a[6].get<double>();
    nodes.push_back(n);
  }
  const auto size = static_cast<int>(nodes.size());
  for (const auto& n : nodes)
    if (!n.is_leaf() && (n.left <= 0 || n.right <= 0 || n.left >= size || n.right >= size))
      throw Error("tree node child index out of range");
  if (nodes.empty()) throw Error("empty tree");
  return Tree(std::move(nodes));
}

nlohmann::json trees_to_json(const std::vector<Tree>& trees) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : trees) out.push_back(tree_to_json(t));
  return out;
}

std::vector<Tree> trees_from_json(const nlohmann::json& doc) {
  std::vector<Tree> out;
  for (const auto& t : doc) out.push_back(tree_from_json(t));
  return out;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(r);
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& doc, Eigen::Index cols) {
  Matrix m(static_cast<Eigen::Index>(doc.size()), cols);
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto r = doc[i].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(r.size()) != cols) throw Error("matrix row width mismatch");
    for (std::size_t j = 0; j < r.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[j];
  }
  return m;
}

Vector vector_from_json(const nlohmann::json& doc) {
  const auto v = doc.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

nlohmann::json model_to_json(const Model& model) {
  nlohmann::json doc = {{"schema_version", kModelFormat},
                        {"kind", to_string(model.kind())},
                        {"features", model.features()},
                        {"target", model.target},
                        {"log_target", model.log_target()}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GbdtModel>) {
          doc["base_score"] = m.base_score;
          doc["learning_rate"] = m.learning_rate;
          doc["depth"] = m.depth;
          doc["l2_leaf"] = m.l2_leaf;
          doc["best_iteration"] = m.best_iteration;
          doc["validation_curve"] = m.validation_curve;
          doc["train_mse"] = m.train_mse;
          doc["trees"] = trees_to_json(m.trees);
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          doc["trees"] = trees_to_json(m.trees);
        } else if constexpr (std::is_same_v<T, Tree>) {
          doc["trees"] = trees_to_json({m});
        } else {
          doc["k"] = m.k;
          doc["mean"] = to_std(m.mean);
          doc["scale"] = to_std(m.scale);
          doc["x"] = matrix_to_json(m.x);
          doc["y"] = to_std(m.y);
        }
      },
      model.impl());
  return doc;
}

Model model_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("schema_version", 0) != kModelFormat) throw Error("unsupported model format version");
    const auto kind = parse_model_kind(doc.at("kind").get<std::string>());
    auto features = doc.at("features").get<std::vector<std::string>>();
    const bool log_target = doc.value("log_target", false);
    Model::Variant impl;
    switch (kind) {
      case ModelKind::gbdt: {
        GbdtModel m;
        m.base_score = doc.at("base_score").get<double>();
        m.learning_rate = doc.at("learning_rate").get<double>();
        m.depth = doc.at("depth").get<int>();
        m.l2_leaf = doc.at("l2_leaf").get<double>();
        m.best_iteration = doc.at("best_iteration").get<int>();
        m.validation_curve = doc.value("validation_curve", std::vector<double>{});
        m.train_mse = doc.value("train_mse", std::vector<double>{});
        m.trees = trees_from_json(doc.at("trees"));
        if (m.best_iteration < 0 || static_cast<std::size_t>(m.best_iteration) > m.trees.size())
          throw Error("best_iteration exceeds tree count");
        impl = std::move(m);
        break;
      }
      case ModelKind::random_forest:
      case ModelKind::extra_trees: impl = ForestModel{trees_from_json(doc.at("trees"))}; break;
      case ModelKind::decision_tree: {
        auto trees = trees_from_json(doc.at("trees"));
        if (trees.size() != 1) throw Error("decision tree model must hold one tree");
        impl = std::move(trees.front());
        break;
      }
      case ModelKind::knn: {
        KnnModel m;
        m.k = doc.at("k").get<std::size_t>();
        m.mean = vector_from_json(doc.at("mean"));
        m.scale = vector_from_json(doc.at("scale"));
        m.x = matrix_from_json(doc.at("x"), static_cast<Eigen::Index>(features.size()));
        m.y = vector_from_json(doc.at("y"));
        impl = std::move(m);
        break;
      }
    }
    for (const auto* trees : {std::get_if<GbdtModel>(&impl) ? &std::get<GbdtModel>(impl).trees : nullptr,
                              std::get_if<ForestModel>(&impl) ? &std::get<ForestModel>(impl).trees : nullptr})
      if (trees)
        for (const auto& t : *trees)
          for (const auto& n : t.nodes())
            if (n.feature >= static_cast<int>(features.size())) throw Error("tree references an unknown feature");
    Model m(kind, std::move(impl), std::move(features), log_target);
    m.target = doc.value("target", std::string());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed model JSON: ") + e.what());
  }
}

void save_model(const Model& model, const std::string& path) { write_json(model_to_json(model), path); }

Model load_model(const std::string& path) { return model_from_json(read_json(path)); }

}  // namespace fracflow::regress
