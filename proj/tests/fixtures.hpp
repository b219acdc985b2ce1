#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "fracflow/rng.hpp"
#include "fracflow/table.hpp"

namespace fixtures {

using fracflow::ColumnMeta;
using fracflow::FieldTable;
using fracflow::Mask;
using fracflow::Matrix;
using fracflow::RowKey;

inline std::vector<RowKey> keys(std::size_t n) {
  std::vector<RowKey> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({"F1", "W" + std::to_string(1000 + i), "L1", 18000});
  return out;
}

/// All-numeric table; NaN cells become missing. `target` marks a column.
inline FieldTable numeric_table(const Matrix& x, int target = -1) {
  std::vector<ColumnMeta> schema;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    ColumnMeta m;
    m.name = "c" + std::to_string(j);
    m.is_target = j == target;
    if (m.is_target) m.group = fracflow::ColumnGroup::production;
    schema.push_back(m);
  }
  Mask mask = x.array().isNaN();
  return FieldTable::numeric_only(keys(static_cast<std::size_t>(x.rows())), schema, x, mask);
}

inline Matrix random_matrix(Eigen::Index r, Eigen::Index c, fracflow::Rng& rng, double lo = 0.0, double hi = 1.0) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

/// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("fracflow_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace fixtures
