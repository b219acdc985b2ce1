#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "fixtures.hpp"
#include "fracflow/error.hpp"
#include "fracflow/table.hpp"
#include "fracflow/table_io.hpp"

using namespace fracflow;
using fixtures::numeric_table;

namespace {
constexpr double NaN = std::numeric_limits<double>::quiet_NaN();
}

TEST(MissingFraction, PerRowCounts) {
  Matrix x = Matrix::Ones(2, 50);
  for (int j = 0; j < 33; ++j) x(1, j) = NaN;
  const auto f = missing_fraction(numeric_table(x), Axis::per_row);
  EXPECT_DOUBLE_EQ(f[0], 0.0);
  EXPECT_DOUBLE_EQ(f[1], 0.66);
}

TEST(MissingFraction, PerColumnByHand) {
  Matrix x(2, 2);
  x << 1, 2, NaN, 4;
  const auto f = missing_fraction(numeric_table(x), Axis::per_column);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_DOUBLE_EQ(f[0], 0.5);
  EXPECT_DOUBLE_EQ(f[1], 0.0);
}

TEST(MissingFraction, RowAverageEqualsTotal) {
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix x = fixtures::random_matrix(17, 9, rng);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j)
        if (rng.uniform() < 0.3) x(i, j) = NaN;
    const auto t = numeric_table(x);
    const auto f = missing_fraction(t, Axis::per_row);
    const double avg = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
    EXPECT_NEAR(avg, static_cast<double>(t.missing_cells()) / static_cast<double>(t.cell_count()), 1e-12);
    EXPECT_EQ(t.missing_cells() + static_cast<std::size_t>((!t.numeric_missing()).count()), t.cell_count());
  }
}

TEST(Standardize, TwoValues) {
  Matrix x(2, 1);
  x << 1, 3;
  const auto s = standardize(numeric_table(x));
  EXPECT_DOUBLE_EQ(s.means[0], 2.0);
  EXPECT_DOUBLE_EQ(s.stds[0], 1.0);
  EXPECT_DOUBLE_EQ(*s.table.value(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(*s.table.value(1, 0), 1.0);
}

TEST(Standardize, ConstantColumnMapsToZero) {
  Matrix x = Matrix::Constant(3, 1, 5.0);
  const auto s = standardize(numeric_table(x));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(*s.table.value(i, 0), 0.0);
  EXPECT_EQ(s.stds[0], 0.0);
}

TEST(Standardize, StatisticsOverObservedCells) {
  Matrix x(3, 1);
  x << 4, NaN, 6;
  const auto s = standardize(numeric_table(x));
  EXPECT_DOUBLE_EQ(*s.table.value(0, 0), -1.0);
  EXPECT_FALSE(s.table.value(1, 0).has_value());
  EXPECT_DOUBLE_EQ(*s.table.value(2, 0), 1.0);
}

TEST(Standardize, InverseRoundTrip) {
  Rng rng(11);
  Matrix x = fixtures::random_matrix(40, 6, rng, -50.0, 900.0);
  x(3, 2) = NaN;
  const auto t = numeric_table(x);
  const auto s = standardize(t);
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.numeric_count(); ++j) {
      if (t.missing(i, j)) continue;
      const double back = unstandardize(*s.table.value(i, j), s.means[j], s.stds[j]);
      EXPECT_NEAR(back, *t.value(i, j), 1e-12 * std::abs(*t.value(i, j)));
    }
}

TEST(StratifiedSplit, QuartileCounts) {
  std::vector<double> y(100);
  std::iota(y.begin(), y.end(), 0.0);
  const auto s = stratified_split_indices(y, 0.2, 4, 5);
  EXPECT_EQ(s.test.size(), 20u);
  int per_bin[4] = {0, 0, 0, 0};
  for (auto i : s.test) ++per_bin[i / 25];
  for (int b = 0; b < 4; ++b) EXPECT_EQ(per_bin[b], 5);
}

TEST(StratifiedSplit, PartitionAndDeterminism) {
  Rng rng(1);
  std::vector<double> y(137);
  for (auto& v : y) v = rng.normal();
  for (std::size_t bins : {1u, 3u, 10u}) {
    const auto a = stratified_split_indices(y, 0.25, bins, 42);
    const auto b = stratified_split_indices(y, 0.25, bins, 42);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    std::set<std::size_t> all(a.train.begin(), a.train.end());
    for (auto i : a.test) EXPECT_TRUE(all.insert(i).second);
    EXPECT_EQ(all.size(), y.size());
  }
}

TEST(StratifiedSplit, TablePairKeepsRows) {
  Rng rng(2);
  Matrix x = fixtures::random_matrix(50, 3, rng);
  const auto t = numeric_table(x, 2);
  const auto p = stratified_split(t, "c2", 0.2, 5, 9);
  EXPECT_EQ(p.train.rows() + p.test.rows(), 50u);
  EXPECT_EQ(p.test.rows(), 10u);
}

TEST(FieldTable, RejectsDuplicateNames) {
  std::vector<ColumnMeta> schema(2);
  schema[0].name = schema[1].name = "a";
  EXPECT_THROW(FieldTable::numeric_only(fixtures::keys(1), schema, Matrix::Zero(1, 2), Mask::Constant(1, 2, false)),
               Error);
}

TEST(FieldTable, RejectsTwoTargets) {
  std::vector<ColumnMeta> schema(2);
  schema[0].name = "a";
  schema[1].name = "b";
  schema[0].is_target = schema[1].is_target = true;
  EXPECT_THROW(FieldTable::numeric_only(fixtures::keys(1), schema, Matrix::Zero(1, 2), Mask::Constant(1, 2, false)),
               Error);
}

TEST(FieldTable, RejectsDuplicateKeys) {
  std::vector<ColumnMeta> schema(1);
  schema[0].name = "a";
  auto k = fixtures::keys(2);
  k[1] = k[0];
  EXPECT_THROW(FieldTable::numeric_only(k, schema, Matrix::Zero(2, 1), Mask::Constant(2, 1, false)), Error);
}

TEST(FieldTable, RejectsMaskShapeMismatch) {
  std::vector<ColumnMeta> schema(1);
  schema[0].name = "a";
  EXPECT_THROW(FieldTable::numeric_only(fixtures::keys(2), schema, Matrix::Zero(2, 1), Mask::Constant(1, 1, false)),
               Error);
}

TEST(FieldTable, MaskedValueIsNeverExposed) {
  Matrix x(1, 1);
  x << 7.0;
  std::vector<ColumnMeta> schema(1);
  schema[0].name = "a";
  const auto t = FieldTable::numeric_only(fixtures::keys(1), schema, x, Mask::Constant(1, 1, true));
  EXPECT_FALSE(t.value(0, 0).has_value());
  EXPECT_TRUE(std::isnan(t.numeric()(0, 0)));
}

TEST(TableIo, RoundTripsMixedTable) {
  fixtures::TempDir dir("table_io");
  std::vector<ColumnMeta> schema = {{"depth", ColumnKind::numeric, ColumnGroup::well, "m", false},
                                    {"fluid", ColumnKind::categorical, ColumnGroup::design, "", false},
                                    {"cum_oil_3m", ColumnKind::numeric, ColumnGroup::production, "t", true}};
  Matrix num(2, 2);
  num << 1.5, 100.0, 0.1, 200.25;
  Mask nm(2, 2);
  nm << false, false, true, false;
  std::vector<std::vector<std::string>> cat = {{"slick, water", "gel \"x\""}};
  Mask cm(2, 1);
  cm << false, false;
  FieldTable t(fixtures::keys(2), schema, num, nm, cat, cm);
  write_table(t, dir / "t.csv");
  const auto back = read_table(dir / "t.csv");
  EXPECT_EQ(back.schema(), t.schema());
  EXPECT_EQ(back.keys(), t.keys());
  EXPECT_EQ(back.categorical(), t.categorical());
  EXPECT_TRUE((back.numeric_missing() == t.numeric_missing()).all());
  EXPECT_EQ(*back.value(1, 1), 200.25);
  EXPECT_EQ(back.require_target(), 1u);
}

TEST(Dates, CivilRoundTrip) {
  EXPECT_EQ(days_from_civil(1970, 1, 1), 0);
  EXPECT_EQ(days_from_civil(2000, 3, 1), 11017);
  const auto d = days_from_civil(2016, 7, 19);
  EXPECT_EQ(month_index(d), 2016 * 12 + 6);
  EXPECT_EQ(month_start(month_index(d)), days_from_civil(2016, 7, 1));
}
