#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "fixtures.hpp"
#include "fracflow/error.hpp"
#include "fracflow/regress.hpp"
#include "fracflow/structure.hpp"
#include "fracflow/synthgen.hpp"

using namespace fracflow;
using namespace fracflow::synth;

namespace {

SynthConfig small(int wells = 600) {
  SynthConfig c;
  c.n_wells = wells;
  c.n_fields = 6;
  return c;
}

bool same_cells(const FieldTable& a, const FieldTable& b) {
  if (a.rows() != b.rows() || a.numeric_count() != b.numeric_count()) return false;
  if (a.categorical_count() != b.categorical_count()) return false;
  if ((a.numeric_missing() != b.numeric_missing()).any() || (a.categorical_missing() != b.categorical_missing()).any())
    return false;
  if (a.categorical() != b.categorical()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.numeric_count(); ++j)
      if (!a.missing(i, j) && a.numeric()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) !=
                                  b.numeric()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
        return false;
  return true;
}

}  // namespace

TEST(Synth, ShapeAndMissingFraction) {
  const auto db = generate_synth_db(small(2000));
  EXPECT_EQ(db.table.rows(), 2000u);
  EXPECT_EQ(input_columns(db.table).size(), 50u);
  const double f = realized_missing_fraction(db.truth);
  EXPECT_GE(f, 0.19);
  EXPECT_LE(f, 0.21);
  EXPECT_EQ(db.truth.true_target.size(), 2000u);
}

TEST(Synth, SameSeedSameDatabase) {
  const auto a = generate_synth_db(small());
  const auto b = generate_synth_db(small());
  EXPECT_TRUE(same_cells(a.table, b.table));
  EXPECT_EQ(a.truth.noisy_target, b.truth.noisy_target);
  EXPECT_EQ(a.truth.ledger.size(), b.truth.ledger.size());
  const auto c = generate_synth_db(small(), 8);
  EXPECT_NE(a.truth.noisy_target, c.truth.noisy_target);
}

TEST(Synth, LedgerReplayRestoresCleanTable) {
  const auto db = generate_synth_db(small());
  EXPECT_TRUE(same_cells(replay_ledger(db.table, db.truth.ledger), db.truth.clean));
  EXPECT_FALSE(same_cells(db.table, db.truth.clean));
}

TEST(Synth, TrueTargetIsStable) {
  const auto db = generate_synth_db(small());
  for (std::size_t i = 0; i < db.table.rows(); i += 37) EXPECT_EQ(true_target(db.truth, i), db.truth.true_target[i]);
}

TEST(Synth, NoiselessCeilingIsOne) {
  auto c = SynthConfig::noiseless(small());
  const auto db = generate_synth_db(c);
  EXPECT_TRUE(db.truth.ledger.empty());
  EXPECT_DOUBLE_EQ(regress::r2_score(db.truth.noisy_target, db.truth.true_target), 1.0);
}

TEST(Synth, NoiselessTargetIsRecoverableFromItsBasis) {
  // Least squares on the raw terms of the planted function, built without
  // the generator's standardization constants.
  const auto db = generate_synth_db(SynthConfig::noiseless(small(1500)));
  const auto d = regress::make_dataset(db.truth.clean, "cum_oil_3m", relevant_features());
  const auto n = d.x.rows();
  std::vector<double> pad(d.x.col(9).data(), d.x.col(9).data() + n);
  std::nth_element(pad.begin(), pad.begin() + n / 2, pad.end());
  const double med = pad[static_cast<std::size_t>(n / 2)];
  Matrix b(n, 13);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto v = d.x.row(i);
    b.row(i) << 1.0, v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7), v(4) * v(5), v(6) * v(7),
        std::exp(-v(8) / 2.0), v(9) > med ? 1.0 : 0.0;
  }
  const Vector w = b.colPivHouseholderQr().solve(d.y);
  EXPECT_GE(regress::r2_score(d.y, Vector(b * w)), 0.999);
}

TEST(Synth, NoiselessDataShowsPlantedClusters) {
  const auto db = generate_synth_db(SynthConfig::noiseless(small(2000)));
  const auto inputs = input_columns(db.truth.clean);
  const auto z = standardize(db.truth.clean).table;
  Matrix x(static_cast<Eigen::Index>(z.rows()), static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t j = 0; j < inputs.size(); ++j)
    x.col(static_cast<Eigen::Index>(j)) = z.numeric().col(static_cast<Eigen::Index>(z.numeric_index(inputs[j])));
  const std::size_t min_pts = 2 * inputs.size();
  const auto l = structure::dbscan(x, structure::default_eps(x, min_pts), min_pts);
  EXPECT_EQ(l.cluster_count(), 3);
}

TEST(Synth, RejectsBadRates) {
  auto c = small();
  c.missing_frac = 1.5;
  try {
    generate_synth_db(c);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("missing_frac"), std::string::npos);
  }
  c = small();
  c.n_fields = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Synth, ConfigJsonRoundTrip) {
  auto c = small();
  c.row_seed = 99;
  const auto back = SynthConfig::from_json(c.to_json());
  EXPECT_EQ(back.n_wells, c.n_wells);
  EXPECT_EQ(back.row_seed, c.row_seed);
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(Synth, PinnedStatsKeepTargetFunction) {
  const auto a = generate_synth_db(small());
  auto c = small();
  c.row_seed = 1234;
  c.target_stats = a.truth.stats;
  const auto b = generate_synth_db(c);
  const auto d = regress::make_dataset(b.truth.clean, "cum_oil_3m", relevant_features());
  const Vector t = planted_target(a.truth.stats, d.x);
  for (Eigen::Index i = 0; i < t.size(); ++i) EXPECT_NEAR(t(i), b.truth.true_target[static_cast<std::size_t>(i)], 1e-9);
}

TEST(BestRankK, Properties) {
  Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix x = fixtures::random_matrix(12, 8, rng, -1, 1);
    EXPECT_NEAR(best_rank_k_error(x, 0), x.norm(), 1e-12);
    EXPECT_NEAR(best_rank_k_error(x, 8), 0.0, 1e-10);
    for (std::size_t k = 1; k <= 8; ++k) EXPECT_LE(best_rank_k_error(x, k), best_rank_k_error(x, k - 1) + 1e-12);
    const Eigen::JacobiSVD<Matrix> svd(x);
    const auto& s = svd.singularValues();
    EXPECT_NEAR(best_rank_k_error(x, 2), std::sqrt(s.tail(6).squaredNorm()), 1e-10);
  }
}

TEST(BruteDbscan, MatchesFastOnRandomInstances) {
  Rng rng(4);
  for (int rep = 0; rep < 40; ++rep) {
    const Matrix x = fixtures::random_matrix(25, 2, rng, 0, 3);
    const auto a = structure::dbscan(x, 0.5, 3).labels;
    const auto b = brute_force_dbscan(x, 0.5, 3).labels;
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i] < 0, b[i] < 0);
  }
}

TEST(Synth, WritesDatabaseTree) {
  fixtures::TempDir dir("synth");
  write_synth_db(generate_synth_db(small(100)), dir.path.string());
  EXPECT_TRUE(std::filesystem::exists(dir.path / "table.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir.path / "ground_truth.json"));
  EXPECT_TRUE(std::filesystem::is_directory(dir.path / "sources"));
  EXPECT_TRUE(std::filesystem::is_directory(dir.path / "dicts"));
}
