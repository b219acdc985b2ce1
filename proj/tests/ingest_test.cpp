#include <gtest/gtest.h>

#include <functional>
#include <map>

#include "fixtures.hpp"
#include "fracflow/error.hpp"
#include "fracflow/ingest.hpp"
#include "fracflow/rng.hpp"
#include "fracflow/table_io.hpp"

using namespace fracflow;
using namespace fracflow::ingest;

namespace {

// Memoized recursion on suffixes; shares nothing with the library's row DP.
std::size_t edit_oracle(const std::string& a, const std::string& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    best = std::min({best, go(i + 1, j) + 1, go(i, j + 1) + 1});
    return memo[key] = best;
  };
  return go(0, 0);
}

std::vector<std::string> all_ab_strings(std::size_t max_len) {
  std::vector<std::string> out = {""};
  for (std::size_t len = 1; len <= max_len; ++len)
    for (std::size_t bits = 0; bits < (1u << len); ++bits) {
      std::string s;
      for (std::size_t k = 0; k < len; ++k) s += (bits >> k) & 1 ? 'b' : 'a';
      out.push_back(s);
    }
  return out;
}

std::string random_word(Rng& rng, std::size_t max_len) {
  std::string s;
  const auto len = rng.index(max_len + 1);
  for (std::size_t i = 0; i < len; ++i) s += static_cast<char>('a' + rng.index(4));
  return s;
}

LogInterval interval(double top, double bottom, std::optional<double> por, bool pay) {
  LogInterval iv;
  iv.top = top;
  iv.bottom = bottom;
  iv.porosity = por;
  iv.pay = pay;
  return iv;
}

std::string date(int y, unsigned m, unsigned d) { return format_date(days_from_civil(y, m, d)); }

}  // namespace

TEST(Levenshtein, Examples) {
  EXPECT_EQ(levenshtein("abc", "abc"), 0u);
  EXPECT_EQ(levenshtein("", "abc"), 3u);
  EXPECT_EQ(levenshtein("kitten", "sitting"), 3u);
}

TEST(Levenshtein, MatchesOracleExhaustivelyOverAb) {
  const auto words = all_ab_strings(6);
  ASSERT_EQ(words.size(), 127u);
  for (const auto& a : words)
    for (const auto& b : words) ASSERT_EQ(levenshtein(a, b), edit_oracle(a, b)) << a << " " << b;
}

TEST(Levenshtein, MetricAxioms) {
  Rng rng(17);
  for (int rep = 0; rep < 2000; ++rep) {
    const auto a = random_word(rng, 8), b = random_word(rng, 8), c = random_word(rng, 8);
    EXPECT_EQ(levenshtein(a, a), 0u);
    EXPECT_EQ(levenshtein(a, b), levenshtein(b, a));
    EXPECT_LE(levenshtein(a, c), levenshtein(a, b) + levenshtein(b, c));
  }
}

TEST(NormalizeCategory, Examples) {
  const CategoryDictionary dict({"proppant-a"}, 2);
  auto n = normalize_category("Propant-A", dict);
  EXPECT_EQ(n.token, "proppant-a");
  EXPECT_TRUE(n.matched);
  n = normalize_category("proppant-a", dict);
  EXPECT_EQ(n.token, "proppant-a");
  EXPECT_TRUE(n.matched);
  n = normalize_category("xyz", dict);
  EXPECT_EQ(n.token, "xyz");
  EXPECT_FALSE(n.matched);
}

TEST(NormalizeCategory, IdempotentOnCanonicalTokens) {
  const CategoryDictionary dict({"guar", "carboxymethyl guar", "hydroxypropyl guar"}, 2);
  for (const auto& c : dict.canonical) {
    const auto once = normalize_category(c, dict);
    EXPECT_EQ(once.token, c);
    EXPECT_EQ(normalize_category(once.token, dict).token, c);
  }
}

TEST(CategoryDictionary, RejectsCloseCanonicalTokens) {
  EXPECT_THROW(CategoryDictionary({"gel", "gal"}, 2), Error);
  EXPECT_NO_THROW(CategoryDictionary({"gel", "gal"}, 0));
}

TEST(ParseCell, Examples) {
  EXPECT_DOUBLE_EQ(*parse_cell("42.5"), 42.5);
  EXPECT_DOUBLE_EQ(*parse_cell("1000-2000"), 1500.0);
  EXPECT_FALSE(parse_cell("n/a").has_value());
  EXPECT_FALSE(parse_cell("").has_value());
  EXPECT_FALSE(parse_cell("2000-1000").has_value());
}

TEST(ParseDate, IsoAndDayCount) {
  EXPECT_EQ(*parse_date("1970-01-02"), 1);
  EXPECT_EQ(*parse_date("17000"), 17000);
  EXPECT_FALSE(parse_date("yesterday").has_value());
  EXPECT_EQ(format_date(days_from_civil(2015, 3, 9)), "2015-03-09");
}

TEST(WellLogs, EqualWeightMean) {
  const auto f = aggregate_well_logs({interval(0, 1, 0.1, true), interval(1, 2, 0.3, true)}, 0, 2);
  EXPECT_NEAR(*f.perforation.porosity.mean, 0.2, 1e-15);
  EXPECT_NEAR(*f.perforation.porosity.median, 0.2, 1e-15);
}

TEST(WellLogs, LengthWeightedMean) {
  const auto f = aggregate_well_logs({interval(0, 3, 0.1, true), interval(3, 4, 0.5, true)});
  EXPECT_NEAR(*f.layer.porosity.mean, 0.2, 1e-15);
  EXPECT_NEAR(*f.layer.porosity.median, 0.1, 1e-15);
}

TEST(WellLogs, NetToGross) {
  const auto f = aggregate_well_logs({interval(0, 2, 0.2, true), interval(2, 4, 0.05, false)});
  EXPECT_DOUBLE_EQ(*f.layer.ntg, 0.5);
}

TEST(WellLogs, StratificationCountsImpermeableRuns) {
  const auto f = aggregate_well_logs(
      {interval(0, 1, 0.2, true), interval(1, 2, 0.0, false), interval(2, 3, 0.2, true), interval(3, 4, 0.0, false)});
  EXPECT_DOUBLE_EQ(*f.layer.strat_factor, 2.0);
}

TEST(WellLogs, ThinShaleBelowResolutionIsIgnored) {
  const auto f = aggregate_well_logs(
      {interval(0, 1, 0.2, true), interval(1, 1.1, 0.0, false), interval(1.1, 2, 0.2, true)});
  EXPECT_DOUBLE_EQ(*f.layer.strat_factor, 0.0);
}

TEST(WellLogs, WindowClipsIntervals) {
  const auto f = aggregate_well_logs({interval(0, 2, 0.1, true), interval(2, 4, 0.3, false)}, 1, 3);
  EXPECT_NEAR(*f.perforation.porosity.mean, 0.2, 1e-15);
  EXPECT_DOUBLE_EQ(*f.perforation.ntg, 0.5);
  EXPECT_NEAR(*f.layer.porosity.mean, 0.2, 1e-15);
}

TEST(WellLogs, RandomIntervalsKeepBounds) {
  Rng rng(5);
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<LogInterval> ivs;
    double top = 0.0;
    const auto n = 1 + rng.index(8);
    for (std::size_t k = 0; k < n; ++k) {
      const double len = rng.uniform(0.3, 3.0);
      ivs.push_back(interval(top, top + len, rng.uniform(0.0, 0.3), rng.uniform() < 0.5));
      top += len;
    }
    const auto f = aggregate_well_logs(ivs);
    EXPECT_GE(*f.layer.ntg, 0.0);
    EXPECT_LE(*f.layer.ntg, 1.0);
    EXPECT_LE(*f.layer.strat_factor, static_cast<double>(n));
  }
}

TEST(WeightedMedian, EqualWeightsGiveOrdinaryMedian) {
  EXPECT_DOUBLE_EQ(weighted_median({{1, 1}, {2, 1}, {3, 1}, {4, 1}}), 2.5);
  EXPECT_DOUBLE_EQ(weighted_median({{5, 1}, {1, 1}, {3, 1}}), 3.0);
  EXPECT_DOUBLE_EQ(weighted_median({{1, 1}, {10, 5}}), 10.0);
}

TEST(ConsolidateStages, SumsAndAverages) {
  StageRecord a, b;
  a.key = b.key = {"F", "W", "L", 100};
  a.stage = 1;
  b.stage = 2;
  a.numeric = {{"proppant_mass", 10.0}, {"avg_pressure", 40.0}};
  b.numeric = {{"proppant_mass", 15.0}, {"avg_pressure", 60.0}};
  a.categorical = {{"proppant_name", std::string("carbo 16/20")}};
  b.categorical = {{"proppant_name", std::string("fores 20/40")}};
  const auto op = consolidate_stages({a, b});
  std::map<std::string, std::optional<double>> num(op.numeric.begin(), op.numeric.end());
  EXPECT_DOUBLE_EQ(*num["proppant_mass"], 25.0);
  EXPECT_DOUBLE_EQ(*num["avg_pressure"], 50.0);
  EXPECT_DOUBLE_EQ(*num["n_stages"], 2.0);
  std::map<std::string, std::optional<std::string>> cat(op.categorical.begin(), op.categorical.end());
  EXPECT_EQ(*cat["proppant_1"], "carbo 16/20");
  EXPECT_EQ(*cat["proppant_2"], "fores 20/40");
}

TEST(ConsolidateStages, SingleStageUnchanged) {
  StageRecord a;
  a.key = {"F", "W", "L", 100};
  a.numeric = {{"fluid_volume", 321.5}, {"pump_rate", 4.0}};
  const auto op = consolidate_stages({a});
  std::map<std::string, std::optional<double>> num(op.numeric.begin(), op.numeric.end());
  EXPECT_DOUBLE_EQ(*num["fluid_volume"], 321.5);
  EXPECT_DOUBLE_EQ(*num["pump_rate"], 4.0);
  EXPECT_DOUBLE_EQ(*num["n_stages"], 1.0);
}

TEST(ConsolidateStages, SummedFieldsEqualColumnSums) {
  Rng rng(8);
  for (int rep = 0; rep < 100; ++rep) {
    const auto n = 1 + rng.index(6);
    std::vector<StageRecord> stages(n);
    double mass = 0.0, vol = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      stages[s].key = {"F", "W", "L", 1};
      stages[s].stage = static_cast<int>(s + 1);
      const double m = rng.uniform(1, 50), v = rng.uniform(10, 500);
      mass += m;
      vol += v;
      stages[s].numeric = {{"proppant_mass", m}, {"fluid_volume", v}};
    }
    const auto op = consolidate_stages(stages);
    std::map<std::string, std::optional<double>> num(op.numeric.begin(), op.numeric.end());
    EXPECT_EQ(*num["proppant_mass"], mass);
    EXPECT_EQ(*num["fluid_volume"], vol);
    EXPECT_EQ(*num["n_stages"], static_cast<double>(n));
  }
}

TEST(ProductionTargets, ThreeMonthSum) {
  const auto frac = days_from_civil(2015, 1, 10);
  const auto m0 = month_index(frac);
  std::vector<MonthlyRecord> r;
  for (int k = 1; k <= 3; ++k) r.push_back({m0 + k, 100.0, 150.0, 10.0, 0.3, 700.0});
  const auto out = compute_production_targets(r, frac);
  std::map<std::string, std::optional<double>> m(out.begin(), out.end());
  EXPECT_DOUBLE_EQ(*m["cum_oil_3m"], 300.0);
  EXPECT_DOUBLE_EQ(*m["watercut_3m"], 0.3);
  EXPECT_FALSE(m["cum_oil_6m"].has_value());
  EXPECT_FALSE(m["prefrac_oil_rate"].has_value());
}

TEST(ProductionTargets, ShortWindowIsMissing) {
  const auto frac = days_from_civil(2015, 1, 10);
  const auto m0 = month_index(frac);
  const auto out = compute_production_targets({{m0 + 1, 100.0, {}, {}, {}, {}}, {m0 + 2, 100.0, {}, {}, {}, {}}}, frac);
  EXPECT_FALSE(out.front().second.has_value());
}

TEST(ProductionTargets, PrefracRateIsMeanOfEarlierMonths) {
  const auto frac = days_from_civil(2015, 6, 1);
  const auto m0 = month_index(frac);
  std::vector<MonthlyRecord> r = {{m0 - 3, 20.0, {}, {}, {}, {}},
                                  {m0 - 1, 40.0, {}, {}, {}, {}},
                                  {m0, 999.0, {}, {}, {}, {}},
                                  {m0 + 1, 60.0, {}, {}, {}, {}}};
  const auto out = compute_production_targets(r, frac);
  EXPECT_EQ(out.back().first, "prefrac_oil_rate");
  EXPECT_DOUBLE_EQ(*out.back().second, 30.0);
}

class MergeFixture : public ::testing::Test {
 protected:
  std::vector<SourceDoc> docs() const {
    SourceDoc frac{SourceKind::frac_list,
                   {"field_id", "well_id", "layer_id", "op_date", "stage", "proppant_mass", "proppant_name", "fluid_type"},
                   {{"F1", "W1", "L1", date(2015, 1, 5), "1", "10", "Carbo 16/20", "slickwater"},
                    {"F1", "W1", "L1", date(2015, 1, 5), "2", "15", "carbo 16/2O", "slickwater"},
                    {"F1", "W2", "L1", date(2015, 2, 5), "1", "1000-2000", "fores 20/40", "linear gel"},
                    {"F2", "W3", "L2", date(2015, 3, 5), "1", "n/a", "fores 20/40", "linear gel"}}};
    SourceDoc pvt{SourceKind::pvt,
                  {"field_id", "well_id", "layer_id", "oil_viscosity"},
                  {{"F1", "W1", "L1", "2.5"}, {"F1", "W2", "L1", "3.5"}, {"F9", "W9", "L9", "1.0"}}};
    SourceDoc geo{SourceKind::geomechanics,
                  {"field_id", "well_id", "layer_id", "young_modulus", "poisson_ratio"},
                  {{"F1", "W1", "L1", "", "0.25"}, {"F1", "W1", "L1", "20", "0.3"}, {"F1", "W2", "L1", "22", "0.2"}}};
    SourceDoc logs{SourceKind::well_log,
                   {"field_id", "well_id", "layer_id", "top", "bottom", "porosity", "pay"},
                   {{"F1", "W1", "L1", "100", "101", "0.1", "1"}, {"F1", "W1", "L1", "101", "102", "0.3", "1"}}};
    return {frac, pvt, geo, logs};
  }
  DictionaryMap dicts() const {
    DictionaryMap d;
    d["proppant_name"] = CategoryDictionary({"carbo 16/20", "fores 20/40"}, 2);
    return d;
  }
};

TEST_F(MergeFixture, OneRowPerFracListKey) {
  const auto r = merge_sources(docs(), dicts());
  EXPECT_EQ(r.table.rows(), 3u);
  EXPECT_EQ(r.log.operations, 3u);
}

TEST_F(MergeFixture, JoinedAndOuterJoinedRows) {
  const auto r = merge_sources(docs(), dicts());
  const auto& t = r.table;
  const auto visc = t.numeric_index("oil_viscosity");
  EXPECT_DOUBLE_EQ(*t.value(0, visc), 2.5);
  EXPECT_DOUBLE_EQ(*t.value(1, visc), 3.5);
  EXPECT_FALSE(t.value(2, visc).has_value());
  EXPECT_NEAR(*t.value(0, t.numeric_index("porosity_mean_layer")), 0.2, 1e-15);
  EXPECT_EQ(r.log.unmatched_records.at("pvt"), 1u);
}

TEST_F(MergeFixture, StagesConsolidatedAndRangesParsed) {
  const auto r = merge_sources(docs(), dicts());
  const auto& t = r.table;
  const auto mass = t.numeric_index("proppant_mass");
  EXPECT_DOUBLE_EQ(*t.value(0, mass), 25.0);
  EXPECT_DOUBLE_EQ(*t.value(1, mass), 1500.0);
  EXPECT_FALSE(t.value(2, mass).has_value());
  EXPECT_DOUBLE_EQ(*t.value(0, t.numeric_index("n_stages")), 2.0);
  EXPECT_EQ(r.log.range_cells, 1u);
  EXPECT_EQ(r.log.noise_cells, 1u);
}

TEST_F(MergeFixture, DuplicateKeepsFullerRecord) {
  const auto r = merge_sources(docs(), dicts());
  const auto& t = r.table;
  EXPECT_DOUBLE_EQ(*t.value(0, t.numeric_index("young_modulus")), 20.0);
  EXPECT_DOUBLE_EQ(*t.value(0, t.numeric_index("poisson_ratio")), 0.3);
  EXPECT_EQ(r.log.duplicate_records.at("geomechanics"), 1u);
}

TEST_F(MergeFixture, TyposNormalizedAndCounted) {
  const auto r = merge_sources(docs(), dicts());
  const auto& t = r.table;
  const auto& p2 = t.categorical()[t.categorical_index("proppant_2")];
  EXPECT_EQ(p2[0], "carbo 16/20");
  const auto& stats = r.log.normalization.at("proppant_name");
  EXPECT_EQ(stats.corrected, 2u);
  EXPECT_EQ(stats.unmatched, 0u);
}

TEST_F(MergeFixture, EmptyDictionariesNormalizeNothing) {
  const auto r = merge_sources(docs(), {});
  for (const auto& [col, stats] : r.log.normalization) EXPECT_EQ(stats.corrected, 0u) << col;
  EXPECT_EQ(r.table.rows(), 3u);
}

TEST(Merge, MissingFracListThrows) {
  SourceDoc pvt{SourceKind::pvt, {"field_id", "well_id", "layer_id", "oil_viscosity"}, {{"F", "W", "L", "1"}}};
  EXPECT_THROW(merge_sources({pvt}, {}), Error);
}

TEST(Merge, SourcesRoundTripThroughFiles) {
  fixtures::TempDir dir("sources");
  SourceDoc frac{SourceKind::frac_list, {"field_id", "well_id", "layer_id", "op_date", "fluid_volume"},
                 {{"F1", "W1", "L1", "2015-01-05", "\"300\""}, {"F1", "W2", "L1", "2015-01-06", "310"}}};
  write_source(frac, dir / "frac_list.csv");
  const auto docs = read_source_dir(dir.path.string());
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].rows, frac.rows);
}

namespace {

FieldTable categorical_table(std::vector<std::string> values, const std::string& column) {
  std::vector<ColumnMeta> schema = {{column, ColumnKind::categorical, ColumnGroup::design, "", false}};
  const auto n = static_cast<Eigen::Index>(values.size());
  return FieldTable(fixtures::keys(static_cast<std::size_t>(n)), schema, Matrix(n, 0), Mask(n, 0), {std::move(values)},
                    Mask::Constant(n, 1, false));
}

}  // namespace

TEST(EncodeCategories, OneColumnPerLevel) {
  const auto t = encode_categories(categorical_table({"a", "b", "a"}, "fluid_type"), EncodingPolicy::full_one_hot);
  EXPECT_EQ(t.numeric_count(), 2u);
  EXPECT_EQ(t.categorical_count(), 0u);
  EXPECT_DOUBLE_EQ(*t.value(0, t.numeric_index("fluid_type=a")), 1.0);
  EXPECT_DOUBLE_EQ(*t.value(1, t.numeric_index("fluid_type=a")), 0.0);
}

TEST(EncodeCategories, ReducedKeepsManufacturer) {
  const auto t = encode_categories(categorical_table({"Acme-16/20", "Acme-20/40"}, "proppant_1"), EncodingPolicy::reduced);
  EXPECT_EQ(t.numeric_count(), 1u);
  EXPECT_EQ(manufacturer_prefix("Acme-16/20"), "acme");
  EXPECT_EQ(manufacturer_prefix("carbo 20/40"), "carbo");
}

TEST(EncodeCategories, NumericTableUnchanged) {
  Matrix x(2, 2);
  x << 1, 2, 3, 4;
  const auto t = fixtures::numeric_table(x);
  const auto e = encode_categories(t, EncodingPolicy::reduced);
  EXPECT_EQ(e.schema(), t.schema());
  EXPECT_TRUE(e.numeric() == t.numeric());
}

TEST(EncodeCategories, ReducedNeverWider) {
  const auto t = categorical_table({"carbo 16/20", "carbo 20/40", "fores 12/18", "fores 16/20"}, "proppant_1");
  EXPECT_LE(encode_categories(t, EncodingPolicy::reduced).columns(),
            encode_categories(t, EncodingPolicy::full_one_hot).columns());
}
