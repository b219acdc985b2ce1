#include <benchmark/benchmark.h>

#include "fracflow/impute.hpp"
#include "fracflow/ingest.hpp"
#include "fracflow/regress.hpp"
#include "fracflow/rng.hpp"
#include "fracflow/structure.hpp"
#include "fracflow/synthgen.hpp"

using namespace fracflow;

namespace {

Matrix uniform(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform();
  return m;
}

void BM_Levenshtein(benchmark::State& state) {
  const std::string a = "carbolite 16/20 resin coated", b = "carbolyte 16/30 resin-coated";
  for (auto _ : state) benchmark::DoNotOptimize(ingest::levenshtein(a, b));
}
BENCHMARK(BM_Levenshtein);

void BM_Dbscan(benchmark::State& state) {
  const auto n = state.range(0);
  const Matrix x = uniform(n, 10, 1);
  const double eps = structure::default_eps(x, 20);
  for (auto _ : state) benchmark::DoNotOptimize(structure::dbscan(x, eps, 20));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Dbscan)->Arg(500)->Arg(1000)->Arg(2000)->Complexity();

void BM_TsvdImpute(benchmark::State& state) {
  synth::SynthConfig c;
  c.n_wells = static_cast<int>(state.range(0));
  c.n_fields = 6;
  const auto db = synth::generate_synth_db(c);
  impute::ImputeOptions o;
  o.method = impute::ImputeMethod::tsvd;
  o.rank = 5;
  for (auto _ : state) benchmark::DoNotOptimize(impute::impute_features(db.table, o));
}
BENCHMARK(BM_TsvdImpute)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_GbdtFit(benchmark::State& state) {
  const auto n = state.range(0);
  const Matrix x = uniform(n, 50, 2);
  Vector y = x.col(0) * 3 + x.col(1).cwiseProduct(x.col(2));
  regress::GbdtParams p;
  p.n_rounds = 100;
  p.od_wait = 0;
  p.learning_rate = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(regress::fit_gbdt(x, y, Matrix(0, 50), Vector(0), p));
}
BENCHMARK(BM_GbdtFit)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
