#include <benchmark/benchmark.h>

#include "gdivide/metrics.hpp"
#include "gdivide/models.hpp"
#include "gdivide/rng.hpp"
#include "gdivide/stats/bayes.hpp"
#include "gdivide/stats/bootstrap.hpp"
#include "gdivide/stats/linear.hpp"
#include "gdivide/stats/robust.hpp"
#include "gdivide/synthetic.hpp"

namespace {

using namespace gdivide;

// Frame shaped like the FGD model: ~150 countries, 9 regressors.
stats::ModelFrame frame(long n = 150, int k = 9) {
  Rng rng(42);
  Eigen::VectorXd y(n);
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(n)));
  for (long i = 0; i < n; ++i) {
    double yi = 0;
    for (int j = 0; j < k; ++j) {
      const double x = rng.normal();
      cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = x;
      yi += 0.3 * x;
    }
    y(i) = yi + rng.normal();
  }
  stats::ModelFrame f("y", y);
  for (int j = 0; j < k; ++j) f.add("x" + std::to_string(j), cols[static_cast<std::size_t>(j)]);
  return f;
}

void BM_Ols(benchmark::State& state) {
  const auto f = frame();
  for (auto _ : state) benchmark::DoNotOptimize(stats::ols_fit(f));
}
BENCHMARK(BM_Ols);

void BM_Hc3(benchmark::State& state) {
  const auto f = frame();
  const auto ols = stats::ols_fit(f);
  for (auto _ : state) benchmark::DoNotOptimize(stats::hc_se(f, ols));
}
BENCHMARK(BM_Hc3);

void BM_RobustMm(benchmark::State& state) {
  const auto f = frame();
  for (auto _ : state) benchmark::DoNotOptimize(stats::robust_mm_fit(f));
}
BENCHMARK(BM_RobustMm)->Unit(benchmark::kMillisecond);

void BM_Gibbs(benchmark::State& state) {
  const auto f = frame();
  stats::BayesOptions o;
  o.iterations = static_cast<int>(state.range(0));
  o.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(stats::bayes_fit(f, o));
}
BENCHMARK(BM_Gibbs)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_BootstrapPartialR2(benchmark::State& state) {
  const auto f = frame(150, 4);
  const std::vector<std::string> controls{"x1", "x2", "x3"};
  stats::BootstrapOptions o;
  o.resamples = 10000;
  o.seed = 1;
  o.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(stats::bootstrap_partial_r2(f, "x0", controls, o));
}
BENCHMARK(BM_BootstrapPartialR2)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_BuildPanel(benchmark::State& state) {
  synthetic::WorldOptions o;
  o.countries = 200;
  o.months = {"2015-07"};
  o.days_per_month = 28;
  const auto w = synthetic::make_world(o);
  for (auto _ : state) benchmark::DoNotOptimize(build_panel(w.audience, w.census, "2015-07"));
}
BENCHMARK(BM_BuildPanel)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
