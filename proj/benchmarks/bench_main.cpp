#include <benchmark/benchmark.h>

#include <compest/calibration.hpp>
#include <compest/estimators.hpp>
#include <compest/evaluation.hpp>
#include <compest/optimize.hpp>
#include <compest/population.hpp>
#include <compest/regression_composite.hpp>
#include <compest/sample.hpp>

using namespace compest;

namespace {

const Population& population() {
  static const Population p = [] {
    PopulationSpec spec;
    spec.variant = 3;
    spec.targets = truncate(default_rate_targets(), 85);
    spec.seed = 20050101;
    return generate_population(spec);
  }();
  return p;
}

const Eigen::MatrixXd& realizations() {
  static const Eigen::MatrixXd y = mis_realizations(population(), RotationDesign{});
  return y;
}

void BM_PanelSample(benchmark::State& state) {
  const RotationDesign d;
  int r = 1;
  for (auto _ : state) {
    PanelSample s(population(), d, SampleAssignment(d, r));
    benchmark::DoNotOptimize(mis_estimator(s, base_weights(d, s)));
    r = r % d.draws() + 1;
  }
}
BENCHMARK(BM_PanelSample);

void BM_Calibrate(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 125.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(5, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i % 3, i) = 1.0;
    a(3, i) = i % 2;
    a(4, i) = i % 4 == 0;
  }
  const Eigen::VectorXd t = 1.02 * (a * w);
  for (auto _ : state) benchmark::DoNotOptimize(calibrate(w, a, t));
}
BENCHMARK(BM_Calibrate)->Arg(800)->Arg(8000);

void BM_RegressionComposite(benchmark::State& state) {
  const RotationDesign d;
  const PanelSample s(population(), d, SampleAssignment(d, 1));
  const std::vector<RcMonth> input = rc_input(s, base_weights(d, s));
  const Eigen::MatrixXd x = covariate_totals(population()).transpose().replicate(d.months, 1);
  for (auto _ : state) benchmark::DoNotOptimize(regression_composite(0.5, input, x));
}
BENCHMARK(BM_RegressionComposite)->Unit(benchmark::kMillisecond);

void BM_AkObjective(benchmark::State& state) {
  const RotationDesign d;
  static const AkVarianceModel model(exact_sigma(realizations()), population_totals(population()), d);
  const std::array<double, 4> p = kCpsRateParameters;
  for (auto _ : state) benchmark::DoNotOptimize(model(ObjectiveKind::compromise, p));
}
BENCHMARK(BM_AkObjective)->Unit(benchmark::kMicrosecond);

void BM_EstimateSigma(benchmark::State& state) {
  const RotationDesign d;
  const PanelSample s(population(), d, SampleAssignment(d, 1));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_sigma(s, d));
}
BENCHMARK(BM_EstimateSigma)->Unit(benchmark::kMillisecond);

void BM_ExactSigma(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(exact_sigma(realizations()));
}
BENCHMARK(BM_ExactSigma)->Unit(benchmark::kMillisecond);

void BM_MisRealizations(benchmark::State& state) {
  const RotationDesign d;
  for (auto _ : state) benchmark::DoNotOptimize(mis_realizations(population(), d));
}
BENCHMARK(BM_MisRealizations)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
