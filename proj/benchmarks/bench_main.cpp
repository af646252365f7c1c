#include <benchmark/benchmark.h>

#include <vector>

#include <carnot/ballbox.hpp>
#include <carnot/config.hpp>
#include <carnot/dynamics.hpp>
#include <carnot/flag.hpp>
#include <carnot/privileged.hpp>
#include <carnot/value.hpp>

using namespace carnot;

namespace {

PolyVectorField vf(const std::vector<std::string>& comps, int cap) { return parse_vector_field(comps, cap); }

void BM_LieBracket(benchmark::State& state) {
  const int cap = static_cast<int>(state.range(0));
  const auto f = vf({"1 + x2*x3", "x1^2 - x3", "x1*x2 + x3^2"}, cap);
  const auto g = vf({"x3", "1 + x1*x3", "x1 - 2*x2^2"}, cap);
  for (auto _ : state) benchmark::DoNotOptimize(lie_bracket(f, g));
}
BENCHMARK(BM_LieBracket)->Arg(4)->Arg(6)->Arg(8);

void BM_GrowthVector(benchmark::State& state) {
  const std::vector<PolyVectorField> fields{vf({"1", "0", "0"}, 6), vf({"0", "1", "x1 + x1^2"}, 6)};
  const RationalPoint q{Rational(1), Rational(-1), Rational(2)};
  for (auto _ : state) benchmark::DoNotOptimize(growth_vector(fields, q));
}
BENCHMARK(BM_GrowthVector);

void BM_BuildChart(benchmark::State& state) {
  const std::vector<PolyVectorField> fields{vf({"1", "0", "0"}, 6), vf({"0", "1 + x1", "x1 + x1^2"}, 6)};
  const RationalPoint q{Rational(0), Rational(0), Rational(0)};
  for (auto _ : state) benchmark::DoNotOptimize(build_chart(fields, q));
}
BENCHMARK(BM_BuildChart)->Unit(benchmark::kMillisecond);

void BM_Integrate(benchmark::State& state) {
  const auto sys = SystemSpec::affine({vf({"1", "0", "0"}, 8), vf({"0", "1", "x1"}, 8)},
                                      vf({"-10*x2 + x2^3", "10*x1", "1"}, 8));
  const auto u = ControlSignal::uniform(1.0, {{0.4, -0.2}, {0.1, 0.3}, {-0.5, 0.5}});
  const std::vector<double> q{0, 0, 0};
  IntegrateOptions io;
  io.step = 1.0 / static_cast<double>(state.range(0));
  io.record = false;
  for (auto _ : state) benchmark::DoNotOptimize(endpoint(sys, q, u, io));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Integrate)->Arg(100)->Arg(1000);

void BM_EstimateValue(benchmark::State& state) {
  const auto built = build_system(example_config("heisenberg-drift"));
  const std::vector<double> target{0.1, -0.05, 0.02};
  for (auto _ : state) benchmark::DoNotOptimize(estimate_value(built.spec, built.origin, target, 0.5));
}
BENCHMARK(BM_EstimateValue)->Unit(benchmark::kMillisecond);

void BM_ReachCloud(benchmark::State& state) {
  const auto built = build_system(example_config("heisenberg"));
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_reachable(built.spec, built.origin, 0.2, 1.0, 500, 3));
}
BENCHMARK(BM_ReachCloud)->Unit(benchmark::kMillisecond);

void BM_OuterFit(benchmark::State& state) {
  const auto built = build_system(example_config("heisenberg"));
  const auto cloud = sample_reachable(built.spec, built.origin, 0.2, 1.0, 2000, 3);
  std::vector<std::vector<double>> pts;
  for (const auto& r : cloud.records) pts.push_back(r.endpoint);
  BoxFamily fam;
  fam.weights = WeightVector({1, 1, 2});
  for (auto _ : state) benchmark::DoNotOptimize(fit_outer_constant(pts, FamilyKind::kBox, fam, 0.2));
}
BENCHMARK(BM_OuterFit);

}  // namespace
BENCHMARK_MAIN();
