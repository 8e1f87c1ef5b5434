// Serial reference vs. OpenMP evaluation of the per-point kernels.

#include <benchmark/benchmark.h>

#include "qklab/parallel.hpp"
#include "qklab/sampling.hpp"
#include "qklab/suites.hpp"
#include "qklab/symmetry.hpp"

namespace {

using namespace qklab;
namespace tw = qklab::twistqk;
using parallel::Exec;

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

std::vector<std::vector<double>> points(const CubicModel& model, double c, int count) {
  sampling::Rng rng(5);
  std::vector<std::vector<double>> out;
  for (int i = 0; i < count; ++i) out.push_back(sampling::qk_chart(model, rng, c));
  return out;
}

void BM_MetricE2(benchmark::State& state) {
  const CubicModel model = builtin_model("E2");
  const auto pts = points(model, 0.3, 256);
  for (auto _ : state) {
    auto g = parallel::map_indices(
        pts.size(), [&](std::size_t i) { return tw::qk_metric_components<double>(model, std::span<const double>(pts[i]), 0.3); },
        exec_of(state));
    benchmark::DoNotOptimize(g);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(pts.size()));
}

void BM_CurvatureE1(benchmark::State& state) {
  const CubicModel model = builtin_model("E1");
  const auto pts = points(model, 0.3, 64);
  const auto field = tw::qk_metric_field(model, 0.3);
  for (auto _ : state) {
    auto k = parallel::map_indices(
        pts.size(), [&](std::size_t i) { return tensorlab::curvature(field, pts[i]).scal; }, exec_of(state));
    benchmark::DoNotOptimize(k);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(pts.size()));
}

void BM_IsometryCampaignE2(benchmark::State& state) {
  const CubicModel model = builtin_model("E2");
  suites::Options o;
  o.c_values = {0.3};
  o.samples["elements"] = 20;
  o.samples["isometry-points"] = 10;
  o.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(suites::isometry_suite(model, o));
}

void BM_KillingE2(benchmark::State& state) {
  const CubicModel model = builtin_model("E2");
  suites::Options o;
  o.c_values = {0.0, 0.3};
  o.samples["killing-points"] = 4;
  o.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(suites::killing_suite(model, o));
}

}  // namespace

// Argument 0 = serial reference, 1 = OpenMP.
BENCHMARK(BM_MetricE2)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CurvatureE1)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_IsometryCampaignE2)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_KillingE2)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
