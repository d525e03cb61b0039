// OpenMP kernels against their serial references. Set OMP_NUM_THREADS to
// vary the team size.
#include <benchmark/benchmark.h>

#include <vector>

#include "nanonet/engine.hpp"
#include "nanonet/mcoutage.hpp"

using namespace nanonet;

namespace {

std::vector<double> distances() {
  std::vector<double> xs;
  for (int i = 0; i < 20000; ++i) xs.push_back(1e-4 + i * 1e-6);
  return xs;
}

McRun mc_run() {
  McRun r;
  r.trials = 200000;
  r.k_links = {1, 2, 4};
  r.gamma_axis_db.clear();
  for (int g = 0; g <= 20; ++g) r.gamma_axis_db.push_back(g);
  r.mean_offset_db = calibrate_offset(kAnchorSingleLink, kAnchorAxis, r.threshold_db, r.sigma_db);
  return r;
}

void BM_sweep_serial(benchmark::State &st) {
  const auto cfg = validate_config(SimConfig{});
  const auto xs = distances();
  for (auto _ : st) benchmark::DoNotOptimize(sweep_serial(cfg, "distance", xs));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(xs.size()));
}

void BM_sweep_openmp(benchmark::State &st) {
  const auto cfg = validate_config(SimConfig{});
  const auto xs = distances();
  for (auto _ : st) benchmark::DoNotOptimize(sweep(cfg, "distance", xs));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(xs.size()));
}

void BM_mc_serial(benchmark::State &st) {
  const McRun r = mc_run();
  for (auto _ : st) benchmark::DoNotOptimize(mc_outage_serial(r));
  st.SetItemsProcessed(st.iterations() * r.trials);
}

void BM_mc_openmp(benchmark::State &st) {
  const McRun r = mc_run();
  for (auto _ : st) benchmark::DoNotOptimize(mc_outage(r));
  st.SetItemsProcessed(st.iterations() * r.trials);
}

}  // namespace

BENCHMARK(BM_sweep_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_openmp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mc_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mc_openmp)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
