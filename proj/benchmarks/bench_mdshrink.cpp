#include <benchmark/benchmark.h>

#include "mdshrink/linalg.hpp"
#include "mdshrink/rng.hpp"
#include "mdshrink/shrinkage.hpp"
#include "mdshrink/sim.hpp"

using namespace mdshrink;

namespace {

Eigen::MatrixXd sample_cov(int n, int p, std::uint64_t seed) {
  Rng rng(seed);
  const AspectRatio beta(static_cast<double>(p) / n);
  const SpikedModel model({4.0, 3.0, 2.0, 1.0}, 1.0, beta);
  const Eigen::MatrixXd frame = haar_frame(p, 4, rng);
  auto [sample, truth] = gen_spiked_sample(model, n, frame, rng);
  return sample_covariance(sample);
}

void BM_SymEig(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Eigen::MatrixXd cov = sample_cov(2 * p, p, 7);
  for (auto _ : state) {
    EigenSystem eig = sym_eig(cov);
    benchmark::DoNotOptimize(eig.values.data());
  }
}
BENCHMARK(BM_SymEig)->Arg(100)->Arg(300)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_ApplyRule(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const EigenSystem eig = sym_eig_psd(sample_cov(2 * p, p, 11));
  const ShrinkageRule rule = ShrinkageRule::optimal(1.0, AspectRatio(0.5));
  for (auto _ : state) {
    PrecisionEstimate est = apply_rule(eig, rule);
    benchmark::DoNotOptimize(est.matrix.data());
  }
}
BENCHMARK(BM_ApplyRule)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_HaarOrthogonal(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  Rng rng(3);
  for (auto _ : state) {
    Eigen::MatrixXd q = haar_orthogonal(p, rng);
    benchmark::DoNotOptimize(q.data());
  }
}
BENCHMARK(BM_HaarOrthogonal)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_SpikedCellRep(benchmark::State& state) {
  SpikedExperimentConfig cfg;
  cfg.n = 300;
  cfg.beta_grid = {1.0};
  cfg.sigma_grid = {0.9};
  cfg.spikes = {4.0, 3.0, 2.0, 1.0};
  cfg.reps = 1;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    cfg.master_seed = seed++;
    LossReport report = run_spiked_experiment(cfg);
    benchmark::DoNotOptimize(report.cells.data());
  }
}
BENCHMARK(BM_SpikedCellRep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
