#include <benchmark/benchmark.h>

#include "rsopt/baselines_init.hpp"
#include "rsopt/optimizer.hpp"
#include "rsopt/saa_engine.hpp"

using namespace rsopt;

namespace {

struct Fixture {
  SystemConfig cfg;
  ChannelEstimate est;
  ConditionalSample sample;
  Precoder init;
};

Fixture make(int K, int M) {
  Fixture f;
  f.cfg.K = K;
  f.cfg.Nt = K;
  f.cfg.M = M;
  f.cfg.Pt = SystemConfig::pt_from_snr_db(30.0);
  Rng rng(42);
  f.est = generate_scenario(f.cfg, rng).estimate;
  f.sample = sample_conditional(f.est, M, rng);
  f.init = init_precoder(f.est, f.cfg, InitScheme::kMrcSvd);
  return f;
}

QcqpProblem problem(const Fixture& f) {
  QcqpProblem prob;
  prob.users = accumulate_safs(
      f.sample, update_equalizers_weights(f.sample, f.init, f.cfg.sigma_n2, WeightScaling::kExact));
  prob.Pt = f.cfg.Pt;
  prob.sigma_n2 = f.cfg.sigma_n2;
  return prob;
}

}  // namespace

static void BM_SafAccumulation(benchmark::State& state) {
  const Fixture f = make(2, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const auto eq = update_equalizers_weights(f.sample, f.init, f.cfg.sigma_n2);
    benchmark::DoNotOptimize(accumulate_safs(f.sample, eq));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SafAccumulation)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_QcqpSolve(benchmark::State& state) {
  const Fixture f = make(static_cast<int>(state.range(0)), 100);
  const QcqpProblem prob = problem(f);
  for (auto _ : state) benchmark::DoNotOptimize(solve_precoder_update(prob, f.init));
}
BENCHMARK(BM_QcqpSolve)->Arg(2)->Arg(3)->Arg(4);

static void BM_AoRun(benchmark::State& state) {
  const Fixture f = make(2, static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(ao_solve(f.sample, f.cfg, f.init, PrecodingMode::kRS));
}
BENCHMARK(BM_AoRun)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
