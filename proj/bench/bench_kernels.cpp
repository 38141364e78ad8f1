// Serial reference vs OpenMP kernel on the default synthetic workload.
// Benchmark argument = thread count (0 means the serial reference).

#include <benchmark/benchmark.h>

#include "tacf/evaluation.hpp"
#include "tacf/similarity.hpp"
#include "tacf/synthetic.hpp"
#include "tacf/temporal.hpp"

namespace {

const tacf::EvalContext& workload() {
  static const tacf::EvalContext ctx = tacf::EvalContext::build(tacf::preprocess(tacf::generate_synthetic({})));
  return ctx;
}

void BM_BuildSimilarity(benchmark::State& state) {
  const auto& train = workload().split.train;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto m = threads == 0 ? tacf::serial::build_similarity(train) : tacf::build_similarity(train, threads);
    benchmark::DoNotOptimize(m);
  }
}

void BM_CollectSsnr(benchmark::State& state) {
  const auto& ctx = workload();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto c = threads == 0 ? tacf::serial::collect_ssnr_ages(ctx.split.train, ctx.split.probe, ctx.model)
                          : tacf::collect_ssnr_ages(ctx.split.train, ctx.split.probe, ctx.model, threads);
    benchmark::DoNotOptimize(c);
  }
}

void BM_Evaluate(benchmark::State& state) {
  const auto& ctx = workload();
  const int threads = static_cast<int>(state.range(0));
  const std::size_t depths[] = {10, 20, 50};
  const tacf::DecaySpec decay = tacf::decay::Piecewise{5e4, 1e6, 0.6, 0.3};
  for (auto _ : state) {
    auto r = threads == 0 ? tacf::serial::evaluate(ctx, decay, depths) : tacf::evaluate(ctx, decay, depths, threads);
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

BENCHMARK(BM_BuildSimilarity)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CollectSsnr)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Evaluate)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
