#include <benchmark/benchmark.h>

#include "graspwise/dataset_io.hpp"
#include "graspwise/eval.hpp"
#include "graspwise/planner.hpp"

namespace {

void BM_GenProposals(benchmark::State& state) {
  const auto corpus = graspwise::gen_synthetic(16, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(graspwise::gen_proposals(corpus.records[i % 16].scene, i));
    ++i;
  }
}
BENCHMARK(BM_GenProposals);

void BM_KgpnSample(benchmark::State& state) {
  const auto corpus = graspwise::gen_synthetic(1, 2);
  const auto& scene = corpus.records[0].scene;
  const auto proposals = graspwise::gen_proposals(scene, 3);
  const auto& k = scene.objects.front().bbox;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        graspwise::kgpn_sample(proposals, scene.grasps, k, {}, seed++));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(proposals.size()));
}
BENCHMARK(BM_KgpnSample);

void BM_PipelinePerScene(benchmark::State& state) {
  const auto corpus = graspwise::gen_synthetic(64, 4);
  graspwise::PipelineConfig cfg;
  cfg.epsilon = 0.4;
  cfg.rho = 0.5;
  cfg.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(graspwise::run_pipeline(corpus, cfg));
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_PipelinePerScene)->Unit(benchmark::kMillisecond);

void BM_GenSynthetic(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(graspwise::gen_synthetic(64, seed++));
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_GenSynthetic)->Unit(benchmark::kMillisecond);

}  // namespace
