#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "graspwise/geometry.hpp"
#include "graspwise/scene.hpp"

namespace {

using graspwise::GraspRect;

std::vector<GraspRect> random_rects(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(100, 300);
  std::uniform_real_distribution<double> ang(-90, 90);
  std::uniform_real_distribution<double> size(10, 120);
  std::vector<GraspRect> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(graspwise::make_grasp(pos(rng), pos(rng), ang(rng), size(rng), size(rng)));
  }
  return out;
}

void BM_RectIouRotated(benchmark::State& state) {
  const auto a = random_rects(1024, 1);
  const auto b = random_rects(1024, 2);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(graspwise::rect_iou(a[i & 1023], b[i & 1023]));
    ++i;
  }
}
BENCHMARK(BM_RectIouRotated);

void BM_RectIouAxis(benchmark::State& state) {
  const auto a = random_rects(1024, 1);
  const auto b = random_rects(1024, 2);
  std::vector<graspwise::AxisRect> ea, eb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ea.push_back(graspwise::axis_envelope(a[i]));
    eb.push_back(graspwise::axis_envelope(b[i]));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(graspwise::rect_iou(ea[i & 1023], eb[i & 1023]));
    ++i;
  }
}
BENCHMARK(BM_RectIouAxis);

// Chain of n objects stacked on each other: the worst case for the closure.
void BM_Closure(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<graspwise::ObjectInstance> objects;
  graspwise::RelationshipTree tree;
  for (int i = 0; i < n; ++i) {
    objects.push_back({i + 1, "box", {10.0 * i, 10.0, 50.0, 50.0}});
    if (i > 0) tree.edges.push_back({i + 1, i});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(graspwise::closure(tree, objects));
  }
}
BENCHMARK(BM_Closure)->Arg(6)->Arg(32)->Arg(128);

}  // namespace
