// Links against an installed graspwise and runs one tiny pipeline.
#include <cstdio>

#include "graspwise/dataset_io.hpp"
#include "graspwise/eval.hpp"

int main() {
  const auto corpus = graspwise::gen_synthetic(5, 1);
  graspwise::PipelineConfig c;
  const auto r = graspwise::run_pipeline(corpus, c);
  std::printf("R@1 %.3f\n", r.recall.at(1));
  return r.recall.at(1) == 1.0 ? 0 : 1;
}
