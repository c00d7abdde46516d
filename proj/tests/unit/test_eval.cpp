#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "graspwise/dataset_io.hpp"
#include "graspwise/error.hpp"
#include "graspwise/eval.hpp"

using namespace graspwise;

namespace {

// One object with a single 40x20 grasp at (200, 200), theta 0.
Scene one_grasp_scene(double w = 40, double h = 20) {
  Scene s;
  s.id = "one-grasp";
  s.width = 640;
  s.height = 480;
  s.objects = {{1, "cup", {150, 150, 100, 100}}};
  fixtures::add_grasp(s, 1, 200, 200, 0, w, h);
  return s;
}

const Corpus& small_corpus() {
  static const Corpus c = gen_synthetic(60, 21);
  return c;
}

}  // namespace

TEST(IsCorrect, JaccardThresholdIsStrict) {
  const Scene s = one_grasp_scene();
  // Concentric boxes: IoU is the area ratio. 20x10 in 40x20 is exactly 0.25.
  for (auto mode : {JaccardMode::kRotated, JaccardMode::kAxisAligned}) {
    EXPECT_DOUBLE_EQ(jaccard(make_grasp(200, 200, 0, 20, 10), s.grasps[0].rect, mode), 0.25);
    EXPECT_FALSE(is_correct(make_grasp(200, 200, 0, 20, 10), s, mode));
    EXPECT_TRUE(is_correct(make_grasp(200, 200, 0, 21, 10), s, mode));
  }
}

TEST(IsCorrect, AngleThresholdIsStrict) {
  const Scene s = one_grasp_scene(30, 30);
  EXPECT_TRUE(is_correct(make_grasp(200, 200, 29, 30, 30), s));
  EXPECT_FALSE(is_correct(make_grasp(200, 200, 30, 30, 30), s));
  EXPECT_TRUE(is_correct(make_grasp(200, 200, -29, 30, 30), s));
  // Orientation is modulo 180.
  EXPECT_TRUE(is_correct(make_grasp(200, 200, 180 + 10, 30, 30), s));
  EXPECT_TRUE(is_correct(GraspRect{200, 200, -89, 30, 30}, one_grasp_scene(30, 30)) ==
              is_correct(make_grasp(200, 200, 91, 30, 30), s));
}

TEST(IsCorrect, BuriedObjectsAndInvalidRects) {
  const Scene s = fixtures::phone_box_notebook();
  // Exact copy of the notebook's annotation: the notebook has things on it.
  EXPECT_FALSE(is_correct(s.grasps[0].rect, s));
  EXPECT_TRUE(is_correct(s.grasps[2].rect, s));
  EXPECT_FALSE(is_correct(GraspRect{150, 165, 0, 0, 18}, s));
  EXPECT_FALSE(is_correct(GraspRect{150, 165, 95, 50, 18}, s));
}

TEST(Metrics, RecallAndPrecision) {
  const std::vector<std::vector<bool>> m{{false, true, false}, {true}, {}, {false, false}};
  EXPECT_DOUBLE_EQ(recall_at_k(m, 1), 0.25);
  EXPECT_DOUBLE_EQ(recall_at_k(m, 2), 0.5);
  EXPECT_DOUBLE_EQ(precision_at_k(m, 1), 1.0 / 3.0);
  // Denominator is min(k, |ranked|) per scene: 3 + 1 + 0 + 2.
  EXPECT_DOUBLE_EQ(precision_at_k(m, 5), 2.0 / 6.0);
  EXPECT_EQ(precision_at_k({{}, {}}, 1), 0.0);
  try {
    recall_at_k({}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedMetric);
  }
  try {
    precision_at_k(m, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomain);
  }
}

TEST(Metrics, F1) {
  EXPECT_NEAR(f1(0.739, 0.737), 0.738, 1e-3);
  EXPECT_DOUBLE_EQ(f1(1, 1), 1);
  EXPECT_EQ(f1(0, 0), 0);
  EXPECT_THROW(f1(1.2, 0.5), Error);
}

TEST(Metrics, SubjectCorrectRate) {
  auto d = [](std::string text) {
    Description x;
    x.text = std::move(text);
    return x;
  };
  const std::vector<Description> gen{d("apple on notebook"), d("box on phone"),
                                     d("pen left of cup"), d("gibberish")};
  EXPECT_DOUBLE_EQ(subject_correct_rate(gen, {"apple", "box", "pen", "pen"}), 0.75);
  EXPECT_DOUBLE_EQ(subject_correct_rate(gen, {"apple", "mobile phone", "cup", "pen"}), 0.25);
  try {
    subject_correct_rate(gen, {"apple"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShape);
  }
  EXPECT_THROW(subject_correct_rate({}, {}), Error);
}

TEST(Pipeline, OracleIsPerfect) {
  PipelineConfig c;
  c.seed = 3;
  const auto r = run_pipeline(small_corpus(), c);
  EXPECT_EQ(r.label, "SceneText(oracle)");
  for (const auto& [k, v] : r.recall) EXPECT_EQ(v, 1.0) << k;
  EXPECT_EQ(r.precision.at(1), 1.0);
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.n_corrupted, 0u);
}

TEST(Pipeline, FullInterventionEqualsOracle) {
  PipelineConfig oracle;
  oracle.seed = 9;
  PipelineConfig full = oracle;
  full.epsilon = 0.5;
  full.rho = 1.0;
  const auto a = run_pipeline(small_corpus(), oracle);
  const auto b = run_pipeline(small_corpus(), full);
  EXPECT_EQ(a.recall, b.recall);
  EXPECT_EQ(a.precision, b.precision);
  EXPECT_EQ(a.f1, b.f1);
  EXPECT_GT(b.n_corrupted, 0u);
  EXPECT_EQ(b.n_corrected, b.n_corrupted);
  EXPECT_EQ(b.residual_error_rate, 0.0);
}

TEST(Pipeline, CorrectedSetsAreNestedInRho) {
  PipelineConfig c;
  c.seed = 4;
  c.epsilon = 0.4;
  const auto reports = sweep_intervention(small_corpus(), c, {0.0, 0.5, 1.0});
  ASSERT_EQ(reports.size(), 3u);
  for (std::size_t i = 0; i < small_corpus().size(); ++i) {
    EXPECT_EQ(reports[0].scenes[i].corrupted, reports[2].scenes[i].corrupted);
    if (reports[1].scenes[i].corrected) EXPECT_TRUE(reports[2].scenes[i].corrected);
  }
  EXPECT_LE(reports[0].f1, reports[1].f1);
  EXPECT_LE(reports[1].f1, reports[2].f1);
  EXPECT_EQ(reports[0].n_corrected, 0u);
}

TEST(Pipeline, SingleObjectScenesTieAllMethods) {
  GenOptions o;
  o.min_objects = 1;
  o.max_objects = 1;
  const Corpus corpus = gen_synthetic(30, 2, o);
  std::vector<double> r1;
  for (auto m : {Method::kEnd2End, Method::kSceneGraph, Method::kSceneText}) {
    PipelineConfig c;
    c.method = m;
    r1.push_back(run_pipeline(corpus, c).recall.at(1));
  }
  EXPECT_EQ(r1[0], 1.0);
  EXPECT_EQ(r1[0], r1[1]);
  EXPECT_EQ(r1[1], r1[2]);
}

TEST(Pipeline, DeterministicAndThreadIndependent) {
  PipelineConfig c;
  c.seed = 12;
  c.epsilon = 0.3;
  c.rho = 0.5;
  c.noise.ground_error_rate = 0.1;
  c.noise.surface_flip_rate = 0.1;
  c.threads = 1;
  const auto one = encode(run_pipeline(small_corpus(), c), true).dump();
  c.threads = 4;
  EXPECT_EQ(encode(run_pipeline(small_corpus(), c), true).dump(), one);
  c.stratified = false;
  const auto iid = encode(run_pipeline(small_corpus(), c), true).dump();
  c.threads = 1;
  EXPECT_EQ(encode(run_pipeline(small_corpus(), c), true).dump(), iid);
}

TEST(Pipeline, ResidualErrorTracksEpsilon) {
  PipelineConfig c;
  c.epsilon = 0.4;
  c.rho = 0.5;
  const auto r = run_pipeline(small_corpus(), c);
  EXPECT_NEAR(r.residual_error_rate, 0.2, 2.0 / small_corpus().size());
}

TEST(Pipeline, BaselineOrderingOnStackedScenes) {
  GenOptions o;
  o.require_stack = true;
  const Corpus corpus = gen_synthetic(150, 11, o);
  PipelineConfig base;
  base.seed = 5;
  const auto reports = compare_baselines(corpus, base, {{0.1}, {0.4}, {1.0}});
  ASSERT_EQ(reports.size(), 4u);
  EXPECT_EQ(reports[0].label, "End2End");
  EXPECT_EQ(reports[1].label, "SceneGraph(flip=0.10)");
  EXPECT_EQ(reports[2].label, "SceneText(oracle)");
  EXPECT_EQ(reports[3].label, "SceneText(eps=0.40,rho=1.00)");
  EXPECT_LT(reports[0].recall.at(1), reports[1].recall.at(1));
  EXPECT_LT(reports[1].recall.at(1), reports[2].recall.at(1));
}

TEST(Pipeline, RejectsBadInput) {
  PipelineConfig c;
  EXPECT_THROW(run_pipeline(Corpus{}, c), Error);
  c.epsilon = 2;
  try {
    run_pipeline(small_corpus(), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

TEST(Report, TableHasEveryCutoff) {
  PipelineConfig c;
  const auto table = format_table({run_pipeline(small_corpus(), c)});
  for (const char* col : {"Method", "R@1", "R@3", "R@5", "R@10", "P@1", "P@3", "P@5",
                          "P@10", "F1", "Acc"}) {
    EXPECT_NE(table.find(col), std::string::npos) << col;
  }
  const auto j = encode_reports({run_pipeline(small_corpus(), c)});
  EXPECT_TRUE(j.contains("f1_definition"));
}

TEST(Method, Names) {
  for (auto m : {Method::kSceneText, Method::kEnd2End, Method::kSceneGraph}) {
    EXPECT_EQ(method_from_string(to_string(m)), m);
  }
  EXPECT_FALSE(method_from_string("magic"));
}
