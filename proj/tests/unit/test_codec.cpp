#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "graspwise/codec.hpp"
#include "graspwise/config.hpp"
#include "graspwise/error.hpp"
#include "graspwise/events.hpp"
#include "graspwise/lang.hpp"

using namespace graspwise;

namespace {

void expect_parse_error(const std::function<void()>& fn, const std::string& fragment) {
  try {
    fn();
    ADD_FAILURE() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(Codec, SceneRoundTrip) {
  for (const Scene& s : {fixtures::phone_box_notebook(), fixtures::apple_notebook(),
                         fixtures::single_cup()}) {
    const Json j = encode(s);
    EXPECT_EQ(decode_scene(j, "scene"), s);
    EXPECT_EQ(encode(decode_scene(Json::parse(j.dump()), "scene")).dump(), j.dump());
  }
}

TEST(Codec, DescriptionAndGroundedRoundTrip) {
  Description d = generate({"apple", Predicate::kLeft, "cup", 2, 4}, 1);
  d.source = DescriptionSource::kHuman;
  EXPECT_EQ(decode_description(encode(d), "d"), d);
  const GroundedObject g{3, {1, 2, 3, 4}, 0.5, true, false};
  EXPECT_EQ(decode_grounded(encode(g), "g"), g);
  ScoredGrasp sg;
  sg.rect = make_grasp(1, 2, 3, 4, 5);
  sg.envelope = {0, 0, 4, 5};
  sg.box_conf = 0.7;
  sg.angle_class = 10;
  sg.matched_gt = 2;
  sg.object_id = 6;
  EXPECT_EQ(decode_scored_grasp(encode(sg), "g"), sg);
}

TEST(Codec, ErrorsNameThePath) {
  Json j = encode(fixtures::apple_notebook());
  j["objects"][1]["bbox"][2] = "wide";
  expect_parse_error([&] { decode_scene(j, "scene"); }, "scene.objects[1].bbox");
  Json k = encode(fixtures::apple_notebook());
  k["image"].erase("width");
  expect_parse_error([&] { decode_scene(k, "scene"); }, "width");
}

TEST(Codec, NoiseAndPlannerDefaults) {
  const NoiseConfig n = decode_noise(Json::parse(R"({"ground_error_rate": 0.25})"), "n");
  EXPECT_EQ(n.ground_error_rate, 0.25);
  EXPECT_EQ(n.surface_flip_rate, 0.0);
  PlannerConfig p;
  p.positive_count = 7;
  EXPECT_EQ(decode_planner(encode(p), "p"), p);
}

TEST(Events, EncodeDecodeAndLogLines) {
  SessionEvent e;
  e.sequence = 3;
  e.timestamp = "2024-05-01T10:00:00.000Z";
  e.session_id = "s-000001";
  e.kind = EventKind::kIntervention;
  e.phase = Phase::kDescribed;
  e.payload["text"] = "box on mobile phone";
  const std::string line = to_log_line(e);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const auto events = parse_event_log(line + "\n\n" + line + "\n");
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0], e);
  EXPECT_EQ(decode_event(encode(e), "e"), e);
}

TEST(Events, BadLinesAreNamed) {
  SessionEvent e;
  const std::string good = to_log_line(e);
  expect_parse_error([&] { parse_event_log(good + "\n{oops\n"); }, "line 2");
  Json j = encode(e);
  j["kind"] = "teleported";
  expect_parse_error([&] { parse_event_log(good + "\n" + j.dump()); }, "kind");
}

TEST(Events, Names) {
  for (auto p : {Phase::kDescribed, Phase::kAwaitingReview, Phase::kGrounded, Phase::kPlanned,
                 Phase::kExecuted, Phase::kFailed}) {
    EXPECT_EQ(phase_from_string(to_string(p)), p);
  }
  EXPECT_EQ(to_string(Phase::kAwaitingReview), "AWAITING_REVIEW");
  EXPECT_EQ(to_string(EventKind::kGrounded), "grounded");
  EXPECT_EQ(event_kind_from_string("review"), EventKind::kReview);
  EXPECT_FALSE(event_kind_from_string("nap"));
}

TEST(ExperimentConfig, ParseAndRoundTrip) {
  const auto c = parse_experiment_config(
      R"({"version": 1, "planner": {"positive_count": 64, "iou_threshold": 0.6},
          "noise": {"surface_flip_rate": 0.2}})");
  EXPECT_EQ(c.planner.positive_count, 64u);
  EXPECT_EQ(c.planner.iou_threshold, 0.6);
  EXPECT_EQ(c.planner.negative_count, 128u);
  EXPECT_EQ(c.noise.surface_flip_rate, 0.2);
  EXPECT_EQ(parse_experiment_config(encode(c).dump()), c);
  EXPECT_EQ(parse_experiment_config(R"({"version": 1})"), ExperimentConfig{});
}

TEST(ExperimentConfig, Rejections) {
  auto code_of = [](std::string_view text) {
    try {
      parse_experiment_config(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code_of("{"), ErrorCode::kParse);
  EXPECT_EQ(code_of("{}"), ErrorCode::kParse);
  EXPECT_EQ(code_of(R"({"version": 2})"), ErrorCode::kConfig);
  EXPECT_EQ(code_of(R"({"version": 1, "extras": {}})"), ErrorCode::kConfig);
  EXPECT_EQ(code_of(R"({"version": 1, "noise": {"ground_error_rate": 3}})"),
            ErrorCode::kConfig);
}

TEST(ErrorCodes, SnakeCaseNames) {
  EXPECT_EQ(to_string(ErrorCode::kReplayDivergence), "replay_divergence");
  EXPECT_EQ(to_string(ErrorCode::kGroundingFailure), "grounding_failure");
  EXPECT_EQ(to_string(ErrorCode::kInvalidScene), "invalid_scene");
}
