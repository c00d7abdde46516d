#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "fixtures.hpp"
#include "graspwise/dataset_io.hpp"
#include "graspwise/error.hpp"
#include "graspwise/random.hpp"
#include "graspwise/session.hpp"

using namespace graspwise;
namespace fs = std::filesystem;

namespace {

struct Recorder {
  std::vector<SessionEvent> events;
  int tick = 0;
  EventContext ctx() {
    return {[this] {
              char buf[40];
              std::snprintf(buf, sizeof buf, "2024-03-01T12:00:%02d.000Z", tick++ % 60);
              return std::string(buf);
            },
            [this](const SessionEvent& e) { events.push_back(e); }};
  }
};

std::vector<EventKind> kinds(const SessionState& s) {
  std::vector<EventKind> out;
  for (const auto& e : s.history) out.push_back(e.kind);
  return out;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kIo;
}

std::string fixed_clock() { return "2024-03-01T12:00:00.000Z"; }

}  // namespace

TEST(Session, StartWithoutNoiseShowsOracle) {
  Recorder r;
  const Scene scene = fixtures::apple_notebook();
  SessionConfig cfg;
  cfg.seed = 4;
  const SessionState s = start_session("s-a", scene, cfg, r.ctx());
  EXPECT_EQ(s.phase, Phase::kAwaitingReview);
  ASSERT_TRUE(s.description);
  const auto oracle = describe_target(scene, derive_seed(4, streams::kDescribe));
  EXPECT_TRUE(s.description->triple.same_statement(oracle.description->triple));
  EXPECT_EQ(s.description->source, DescriptionSource::kSelfExplanation);
  EXPECT_EQ(kinds(s),
            (std::vector<EventKind>{EventKind::kCreated, EventKind::kDescribed,
                                    EventKind::kReview}));
  EXPECT_EQ(s.history[0].sequence, 1u);
  EXPECT_EQ(s.history[2].sequence, 3u);
  EXPECT_EQ(r.events, s.history);
  // Reads like "apple on notebook" or "pliers on notebook".
  EXPECT_NE(s.description->text.find(" notebook"), std::string::npos) << s.description->text;
}

TEST(Session, FixedSeedGivesIdenticalState) {
  SessionConfig cfg;
  cfg.seed = 77;
  cfg.epsilon = 0.5;
  Recorder a, b;
  const auto sa = start_session("s", fixtures::apple_notebook(), cfg, a.ctx());
  const auto sb = start_session("s", fixtures::apple_notebook(), cfg, b.ctx());
  EXPECT_EQ(to_json(sa).dump(), to_json(sb).dump());
}

TEST(Session, RejectsInvalidScenes) {
  Scene bad = fixtures::phone_box_notebook();
  bad.grasps[0].surface = true;
  bad.objects[1].class_name = "spaceship";
  Recorder r;
  try {
    start_session("s", bad, {}, r.ctx());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidScene);
    EXPECT_EQ(e.details().size(), 2u);
  }
  EXPECT_TRUE(r.events.empty());
}

TEST(Session, CorrectionChangesTheGraspedObject) {
  // The self-explanation names the phone, which has the box on it.
  const Scene scene = fixtures::box_phone_notebook();
  SessionConfig cfg;
  cfg.forced_description = "mobile phone on notebook";
  Recorder r;
  auto ctx = r.ctx();
  SessionState s = start_session("corrected", scene, cfg, ctx);
  EXPECT_TRUE(s.description->corrupted);
  intervene(s, "box on mobile phone", ctx);
  EXPECT_EQ(s.phase, Phase::kDescribed);
  EXPECT_EQ(s.description->source, DescriptionSource::kHuman);
  step(s, ctx);
  ASSERT_EQ(s.phase, Phase::kGrounded);
  EXPECT_EQ(s.grounded->object_id, 3);
  step(s, ctx);
  ASSERT_EQ(s.phase, Phase::kPlanned);
  EXPECT_LE(s.ranking.size(), cfg.keep_grasps);
  step(s, ctx);
  EXPECT_EQ(s.phase, Phase::kExecuted);
  EXPECT_EQ(s.success, true);
  EXPECT_GE(s.history.size(), 5u);
  EXPECT_EQ(code_of([&] { step(s, ctx); }), ErrorCode::kPhase);

  // Without the correction the robot goes for the phone and misses.
  SessionState u = start_session("uncorrected", scene, cfg, ctx);
  step(u, ctx);
  EXPECT_EQ(u.grounded->object_id, 2);
  step(u, ctx);
  step(u, ctx);
  EXPECT_EQ(u.success, false);
}

TEST(Session, ParseFailureLeavesStateUntouched) {
  Recorder r;
  auto ctx = r.ctx();
  SessionState s = start_session("s", fixtures::apple_notebook(), {}, ctx);
  const std::string before = to_json(s).dump();
  EXPECT_EQ(code_of([&] { intervene(s, "", ctx); }), ErrorCode::kUnparseable);
  EXPECT_EQ(code_of([&] { intervene(s, "apple on", ctx); }), ErrorCode::kArity);
  EXPECT_EQ(to_json(s).dump(), before);
  EXPECT_EQ(r.events.size(), 3u);
}

TEST(Session, PhaseRules) {
  Recorder r;
  auto ctx = r.ctx();
  SessionState s = start_session("s", fixtures::apple_notebook(), {}, ctx);
  step(s, ctx);
  EXPECT_EQ(s.phase, Phase::kGrounded);
  EXPECT_EQ(code_of([&] { intervene(s, "apple on notebook", ctx); }), ErrorCode::kPhase);
}

TEST(Session, FailedGroundingCanBeCorrected) {
  const Scene scene = fixtures::box_phone_notebook();
  SessionConfig cfg;
  cfg.forced_description = "notebook on box";
  Recorder r;
  auto ctx = r.ctx();
  SessionState s = start_session("s", scene, cfg, ctx);
  step(s, ctx);
  ASSERT_EQ(s.phase, Phase::kFailed);
  ASSERT_TRUE(s.failure);
  EXPECT_EQ(s.failure->stage, "ground");
  EXPECT_EQ(s.failure->code, "grounding_failure");
  EXPECT_EQ(code_of([&] { step(s, ctx); }), ErrorCode::kPhase);
  intervene(s, "box on the phone", ctx);
  EXPECT_FALSE(s.failure);
  step(s, ctx);
  step(s, ctx);
  step(s, ctx);
  EXPECT_EQ(s.success, true);
  EXPECT_EQ(s.ground_attempts, 2u);
}

TEST(Session, SingleObjectSceneHasNoDescription) {
  Recorder r;
  auto ctx = r.ctx();
  SessionState s = start_session("s", fixtures::single_cup(), {}, ctx);
  EXPECT_FALSE(s.description);
  step(s, ctx);
  EXPECT_EQ(s.grounded->object_id, 1);
}

TEST(Replay, ReproducesStateBitExactly) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SessionConfig cfg;
    cfg.seed = seed;
    cfg.epsilon = 0.5;
    cfg.noise.ground_error_rate = 0.3;
    cfg.noise.surface_flip_rate = 0.2;
    Recorder r;
    auto ctx = r.ctx();
    const Scene scene = gen_synthetic(1, seed).records[0].scene;
    SessionState s = start_session("s-" + std::to_string(seed), scene, cfg, ctx);
    if (seed % 2) intervene(s, s.description->text, ctx);
    while (s.phase != Phase::kExecuted && s.phase != Phase::kFailed) step(s, ctx);
    const SessionState back = replay(parse_event_log([&] {
      std::string text;
      for (const auto& e : r.events) text += to_log_line(e) + "\n";
      return text;
    }()));
    EXPECT_EQ(to_json(back).dump(), to_json(s).dump()) << seed;
    EXPECT_EQ(view_json(back).dump(), view_json(s).dump());
  }
}

TEST(Replay, TamperedLogDiverges) {
  Recorder r;
  auto ctx = r.ctx();
  SessionState s = start_session("s", fixtures::box_phone_notebook(), {}, ctx);
  step(s, ctx);
  step(s, ctx);
  auto events = r.events;
  events[3].payload["grounded"]["object_id"] = 1;
  EXPECT_EQ(code_of([&] { replay(events); }), ErrorCode::kReplayDivergence);
  auto reordered = r.events;
  std::swap(reordered[3], reordered[4]);
  EXPECT_EQ(code_of([&] { replay(reordered); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([&] { replay({}); }), ErrorCode::kParse);
  auto headless = r.events;
  headless.erase(headless.begin());
  EXPECT_EQ(code_of([&] { replay(headless); }), ErrorCode::kParse);
}

TEST(View, RenderData) {
  Recorder r;
  auto ctx = r.ctx();
  SessionState s = start_session("s", fixtures::phone_box_notebook(), {}, ctx);
  step(s, ctx);
  step(s, ctx);
  const Json v = view_json(s);
  EXPECT_EQ(v["phase"], "PLANNED");
  ASSERT_EQ(v["objects"].size(), 3u);
  EXPECT_EQ(v["objects"][0]["surface"], false);
  EXPECT_EQ(v["objects"][2]["surface"], true);
  EXPECT_EQ(v["objects"][2]["grounded"], true);
  EXPECT_FALSE(v["grasps"].empty());
  EXPECT_EQ(v["grasps"][0]["corners"].size(), 4u);
  EXPECT_EQ(v["grasps"][0]["rank"], 1);
}

TEST(Manager, LifecycleAndLogFiles) {
  const fs::path dir = fs::temp_directory_path() / "graspwise-test-manager";
  fs::remove_all(dir);
  SessionManager m(dir, fixed_clock);
  const Json created = m.create(fixtures::box_phone_notebook(), {});
  const std::string id = created["id"];
  EXPECT_EQ(id, "s-000001");
  EXPECT_EQ(m.step(id)["phase"], "GROUNDED");
  EXPECT_EQ(m.ids(), std::vector<std::string>{id});
  EXPECT_EQ(code_of([&] { m.get("s-999999"); }), ErrorCode::kNotFound);
  EXPECT_EQ(code_of([&] { m.intervene(id, "box on phone"); }), ErrorCode::kPhase);
  std::ifstream f(dir / (id + ".jsonl"));
  std::stringstream buf;
  buf << f.rdbuf();
  EXPECT_EQ(buf.str(), m.log(id));
  EXPECT_EQ(parse_event_log(buf.str()).size(), 4u);
}

TEST(Manager, ConcurrentSessionsKeepSeparateLogs) {
  const fs::path dir = fs::temp_directory_path() / "graspwise-test-concurrent";
  fs::remove_all(dir);
  SessionManager m(dir, fixed_clock);
  const Corpus corpus = gen_synthetic(8, 3);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    threads.emplace_back([&, t] {
      SessionConfig cfg;
      cfg.seed = t;
      const std::string id = m.create(corpus.records[t].scene, cfg)["id"];
      for (int i = 0; i < 3; ++i) {
        try {
          m.step(id);
        } catch (const Error&) {
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  ASSERT_EQ(m.ids().size(), corpus.size());
  for (const auto& id : m.ids()) {
    const auto events = load_event_log(dir / (id + ".jsonl"));
    ASSERT_GE(events.size(), 4u);
    for (std::size_t i = 0; i < events.size(); ++i) {
      EXPECT_EQ(events[i].session_id, id);
      EXPECT_EQ(events[i].sequence, i + 1);
    }
    EXPECT_EQ(to_json(replay(events)).dump(), m.get(id).dump());
  }
}

TEST(SessionConfig, CodecAndValidation) {
  SessionConfig c;
  c.seed = 9;
  c.epsilon = 0.25;
  c.forced_description = "apple on notebook";
  c.keep_grasps = 3;
  EXPECT_EQ(decode_session_config(encode(c), "c"), c);
  EXPECT_EQ(code_of([] { decode_session_config(Json::parse(R"({"epsilon": 2})"), "c"); }),
            ErrorCode::kConfig);
}
