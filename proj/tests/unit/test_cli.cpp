#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "graspwise/dataset_io.hpp"
#include "graspwise/session.hpp"

using namespace graspwise;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / "graspwise-test-cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string read(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string corpus_file() {
  static const std::string path = [] {
    const auto p = (scratch() / "corpus.json").string();
    EXPECT_EQ(run({"gen-scenes", "--n", "40", "--seed", "3", "--out", p}).code, 0);
    return p;
  }();
  return path;
}

}  // namespace

TEST(Cli, GenerateEmptyCorpus) {
  const auto p = (scratch() / "empty.json").string();
  const auto r = run({"gen-scenes", "--n", "0", "--out", p});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_TRUE(load_corpus(p).empty());
}

TEST(Cli, GenerateWithSplit) {
  const auto p = (scratch() / "split.json").string();
  const auto r = run({"gen-scenes", "--n", "50", "--seed", "1", "--out", p, "--split",
                      "--require-stack"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("split 40/5/5"), std::string::npos) << r.out;
  EXPECT_EQ(load_corpus(scratch() / "split.train.json").size(), 40u);
  for (const auto& rec : load_corpus(p).records) EXPECT_FALSE(rec.scene.tree.edges.empty());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"gen-scenes"}).code, cli::kUsage);
  EXPECT_EQ(run({"gen-scenes", "--out", "x", "--bogus"}).code, cli::kUsage);
  EXPECT_EQ(run({"run-eval", "--corpus", "c", "--eps", "1.5"}).code, cli::kUsage);
  EXPECT_EQ(run({"run-eval", "--corpus", "c", "--baseline", "magic"}).code, cli::kUsage);
  EXPECT_EQ(run({"run-eval", "--corpus", "c", "--k", "0"}).code, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  const auto help = run({"--help"});
  EXPECT_EQ(help.code, cli::kOk);
  EXPECT_NE(help.out.find("gen-scenes"), std::string::npos);
}

TEST(Cli, RuntimeErrorsExitOne) {
  const auto r = run({"run-eval", "--corpus", (scratch() / "absent.json").string()});
  EXPECT_EQ(r.code, cli::kFailure);
  EXPECT_NE(r.err.find("error [io]"), std::string::npos) << r.err;
}

TEST(Cli, ValidateReportsIssues) {
  EXPECT_EQ(run({"validate", "--corpus", corpus_file()}).code, cli::kOk);
  Corpus bad;
  SampleRecord rec;
  rec.scene = fixtures::phone_box_notebook();
  rec.scene.grasps[0].surface = true;
  bad.records.push_back(rec);
  const auto p = scratch() / "bad.json";
  save_corpus(bad, p);
  const auto r = run({"validate", "--corpus", p.string()});
  EXPECT_EQ(r.code, cli::kFailure);
  EXPECT_NE(r.out.find("stale_surface"), std::string::npos) << r.out;
}

TEST(Cli, CompareBaselinesTable) {
  const auto report = (scratch() / "compare.json").string();
  const auto r = run({"compare-baselines", "--corpus", corpus_file(), "--report", report});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto start = r.out.find("Method");
  ASSERT_NE(start, std::string::npos) << r.out;
  const std::string header = r.out.substr(start, r.out.find('\n', start) - start);
  for (const char* col : {"R@1", "R@3", "R@5", "R@10", "P@1", "P@3", "P@5", "P@10"}) {
    EXPECT_NE(header.find(col), std::string::npos) << col;
  }
  EXPECT_LT(header.find("R@10"), header.find("P@1"));
  EXPECT_EQ(read(report + ".txt"), r.out);
  const Json j = Json::parse(read(report));
  EXPECT_EQ(j["reports"].size(), 11u);
}

TEST(Cli, SweepReportsAreReproducible) {
  const auto a = (scratch() / "sweep-a.json").string();
  const auto b = (scratch() / "sweep-b.json").string();
  for (const auto& p : {a, b}) {
    const auto r = run({"sweep-intervention", "--corpus", corpus_file(), "--eps", "0.4",
                        "--seed", "2", "--report", p, "--per-scene"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
  }
  EXPECT_EQ(read(a), read(b));
  const Json j = Json::parse(read(a));
  ASSERT_EQ(j["reports"].size(), 5u);
  EXPECT_EQ(j["reports"][4]["intervention_rate"], 1.0);
  EXPECT_EQ(j["reports"][0]["scenes"].size(), 40u);
}

TEST(Cli, RunEvalWithConfigFile) {
  const auto cfg = scratch() / "planner.json";
  std::ofstream(cfg) << R"({"version": 1, "planner": {"positive_count": 16}})";
  const auto r = run({"run-eval", "--corpus", corpus_file(), "--baseline", "end2end", "--k",
                      "1,2", "--config", cfg.string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("End2End"), std::string::npos);
  EXPECT_NE(r.out.find("R@2"), std::string::npos);
  std::ofstream(scratch() / "broken.json") << R"({"version": 7})";
  EXPECT_EQ(run({"run-eval", "--corpus", corpus_file(), "--config",
                 (scratch() / "broken.json").string()})
                .code,
            cli::kFailure);
}

TEST(Cli, ReplayLog) {
  const fs::path dir = scratch() / "logs";
  std::string id;
  {
    SessionManager m(dir);
    SessionConfig cfg;
    cfg.forced_description = "mobile phone on notebook";
    id = m.create(fixtures::box_phone_notebook(), cfg)["id"];
    m.intervene(id, "box on mobile phone");
    m.step(id);
    m.step(id);
    m.step(id);
  }
  const auto out = scratch() / "final.json";
  const auto r = run({"replay", "--log", (dir / (id + ".jsonl")).string(), "--out", out.string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("EXECUTED (success)"), std::string::npos) << r.out;
  EXPECT_EQ(Json::parse(read(out))["phase"], "EXECUTED");

  std::string text = read(dir / (id + ".jsonl"));
  text.replace(text.find("box on mobile phone"), 3, "cup");
  std::ofstream(scratch() / "tampered.jsonl") << text;
  const auto bad = run({"replay", "--log", (scratch() / "tampered.jsonl").string()});
  EXPECT_EQ(bad.code, cli::kFailure);
  EXPECT_NE(bad.err.find("replay_divergence"), std::string::npos) << bad.err;
}
