#include "cli.hpp"

#include <pthread.h>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "graspwise/config.hpp"
#include "graspwise/dataset_io.hpp"
#include "graspwise/error.hpp"
#include "graspwise/eval.hpp"
#include "graspwise/service.hpp"
#include "graspwise/session.hpp"

namespace graspwise::cli {

namespace {

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
  auto logger = std::make_shared<spdlog::logger>("graspwise", sink);
  logger->set_pattern("[%l] %v");
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("GRASPWISE_LOG")) {
    level = spdlog::level::from_str(env);
  }
  logger->set_level(level);
  return logger;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path);
  f << text;
  if (!f.flush()) throw Error(ErrorCode::kIo, "short write to " + path);
}

ExperimentConfig experiment_config(const CliConfig& c) {
  return c.config.empty() ? ExperimentConfig{} : load_experiment_config(c.config);
}

PipelineConfig pipeline_config(const CliConfig& c) {
  const auto exp = experiment_config(c);
  PipelineConfig p;
  p.method = *method_from_string(c.baseline);
  p.epsilon = c.eps;
  p.rho = c.rho;
  p.flip_rate = c.flip;
  p.ks = c.ks;
  p.seed = c.seed;
  p.noise = exp.noise;
  p.noise.ground_error_rate = c.delta;
  p.planner = exp.planner;
  return p;
}

void emit_reports(const CliConfig& c, const std::vector<EvalReport>& reports,
                  std::ostream& out) {
  const std::string table = format_table(reports);
  out << table;
  if (!c.report.empty()) {
    write_text(c.report, encode_reports(reports, c.per_scene).dump(2) + "\n");
    write_text(c.report + ".txt", table);
  }
}

int gen_scenes(const CliConfig& c, spdlog::logger& log, std::ostream& out) {
  GenOptions opt;
  opt.min_objects = c.min_objects;
  opt.max_objects = c.max_objects;
  opt.require_stack = c.require_stack;
  const Corpus corpus = gen_synthetic(c.n, c.seed, opt);
  save_corpus(corpus, c.out);
  log.info("wrote {} scenes to {}", corpus.size(), c.out);
  if (c.split) {
    const auto parts = split_corpus(corpus, c.seed);
    const std::string stem = c.out.size() > 5 && c.out.ends_with(".json")
                                 ? c.out.substr(0, c.out.size() - 5)
                                 : c.out;
    save_corpus(parts.train, stem + ".train.json");
    save_corpus(parts.val, stem + ".val.json");
    save_corpus(parts.test, stem + ".test.json");
    out << "split " << parts.train.size() << "/" << parts.val.size() << "/"
        << parts.test.size() << "\n";
  }
  out << "generated " << corpus.size() << " scenes -> " << c.out << "\n";
  return kOk;
}

int validate_cmd(const CliConfig& c, std::ostream& out) {
  const Corpus corpus = load_corpus(c.corpus, false);
  const auto issues = validate_corpus(corpus);
  for (const auto& i : issues) out << i.code << ": " << i.message << "\n";
  out << corpus.size() << " records, " << issues.size() << " issue(s)\n";
  return issues.empty() ? kOk : kFailure;
}

int run_eval(const CliConfig& c, spdlog::logger& log, std::ostream& out) {
  const Corpus corpus = load_corpus(c.corpus);
  log.info("evaluating {} on {} scenes", c.baseline, corpus.size());
  emit_reports(c, {run_pipeline(corpus, pipeline_config(c))}, out);
  return kOk;
}

int sweep(const CliConfig& c, spdlog::logger& log, std::ostream& out) {
  const Corpus corpus = load_corpus(c.corpus);
  log.info("sweeping {} rho values on {} scenes", c.rho_grid.size(), corpus.size());
  emit_reports(c, sweep_intervention(corpus, pipeline_config(c), c.rho_grid), out);
  return kOk;
}

int compare(const CliConfig& c, std::ostream& out) {
  const Corpus corpus = load_corpus(c.corpus);
  emit_reports(c, compare_baselines(corpus, pipeline_config(c)), out);
  return kOk;
}

int replay_cmd(const CliConfig& c, std::ostream& out) {
  const auto events = load_event_log(c.log);
  const SessionState s = replay(events);
  const std::string state = to_json(s).dump(2) + "\n";
  if (!c.out.empty()) write_text(c.out, state);
  out << "replayed " << events.size() << " events of session " << s.id << ": "
      << to_string(s.phase);
  if (s.success) out << (*s.success ? " (success)" : " (miss)");
  out << "\n";
  return kOk;
}

int serve(const CliConfig& c, spdlog::logger& log, std::ostream& out) {
  std::optional<Corpus> corpus;
  if (!c.corpus.empty()) corpus = load_corpus(c.corpus);
  std::optional<std::filesystem::path> log_dir;
  if (!c.log_dir.empty()) log_dir = c.log_dir;
  SessionManager manager(log_dir);
  SessionService service(manager, corpus ? &*corpus : nullptr);
  const int port = service.bind(c.host, c.port);
  out << "listening on " << c.host << ":" << port << std::endl;

  // Stop on SIGINT/SIGTERM from a waiting thread rather than a handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    log.info("signal {}, stopping", sig);
    service.stop();
  });
  service.serve();
  waiter.join();
  return kOk;
}

}  // namespace

void CliConfig::validate() const {
  auto rate = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kConfig, std::string("--") + name + " must be in [0, 1]");
    }
  };
  rate(eps, "eps");
  rate(rho, "rho");
  rate(flip, "flip");
  rate(delta, "delta");
  for (double r : rho_grid) rate(r, "rho-grid");
  if (rho_grid.empty()) throw Error(ErrorCode::kConfig, "--rho-grid is empty");
  if (ks.empty()) throw Error(ErrorCode::kConfig, "--k is empty");
  for (int k : ks) {
    if (k < 1) throw Error(ErrorCode::kConfig, "--k values must be >= 1");
  }
  if (!method_from_string(baseline)) {
    throw Error(ErrorCode::kConfig, "--baseline must be end2end, scenegraph or scenetext");
  }
  if (min_objects < 1 || max_objects < min_objects) {
    throw Error(ErrorCode::kConfig, "need 1 <= --min-objects <= --max-objects");
  }
  if (port < 0 || port > 65535) throw Error(ErrorCode::kConfig, "--port out of range");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig c;
  CLI::App app{"Simulator and evaluation harness for human-in-the-loop grasping",
               "graspwise"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-scenes", "Generate a synthetic corpus");
  gen->add_option("--n", c.n, "Number of scenes")->capture_default_str();
  gen->add_option("--seed", c.seed, "Seed")->capture_default_str();
  gen->add_option("--out", c.out, "Output corpus file")->required();
  gen->add_option("--min-objects", c.min_objects)->capture_default_str();
  gen->add_option("--max-objects", c.max_objects)->capture_default_str();
  gen->add_flag("--require-stack", c.require_stack, "Every scene has a stacked pair");
  gen->add_flag("--split", c.split, "Also write 3740/468/468-proportioned splits");

  auto add_eval_options = [&](CLI::App* sub) {
    sub->add_option("--corpus", c.corpus, "Corpus file")->required();
    sub->add_option("--seed", c.seed)->capture_default_str();
    sub->add_option("--eps", c.eps, "Self-explanation error rate")->capture_default_str();
    sub->add_option("--delta", c.delta, "Grounding error rate")->capture_default_str();
    sub->add_option("--k", c.ks, "Cutoffs")->delimiter(',')->capture_default_str();
    sub->add_option("--config", c.config, "Planner config file");
    sub->add_option("--report", c.report, "Report file (JSON; table at <report>.txt)");
    sub->add_flag("--per-scene", c.per_scene, "Include per-scene outcomes in the report");
  };
  auto* eval = app.add_subcommand("run-eval", "Evaluate one method");
  add_eval_options(eval);
  eval->add_option("--baseline", c.baseline, "end2end | scenegraph | scenetext")
      ->check(CLI::IsMember({"end2end", "scenegraph", "scenetext"}))
      ->capture_default_str();
  eval->add_option("--rho", c.rho, "Intervention rate")->capture_default_str();
  eval->add_option("--flip", c.flip, "SceneGraph relation flip rate")->capture_default_str();

  auto* sw = app.add_subcommand("sweep-intervention", "F1 across intervention rates");
  add_eval_options(sw);
  sw->add_option("--rho-grid", c.rho_grid)->delimiter(',')->capture_default_str();

  auto* cmp = app.add_subcommand("compare-baselines", "Table of all methods");
  add_eval_options(cmp);

  auto* val = app.add_subcommand("validate", "Validate a corpus");
  val->add_option("--corpus", c.corpus)->required();

  auto* srv = app.add_subcommand("serve", "Run the session service");
  srv->add_option("--port", c.port)->capture_default_str();
  srv->add_option("--host", c.host)->capture_default_str();
  srv->add_option("--corpus", c.corpus, "Corpus for scene_id lookups");
  srv->add_option("--log-dir", c.log_dir, "Directory for per-session event logs");

  auto* rep = app.add_subcommand("replay", "Replay a session event log");
  rep->add_option("--log", c.log)->required();
  rep->add_option("--out", c.out, "Write the final state here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    err << "run with --help for usage\n";
    return kUsage;
  }

  const auto log = make_logger(err);
  try {
    c.validate();
  } catch (const Error& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (gen->parsed()) return gen_scenes(c, *log, out);
    if (eval->parsed()) return run_eval(c, *log, out);
    if (sw->parsed()) return sweep(c, *log, out);
    if (cmp->parsed()) return compare(c, out);
    if (val->parsed()) return validate_cmd(c, out);
    if (srv->parsed()) return serve(c, *log, out);
    if (rep->parsed()) return replay_cmd(c, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    for (const auto& d : e.details()) err << "  " << d << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace graspwise::cli
