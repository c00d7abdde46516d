#include "graspwise/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "graspwise/error.hpp"
#include "graspwise/grounding.hpp"
#include "graspwise/random.hpp"

namespace graspwise {

// ---------------------------------------------------------------------------
// Correctness and metrics

bool is_correct(const GraspRect& pred, const Scene& scene,
                const std::set<int>& collision_free, JaccardMode mode) {
  if (!pred.valid()) return false;
  for (const auto& gt : scene.grasps) {
    if (!collision_free.count(gt.object_id)) continue;
    if (angle_difference(pred.theta, gt.rect.theta) >= kCorrectAngleDegrees) continue;
    if (jaccard(pred, gt.rect, mode) > kCorrectJaccard) return true;
  }
  return false;
}

bool is_correct(const GraspRect& pred, const Scene& scene, JaccardMode mode) {
  return is_correct(pred, scene, collision_free_set(scene), mode);
}

bool is_correct(const ScoredGrasp& pred, const Scene& scene, JaccardMode mode) {
  return is_correct(pred.rect, scene, mode);
}

std::vector<bool> correctness_mask(const std::vector<ScoredGrasp>& ranked,
                                   const Scene& scene, std::size_t limit,
                                   JaccardMode mode) {
  const auto free = collision_free_set(scene);
  std::vector<bool> mask;
  const std::size_t n = std::min(limit, ranked.size());
  mask.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    mask.push_back(is_correct(ranked[i].rect, scene, free, mode));
  }
  return mask;
}

namespace {

void check_metric_input(const std::vector<std::vector<bool>>& masks, int k) {
  if (masks.empty()) throw Error(ErrorCode::kUndefinedMetric, "metric over an empty corpus");
  if (k < 1) throw Error(ErrorCode::kDomain, "k must be >= 1, got " + std::to_string(k));
}

}  // namespace

double recall_at_k(const std::vector<std::vector<bool>>& masks, int k) {
  check_metric_input(masks, k);
  std::size_t hits = 0;
  for (const auto& m : masks) {
    const auto end = m.begin() + static_cast<std::ptrdiff_t>(
                                     std::min<std::size_t>(k, m.size()));
    if (std::find(m.begin(), end, true) != end) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(masks.size());
}

double precision_at_k(const std::vector<std::vector<bool>>& masks, int k) {
  check_metric_input(masks, k);
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto& m : masks) {
    const std::size_t n = std::min<std::size_t>(k, m.size());
    correct += static_cast<std::size_t>(std::count(m.begin(), m.begin() + n, true));
    total += n;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

double f1(double p, double r) {
  if (!(p >= 0.0 && p <= 1.0 && r >= 0.0 && r <= 1.0)) {
    throw Error(ErrorCode::kDomain, "f1 needs p and r in [0, 1]");
  }
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

double subject_correct_rate(const std::vector<Description>& generated,
                            const std::vector<std::string>& gt_subjects,
                            const Lexicon& lexicon) {
  if (generated.size() != gt_subjects.size()) {
    throw Error(ErrorCode::kShape, "subject_correct_rate: " +
                                       std::to_string(generated.size()) +
                                       " descriptions vs " +
                                       std::to_string(gt_subjects.size()) + " subjects");
  }
  if (generated.empty()) {
    throw Error(ErrorCode::kUndefinedMetric, "subject_correct_rate over no descriptions");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < generated.size(); ++i) {
    const auto outcome = try_parse(generated[i].text, lexicon);
    if (outcome.ok() && outcome.triple->subject_class == gt_subjects[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(generated.size());
}

// ---------------------------------------------------------------------------
// Pipeline runs

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kSceneText: return "scenetext";
    case Method::kEnd2End: return "end2end";
    case Method::kSceneGraph: return "scenegraph";
  }
  return "scenetext";
}

std::optional<Method> method_from_string(std::string_view s) {
  for (Method m : {Method::kSceneText, Method::kEnd2End, Method::kSceneGraph}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

void PipelineConfig::validate() const {
  auto rate = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kConfig, std::string(name) + " must be in [0, 1]");
    }
  };
  rate(epsilon, "epsilon");
  rate(rho, "rho");
  rate(flip_rate, "flip_rate");
  if (ks.empty()) throw Error(ErrorCode::kConfig, "at least one k is required");
  for (int k : ks) {
    if (k < 1) throw Error(ErrorCode::kConfig, "k values must be >= 1");
  }
  noise.validate();
  planner.validate();
}

Json encode(const PipelineConfig& c) {
  Json j;
  j["method"] = std::string(to_string(c.method));
  j["epsilon"] = c.epsilon;
  j["rho"] = c.rho;
  j["flip_rate"] = c.flip_rate;
  j["ks"] = c.ks;
  j["seed"] = c.seed;
  j["noise"] = encode(c.noise);
  j["planner"] = encode(c.planner);
  j["jaccard"] = c.jaccard == JaccardMode::kRotated ? "rotated" : "axis_aligned";
  j["stratified"] = c.stratified;
  return j;
}

namespace {

// u_i = (pi(i) + U_i) / n: exactly one draw per interval [j/n, (j+1)/n).
std::vector<double> stratified_draws(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(derive_seed(seed, streams::kStratify));
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng r(derive_seed(seed, streams::kStratify, i + 1));
    u[i] = (static_cast<double>(perm[i]) + uniform01(r)) / static_cast<double>(n);
  }
  return u;
}

SceneOutcome run_scene(const SampleRecord& record, std::size_t i, double u,
                       const PipelineConfig& cfg, std::size_t kmax) {
  const Scene& scene = record.scene;
  SceneOutcome out;
  out.scene_id = scene.id;
  const std::uint64_t describe_seed = derive_seed(cfg.seed, streams::kDescribe, i);
  const std::uint64_t plan_seed = derive_seed(cfg.seed, streams::kScoring, i);
  const auto oracle = describe_target(scene, describe_seed);
  const AxisRect& oracle_box = scene.object(oracle.target_id).bbox;

  std::vector<Proposal> proposals;
  try {
    proposals = gen_proposals(scene, derive_seed(cfg.seed, streams::kProposals, i),
                              cfg.planner);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptyProposals) throw;
    return out;
  }

  std::vector<ScoredGrasp> ranking;
  switch (cfg.method) {
    case Method::kEnd2End:
      ranking = baseline_end2end(scene, proposals, plan_seed, cfg.noise, cfg.planner);
      break;
    case Method::kSceneGraph: {
      auto choice = baseline_scenegraph(scene, proposals, cfg.flip_rate, plan_seed,
                                        describe_seed, cfg.noise, cfg.planner);
      out.target_id = choice.target_id;
      if (choice.target_id) {
        out.grounded = true;
        out.grounding_correct =
            rect_iou(scene.object(*choice.target_id).bbox, oracle_box) > 0.5;
      }
      ranking = std::move(choice.ranking);
      break;
    }
    case Method::kSceneText: {
      std::optional<GroundedObject> grounded;
      if (!oracle.description) {
        grounded = ground_sole_object(scene);
      } else {
        out.has_description = true;
        const Description& truth = *oracle.description;
        const std::uint64_t corrupt_seed = derive_seed(cfg.seed, streams::kCorrupt, i);
        Description said;
        Description final_desc;
        if (cfg.stratified) {
          said = corrupt_description_with_draw(truth, scene, cfg.epsilon, u, corrupt_seed);
          // Given corruption, u / epsilon is uniform on [0, 1).
          const double v = cfg.epsilon > 0.0 ? u / cfg.epsilon : 1.0;
          final_desc = intervene_with_draw(said, truth, cfg.rho, v);
        } else {
          said = corrupt_description(truth, scene, cfg.epsilon, corrupt_seed);
          final_desc = intervene(said, truth, cfg.rho,
                                 derive_seed(cfg.seed, streams::kIntervene, i));
        }
        out.corrupted = !said.triple.same_statement(truth.triple);
        out.corrected = out.corrupted && final_desc.source == DescriptionSource::kHuman;
        out.description_correct = final_desc.triple.same_statement(truth.triple);
        try {
          grounded = noisy_ground(scene, final_desc, cfg.noise.ground_error_rate,
                                  derive_seed(cfg.seed, streams::kGround, i));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kGroundingFailure) throw;
        }
      }
      if (grounded) {
        out.grounded = true;
        out.target_id = grounded->object_id;
        out.grounding_correct = rect_iou(grounded->region, oracle_box) > 0.5;
        ranking = plan_grasps(scene, proposals, grounded->region, grounded->object_id,
                              cfg.noise, plan_seed, cfg.planner);
      }
      break;
    }
  }
  out.mask = correctness_mask(ranking, scene, kmax, cfg.jaccard);
  if (!ranking.empty()) out.top = ranking.front();
  return out;
}

}  // namespace

EvalReport run_pipeline(const Corpus& corpus, const PipelineConfig& config) {
  config.validate();
  if (corpus.empty()) {
    throw Error(ErrorCode::kUndefinedMetric, "cannot evaluate an empty corpus");
  }
  const std::size_t n = corpus.size();
  const std::size_t kmax =
      static_cast<std::size_t>(*std::max_element(config.ks.begin(), config.ks.end()));
  const auto draws = stratified_draws(n, config.seed);

  EvalReport report;
  report.config = config;
  report.n_scenes = n;
  report.intervention_rate = config.rho;
  report.scenes.resize(n);

  unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::min<std::size_t>(n, 64)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        report.scenes[i] = run_scene(corpus.records[i], i, draws[i], config, kmax);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::vector<bool>> masks;
  masks.reserve(n);
  std::size_t described = 0;
  std::size_t wrong = 0;
  std::size_t desc_ok = 0;
  std::size_t ground_ok = 0;
  for (const auto& s : report.scenes) {
    masks.push_back(s.mask);
    if (s.has_description) {
      ++described;
      if (!s.description_correct) ++wrong;
    }
    if (s.description_correct) ++desc_ok;
    if (s.grounding_correct) ++ground_ok;
    if (s.corrupted) ++report.n_corrupted;
    if (s.corrected) ++report.n_corrected;
  }
  for (int k : config.ks) {
    report.recall[k] = recall_at_k(masks, k);
    report.precision[k] = precision_at_k(masks, k);
  }
  const double r1 = recall_at_k(masks, 1);
  const double p1 = precision_at_k(masks, 1);
  report.f1 = f1(p1, r1);
  report.accuracy = static_cast<double>(ground_ok) / static_cast<double>(n);
  report.description_accuracy = static_cast<double>(desc_ok) / static_cast<double>(n);
  report.residual_error_rate =
      described ? static_cast<double>(wrong) / static_cast<double>(described) : 0.0;

  char label[96];
  switch (config.method) {
    case Method::kEnd2End:
      std::snprintf(label, sizeof label, "End2End");
      break;
    case Method::kSceneGraph:
      std::snprintf(label, sizeof label, "SceneGraph(flip=%.2f)", config.flip_rate);
      break;
    case Method::kSceneText:
      if (config.epsilon == 0.0) {
        std::snprintf(label, sizeof label, "SceneText(oracle)");
      } else {
        std::snprintf(label, sizeof label, "SceneText(eps=%.2f,rho=%.2f)", config.epsilon,
                      config.rho);
      }
      break;
  }
  report.label = label;
  return report;
}

std::vector<EvalReport> sweep_intervention(const Corpus& corpus,
                                           const PipelineConfig& base,
                                           const std::vector<double>& rhos) {
  if (rhos.empty()) throw Error(ErrorCode::kConfig, "empty rho grid");
  std::vector<EvalReport> out;
  for (double rho : rhos) {
    PipelineConfig c = base;
    c.method = Method::kSceneText;
    c.rho = rho;
    out.push_back(run_pipeline(corpus, c));
  }
  return out;
}

std::vector<EvalReport> compare_baselines(const Corpus& corpus,
                                          const PipelineConfig& base,
                                          const BaselineGrid& grid) {
  std::vector<EvalReport> out;
  PipelineConfig c = base;
  c.epsilon = 0.0;
  c.rho = 0.0;
  c.flip_rate = 0.0;
  c.method = Method::kEnd2End;
  out.push_back(run_pipeline(corpus, c));
  c.method = Method::kSceneGraph;
  for (double flip : grid.flip_rates) {
    c.flip_rate = flip;
    out.push_back(run_pipeline(corpus, c));
  }
  c.flip_rate = 0.0;
  c.method = Method::kSceneText;
  out.push_back(run_pipeline(corpus, c));
  for (double eps : grid.epsilons) {
    for (double rho : grid.rhos) {
      c.epsilon = eps;
      c.rho = rho;
      out.push_back(run_pipeline(corpus, c));
    }
  }
  return out;
}

Json encode(const EvalReport& r, bool include_scenes) {
  Json j;
  j["label"] = r.label;
  Json recall = Json::object();
  for (const auto& [k, v] : r.recall) recall["R@" + std::to_string(k)] = v;
  Json precision = Json::object();
  for (const auto& [k, v] : r.precision) precision["P@" + std::to_string(k)] = v;
  j["recall"] = std::move(recall);
  j["precision"] = std::move(precision);
  j["f1"] = r.f1;
  j["accuracy"] = r.accuracy;
  j["description_accuracy"] = r.description_accuracy;
  j["residual_error_rate"] = r.residual_error_rate;
  j["n_scenes"] = r.n_scenes;
  j["n_corrupted"] = r.n_corrupted;
  j["n_corrected"] = r.n_corrected;
  j["intervention_rate"] = r.intervention_rate;
  j["config"] = encode(r.config);
  if (include_scenes) {
    Json scenes = Json::array();
    for (const auto& s : r.scenes) {
      Json o;
      o["scene"] = s.scene_id;
      o["corrupted"] = s.corrupted;
      o["corrected"] = s.corrected;
      o["description_correct"] = s.description_correct;
      o["grounded"] = s.grounded;
      o["target"] = s.target_id ? Json(*s.target_id) : Json(nullptr);
      o["mask"] = s.mask;
      scenes.push_back(std::move(o));
    }
    j["scenes"] = std::move(scenes);
  }
  return j;
}

Json encode_reports(const std::vector<EvalReport>& reports, bool include_scenes) {
  Json j;
  j["f1_definition"] = "harmonic mean of P@1 and R@1";
  j["precision_denominator"] = "sum over scenes of min(k, number of ranked grasps)";
  Json arr = Json::array();
  for (const auto& r : reports) arr.push_back(encode(r, include_scenes));
  j["reports"] = std::move(arr);
  return j;
}

std::string format_table(const std::vector<EvalReport>& reports) {
  std::set<int> ks;
  for (const auto& r : reports) {
    for (const auto& [k, v] : r.recall) ks.insert(k);
  }
  std::size_t label_w = 6;
  for (const auto& r : reports) label_w = std::max(label_w, r.label.size());

  std::ostringstream out;
  out << "# F1 = harmonic mean of P@1 and R@1; values in percent\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(label_w), "Method");
  out << buf;
  for (int k : ks) {
    std::snprintf(buf, sizeof buf, " %6s", ("R@" + std::to_string(k)).c_str());
    out << buf;
  }
  for (int k : ks) {
    std::snprintf(buf, sizeof buf, " %6s", ("P@" + std::to_string(k)).c_str());
    out << buf;
  }
  out << "     F1    Acc\n";
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(label_w), r.label.c_str());
    out << buf;
    for (int k : ks) {
      auto it = r.recall.find(k);
      if (it == r.recall.end()) {
        out << "      -";
      } else {
        std::snprintf(buf, sizeof buf, " %6.1f", 100.0 * it->second);
        out << buf;
      }
    }
    for (int k : ks) {
      auto it = r.precision.find(k);
      if (it == r.precision.end()) {
        out << "      -";
      } else {
        std::snprintf(buf, sizeof buf, " %6.1f", 100.0 * it->second);
        out << buf;
      }
    }
    // End2End has no grounding stage, so there is no accuracy to show.
    if (r.config.method == Method::kEnd2End) {
      std::snprintf(buf, sizeof buf, " %6.1f      -\n", 100.0 * r.f1);
    } else {
      std::snprintf(buf, sizeof buf, " %6.1f %6.1f\n", 100.0 * r.f1, 100.0 * r.accuracy);
    }
    out << buf;
  }
  return out.str();
}

}  // namespace graspwise
