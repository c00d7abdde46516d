#include "graspwise/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "graspwise/error.hpp"
#include "graspwise/lang.hpp"
#include "graspwise/random.hpp"

namespace graspwise {

namespace {

double draw_normal(Rng& rng, double sigma) {
  if (sigma <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

bool ranks_before(const ScoredGrasp& a, const ScoredGrasp& b) {
  if (a.final_conf != b.final_conf) return a.final_conf > b.final_conf;
  if (a.iou_best != b.iou_best) return a.iou_best > b.iou_best;
  if (a.envelope.x != b.envelope.x) return a.envelope.x < b.envelope.x;
  return a.envelope.y < b.envelope.y;
}

// Shared scoring; `fixed_surface` replaces the surface knowledge when set.
std::vector<ScoredGrasp> score(const Scene& scene, std::span<const Proposal> positives,
                               std::optional<double> fixed_surface,
                               bool grounded_surface, const NoiseConfig& noise,
                               std::uint64_t seed, const PlannerConfig& config) {
  noise.validate();
  Rng rng(seed);
  std::uniform_int_distribution<int> other_class(1, kAngleClasses - 2);
  std::vector<ScoredGrasp> out;
  out.reserve(positives.size());
  for (const auto& p : positives) {
    if (!p.matched_gt || *p.matched_gt >= scene.grasps.size()) {
      throw Error(ErrorCode::kDomain, "positive proposal without a matched grasp");
    }
    const GraspAnnotation& gt = scene.grasps[*p.matched_gt];
    // Draw every noise variable for every proposal so rankings stay coupled
    // across noise rates.
    const double box_noise = draw_normal(rng, config.box_conf_sigma);
    const double u_surface = uniform01(rng);
    const double u_angle = uniform01(rng);
    const int replacement = other_class(rng);

    ScoredGrasp g;
    g.envelope = p.envelope;
    g.iou_best = p.iou_best;
    g.matched_gt = p.matched_gt;
    g.object_id = gt.object_id;
    g.box_conf = std::clamp(p.iou_best + box_noise, 0.0, 1.0);
    if (fixed_surface) {
      g.surface_conf = *fixed_surface;
    } else {
      bool surface = grounded_surface;
      if (u_surface < noise.surface_flip_rate) surface = !surface;
      g.surface_conf = surface ? 1.0 : 0.0;
    }
    g.angle_class = angle_to_class(gt.rect.theta);
    if (u_angle < noise.angle_noise_rate) {
      // Uniform over the 17 other grasp classes.
      g.angle_class = replacement >= g.angle_class ? replacement + 1 : replacement;
    }
    const AxisRect gt_env = axis_envelope(gt.rect);
    const double scale =
        std::sqrt((p.envelope.w / gt_env.w) * (p.envelope.h / gt_env.h));
    g.rect = GraspRect{p.envelope.center_x(), p.envelope.center_y(),
                       class_to_angle(g.angle_class), gt.rect.w * scale,
                       gt.rect.h * scale};
    g.final_conf = (g.box_conf + g.surface_conf) / 2.0;
    out.push_back(g);
  }
  std::stable_sort(out.begin(), out.end(), ranks_before);
  return out;
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

}  // namespace

int angle_to_class(double theta_degrees) {
  const double t = normalize_angle(theta_degrees);
  const int bin = static_cast<int>(std::floor((t + 90.0) / kAngleBinDegrees));
  return std::clamp(bin, 0, kAngleClasses - 2) + 1;
}

double class_to_angle(int angle_class) {
  if (angle_class < 1 || angle_class >= kAngleClasses) {
    throw Error(ErrorCode::kDomain,
                "orientation class " + std::to_string(angle_class) +
                    " has no angle");
  }
  return -90.0 + (angle_class - 1) * kAngleBinDegrees + kAngleBinDegrees / 2.0;
}

void PlannerConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kConfig, "planner config: " + what);
  };
  if (!(center_sigma_px >= 0.0)) fail("center_sigma_px must be >= 0");
  if (!(size_sigma_frac >= 0.0)) fail("size_sigma_frac must be >= 0");
  if (jitter_per_grasp < 0) fail("jitter_per_grasp must be >= 0");
  if (uniform_proposals < 0) fail("uniform_proposals must be >= 0");
  if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) fail("iou_threshold in [0,1]");
  if (!(tiou_threshold >= 0.0 && tiou_threshold <= 1.0)) fail("tiou_threshold in [0,1]");
  if (!(box_conf_sigma >= 0.0)) fail("box_conf_sigma must be >= 0");
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) fail("loss weights must be >= 0");
}

void match_proposals(std::span<Proposal> proposals,
                     std::span<const GraspAnnotation> ground_truth) {
  std::vector<AxisRect> envelopes;
  envelopes.reserve(ground_truth.size());
  for (const auto& g : ground_truth) envelopes.push_back(axis_envelope(g.rect));
  for (auto& p : proposals) {
    p.matched_gt.reset();
    p.iou_best = 0.0;
    for (std::size_t i = 0; i < envelopes.size(); ++i) {
      const double iou = rect_iou(p.envelope, envelopes[i]);
      if (!p.matched_gt || iou > p.iou_best) {
        p.iou_best = iou;
        p.matched_gt = i;
      }
    }
  }
}

std::vector<Proposal> gen_proposals(const Scene& scene, std::uint64_t seed,
                                    const PlannerConfig& config) {
  config.validate();
  if (scene.grasps.empty()) {
    throw Error(ErrorCode::kEmptyProposals,
                "scene '" + scene.id + "' has no grasp annotations");
  }
  Rng rng(seed);
  std::vector<Proposal> out;
  out.reserve(scene.grasps.size() * config.jitter_per_grasp +
              config.uniform_proposals);
  for (const auto& g : scene.grasps) {
    const AxisRect env = axis_envelope(g.rect);
    for (int j = 0; j < config.jitter_per_grasp; ++j) {
      const double cx = env.center_x() + draw_normal(rng, config.center_sigma_px);
      const double cy = env.center_y() + draw_normal(rng, config.center_sigma_px);
      const double w =
          std::max(1.0, env.w * (1.0 + draw_normal(rng, config.size_sigma_frac)));
      const double h =
          std::max(1.0, env.h * (1.0 + draw_normal(rng, config.size_sigma_frac)));
      Proposal p;
      p.envelope = (w == env.w && h == env.h && cx == env.center_x() &&
                    cy == env.center_y())
                       ? env
                       : AxisRect{cx - 0.5 * w, cy - 0.5 * h, w, h};
      out.push_back(p);
    }
  }
  const double width = std::max(scene.width, 1);
  const double height = std::max(scene.height, 1);
  const double min_side = std::min(16.0, std::min(width, height));
  for (int j = 0; j < config.uniform_proposals; ++j) {
    const double w = std::uniform_real_distribution<double>(
        min_side, std::max(min_side, width / 3.0))(rng);
    const double h = std::uniform_real_distribution<double>(
        min_side, std::max(min_side, height / 3.0))(rng);
    const double x = std::uniform_real_distribution<double>(0.0, width - w)(rng);
    const double y = std::uniform_real_distribution<double>(0.0, height - h)(rng);
    Proposal p;
    p.envelope = AxisRect{x, y, w, h};
    out.push_back(p);
  }
  match_proposals(out, scene.grasps);
  return out;
}

KgpnSample kgpn_sample(std::span<const Proposal> proposals,
                       std::span<const GraspAnnotation> ground_truth,
                       const AxisRect& k, SampleCounts counts, std::uint64_t seed,
                       Thresholds thresholds) {
  std::vector<Proposal> labeled(proposals.begin(), proposals.end());
  match_proposals(labeled, ground_truth);
  KgpnSample out;
  for (std::size_t idx : shuffled_order(labeled.size(), seed)) {
    if (out.positives.size() >= counts.positives &&
        out.negatives.size() >= counts.negatives) {
      break;
    }
    Proposal p = labeled[idx];
    p.tiou_k = tiou(p.envelope, k);
    if (p.iou_best > thresholds.iou && p.tiou_k > thresholds.tiou) {
      p.label = ProposalLabel::kPositive;
      if (out.positives.size() < counts.positives) out.positives.push_back(p);
    } else {
      p.label = ProposalLabel::kNegative;
      if (out.negatives.size() < counts.negatives) out.negatives.push_back(p);
    }
  }
  return out;
}

std::vector<ScoredGrasp> score_and_select(const Scene& scene,
                                          std::span<const Proposal> positives,
                                          int grounded_object_id,
                                          const NoiseConfig& noise,
                                          std::uint64_t seed,
                                          const PlannerConfig& config) {
  const bool surface = surface_label(scene, grounded_object_id);
  return score(scene, positives, std::nullopt, surface, noise, seed, config);
}

std::vector<ScoredGrasp> plan_grasps(const Scene& scene,
                                     std::span<const Proposal> proposals,
                                     const AxisRect& k, int grounded_object_id,
                                     const NoiseConfig& noise, std::uint64_t seed,
                                     const PlannerConfig& config) {
  const auto sample = kgpn_sample(
      proposals, scene.grasps, k, {config.positive_count, config.negative_count},
      derive_seed(seed, streams::kSampling),
      {config.iou_threshold, config.tiou_threshold});
  return score_and_select(scene, sample.positives, grounded_object_id, noise,
                          derive_seed(seed, streams::kScoring), config);
}

std::vector<ScoredGrasp> baseline_end2end(const Scene& scene,
                                          std::span<const Proposal> proposals,
                                          std::uint64_t seed,
                                          const NoiseConfig& noise,
                                          const PlannerConfig& config) {
  std::vector<Proposal> labeled(proposals.begin(), proposals.end());
  match_proposals(labeled, scene.grasps);
  std::vector<Proposal> positives;
  for (std::size_t idx :
       shuffled_order(labeled.size(), derive_seed(seed, streams::kSampling))) {
    if (positives.size() >= config.positive_count) break;
    Proposal p = labeled[idx];
    if (p.iou_best > config.iou_threshold) {
      p.label = ProposalLabel::kPositive;
      positives.push_back(p);
    }
  }
  return score(scene, positives, 0.5, false, noise,
               derive_seed(seed, streams::kScoring), config);
}

std::vector<Relation> corrupt_scene_graph(const SceneGraph& graph, double flip_rate,
                                          std::uint64_t seed) {
  if (!(flip_rate >= 0.0 && flip_rate <= 1.0)) {
    throw Error(ErrorCode::kConfig, "edge flip rate must lie in [0, 1]");
  }
  Rng rng(seed);
  std::vector<Relation> out;
  for (const auto& r : graph.relations()) {
    const double u = uniform01(rng);
    if (is_stacking(r.predicate) && u < flip_rate) {
      out.push_back({r.object, r.predicate, r.subject});
    } else {
      out.push_back(r);
    }
  }
  return out;
}

std::set<int> graspable_objects(std::span<const int> object_ids,
                                std::span<const Relation> relations) {
  std::set<int> out(object_ids.begin(), object_ids.end());
  for (const auto& r : relations) {
    if (r.predicate == Predicate::kOn) out.erase(r.object);
    if (r.predicate == Predicate::kUnder) out.erase(r.subject);
  }
  return out;
}

SceneGraphChoice baseline_scenegraph(const Scene& scene,
                                     std::span<const Proposal> proposals,
                                     double edge_flip_rate, std::uint64_t seed,
                                     std::uint64_t describe_seed,
                                     const NoiseConfig& noise,
                                     const PlannerConfig& config) {
  const SceneGraph graph = closure(scene);
  const auto relations = corrupt_scene_graph(
      graph, edge_flip_rate, derive_seed(seed, streams::kGraphNoise));
  const auto graspable = graspable_objects(graph.object_ids(), relations);
  SceneGraphChoice out;
  if (graspable.empty()) {
    out.ranking = baseline_end2end(scene, proposals, seed, noise, config);
    return out;
  }
  std::set<int> on_something;
  for (const auto& r : relations) {
    if (r.predicate == Predicate::kOn) on_something.insert(r.subject);
    if (r.predicate == Predicate::kUnder) on_something.insert(r.object);
  }
  const int target = select_target(graspable, on_something,
                                   derive_seed(describe_seed, streams::kDescribe, 0));
  out.target_id = target;
  out.ranking = plan_grasps(scene, proposals, scene.object(target).bbox, target,
                            noise, seed, config);
  return out;
}

}  // namespace graspwise
