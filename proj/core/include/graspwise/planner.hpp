#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "graspwise/geometry.hpp"
#include "graspwise/noise.hpp"
#include "graspwise/scene.hpp"

namespace graspwise {

/// Orientation classes: 0 is non-grasp, 1..18 cover [-90, 90) in 10 degree
/// bins, left-closed.
inline constexpr int kAngleClasses = 19;
inline constexpr double kAngleBinDegrees = 10.0;

int angle_to_class(double theta_degrees);
/// Bin center of class c in 1..18. Throws Error(kDomain) otherwise.
double class_to_angle(int angle_class);

struct PlannerConfig {
  /// Gaussian jitter of proposal centers, in px.
  double center_sigma_px = 5.0;
  /// Gaussian jitter of proposal sizes, as a fraction of the size.
  double size_sigma_frac = 0.10;
  int jitter_per_grasp = 32;
  int uniform_proposals = 64;
  std::size_t positive_count = 128;
  std::size_t negative_count = 128;
  double iou_threshold = 0.5;
  double tiou_threshold = 0.5;
  /// Std-dev of Gaussian noise added to box confidences (0 disables).
  double box_conf_sigma = 0.0;
  /// Loss weights, exposed for the training hook.
  double lambda1 = 1.0;
  double lambda2 = 1.0;

  void validate() const;

  friend bool operator==(const PlannerConfig&, const PlannerConfig&) = default;
};

enum class ProposalLabel { kNegative, kPositive };

struct Proposal {
  AxisRect envelope;
  /// Index into Scene::grasps of the best-overlapping annotation.
  std::optional<std::size_t> matched_gt;
  double iou_best = 0.0;
  double tiou_k = 0.0;
  ProposalLabel label = ProposalLabel::kNegative;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

/// Synthetic region proposals: Gaussian jitters of every annotated grasp
/// envelope plus uniform random boxes over the image, each matched to its
/// best annotation. Throws Error(kEmptyProposals) for scenes without grasps.
std::vector<Proposal> gen_proposals(const Scene& scene, std::uint64_t seed,
                                    const PlannerConfig& config = {});

/// Fills matched_gt and iou_best from the annotation envelopes.
void match_proposals(std::span<Proposal> proposals,
                     std::span<const GraspAnnotation> ground_truth);

struct SampleCounts {
  std::size_t positives = 128;
  std::size_t negatives = 128;
};

struct Thresholds {
  double iou = 0.5;
  double tiou = 0.5;
};

struct KgpnSample {
  std::vector<Proposal> positives;
  std::vector<Proposal> negatives;
};

/// Knowledge-guided proposal sampling. Proposals are drawn in seeded random
/// order; a proposal is POSITIVE iff iou with its ground truth > iou
/// threshold and tiou with the grounded region k > tiou threshold (both
/// strict), otherwise NEGATIVE. Each set keeps at most its count.
KgpnSample kgpn_sample(std::span<const Proposal> proposals,
                       std::span<const GraspAnnotation> ground_truth,
                       const AxisRect& k, SampleCounts counts, std::uint64_t seed,
                       Thresholds thresholds = {});

struct ScoredGrasp {
  GraspRect rect;
  AxisRect envelope;
  double box_conf = 0.0;
  double surface_conf = 0.0;
  int angle_class = 0;
  /// (box_conf + surface_conf) / 2.
  double final_conf = 0.0;
  double iou_best = 0.0;
  std::optional<std::size_t> matched_gt;
  /// Object of the matched annotation.
  std::optional<int> object_id;

  friend bool operator==(const ScoredGrasp&, const ScoredGrasp&) = default;
};

/// Scores positives and ranks them by final confidence, breaking ties by
/// larger iou_best, then smaller envelope x, then smaller envelope y.
/// box_conf is iou_best (plus optional noise); surface_conf is 1 when the
/// grounded object has nothing on it; the orientation is the bin of the
/// matched annotation. Surface and angle noise come from `noise`.
std::vector<ScoredGrasp> score_and_select(const Scene& scene,
                                          std::span<const Proposal> positives,
                                          int grounded_object_id,
                                          const NoiseConfig& noise,
                                          std::uint64_t seed,
                                          const PlannerConfig& config = {});

/// Full knowledge-guided planner: sample against k and rank.
std::vector<ScoredGrasp> plan_grasps(const Scene& scene,
                                     std::span<const Proposal> proposals,
                                     const AxisRect& k, int grounded_object_id,
                                     const NoiseConfig& noise, std::uint64_t seed,
                                     const PlannerConfig& config = {});

/// Object-agnostic detector: no tiou filter and no surface knowledge
/// (surface_conf fixed at 0.5).
std::vector<ScoredGrasp> baseline_end2end(const Scene& scene,
                                          std::span<const Proposal> proposals,
                                          std::uint64_t seed,
                                          const NoiseConfig& noise = {},
                                          const PlannerConfig& config = {});

/// Reverses each stacking relation of the closure with probability
/// flip_rate. Draws are coupled across rates: a relation flipped at rate r
/// is flipped at every rate above r for the same seed.
std::vector<Relation> corrupt_scene_graph(const SceneGraph& graph, double flip_rate,
                                          std::uint64_t seed);

/// Objects that are not below anything in the relation set.
std::set<int> graspable_objects(std::span<const int> object_ids,
                                std::span<const Relation> relations);

struct SceneGraphChoice {
  std::optional<int> target_id;
  std::vector<ScoredGrasp> ranking;
};

/// Scene-graph baseline: picks a target among the objects that a (possibly
/// corrupted) scene graph reports as graspable, with the same selection rule
/// and seed as the oracle describer, then runs the knowledge-guided planner
/// on the target's box. Falls back to the End2End ranking when the corrupted
/// graph leaves nothing graspable.
SceneGraphChoice baseline_scenegraph(const Scene& scene,
                                     std::span<const Proposal> proposals,
                                     double edge_flip_rate, std::uint64_t seed,
                                     std::uint64_t describe_seed,
                                     const NoiseConfig& noise = {},
                                     const PlannerConfig& config = {});

}  // namespace graspwise
