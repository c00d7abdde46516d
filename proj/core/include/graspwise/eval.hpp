#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "graspwise/codec.hpp"
#include "graspwise/dataset_io.hpp"
#include "graspwise/geometry.hpp"
#include "graspwise/lang.hpp"
#include "graspwise/noise.hpp"
#include "graspwise/planner.hpp"
#include "graspwise/scene.hpp"

namespace graspwise {

// ---------------------------------------------------------------------------
// Correctness and metrics

/// Jaccard strictly above this and angle error strictly below the next.
inline constexpr double kCorrectJaccard = 0.25;
inline constexpr double kCorrectAngleDegrees = 30.0;

/// True iff some annotated grasp of a collision-free object has Jaccard >
/// 0.25 with `pred` and differs from it by less than 30 degrees (mod 180).
/// Invalid rectangles are never correct.
bool is_correct(const GraspRect& pred, const Scene& scene,
                JaccardMode mode = JaccardMode::kRotated);
bool is_correct(const ScoredGrasp& pred, const Scene& scene,
                JaccardMode mode = JaccardMode::kRotated);
/// Same, with the collision-free set precomputed.
bool is_correct(const GraspRect& pred, const Scene& scene,
                const std::set<int>& collision_free, JaccardMode mode);

/// Correctness of the first `limit` ranked grasps (fewer if the ranking is
/// shorter).
std::vector<bool> correctness_mask(const std::vector<ScoredGrasp>& ranked,
                                   const Scene& scene, std::size_t limit,
                                   JaccardMode mode = JaccardMode::kRotated);

/// masks[s][r]: whether rank r of scene s is correct; masks[s].size() is the
/// number of predictions considered for that scene. Throws
/// Error(kUndefinedMetric) for an empty corpus and Error(kDomain) for k < 1.
double recall_at_k(const std::vector<std::vector<bool>>& masks, int k);
/// (sum of correct in top k) / (sum of min(k, |ranked|)); 0 when no scene has
/// a prediction.
double precision_at_k(const std::vector<std::vector<bool>>& masks, int k);

/// Harmonic mean; 0 when p = r = 0. Throws Error(kDomain) outside [0, 1].
double f1(double p, double r);

/// Fraction of descriptions whose parsed subject is the expected class.
/// Unparseable text counts as wrong. Throws Error(kShape) on a length
/// mismatch and Error(kUndefinedMetric) on empty input.
double subject_correct_rate(const std::vector<Description>& generated,
                            const std::vector<std::string>& gt_subjects,
                            const Lexicon& lexicon = Lexicon::default_lexicon());

// ---------------------------------------------------------------------------
// Pipeline runs

enum class Method { kSceneText, kEnd2End, kSceneGraph };

std::string_view to_string(Method m);
std::optional<Method> method_from_string(std::string_view s);

struct PipelineConfig {
  Method method = Method::kSceneText;
  /// Self-explanation error rate.
  double epsilon = 0.0;
  /// Share of wrong self-explanations the operator corrects.
  double rho = 0.0;
  /// Stacking-relation flip rate for the SceneGraph baseline.
  double flip_rate = 0.0;
  std::vector<int> ks{1, 3, 5, 10};
  std::uint64_t seed = 0;
  /// Grounding, surface and angle noise; its describe rate and seed are
  /// ignored in favour of epsilon and seed above.
  NoiseConfig noise;
  PlannerConfig planner;
  JaccardMode jaccard = JaccardMode::kRotated;
  /// Draw corruption and intervention from one stratified uniform per scene
  /// (see run_pipeline). Off gives independent draws.
  bool stratified = true;
  /// Worker threads; 0 uses the hardware concurrency. Results do not depend
  /// on it.
  unsigned threads = 0;

  /// Throws Error(kConfig).
  void validate() const;
};

Json encode(const PipelineConfig& c);

/// What happened to one scene.
struct SceneOutcome {
  std::string scene_id;
  bool has_description = false;
  bool corrupted = false;
  bool corrected = false;
  /// Final description states the oracle relation.
  bool description_correct = true;
  bool grounded = false;
  /// Grounded region has IoU > 0.5 with the oracle target box.
  bool grounding_correct = false;
  std::optional<int> target_id;
  /// Correctness of the top max(k) grasps.
  std::vector<bool> mask;
  std::optional<ScoredGrasp> top;
};

struct EvalReport {
  std::string label;
  std::map<int, double> recall;
  std::map<int, double> precision;
  /// From P@1 and R@1.
  double f1 = 0.0;
  /// Grounding accuracy: IoU > 0.5 against the oracle target.
  double accuracy = 0.0;
  double description_accuracy = 0.0;
  /// Share of described scenes whose final description is wrong.
  double residual_error_rate = 0.0;
  std::size_t n_scenes = 0;
  std::size_t n_corrupted = 0;
  std::size_t n_corrected = 0;
  /// The configured rho.
  double intervention_rate = 0.0;
  PipelineConfig config;
  std::vector<SceneOutcome> scenes;
};

/// Runs one method over the corpus. Scene i is seeded from (seed, i) alone,
/// so results are independent of threading and of the other scenes.
///
/// SceneText: oracle self-explanation, corruption with rate epsilon, operator
/// correction with rate rho, grounding (with noise), knowledge-guided
/// planning. In stratified mode scene i draws u_i = (pi(i) + U_i) / n for a
/// seeded permutation pi; it is corrupted iff u_i < epsilon and corrected iff
/// u_i < epsilon * rho. Corrected sets are nested in rho, and rho = 1 gives
/// the epsilon = 0 result.
///
/// Throws Error(kUndefinedMetric) for an empty corpus.
EvalReport run_pipeline(const Corpus& corpus, const PipelineConfig& config);

/// One report per rho, in the given order.
std::vector<EvalReport> sweep_intervention(const Corpus& corpus,
                                           const PipelineConfig& base,
                                           const std::vector<double>& rhos);

struct BaselineGrid {
  std::vector<double> flip_rates{0.0, 0.1, 0.3};
  std::vector<double> epsilons{0.2, 0.4};
  std::vector<double> rhos{0.0, 0.5, 1.0};
};

/// End2End, SceneGraph per flip rate, SceneText oracle, then SceneText per
/// (epsilon, rho).
std::vector<EvalReport> compare_baselines(const Corpus& corpus,
                                          const PipelineConfig& base,
                                          const BaselineGrid& grid = {});

/// Report without the per-scene outcomes unless asked.
Json encode(const EvalReport& r, bool include_scenes = false);
Json encode_reports(const std::vector<EvalReport>& reports, bool include_scenes = false);

/// Aligned text table: Method | R@k... | P@k... | F1 | Acc.
std::string format_table(const std::vector<EvalReport>& reports);

}  // namespace graspwise
