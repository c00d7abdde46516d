#pragma once

#include <cstdint>

#include "graspwise/lang.hpp"
#include "graspwise/scene.hpp"

namespace graspwise {

/// Error-injection rates for the simulated models. All rates in [0, 1].
struct NoiseConfig {
  /// Probability that a self-explanation is wrong.
  double describe_error_rate = 0.0;
  /// Probability that grounding returns a wrong object.
  double ground_error_rate = 0.0;
  /// Probability that a grasp's surface confidence is flipped.
  double surface_flip_rate = 0.0;
  /// Probability that a grasp's orientation class is replaced.
  double angle_noise_rate = 0.0;
  std::uint64_t seed = 0;

  /// Throws Error(kConfig) when a rate is outside [0, 1].
  void validate() const;

  friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

enum class CorruptionMode { kSwapRoles, kReplacePredicate, kReplaceSubject };

std::string_view to_string(CorruptionMode m);

/// Applies one corruption of the given kind. The result always states
/// something different from the input; when the mode cannot change the
/// statement (for instance no other class in the scene), the next mode in
/// the order swap, predicate, subject is used.
Description corrupt_with_mode(const Description& desc, const Scene& scene,
                              CorruptionMode mode, std::uint64_t seed);

/// With probability epsilon applies a uniformly chosen corruption mode.
Description corrupt_description(const Description& desc, const Scene& scene,
                                double epsilon, std::uint64_t seed);

/// Same as corrupt_description, with the Bernoulli draw supplied by the
/// caller (corrupt iff u < epsilon). Used for stratified experiment runs.
Description corrupt_description_with_draw(const Description& desc,
                                          const Scene& scene, double epsilon,
                                          double u, std::uint64_t seed);

/// Simulated operator: if `desc` does not state what `oracle` states, returns
/// the oracle text with source HUMAN with probability rho; otherwise returns
/// `desc` unchanged. Correct descriptions are never touched.
Description intervene(const Description& desc, const Description& oracle,
                      double rho, std::uint64_t seed);

/// Same as intervene with the Bernoulli draw supplied (correct iff u < rho).
Description intervene_with_draw(const Description& desc, const Description& oracle,
                                double rho, double u);

}  // namespace graspwise
