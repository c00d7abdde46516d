#pragma once

#include <cstdint>

#include "graspwise/geometry.hpp"
#include "graspwise/lang.hpp"
#include "graspwise/scene.hpp"

namespace graspwise {

/// Object region K_g resolved from a description.
struct GroundedObject {
  int object_id = 0;
  AxisRect region;
  double confidence = 0.0;
  /// More than one instance satisfied the description; the lowest id won.
  bool ambiguous = false;
  /// Replaced by the grounding noise model. Evaluation metadata only.
  bool perturbed = false;

  friend bool operator==(const GroundedObject&, const GroundedObject&) = default;
};

/// Relational stand-in for the visual grounding model. Candidates are the
/// instances of the subject class for which the described relation holds in
/// the scene-graph closure against some instance of the object class; UNDER
/// is resolved as the inverse ON. Returns the lowest-id candidate with
/// confidence 1/#candidates. Throws Error(kGroundingFailure) when nothing
/// matches.
GroundedObject ground(const Scene& scene, const SceneGraph& graph,
                      const RelationTriple& triple);
GroundedObject ground(const Scene& scene, const RelationTriple& triple);
GroundedObject ground(const Scene& scene, const Description& description);

/// With probability delta returns the box of a uniformly chosen wrong object
/// (when the scene has one), otherwise the oracle result.
GroundedObject noisy_ground(const Scene& scene, const Description& description,
                            double delta, std::uint64_t seed);

/// Grounding for single-object scenes, where there is no relation to state:
/// the only object is the target.
GroundedObject ground_sole_object(const Scene& scene);

}  // namespace graspwise
