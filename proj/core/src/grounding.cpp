#include "graspwise/grounding.hpp"

#include <random>
#include <vector>

#include "graspwise/error.hpp"
#include "graspwise/random.hpp"

namespace graspwise {

GroundedObject ground(const Scene& scene, const SceneGraph& graph,
                      const RelationTriple& triple) {
  // a UNDER b  <=>  b ON a, and likewise for RIGHT/LEFT; holds() answers
  // both forms from the canonical relation.
  std::vector<int> candidates;
  for (const auto& subject : scene.objects) {
    if (subject.class_name != triple.subject_class) continue;
    for (const auto& object : scene.objects) {
      if (object.id == subject.id || object.class_name != triple.object_class) {
        continue;
      }
      if (graph.holds(subject.id, triple.predicate, object.id)) {
        candidates.push_back(subject.id);
        break;
      }
    }
  }
  if (candidates.empty()) {
    throw Error(ErrorCode::kGroundingFailure,
                "no '" + triple.subject_class + "' is " +
                    std::string(to_string(triple.predicate)) + " a '" +
                    triple.object_class + "' in scene '" + scene.id + "'");
  }
  int best = candidates.front();
  for (int id : candidates) best = std::min(best, id);
  GroundedObject out;
  out.object_id = best;
  out.region = scene.object(best).bbox;
  out.confidence = 1.0 / static_cast<double>(candidates.size());
  out.ambiguous = candidates.size() > 1;
  return out;
}

GroundedObject ground(const Scene& scene, const RelationTriple& triple) {
  return ground(scene, closure(scene), triple);
}

GroundedObject ground(const Scene& scene, const Description& description) {
  return ground(scene, description.triple);
}

GroundedObject noisy_ground(const Scene& scene, const Description& description,
                            double delta, std::uint64_t seed) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw Error(ErrorCode::kDomain, "grounding error rate must lie in [0, 1]");
  }
  GroundedObject out = ground(scene, description);
  Rng rng(seed);
  if (uniform01(rng) >= delta || scene.objects.size() < 2) return out;
  std::vector<int> wrong;
  for (const auto& o : scene.objects) {
    if (o.id != out.object_id) wrong.push_back(o.id);
  }
  std::uniform_int_distribution<std::size_t> pick(0, wrong.size() - 1);
  const int id = wrong[pick(rng)];
  out.object_id = id;
  out.region = scene.object(id).bbox;
  out.perturbed = true;
  return out;
}

GroundedObject ground_sole_object(const Scene& scene) {
  if (scene.objects.size() != 1) {
    throw Error(ErrorCode::kGroundingFailure,
                "scene '" + scene.id + "' needs a description to ground");
  }
  GroundedObject out;
  out.object_id = scene.objects.front().id;
  out.region = scene.objects.front().bbox;
  out.confidence = 1.0;
  return out;
}

}  // namespace graspwise
