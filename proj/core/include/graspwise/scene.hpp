#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "graspwise/geometry.hpp"
#include "graspwise/vocabulary.hpp"

namespace graspwise {

enum class Predicate { kOn, kUnder, kLeft, kRight };

std::string_view to_string(Predicate p);
std::optional<Predicate> predicate_from_string(std::string_view s);
/// ON <-> UNDER, LEFT <-> RIGHT.
Predicate inverse(Predicate p);
inline bool is_stacking(Predicate p) {
  return p == Predicate::kOn || p == Predicate::kUnder;
}

struct ObjectInstance {
  int id = 0;
  std::string class_name;
  AxisRect bbox;

  friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

/// Direct stacking contact: `child` rests on `parent`.
struct StackEdge {
  int child = 0;
  int parent = 0;

  friend bool operator==(const StackEdge&, const StackEdge&) = default;
};

/// Stacking relations between directly adjacent objects only.
struct RelationshipTree {
  std::vector<StackEdge> edges;

  friend bool operator==(const RelationshipTree&, const RelationshipTree&) = default;
};

struct GraspAnnotation {
  int object_id = 0;
  GraspRect rect;
  bool surface = true;

  friend bool operator==(const GraspAnnotation&, const GraspAnnotation&) = default;
};

struct Scene {
  std::string id;
  int width = 0;
  int height = 0;
  std::vector<ObjectInstance> objects;
  RelationshipTree tree;
  std::vector<GraspAnnotation> grasps;

  const ObjectInstance* find(int object_id) const;
  /// Throws Error(kNotFound).
  const ObjectInstance& object(int object_id) const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// (subject, predicate, object) over object ids.
struct Relation {
  int subject = 0;
  Predicate predicate = Predicate::kOn;
  int object = 0;

  friend bool operator==(const Relation&, const Relation&) = default;
  friend auto operator<=>(const Relation&, const Relation&) = default;
};

/// Pairwise relations of a scene: the transitive stacking closure plus
/// LEFT/RIGHT between every pair that is not stacking-related. Only the
/// canonical forms ON and LEFT are stored; UNDER and RIGHT are answered
/// through their inverses.
class SceneGraph {
 public:
  /// Horizontal pairs whose center-x differ by less than this are ambiguous.
  static constexpr double kHorizontalTiePx = 1.0;

  SceneGraph() = default;

  const std::vector<int>& object_ids() const { return ids_; }
  /// Canonical relations (ON and LEFT only), sorted.
  const std::vector<Relation>& relations() const { return relations_; }
  /// Pairs (a, b), a < b, excluded from horizontal relations as near-ties.
  const std::vector<std::pair<int, int>>& ambiguous_pairs() const {
    return ambiguous_;
  }

  bool holds(int subject, Predicate p, int object) const;
  /// The single relation of `a` with respect to `b`, expressed as ON, UNDER,
  /// LEFT or RIGHT; nullopt for a == b or ambiguous pairs.
  std::optional<Predicate> relation(int a, int b) const;
  bool stacked(int a, int b) const;

  /// Objects x with (x ON object_id).
  std::vector<int> objects_above(int object_id) const;
  /// Objects x with (object_id ON x).
  std::vector<int> objects_below(int object_id) const;

  friend SceneGraph closure(const RelationshipTree& tree,
                            std::span<const ObjectInstance> objects);

 private:
  std::optional<std::size_t> index(int id) const;

  std::vector<int> ids_;
  // on_[i * n + j]: ids_[i] ON ids_[j] (transitively).
  std::vector<char> on_;
  // left_[i * n + j]: ids_[i] LEFT of ids_[j].
  std::vector<char> left_;
  std::vector<Relation> relations_;
  std::vector<std::pair<int, int>> ambiguous_;
};

/// Transitive closure of the stacking tree plus horizontal relations.
/// Throws Error(kInvalidScene) on cycles or edges naming unknown objects.
SceneGraph closure(const RelationshipTree& tree,
                   std::span<const ObjectInstance> objects);
SceneGraph closure(const Scene& scene);

/// True iff nothing rests on the object. Throws Error(kNotFound).
bool surface_label(const Scene& scene, int object_id);
bool surface_label(const SceneGraph& graph, int object_id);

/// Objects that can be grasped without disturbing the rest.
std::set<int> collision_free_set(const Scene& scene);

struct ValidationIssue {
  std::string code;
  std::string message;

  friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

/// Checks every scene invariant and reports all violations. Class names are
/// only checked when a vocabulary is given.
std::vector<ValidationIssue> validate(const Scene& scene,
                                      const Vocabulary* vocabulary = nullptr);

}  // namespace graspwise
