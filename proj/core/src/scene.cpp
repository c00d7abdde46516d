#include "graspwise/scene.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "graspwise/error.hpp"

namespace graspwise {

std::string_view to_string(Predicate p) {
  switch (p) {
    case Predicate::kOn: return "ON";
    case Predicate::kUnder: return "UNDER";
    case Predicate::kLeft: return "LEFT";
    case Predicate::kRight: return "RIGHT";
  }
  return "ON";
}

std::optional<Predicate> predicate_from_string(std::string_view s) {
  if (s == "ON") return Predicate::kOn;
  if (s == "UNDER") return Predicate::kUnder;
  if (s == "LEFT") return Predicate::kLeft;
  if (s == "RIGHT") return Predicate::kRight;
  return std::nullopt;
}

Predicate inverse(Predicate p) {
  switch (p) {
    case Predicate::kOn: return Predicate::kUnder;
    case Predicate::kUnder: return Predicate::kOn;
    case Predicate::kLeft: return Predicate::kRight;
    case Predicate::kRight: return Predicate::kLeft;
  }
  return p;
}

const ObjectInstance* Scene::find(int object_id) const {
  for (const auto& o : objects) {
    if (o.id == object_id) return &o;
  }
  return nullptr;
}

const ObjectInstance& Scene::object(int object_id) const {
  if (const auto* o = find(object_id)) return *o;
  throw Error(ErrorCode::kNotFound, "scene '" + id + "' has no object with id " +
                                        std::to_string(object_id));
}

std::optional<std::size_t> SceneGraph::index(int id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

bool SceneGraph::holds(int subject, Predicate p, int object) const {
  const auto a = index(subject);
  const auto b = index(object);
  if (!a || !b || *a == *b) return false;
  const std::size_t n = ids_.size();
  switch (p) {
    case Predicate::kOn: return on_[*a * n + *b] != 0;
    case Predicate::kUnder: return on_[*b * n + *a] != 0;
    case Predicate::kLeft: return left_[*a * n + *b] != 0;
    case Predicate::kRight: return left_[*b * n + *a] != 0;
  }
  return false;
}

std::optional<Predicate> SceneGraph::relation(int a, int b) const {
  for (Predicate p : {Predicate::kOn, Predicate::kUnder, Predicate::kLeft,
                      Predicate::kRight}) {
    if (holds(a, p, b)) return p;
  }
  return std::nullopt;
}

bool SceneGraph::stacked(int a, int b) const {
  return holds(a, Predicate::kOn, b) || holds(b, Predicate::kOn, a);
}

std::vector<int> SceneGraph::objects_above(int object_id) const {
  std::vector<int> out;
  for (int other : ids_) {
    if (holds(other, Predicate::kOn, object_id)) out.push_back(other);
  }
  return out;
}

std::vector<int> SceneGraph::objects_below(int object_id) const {
  std::vector<int> out;
  for (int other : ids_) {
    if (holds(object_id, Predicate::kOn, other)) out.push_back(other);
  }
  return out;
}

SceneGraph closure(const RelationshipTree& tree,
                   std::span<const ObjectInstance> objects) {
  SceneGraph g;
  std::map<int, const ObjectInstance*> by_id;
  for (const auto& o : objects) {
    if (!by_id.emplace(o.id, &o).second) {
      throw Error(ErrorCode::kInvalidScene,
                  "duplicate object id " + std::to_string(o.id));
    }
  }
  for (const auto& [id, _] : by_id) g.ids_.push_back(id);
  const std::size_t n = g.ids_.size();
  g.on_.assign(n * n, 0);
  g.left_.assign(n * n, 0);

  for (const auto& e : tree.edges) {
    const auto c = g.index(e.child);
    const auto p = g.index(e.parent);
    if (!c || !p) {
      throw Error(ErrorCode::kInvalidScene,
                  "stacking edge " + std::to_string(e.child) + " on " +
                      std::to_string(e.parent) + " names an unknown object");
    }
    g.on_[*c * n + *p] = 1;
  }
  // Warshall.
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!g.on_[i * n + k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (g.on_[k * n + j]) g.on_[i * n + j] = 1;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (g.on_[i * n + i]) {
      throw Error(ErrorCode::kInvalidScene,
                  "stacking cycle through object " + std::to_string(g.ids_[i]));
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int a = g.ids_[i];
      const int b = g.ids_[j];
      if (g.on_[i * n + j]) {
        g.relations_.push_back({a, Predicate::kOn, b});
        continue;
      }
      if (g.on_[j * n + i]) {
        g.relations_.push_back({b, Predicate::kOn, a});
        continue;
      }
      const double dx =
          by_id.at(a)->bbox.center_x() - by_id.at(b)->bbox.center_x();
      if (std::abs(dx) < SceneGraph::kHorizontalTiePx) {
        g.ambiguous_.emplace_back(a, b);
      } else if (dx < 0.0) {
        g.left_[i * n + j] = 1;
        g.relations_.push_back({a, Predicate::kLeft, b});
      } else {
        g.left_[j * n + i] = 1;
        g.relations_.push_back({b, Predicate::kLeft, a});
      }
    }
  }
  std::sort(g.relations_.begin(), g.relations_.end());
  return g;
}

SceneGraph closure(const Scene& scene) {
  return closure(scene.tree, scene.objects);
}

bool surface_label(const SceneGraph& graph, int object_id) {
  const auto& ids = graph.object_ids();
  if (!std::binary_search(ids.begin(), ids.end(), object_id)) {
    throw Error(ErrorCode::kNotFound,
                "no object with id " + std::to_string(object_id));
  }
  return graph.objects_above(object_id).empty();
}

bool surface_label(const Scene& scene, int object_id) {
  scene.object(object_id);
  return surface_label(closure(scene), object_id);
}

std::set<int> collision_free_set(const Scene& scene) {
  const SceneGraph g = closure(scene);
  std::set<int> out;
  for (int id : g.object_ids()) {
    if (surface_label(g, id)) out.insert(id);
  }
  return out;
}

std::vector<ValidationIssue> validate(const Scene& scene,
                                      const Vocabulary* vocabulary) {
  std::vector<ValidationIssue> issues;
  auto report = [&](std::string code, std::string message) {
    issues.push_back({std::move(code), "scene '" + scene.id + "': " + message});
  };

  if (scene.width < 1 || scene.height < 1) {
    report("invalid_image_size", "image size must be positive, got " +
                                     std::to_string(scene.width) + "x" +
                                     std::to_string(scene.height));
  }

  std::map<int, std::size_t> index;
  for (const auto& o : scene.objects) {
    if (!index.emplace(o.id, index.size()).second) {
      report("duplicate_id", "object id " + std::to_string(o.id) + " is used twice");
    }
    if (vocabulary != nullptr && !vocabulary->contains(o.class_name)) {
      report("unknown_class", "object " + std::to_string(o.id) +
                                  " has unknown class '" + o.class_name + "'");
    }
    if (!o.bbox.valid()) {
      report("invalid_bbox", "object " + std::to_string(o.id) +
                                 " has a degenerate or non-finite box");
    } else if (scene.width >= 1 && scene.height >= 1 &&
               (o.bbox.x < 0.0 || o.bbox.y < 0.0 ||
                o.bbox.right() > scene.width || o.bbox.bottom() > scene.height)) {
      report("out_of_image", "object " + std::to_string(o.id) +
                                 " box extends beyond the image");
    }
  }

  const std::size_t n = index.size();
  std::vector<char> on(n * n, 0);
  std::vector<char> has_child(n, 0);
  for (std::size_t e = 0; e < scene.tree.edges.size(); ++e) {
    const auto& edge = scene.tree.edges[e];
    const std::string label = "stacking edge " + std::to_string(edge.child) +
                              " on " + std::to_string(edge.parent);
    auto c = index.find(edge.child);
    auto p = index.find(edge.parent);
    if (c == index.end() || p == index.end()) {
      report("dangling_reference", label + " names an unknown object");
      continue;
    }
    if (edge.child == edge.parent) {
      report("self_loop", label + " stacks an object on itself");
      continue;
    }
    on[c->second * n + p->second] = 1;
    has_child[p->second] = 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!on[i * n + k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (on[k * n + j]) on[i * n + j] = 1;
      }
    }
  }
  for (const auto& [id, i] : index) {
    if (on[i * n + i]) {
      report("cycle", "stacking cycle through object " + std::to_string(id));
    }
  }

  for (std::size_t g = 0; g < scene.grasps.size(); ++g) {
    const auto& grasp = scene.grasps[g];
    const std::string label = "grasp[" + std::to_string(g) + "]";
    auto it = index.find(grasp.object_id);
    if (it == index.end()) {
      report("dangling_reference", label + " references missing object " +
                                       std::to_string(grasp.object_id));
      continue;
    }
    if (!grasp.rect.valid()) {
      report("invalid_grasp", label + " has an invalid rectangle");
    }
    const bool expected = has_child[it->second] == 0;
    if (grasp.surface != expected) {
      report("stale_surface",
             label + " on object " + std::to_string(grasp.object_id) +
                 " has surface=" + (grasp.surface ? "true" : "false") +
                 " but the stacking tree implies " + (expected ? "true" : "false"));
    }
  }
  return issues;
}

}  // namespace graspwise
