#pragma once

#include <string>
#include <vector>

#include "graspwise/scene.hpp"

namespace fixtures {

using graspwise::AxisRect;
using graspwise::GraspAnnotation;
using graspwise::ObjectInstance;
using graspwise::Scene;

inline void add_grasp(Scene& s, int object_id, double cx, double cy, double theta,
                      double w, double h) {
  s.grasps.push_back({object_id, graspwise::make_grasp(cx, cy, theta, w, h), true});
}

/// Recomputes surface flags from the tree.
inline void refresh_surface(Scene& s) {
  for (auto& g : s.grasps) g.surface = graspwise::surface_label(s, g.object_id);
}

/// mobile phone on box, box on notebook.
inline Scene phone_box_notebook() {
  Scene s;
  s.id = "phone-box-notebook";
  s.width = 640;
  s.height = 480;
  s.objects = {{1, "notebook", {100, 100, 300, 220}},
               {2, "box", {110, 110, 140, 200}},
               {3, "mobile phone", {120, 120, 60, 90}}};
  s.tree.edges = {{2, 1}, {3, 2}};
  add_grasp(s, 1, 320, 210, 0, 60, 20);
  add_grasp(s, 2, 215, 260, 0, 40, 16);
  add_grasp(s, 3, 150, 165, -90, 50, 18);
  refresh_surface(s);
  return s;
}

/// box on mobile phone, mobile phone on notebook. The box is the only
/// collision-free object.
inline Scene box_phone_notebook() {
  Scene s;
  s.id = "box-phone-notebook";
  s.width = 640;
  s.height = 480;
  s.objects = {{1, "notebook", {100, 100, 300, 220}},
               {2, "mobile phone", {120, 120, 140, 180}},
               {3, "box", {125, 125, 60, 70}}};
  s.tree.edges = {{2, 1}, {3, 2}};
  add_grasp(s, 1, 320, 210, 0, 60, 20);
  add_grasp(s, 2, 190, 255, -90, 50, 20);
  add_grasp(s, 3, 155, 160, 0, 40, 16);
  refresh_surface(s);
  return s;
}

/// apple and pliers on a notebook, toothpaste on its own to the right.
inline Scene apple_notebook() {
  Scene s;
  s.id = "apple-notebook";
  s.width = 640;
  s.height = 480;
  s.objects = {{1, "notebook", {60, 120, 300, 240}},
               {2, "apple", {80, 140, 90, 90}},
               {3, "pliers", {200, 250, 120, 60}},
               {4, "toothpaste", {450, 200, 130, 44}}};
  s.tree.edges = {{2, 1}, {3, 1}};
  add_grasp(s, 1, 270, 160, 0, 60, 20);
  add_grasp(s, 2, 125, 185, 30, 50, 18);
  add_grasp(s, 3, 260, 280, 0, 70, 16);
  add_grasp(s, 4, 515, 222, 0, 90, 18);
  refresh_surface(s);
  return s;
}

/// One object.
inline Scene single_cup() {
  Scene s;
  s.id = "single-cup";
  s.width = 640;
  s.height = 480;
  s.objects = {{1, "cup", {200, 150, 80, 90}}};
  add_grasp(s, 1, 240, 195, 0, 50, 18);
  refresh_surface(s);
  return s;
}

}  // namespace fixtures
