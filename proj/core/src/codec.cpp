#include "graspwise/codec.hpp"

#include <limits>

#include "graspwise/error.hpp"

namespace graspwise {

namespace codec {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kParse, where + ": " + what);
}

}  // namespace

const Json& object(const Json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  return j;
}

const Json& array(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  return j;
}

const Json& field(const Json& obj, std::string_view key, const std::string& where) {
  object(obj, where);
  auto it = obj.find(std::string(key));
  if (it == obj.end()) fail(where, "missing field '" + std::string(key) + "'");
  return *it;
}

const Json* optional_field(const Json& obj, std::string_view key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(std::string(key));
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::int64_t integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  if (j.is_number_unsigned() &&
      j.get<std::uint64_t>() >
          static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    fail(where, "integer out of range");
  }
  return j.get<std::int64_t>();
}

std::uint64_t unsigned_integer(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned() &&
      !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    fail(where, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::string string(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

bool boolean(const Json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  return j.get<bool>();
}

}  // namespace codec

namespace {

int to_int(std::int64_t v, const std::string& where) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw Error(ErrorCode::kParse, where + ": integer out of range");
  }
  return static_cast<int>(v);
}

int int_field(const Json& obj, std::string_view key, const std::string& where) {
  const std::string path = where + "." + std::string(key);
  return to_int(codec::integer(codec::field(obj, key, where), path), path);
}

double number_field(const Json& obj, std::string_view key, const std::string& where) {
  return codec::number(codec::field(obj, key, where), where + "." + std::string(key));
}

std::vector<double> numbers(const Json& j, std::size_t n, const std::string& where) {
  codec::array(j, where);
  if (j.size() != n) {
    throw Error(ErrorCode::kParse,
                where + ": expected " + std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(codec::number(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Json optional_int(const std::optional<int>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<int> decode_optional_int(const Json& obj, std::string_view key,
                                       const std::string& where) {
  const Json* f = codec::optional_field(obj, key);
  if (f == nullptr) return std::nullopt;
  const std::string path = where + "." + std::string(key);
  return to_int(codec::integer(*f, path), path);
}

}  // namespace

Json encode(const AxisRect& r) { return Json::array({r.x, r.y, r.w, r.h}); }

Json encode(const GraspRect& g) {
  return Json::array({g.cx, g.cy, g.theta, g.w, g.h});
}

AxisRect decode_axis_rect(const Json& j, const std::string& where) {
  const auto v = numbers(j, 4, where);
  return AxisRect{v[0], v[1], v[2], v[3]};
}

GraspRect decode_grasp_rect(const Json& j, const std::string& where) {
  const auto v = numbers(j, 5, where);
  return GraspRect{v[0], v[1], v[2], v[3], v[4]};
}

Json encode(const Scene& scene) {
  Json j;
  j["id"] = scene.id;
  j["image"] = Json{{"width", scene.width}, {"height", scene.height}};
  Json objects = Json::array();
  for (const auto& o : scene.objects) {
    Json oj;
    oj["id"] = o.id;
    oj["class"] = o.class_name;
    oj["bbox"] = encode(o.bbox);
    objects.push_back(std::move(oj));
  }
  j["objects"] = std::move(objects);
  Json tree = Json::array();
  for (const auto& e : scene.tree.edges) {
    Json ej;
    ej["child"] = e.child;
    ej["parent"] = e.parent;
    tree.push_back(std::move(ej));
  }
  j["tree"] = std::move(tree);
  Json grasps = Json::array();
  for (const auto& g : scene.grasps) {
    Json gj;
    gj["object_id"] = g.object_id;
    gj["rect"] = encode(g.rect);
    gj["surface"] = g.surface;
    grasps.push_back(std::move(gj));
  }
  j["grasps"] = std::move(grasps);
  return j;
}

Scene decode_scene(const Json& j, const std::string& where) {
  codec::object(j, where);
  Scene s;
  s.id = codec::string(codec::field(j, "id", where), where + ".id");
  const std::string img = where + ".image";
  const Json& image = codec::object(codec::field(j, "image", where), img);
  s.width = int_field(image, "width", img);
  s.height = int_field(image, "height", img);

  const std::string ow = where + ".objects";
  const Json& objects = codec::array(codec::field(j, "objects", where), ow);
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string w = ow + "[" + std::to_string(i) + "]";
    codec::object(objects[i], w);
    ObjectInstance o;
    o.id = int_field(objects[i], "id", w);
    o.class_name = codec::string(codec::field(objects[i], "class", w), w + ".class");
    o.bbox = decode_axis_rect(codec::field(objects[i], "bbox", w), w + ".bbox");
    s.objects.push_back(std::move(o));
  }

  const std::string tw = where + ".tree";
  const Json& tree = codec::array(codec::field(j, "tree", where), tw);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const std::string w = tw + "[" + std::to_string(i) + "]";
    codec::object(tree[i], w);
    s.tree.edges.push_back({int_field(tree[i], "child", w), int_field(tree[i], "parent", w)});
  }

  const std::string gw = where + ".grasps";
  const Json& grasps = codec::array(codec::field(j, "grasps", where), gw);
  for (std::size_t i = 0; i < grasps.size(); ++i) {
    const std::string w = gw + "[" + std::to_string(i) + "]";
    codec::object(grasps[i], w);
    GraspAnnotation g;
    g.object_id = int_field(grasps[i], "object_id", w);
    g.rect = decode_grasp_rect(codec::field(grasps[i], "rect", w), w + ".rect");
    g.surface = codec::boolean(codec::field(grasps[i], "surface", w), w + ".surface");
    s.grasps.push_back(g);
  }
  return s;
}

Json encode(const RelationTriple& t) {
  Json j;
  j["subject"] = t.subject_class;
  j["predicate"] = std::string(to_string(t.predicate));
  j["object"] = t.object_class;
  j["subject_id"] = optional_int(t.subject_id);
  j["object_id"] = optional_int(t.object_id);
  return j;
}

RelationTriple decode_triple(const Json& j, const std::string& where) {
  codec::object(j, where);
  RelationTriple t;
  t.subject_class = codec::string(codec::field(j, "subject", where), where + ".subject");
  const auto pred =
      codec::string(codec::field(j, "predicate", where), where + ".predicate");
  const auto p = predicate_from_string(pred);
  if (!p) {
    throw Error(ErrorCode::kParse, where + ".predicate: unknown predicate '" + pred + "'");
  }
  t.predicate = *p;
  t.object_class = codec::string(codec::field(j, "object", where), where + ".object");
  t.subject_id = decode_optional_int(j, "subject_id", where);
  t.object_id = decode_optional_int(j, "object_id", where);
  return t;
}

Json encode(const Description& d) {
  Json j;
  j["triple"] = encode(d.triple);
  j["text"] = d.text;
  j["source"] = std::string(to_string(d.source));
  j["template"] = optional_int(d.template_index);
  j["corrupted"] = d.corrupted;
  return j;
}

Description decode_description(const Json& j, const std::string& where) {
  codec::object(j, where);
  Description d;
  d.triple = decode_triple(codec::field(j, "triple", where), where + ".triple");
  d.text = codec::string(codec::field(j, "text", where), where + ".text");
  const auto src = codec::string(codec::field(j, "source", where), where + ".source");
  const auto s = source_from_string(src);
  if (!s) throw Error(ErrorCode::kParse, where + ".source: unknown source '" + src + "'");
  d.source = *s;
  d.template_index = decode_optional_int(j, "template", where);
  if (const Json* c = codec::optional_field(j, "corrupted")) {
    d.corrupted = codec::boolean(*c, where + ".corrupted");
  }
  return d;
}

Json encode(const GroundedObject& g) {
  Json j;
  j["object_id"] = g.object_id;
  j["region"] = encode(g.region);
  j["confidence"] = g.confidence;
  j["ambiguous"] = g.ambiguous;
  j["perturbed"] = g.perturbed;
  return j;
}

GroundedObject decode_grounded(const Json& j, const std::string& where) {
  codec::object(j, where);
  GroundedObject g;
  g.object_id = int_field(j, "object_id", where);
  g.region = decode_axis_rect(codec::field(j, "region", where), where + ".region");
  g.confidence = number_field(j, "confidence", where);
  g.ambiguous = codec::boolean(codec::field(j, "ambiguous", where), where + ".ambiguous");
  g.perturbed = codec::boolean(codec::field(j, "perturbed", where), where + ".perturbed");
  return g;
}

Json encode(const ScoredGrasp& g) {
  Json j;
  j["rect"] = encode(g.rect);
  j["envelope"] = encode(g.envelope);
  j["box_conf"] = g.box_conf;
  j["surface_conf"] = g.surface_conf;
  j["angle_class"] = g.angle_class;
  j["final_conf"] = g.final_conf;
  j["iou_best"] = g.iou_best;
  j["matched_gt"] = g.matched_gt ? Json(*g.matched_gt) : Json(nullptr);
  j["object_id"] = optional_int(g.object_id);
  return j;
}

ScoredGrasp decode_scored_grasp(const Json& j, const std::string& where) {
  codec::object(j, where);
  ScoredGrasp g;
  g.rect = decode_grasp_rect(codec::field(j, "rect", where), where + ".rect");
  g.envelope = decode_axis_rect(codec::field(j, "envelope", where), where + ".envelope");
  g.box_conf = number_field(j, "box_conf", where);
  g.surface_conf = number_field(j, "surface_conf", where);
  g.angle_class = int_field(j, "angle_class", where);
  g.final_conf = number_field(j, "final_conf", where);
  g.iou_best = number_field(j, "iou_best", where);
  if (const Json* m = codec::optional_field(j, "matched_gt")) {
    g.matched_gt = codec::unsigned_integer(*m, where + ".matched_gt");
  }
  g.object_id = decode_optional_int(j, "object_id", where);
  return g;
}

Json encode(const NoiseConfig& n) {
  Json j;
  j["describe_error_rate"] = n.describe_error_rate;
  j["ground_error_rate"] = n.ground_error_rate;
  j["surface_flip_rate"] = n.surface_flip_rate;
  j["angle_noise_rate"] = n.angle_noise_rate;
  j["seed"] = n.seed;
  return j;
}

NoiseConfig decode_noise(const Json& j, const std::string& where) {
  codec::object(j, where);
  NoiseConfig n;
  auto num = [&](std::string_view key, double& out) {
    if (const Json* f = codec::optional_field(j, key)) {
      out = codec::number(*f, where + "." + std::string(key));
    }
  };
  num("describe_error_rate", n.describe_error_rate);
  num("ground_error_rate", n.ground_error_rate);
  num("surface_flip_rate", n.surface_flip_rate);
  num("angle_noise_rate", n.angle_noise_rate);
  if (const Json* f = codec::optional_field(j, "seed")) {
    n.seed = codec::unsigned_integer(*f, where + ".seed");
  }
  return n;
}

Json encode(const PlannerConfig& p) {
  Json j;
  j["center_sigma_px"] = p.center_sigma_px;
  j["size_sigma_frac"] = p.size_sigma_frac;
  j["jitter_per_grasp"] = p.jitter_per_grasp;
  j["uniform_proposals"] = p.uniform_proposals;
  j["positive_count"] = p.positive_count;
  j["negative_count"] = p.negative_count;
  j["iou_threshold"] = p.iou_threshold;
  j["tiou_threshold"] = p.tiou_threshold;
  j["box_conf_sigma"] = p.box_conf_sigma;
  j["lambda1"] = p.lambda1;
  j["lambda2"] = p.lambda2;
  return j;
}

PlannerConfig decode_planner(const Json& j, const std::string& where) {
  codec::object(j, where);
  PlannerConfig p;
  auto num = [&](std::string_view key, double& out) {
    if (const Json* f = codec::optional_field(j, key)) {
      out = codec::number(*f, where + "." + std::string(key));
    }
  };
  auto count = [&](std::string_view key, auto& out) {
    if (const Json* f = codec::optional_field(j, key)) {
      const std::string path = where + "." + std::string(key);
      const int v = to_int(codec::integer(*f, path), path);
      if (v < 0) throw Error(ErrorCode::kParse, path + ": must be >= 0");
      out = static_cast<std::remove_reference_t<decltype(out)>>(v);
    }
  };
  num("center_sigma_px", p.center_sigma_px);
  num("size_sigma_frac", p.size_sigma_frac);
  count("jitter_per_grasp", p.jitter_per_grasp);
  count("uniform_proposals", p.uniform_proposals);
  count("positive_count", p.positive_count);
  count("negative_count", p.negative_count);
  num("iou_threshold", p.iou_threshold);
  num("tiou_threshold", p.tiou_threshold);
  num("box_conf_sigma", p.box_conf_sigma);
  num("lambda1", p.lambda1);
  num("lambda2", p.lambda2);
  return p;
}

}  // namespace graspwise
