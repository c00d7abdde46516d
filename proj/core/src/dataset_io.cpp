#include "graspwise/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "graspwise/error.hpp"
#include "graspwise/grounding.hpp"
#include "graspwise/random.hpp"

namespace graspwise {

// ---------------------------------------------------------------------------
// Serialization

Json encode(const SampleRecord& r) {
  Json j;
  j["scene"] = encode(r.scene);
  j["image_path"] = r.image_path ? Json(*r.image_path) : Json(nullptr);
  Json descs = Json::array();
  for (const auto& d : r.descriptions) descs.push_back(encode(d));
  j["descriptions"] = std::move(descs);
  j["grounded_object_id"] =
      r.grounded_object_id ? Json(*r.grounded_object_id) : Json(nullptr);
  return j;
}

Json encode(const Corpus& c) {
  Json j;
  j["schema"] = std::string(kCorpusSchema);
  j["count"] = c.records.size();
  Json records = Json::array();
  for (const auto& r : c.records) records.push_back(encode(r));
  j["records"] = std::move(records);
  return j;
}

SampleRecord decode_record(const Json& j, const std::string& where) {
  codec::object(j, where);
  SampleRecord r;
  r.scene = decode_scene(codec::field(j, "scene", where), where + ".scene");
  if (const Json* p = codec::optional_field(j, "image_path"); p && !p->is_null()) {
    r.image_path = codec::string(*p, where + ".image_path");
  }
  if (const Json* d = codec::optional_field(j, "descriptions")) {
    const auto& arr = codec::array(*d, where + ".descriptions");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      r.descriptions.push_back(decode_description(
          arr[i], where + ".descriptions[" + std::to_string(i) + "]"));
    }
  }
  if (const Json* g = codec::optional_field(j, "grounded_object_id"); g && !g->is_null()) {
    r.grounded_object_id =
        static_cast<int>(codec::integer(*g, where + ".grounded_object_id"));
  }
  return r;
}

std::string serialize(const Corpus& corpus) { return encode(corpus).dump(1) + "\n"; }

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text,
                                                std::size_t byte) {
  // nlohmann reports the 1-based index of the last byte read.
  const std::size_t end = std::min(byte == 0 ? 0 : byte - 1, text.size());
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Corpus parse_corpus(std::string_view text, bool validate_records,
                    const Vocabulary* vocabulary) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw Error(ErrorCode::kParse, "corpus: syntax error at line " +
                                       std::to_string(line) + ", column " +
                                       std::to_string(col) + ": " + e.what());
  }
  codec::object(j, "corpus");
  const auto schema = codec::string(codec::field(j, "schema", "corpus"), "corpus.schema");
  if (schema != kCorpusSchema) {
    throw Error(ErrorCode::kParse, "corpus.schema: expected '" +
                                       std::string(kCorpusSchema) + "', got '" +
                                       schema + "'");
  }
  const auto& records = codec::array(codec::field(j, "records", "corpus"), "corpus.records");
  if (const Json* count = codec::optional_field(j, "count")) {
    const auto n = codec::unsigned_integer(*count, "corpus.count");
    if (n != records.size()) {
      throw Error(ErrorCode::kParse, "corpus.count: header says " + std::to_string(n) +
                                         " records, found " +
                                         std::to_string(records.size()));
    }
  }
  Corpus corpus;
  corpus.records.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    corpus.records.push_back(
        decode_record(records[i], "records[" + std::to_string(i) + "]"));
  }
  if (validate_records) {
    const auto issues = validate_corpus(corpus, vocabulary);
    if (!issues.empty()) {
      std::vector<std::string> details;
      for (const auto& issue : issues) details.push_back(issue.code + ": " + issue.message);
      throw Error(ErrorCode::kValidation,
                  "corpus has " + std::to_string(issues.size()) + " validation issue(s)",
                  std::move(details));
    }
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, bool validate_records,
                   const Vocabulary* vocabulary) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), validate_records, vocabulary);
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  const std::string text = serialize(corpus);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot move corpus into " + path.string());
}

// ---------------------------------------------------------------------------
// Validation

namespace {

bool triple_holds(const Scene& scene, const SceneGraph& graph, const RelationTriple& t) {
  if (t.subject_id && t.object_id) {
    const auto* s = scene.find(*t.subject_id);
    const auto* o = scene.find(*t.object_id);
    return s && o && s->class_name == t.subject_class &&
           o->class_name == t.object_class &&
           graph.holds(*t.subject_id, t.predicate, *t.object_id);
  }
  for (const auto& s : scene.objects) {
    if (s.class_name != t.subject_class) continue;
    for (const auto& o : scene.objects) {
      if (o.class_name == t.object_class && graph.holds(s.id, t.predicate, o.id)) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

std::vector<ValidationIssue> validate_record(const SampleRecord& record,
                                             const Vocabulary* vocabulary) {
  auto issues = validate(record.scene, vocabulary);
  auto report = [&](std::string code, std::string message) {
    issues.push_back({std::move(code), "scene '" + record.scene.id + "': " + message});
  };
  std::optional<SceneGraph> graph;
  try {
    graph = closure(record.scene);
  } catch (const Error&) {
    // Already reported by the scene checks.
  }
  for (std::size_t i = 0; i < record.descriptions.size(); ++i) {
    const auto& t = record.descriptions[i].triple;
    const std::string label = "description[" + std::to_string(i) + "]";
    if (vocabulary != nullptr) {
      for (const auto* c : {&t.subject_class, &t.object_class}) {
        if (!vocabulary->contains(*c)) {
          report("unknown_class", label + " names unknown class '" + *c + "'");
        }
      }
    }
    if (graph && !triple_holds(record.scene, *graph, t)) {
      report("false_description", label + " '" + t.subject_class + " " +
                                      std::string(to_string(t.predicate)) + " " +
                                      t.object_class + "' does not hold in the scene");
    }
  }
  if (record.grounded_object_id && !record.scene.find(*record.grounded_object_id)) {
    report("dangling_reference", "grounded object " +
                                     std::to_string(*record.grounded_object_id) +
                                     " is not in the scene");
  }
  return issues;
}

std::vector<ValidationIssue> validate_corpus(const Corpus& corpus,
                                             const Vocabulary* vocabulary) {
  std::vector<ValidationIssue> issues;
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const std::string prefix = "records[" + std::to_string(i) + "]: ";
    const auto& id = corpus.records[i].scene.id;
    if (auto [it, fresh] = seen.emplace(id, i); !fresh) {
      issues.push_back({"duplicate_scene_id", prefix + "scene id '" + id +
                                                  "' also used by records[" +
                                                  std::to_string(it->second) + "]"});
    }
    for (auto& issue : validate_record(corpus.records[i], vocabulary)) {
      issue.message = prefix + issue.message;
      issues.push_back(std::move(issue));
    }
  }
  return issues;
}

// ---------------------------------------------------------------------------
// Synthetic generator

void GenOptions::validate() const {
  if (min_objects < 1 || max_objects < min_objects) {
    throw Error(ErrorCode::kConfig, "object counts need 1 <= min <= max");
  }
  if (vocabulary == nullptr ||
      static_cast<std::size_t>(max_objects) > vocabulary->size()) {
    throw Error(ErrorCode::kConfig,
                "max_objects exceeds the number of classes in the vocabulary");
  }
  if (require_stack && min_objects < 2) {
    throw Error(ErrorCode::kConfig, "require_stack needs min_objects >= 2");
  }
  if (width < 64 || height < 64) {
    throw Error(ErrorCode::kConfig, "image must be at least 64x64");
  }
  if (max_attempts < 1) throw Error(ErrorCode::kConfig, "max_attempts must be >= 1");
}

std::array<double, 2> class_size_prior(std::string_view class_name) {
  static const std::map<std::string, std::array<double, 2>, std::less<>> kPriors = {
      {"apple", {72, 70}},         {"badminton", {60, 90}},
      {"banana", {120, 55}},       {"bottle", {60, 140}},
      {"box", {130, 110}},         {"cans", {70, 90}},
      {"card", {90, 60}},          {"charger", {64, 60}},
      {"cup", {80, 88}},           {"glasses", {120, 55}},
      {"headset", {110, 100}},     {"knife", {140, 44}},
      {"mobile phone", {70, 130}}, {"mouse", {64, 96}},
      {"notebook", {150, 120}},    {"paper", {140, 110}},
      {"pen", {130, 36}},          {"pliers", {120, 60}},
      {"remote controller", {56, 140}}, {"screwdriver", {140, 40}},
      {"shaver", {56, 120}},       {"socks", {100, 80}},
      {"stapler", {120, 50}},      {"tape", {80, 80}},
      {"toothbrush", {140, 36}},   {"toothpaste", {130, 44}},
      {"towel", {140, 100}},       {"umbrella", {160, 50}},
      {"wallet", {100, 80}},       {"wrench", {140, 48}},
      {"wrist developer", {90, 90}},
  };
  if (auto it = kPriors.find(class_name); it != kPriors.end()) return it->second;
  return {90, 70};
}

namespace {

constexpr int kMaxStackHeight = 3;
constexpr double kMinGraspOpening = 24.0;
constexpr double kMinGraspJaw = 14.0;
constexpr double kBaseGap = 6.0;

double round2(double v) { return std::round(v * 100.0) / 100.0; }

// Smallest side an object needs when `above` objects are stacked on it:
// children span at least 0.4 of its sides.
double min_side(int above) {
  double m = 36.0;
  for (int i = 0; i < above; ++i) m /= 0.4;
  return m;
}

struct Layout {
  std::vector<ObjectInstance> objects;
  std::vector<StackEdge> edges;
  std::vector<AxisRect> free_regions;  // per object, same order
};

bool overlaps(const AxisRect& a, const AxisRect& b, double gap) {
  return a.x < b.right() + gap && b.x < a.right() + gap && a.y < b.bottom() + gap &&
         b.y < a.bottom() + gap;
}

std::optional<Layout> try_layout(const std::vector<std::string>& classes,
                                 const GenOptions& opt, Rng& rng) {
  const int n = static_cast<int>(classes.size());
  // Random stack partition: chains of object indices, bottom first.
  std::vector<std::vector<int>> stacks;
  for (int i = 0; i < n; ++i) {
    std::vector<std::size_t> open;
    for (std::size_t s = 0; s < stacks.size(); ++s) {
      if (static_cast<int>(stacks[s].size()) < kMaxStackHeight) open.push_back(s);
    }
    if (open.empty() || uniform01(rng) < 0.5) {
      stacks.push_back({i});
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
      stacks[open[pick(rng)]].push_back(i);
    }
  }
  if (opt.require_stack &&
      std::none_of(stacks.begin(), stacks.end(), [](const auto& s) { return s.size() > 1; })) {
    stacks.front().push_back(stacks.back().front());
    stacks.pop_back();
  }

  Layout layout;
  layout.objects.resize(n);
  layout.free_regions.resize(n);
  std::vector<AxisRect> bases;
  const double margin = 4.0;
  for (const auto& stack : stacks) {
    const auto prior = class_size_prior(classes[stack.front()]);
    const double need = min_side(static_cast<int>(stack.size()) - 1);
    std::uniform_real_distribution<double> scale(0.85, 1.15);
    double w = std::max(prior[0] * scale(rng), need);
    double h = std::max(prior[1] * scale(rng), need);
    if (w > opt.width - 2 * margin || h > opt.height - 2 * margin) return std::nullopt;

    std::optional<AxisRect> placed;
    for (int attempt = 0; attempt < 300 && !placed; ++attempt) {
      std::uniform_real_distribution<double> px(margin, opt.width - margin - w);
      std::uniform_real_distribution<double> py(margin, opt.height - margin - h);
      AxisRect r{round2(px(rng)), round2(py(rng)), round2(w), round2(h)};
      if (std::none_of(bases.begin(), bases.end(),
                       [&](const AxisRect& b) { return overlaps(r, b, kBaseGap); })) {
        placed = r;
      }
    }
    if (!placed) return std::nullopt;
    bases.push_back(*placed);

    AxisRect below = *placed;
    for (std::size_t level = 0; level < stack.size(); ++level) {
      const int idx = stack[level];
      layout.objects[idx].class_name = classes[idx];
      layout.objects[idx].bbox = below;
      layout.free_regions[idx] = below;
      if (level + 1 == stack.size()) break;

      // Next object lies in one half of this one; the other half stays visible.
      const bool split_x = below.w >= below.h;
      const bool first_half = uniform01(rng) < 0.5;
      std::uniform_real_distribution<double> along(0.8, 0.95);
      std::uniform_real_distribution<double> across(0.7, 0.9);
      AxisRect half = below;
      AxisRect visible = below;
      if (split_x) {
        half.w = below.w / 2.0;
        visible.w = below.w / 2.0;
        (first_half ? visible.x : half.x) += below.w / 2.0;
      } else {
        half.h = below.h / 2.0;
        visible.h = below.h / 2.0;
        (first_half ? visible.y : half.y) += below.h / 2.0;
      }
      const double cw = split_x ? half.w * along(rng) : half.w * across(rng);
      const double ch = split_x ? half.h * across(rng) : half.h * along(rng);
      std::uniform_real_distribution<double> ox(0.0, half.w - cw);
      std::uniform_real_distribution<double> oy(0.0, half.h - ch);
      AxisRect child{round2(half.x + ox(rng)), round2(half.y + oy(rng)), 0.0, 0.0};
      child.w = round2(std::min(cw, half.right() - child.x));
      child.h = round2(std::min(ch, half.bottom() - child.y));
      // Keep the visible part clear of rounding overlap.
      layout.free_regions[idx] = visible;
      layout.edges.push_back({stack[level + 1], idx});
      below = child;
    }
  }
  return layout;
}

std::vector<GraspRect> place_grasps(const AxisRect& region, Rng& rng) {
  std::uniform_int_distribution<int> count(1, 3);
  const int k = count(rng);
  // One pixel of slack on each side so rounding cannot push a grasp out.
  const AxisRect r{region.x + 1.0, region.y + 1.0, region.w - 2.0, region.h - 2.0};
  std::vector<GraspRect> out;
  for (int g = 0; g < k; ++g) {
    std::optional<GraspRect> found;
    for (int attempt = 0; attempt < 60 && !found; ++attempt) {
      std::uniform_real_distribution<double> theta(-90.0, 90.0);
      std::uniform_real_distribution<double> opening(
          kMinGraspOpening, std::max(kMinGraspOpening, std::min(90.0, 0.9 * std::max(r.w, r.h))));
      std::uniform_real_distribution<double> jaw(kMinGraspJaw, 30.0);
      const double t = round2(theta(rng));
      const double w = round2(opening(rng));
      const double h = round2(jaw(rng));
      const AxisRect env = axis_envelope(make_grasp(0.0, 0.0, t, w, h));
      if (env.w > r.w || env.h > r.h) continue;
      std::uniform_real_distribution<double> cx(r.x + env.w / 2.0, r.right() - env.w / 2.0);
      std::uniform_real_distribution<double> cy(r.y + env.h / 2.0, r.bottom() - env.h / 2.0);
      found = make_grasp(round2(cx(rng)), round2(cy(rng)), t, w, h);
    }
    if (!found) {
      // Axis-aligned grasp across the longer side of the region.
      const bool wide = r.w >= r.h;
      const double w = round2(std::min(0.8 * std::max(r.w, r.h), 90.0));
      const double h = round2(std::min(0.6 * std::min(r.w, r.h), 30.0));
      found = make_grasp(round2(r.center_x()), round2(r.center_y()), wide ? 0.0 : -90.0, w, h);
    }
    out.push_back(*found);
  }
  return out;
}

bool has_horizontal_tie(const Scene& scene) {
  return !closure(scene).ambiguous_pairs().empty();
}

}  // namespace

Corpus gen_synthetic(std::size_t n, std::uint64_t seed, const GenOptions& options) {
  options.validate();
  const auto& classes = options.vocabulary->classes();
  Corpus corpus;
  corpus.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, streams::kScene, i));
    std::uniform_int_distribution<int> count(options.min_objects, options.max_objects);
    const int k = count(rng);

    std::optional<Scene> scene;
    for (int attempt = 0; attempt < options.max_attempts && !scene; ++attempt) {
      std::vector<std::string> picked;
      std::sample(classes.begin(), classes.end(), std::back_inserter(picked), k, rng);
      std::shuffle(picked.begin(), picked.end(), rng);
      auto layout = try_layout(picked, options, rng);
      if (!layout) continue;

      Scene s;
      char id[32];
      std::snprintf(id, sizeof id, "syn-%06zu", i);
      s.id = id;
      s.width = options.width;
      s.height = options.height;
      for (int o = 0; o < k; ++o) {
        layout->objects[o].id = o + 1;
        s.objects.push_back(layout->objects[o]);
      }
      for (const auto& e : layout->edges) s.tree.edges.push_back({e.child + 1, e.parent + 1});
      for (int o = 0; o < k; ++o) {
        for (const auto& g : place_grasps(layout->free_regions[o], rng)) {
          s.grasps.push_back({o + 1, g, true});
        }
      }
      if (has_horizontal_tie(s)) continue;
      const SceneGraph graph = closure(s);
      for (auto& g : s.grasps) g.surface = surface_label(graph, g.object_id);
      scene = std::move(s);
    }
    if (!scene) {
      throw Error(ErrorCode::kGeneration, "no feasible layout for scene " +
                                              std::to_string(i) + " after " +
                                              std::to_string(options.max_attempts) +
                                              " attempts");
    }

    SampleRecord record;
    record.scene = std::move(*scene);
    const auto td = describe_target(record.scene, derive_seed(seed, streams::kDescribe, i));
    if (td.description) record.descriptions.push_back(*td.description);
    corpus.records.push_back(std::move(record));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Splits

std::array<std::size_t, 3> split_sizes(std::size_t n, std::array<double, 3> ratios) {
  double total = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw Error(ErrorCode::kConfig, "split ratios must be finite and >= 0");
    }
    total += r;
  }
  if (total <= 0.0) throw Error(ErrorCode::kConfig, "split ratios sum to zero");

  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = static_cast<double>(n) * ratios[i] / total;
    sizes[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++sizes[order[i % 3]];
  return sizes;
}

CorpusSplit split_corpus(const Corpus& corpus, std::uint64_t seed,
                         std::array<double, 3> ratios) {
  const auto sizes = split_sizes(corpus.size(), ratios);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  CorpusSplit out;
  std::array<Corpus*, 3> parts{&out.train, &out.val, &out.test};
  std::size_t pos = 0;
  for (std::size_t p = 0; p < 3; ++p) {
    for (std::size_t i = 0; i < sizes[p]; ++i) {
      parts[p]->records.push_back(corpus.records[order[pos++]]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Session export

Corpus export_session_samples(const std::vector<SessionEvent>& events,
                              std::vector<std::string>* warnings) {
  auto warn = [&](const SessionEvent& e, const std::string& msg) {
    if (warnings) {
      warnings->push_back("session '" + e.session_id + "' seq " +
                          std::to_string(e.sequence) + ": " + msg);
    }
  };
  std::map<std::string, Scene> scenes;
  std::map<std::string, std::size_t> per_session;
  Corpus corpus;
  for (const auto& e : events) {
    if (e.kind == EventKind::kCreated) {
      try {
        scenes[e.session_id] = decode_scene(codec::field(e.payload, "scene", "payload"),
                                            "payload.scene");
      } catch (const Error& err) {
        warn(e, std::string("unusable created event: ") + err.what());
      }
      continue;
    }
    if (e.kind != EventKind::kGrounded) continue;
    auto it = scenes.find(e.session_id);
    if (it == scenes.end()) {
      warn(e, "grounded event without a scene; skipped");
      continue;
    }
    try {
      SampleRecord r;
      r.scene = it->second;
      r.descriptions.push_back(decode_description(
          codec::field(e.payload, "description", "payload"), "payload.description"));
      r.grounded_object_id =
          decode_grounded(codec::field(e.payload, "grounded", "payload"), "payload.grounded")
              .object_id;
      // Scene ids repeat across sessions; keep record ids unique.
      const std::size_t n = per_session[e.session_id]++;
      r.scene.id = e.session_id + "/" + it->second.id + (n ? "#" + std::to_string(n) : "");
      corpus.records.push_back(std::move(r));
    } catch (const Error& err) {
      warn(e, std::string("incomplete grounded event: ") + err.what());
    }
  }
  return corpus;
}

}  // namespace graspwise
