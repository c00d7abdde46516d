#include "graspwise/noise.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <set>

#include "graspwise/error.hpp"
#include "graspwise/random.hpp"

namespace graspwise {

namespace {

void require_rate(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::kConfig, std::string(name) + " must lie in [0, 1]");
  }
}

std::optional<RelationTriple> apply_mode(const RelationTriple& t,
                                         const Scene& scene, CorruptionMode mode,
                                         Rng& rng) {
  RelationTriple out = t;
  switch (mode) {
    case CorruptionMode::kSwapRoles:
      if (t.subject_class == t.object_class) return std::nullopt;
      std::swap(out.subject_class, out.object_class);
      std::swap(out.subject_id, out.object_id);
      return out;
    case CorruptionMode::kReplacePredicate: {
      std::vector<Predicate> others;
      for (Predicate p : {Predicate::kOn, Predicate::kUnder, Predicate::kLeft,
                          Predicate::kRight}) {
        if (p != t.predicate) others.push_back(p);
      }
      std::uniform_int_distribution<std::size_t> pick(0, others.size() - 1);
      out.predicate = others[pick(rng)];
      return out;
    }
    case CorruptionMode::kReplaceSubject: {
      std::set<std::string> classes;
      for (const auto& o : scene.objects) {
        if (o.class_name != t.subject_class && o.class_name != t.object_class) {
          classes.insert(o.class_name);
        }
      }
      if (classes.empty()) return std::nullopt;
      std::vector<std::string> pool(classes.begin(), classes.end());
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      out.subject_class = pool[pick(rng)];
      out.subject_id.reset();
      for (const auto& o : scene.objects) {
        if (o.class_name == out.subject_class) {
          out.subject_id = o.id;
          break;
        }
      }
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace

void NoiseConfig::validate() const {
  require_rate(describe_error_rate, "describe_error_rate");
  require_rate(ground_error_rate, "ground_error_rate");
  require_rate(surface_flip_rate, "surface_flip_rate");
  require_rate(angle_noise_rate, "angle_noise_rate");
}

std::string_view to_string(CorruptionMode m) {
  switch (m) {
    case CorruptionMode::kSwapRoles: return "swap";
    case CorruptionMode::kReplacePredicate: return "predicate";
    case CorruptionMode::kReplaceSubject: return "subject";
  }
  return "swap";
}

Description corrupt_with_mode(const Description& desc, const Scene& scene,
                              CorruptionMode mode, std::uint64_t seed) {
  static constexpr std::array kOrder = {CorruptionMode::kSwapRoles,
                                        CorruptionMode::kReplacePredicate,
                                        CorruptionMode::kReplaceSubject};
  Rng rng(seed);
  const auto start = static_cast<std::size_t>(
      std::find(kOrder.begin(), kOrder.end(), mode) - kOrder.begin());
  for (std::size_t k = 0; k < kOrder.size(); ++k) {
    auto triple = apply_mode(desc.triple, scene, kOrder[(start + k) % kOrder.size()], rng);
    if (!triple) continue;
    Description out = desc;
    out.triple = *triple;
    const int index = desc.template_index.value_or(0);
    out.template_index = index % static_cast<int>(templates(triple->predicate).size());
    out.text = render(*triple, *out.template_index);
    out.corrupted = true;
    return out;
  }
  // Predicate replacement always applies, so this is unreachable.
  return desc;
}

Description corrupt_description_with_draw(const Description& desc,
                                          const Scene& scene, double epsilon,
                                          double u, std::uint64_t seed) {
  require_rate(epsilon, "describe_error_rate");
  if (u >= epsilon) return desc;
  Rng rng(seed);
  std::uniform_int_distribution<int> pick(0, 2);
  const auto mode = static_cast<CorruptionMode>(pick(rng));
  return corrupt_with_mode(desc, scene, mode, rng());
}

Description corrupt_description(const Description& desc, const Scene& scene,
                                double epsilon, std::uint64_t seed) {
  Rng rng(seed);
  const double u = uniform01(rng);
  return corrupt_description_with_draw(desc, scene, epsilon, u, rng());
}

Description intervene_with_draw(const Description& desc, const Description& oracle,
                                double rho, double u) {
  require_rate(rho, "intervention rate");
  if (desc.triple.same_statement(oracle.triple) || u >= rho) return desc;
  Description out = oracle;
  out.source = DescriptionSource::kHuman;
  out.corrupted = false;
  return out;
}

Description intervene(const Description& desc, const Description& oracle,
                      double rho, std::uint64_t seed) {
  Rng rng(seed);
  return intervene_with_draw(desc, oracle, rho, uniform01(rng));
}

}  // namespace graspwise
