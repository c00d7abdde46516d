#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "graspwise/grounding.hpp"
#include "graspwise/lang.hpp"
#include "graspwise/noise.hpp"
#include "graspwise/planner.hpp"
#include "graspwise/scene.hpp"

namespace graspwise {

// JSON codecs for the domain types. Encoders emit keys in a fixed order so
// serialized documents hash stably. Decoders take a `where` path used in
// error messages ("scenes[3].objects[1].bbox") and throw Error(kParse).

using Json = nlohmann::ordered_json;

Json encode(const AxisRect& r);
Json encode(const GraspRect& g);
Json encode(const Scene& scene);
Json encode(const RelationTriple& t);
Json encode(const Description& d);
Json encode(const GroundedObject& g);
Json encode(const ScoredGrasp& g);
Json encode(const NoiseConfig& n);
Json encode(const PlannerConfig& p);

AxisRect decode_axis_rect(const Json& j, const std::string& where);
GraspRect decode_grasp_rect(const Json& j, const std::string& where);
Scene decode_scene(const Json& j, const std::string& where);
RelationTriple decode_triple(const Json& j, const std::string& where);
Description decode_description(const Json& j, const std::string& where);
GroundedObject decode_grounded(const Json& j, const std::string& where);
ScoredGrasp decode_scored_grasp(const Json& j, const std::string& where);
/// Missing keys keep their defaults.
NoiseConfig decode_noise(const Json& j, const std::string& where);
PlannerConfig decode_planner(const Json& j, const std::string& where);

namespace codec {

const Json& field(const Json& obj, std::string_view key, const std::string& where);
const Json* optional_field(const Json& obj, std::string_view key);
double number(const Json& j, const std::string& where);
std::int64_t integer(const Json& j, const std::string& where);
std::uint64_t unsigned_integer(const Json& j, const std::string& where);
std::string string(const Json& j, const std::string& where);
bool boolean(const Json& j, const std::string& where);
const Json& array(const Json& j, const std::string& where);
const Json& object(const Json& j, const std::string& where);

}  // namespace codec

}  // namespace graspwise
