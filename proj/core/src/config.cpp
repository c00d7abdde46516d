#include "graspwise/config.hpp"

#include <fstream>
#include <sstream>

#include "graspwise/error.hpp"

namespace graspwise {

Json encode(const ExperimentConfig& c) {
  Json j;
  j["version"] = kConfigVersion;
  j["planner"] = encode(c.planner);
  j["noise"] = encode(c.noise);
  return j;
}

ExperimentConfig parse_experiment_config(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  codec::object(j, "config");
  const auto version = codec::integer(codec::field(j, "version", "config"), "config.version");
  if (version != kConfigVersion) {
    throw Error(ErrorCode::kConfig, "config.version: unsupported version " +
                                        std::to_string(version));
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "version" && key != "planner" && key != "noise") {
      throw Error(ErrorCode::kConfig, "config: unknown section '" + key + "'");
    }
  }
  ExperimentConfig c;
  if (const Json* p = codec::optional_field(j, "planner")) {
    c.planner = decode_planner(*p, "config.planner");
  }
  if (const Json* n = codec::optional_field(j, "noise")) {
    c.noise = decode_noise(*n, "config.noise");
  }
  c.planner.validate();
  c.noise.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

}  // namespace graspwise
