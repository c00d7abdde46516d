#pragma once

#include <filesystem>
#include <string_view>

#include "graspwise/codec.hpp"
#include "graspwise/noise.hpp"
#include "graspwise/planner.hpp"

namespace graspwise {

/// Planner config file:
///
///   {"version": 1, "planner": {...}, "noise": {...}}
///
/// Both sections are optional and missing keys keep their defaults.
struct ExperimentConfig {
  PlannerConfig planner;
  NoiseConfig noise;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline constexpr int kConfigVersion = 1;

Json encode(const ExperimentConfig& c);
/// Throws Error(kParse) for malformed documents and Error(kConfig) for
/// out-of-range values.
ExperimentConfig parse_experiment_config(std::string_view text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace graspwise
