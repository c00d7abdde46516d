#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace graspwise::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;

/// Parsed command line. Defaults are the documented ones.
struct CliConfig {
  std::string subcommand;
  std::string corpus;
  std::string out;
  std::string report;
  std::string log;
  std::string config;
  std::string log_dir;
  std::string host = "127.0.0.1";
  std::uint64_t seed = 0;
  std::size_t n = 100;
  int min_objects = 2;
  int max_objects = 6;
  bool require_stack = false;
  bool split = false;
  std::string baseline = "scenetext";
  double eps = 0.0;
  double rho = 0.0;
  double flip = 0.1;
  double delta = 0.0;
  std::vector<double> rho_grid{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<int> ks{1, 3, 5, 10};
  bool per_scene = false;
  int port = 8080;

  /// Throws Error(kConfig).
  void validate() const;
};

/// Runs the command line; never throws. Reports go to `out`, diagnostics and
/// logs to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace graspwise::cli
