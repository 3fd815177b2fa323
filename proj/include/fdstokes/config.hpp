#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fdstokes/assembly.hpp"
#include "fdstokes/geometry.hpp"
#include "fdstokes/solver.hpp"

namespace fdstokes {

struct RunConfig {
  MethodConfig method = MethodConfig::make(Variant::NoStab, FeTriple{2, 1, 1});
  /// Every sweep to run; {method} unless the runs key lists several. All
  /// share the stabilization parameters of method.
  std::vector<MethodConfig> runs{method};
  LevelSet geometry{};
  std::vector<int> n_list{10, 20, 40, 80};
  int subsegments = 8;
  QuadratureDegrees degrees{};
  std::string out = "convergence.csv";
  std::string dump_mesh;
  std::string dump_geometry;
  bool emit_matrix = false;
  bool probe_infsup = false;
  int threads = 0;
  unsigned seed = 0;
  bool least_squares_fallback = true;
};

/// Error naming the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Thrown by parse_config for --help; what() is the usage text.
class HelpRequested : public std::runtime_error {
 public:
  explicit HelpRequested(const std::string& usage) : std::runtime_error(usage) {}
};

/// Ordered key=value assignments; later entries override earlier ones.
using Assignments = std::vector<std::pair<std::string, std::string>>;

/// Flat "key = value" text; '#' starts a comment, blank lines ignored.
/// Throws ConfigError on malformed lines.
Assignments parse_config_text(const std::string& text);
Assignments parse_config_file(const std::string& path);

/// Applies assignments to the defaults and validates. Recognized keys:
/// variant, fe, gamma0, theta, gamma, theta_min, viscous_factor, center,
/// radius, n, subsegments, volume_degree, interface_degree, error_degree,
/// out, dump_mesh, dump_geometry, emit_matrix, probe_infsup, threads, seed,
/// singular (least-squares | fail), runs ("VARIANT:a,b,c; ..." overrides
/// variant and fe).
RunConfig make_run_config(const Assignments& assignments);

/// Defaults, then the file named by --config, then the remaining flags.
/// argv[0] is skipped. Throws ConfigError for unknown flags or keys.
RunConfig parse_config(int argc, const char* const* argv);

std::vector<int> parse_int_list(const std::string& key, const std::string& value);

/// CSV path of one run: `out` itself for a single run, otherwise
/// "<stem>_<variant>_<abc><ext>" next to it.
std::string run_output_path(const RunConfig& rc, std::size_t run);

}  // namespace fdstokes
