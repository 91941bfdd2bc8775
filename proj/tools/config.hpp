#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "vibronic/bopes.hpp"
#include "vibronic/fock.hpp"
#include "vibronic/geometry.hpp"
#include "vibronic/graph.hpp"
#include "vibronic/params.hpp"
#include "vibronic/vibronic.hpp"

namespace vibronic::cli {

using Json = nlohmann::ordered_json;

inline const std::vector<std::string> kTasks = {"graph",  "gs-scan-xi", "gs-scan-kappa", "gs-scan-omega",
                                                "wigner", "bopes-scan", "compare"};

/// Schema violation, already formatted as `source:line: path: message`.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& path, const std::string& message);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// JSON pointer of every key and array element -> 1-based line in the raw text.
std::map<std::string, int> json_line_map(const std::string& text);

struct ScanRange {
  double start = 0.0;
  double stop = 0.0;
  int samples = 0;
  bool critical_units = true;  ///< values are fractions of xi_c / kappa_c (Omega: absolute)

  std::vector<double> values() const;
};

struct WignerSettings {
  std::string mode = "perpendicular";  ///< or "parallel" (includes the displacement)
  double extent = 4.0;                 ///< grid half-width in alpha units
  int samples = 161;
};

struct BopesSettings {
  MinimizeOptions minimize;
  bool quantum = true;
  int refine_samples = 32;
  int surface_samples = 101;
};

struct RunConfig {
  std::string task;
  std::string source = "<config>";

  Preset preset = Preset::Custom;
  std::vector<Eigen::Vector3d> positions;  ///< only for custom geometries
  std::optional<MotionPolicy> motion;

  PotentialModel potential;
  double omega = 1.0;
  double x0 = 1.0;
  double d = 10.0;
  double rabi = 0.0;
  DetuningRule detuning = DetuningRule::facilitation(1.0);
  std::optional<std::string> seed;

  std::optional<ScanRange> scan;
  ConvergenceOptions solver;
  bool max_cutoff_set = false;
  std::string block = "manifold";  ///< or "pair": the lowest doubly excited node on its own
  ModeSpace modes = ModeSpace::Reduced;

  WignerSettings wigner;
  BopesSettings bopes;

  std::string out_dir = "out";
  int threads = 1;

  PhysicalParams params() const;
  Geometry geometry() const;
  /// Fully resolved configuration for the run manifest (no timestamps, stable key order).
  Json resolved() const;
};

/// Parses and schema-checks a JSON config. Throws ConfigError.
RunConfig parse_config(const std::string& text, const std::string& source);
RunConfig load_config(const std::string& path);

/// Cutoff ceiling used when the config leaves solver.max_cutoff unset.
int default_max_cutoff(int modes);

}  // namespace vibronic::cli
