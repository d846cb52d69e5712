#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emenc/fdtd/lattice.hpp"
#include "emenc/indicator.hpp"
#include "emenc/medium.hpp"
#include "emenc/source.hpp"

namespace emenc {

/// Flat `key = value` text. `[section]` lines prefix the following keys with `section.`;
/// `#` starts a comment. Duplicate keys throw config.
using ConfigMap = std::map<std::string, std::string>;
ConfigMap parse_config(std::istream& is);
ConfigMap load_config_file(const std::string& path);

enum class RunMode { scattered, total_pair, analytic_tilde };
const char* to_string(RunMode m);
RunMode run_mode_from_string(const std::string& s);

struct TauGridSpec {
  std::optional<double> dist_guess;
  std::optional<double> tau_min;
  std::optional<double> tau_max;
  int count = 16;
  double span = 8.0;
};

struct ExperimentConfig {
  BackgroundMedium medium;
  std::optional<ObstacleSpec> obstacle;
  SourceSpec source;
  std::vector<Vec3> directions;  ///< one or two; directions[0] == source.a
  GridSpec grid;
  TauGridSpec tau;
  RunMode mode = RunMode::scattered;
  FitModel fit = FitModel::compensated;
  bool store_background = true;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  /// Every key that determines the simulated traces, canonicalized.
  std::string fingerprint() const;
  /// Source spec for direction j.
  SourceSpec source_for(std::size_t j) const;
  /// Tau grid from the explicit bounds, or from dist_guess (falling back to the geometric
  /// dist(D,B) when an obstacle is present).
  std::vector<double> tau_grid() const;
};

/// Builds the config from parsed keys. Unknown keys and malformed values throw config.
ExperimentConfig make_config(const ConfigMap& map);

/// Cross-module preconditions before any compute: material and pulse validity, B disjoint from
/// D (geometry), independent directions, grid and causality margin (config).
void validate_config(const ExperimentConfig& cfg);

/// Keys accepted by make_config with a one-line description each.
const std::vector<std::pair<std::string, std::string>>& config_keys();

}  // namespace emenc
