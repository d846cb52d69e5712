#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "emenc/config.hpp"

namespace emenc::cli {

struct Options {
  std::string config;
  std::string out;
  std::optional<double> tau_min;
  std::optional<double> tau_max;
  std::optional<int> tau_count;
  std::string mode;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  double interior_scale = 1.0;
  std::string quantity = "J_full";
  std::vector<std::string> curves;
};

/// Config with command-line overrides applied. Output directory: --out, else run.output_dir.
ExperimentConfig load(const Options& opt);

/// Background-volume store directory: $EM_ENCLOSURE_CACHE, else <out>/cache.
std::string cache_dir(const ExperimentConfig& cfg);

/// Writes schema.json describing every CSV this tool emits.
void write_schema(const std::string& out_dir);

int cmd_simulate(const Options& opt);
int cmd_indicator(const Options& opt);
int cmd_extract(const Options& opt);
int cmd_verify(const Options& opt);
int cmd_scaling(const Options& opt);
int cmd_reflector(const Options& opt);

}  // namespace emenc::cli
