#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "multibai/harness.hpp"

namespace multibai::cli {

// Flat experiment description mirrored by the INI-style config file
// (sections: instance, algorithm, experiment, output).
struct RunConfig {
  std::string family = "bernoulli";
  double sigma = 1.0;
  std::vector<double> means;
  int m = 1;
  std::string rule = "d";
  double delta = 0.1;
  int trials = 100;
  std::uint64_t seed = 1;
  std::int64_t max_rounds = 1000000;
  bool trace = false;
  std::string out_dir = ".";

  bool operator==(const RunConfig&) const = default;
};

// Throws std::invalid_argument with a line reference on malformed input.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Canonical serialization; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& cfg);

std::vector<double> parse_means_list(const std::string& csv);

Family family_from(const RunConfig& cfg);
ExperimentConfig to_experiment_config(const RunConfig& cfg);

}  // namespace multibai::cli
