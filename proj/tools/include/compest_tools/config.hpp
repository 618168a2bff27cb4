#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <compest/measurement_error.hpp>
#include <compest/optimize.hpp>

namespace compest::tools {

// Experiment configuration, read from JSON. Every field has a default; an
// empty object describes the full default run.
struct ExperimentConfig {
  int months = 85;
  std::uint64_t seed = 20050101;
  int parallel = 1;
  std::filesystem::path output = "compest_out";
  std::vector<int> populations{1, 2, 3};
  std::filesystem::path rate_targets;  // empty: packaged default series
  std::vector<std::string> estimators{"direct", "ak_cps", "best_ak", "emp_ak", "rc", "blue", "blue_bailar", "emp_blue"};
  std::array<double, 4> ak_parameters = kCpsRateParameters;
  double alpha_step = 0.05;
  std::string sigma_source = "exact";  // exact | estimated
  bool measurement_error = true;
  MeasurementError error;
  int optimizer_restarts = 4;
  double optimizer_tolerance = 1e-8;
  long optimizer_max_evaluations = 100000;
  std::vector<int> audit_draws{1, 506};
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text);
// include_output = false drops the output directory so that runs into
// different directories write identical copies.
std::string dump_config(const ExperimentConfig& config, bool include_output = true);

// Schema and feasibility problems; empty when the configuration is usable.
std::vector<std::string> validate(const ExperimentConfig& config);

inline const std::vector<std::string>& known_estimators() {
  static const std::vector<std::string> names{"direct", "ak_cps", "best_ak", "census_ak", "emp_ak",
                                              "rc",     "blue",   "blue_bailar", "emp_blue"};
  return names;
}

}  // namespace compest::tools
