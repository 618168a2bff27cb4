#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <compest/evaluation.hpp>
#include <compest/optimize.hpp>
#include <compest/population.hpp>

#include "compest_tools/config.hpp"

namespace compest::tools {

using Logger = std::function<void(const std::string&)>;

inline constexpr std::array<ObjectiveKind, 3> kObjectives{ObjectiveKind::level, ObjectiveKind::change,
                                                          ObjectiveKind::compromise};
inline constexpr double kArbitraryAlpha = 0.75;

struct EstimatorResult {
  std::string name;
  MomentReport report;
  Eigen::MatrixXd audit_totals;  // estimate on the first audit draw
  // Draws whose estimated labor force is not positive. The rate is undefined
  // there, so rate and change moments are NaN when this is nonzero.
  int undefined_draws = 0;
};

struct SettingResult {
  std::string name;  // "no_error" or "error"
  std::vector<EstimatorResult> estimators;

  // nullptr when the estimator was not evaluated.
  const EstimatorResult* find(const std::string& estimator) const;
};

struct AkOptimum {
  ObjectiveKind kind;
  OptimizationResult nelder_mead;
  OptimizationResult census;  // empty unless the census grid was requested
};

struct OracleSummary {
  int rank = 0;
  bool exact = false;
  double residual = 0.0;
};

struct PopulationResult {
  int variant = 0;
  Population population;
  Eigen::MatrixXd truth;
  std::vector<AkOptimum> ak;
  AlphaSearch alphas;
  std::vector<OptimizationResult> alpha_best;  // per kObjectives entry
  OracleSummary oracle;
  SettingResult clean;
  SettingResult error;
};

struct Plan {
  bool evaluate = true;  // moments of the configured estimators
  bool oracle = true;    // rank / exactness check of the realization matrix
};

RotationDesign experiment_design(const ExperimentConfig& config);
RateTargets experiment_targets(const ExperimentConfig& config);
Population experiment_population(const ExperimentConfig& config, int variant);

PopulationResult analyse_population(const ExperimentConfig& config, int variant, const Plan& plan,
                                    const Logger& log);

// Output writers. Every file is written in a fixed order from its inputs alone.
void write_population_summary(const std::filesystem::path& path, const std::vector<Population>& populations,
                              const RateTargets& targets);
void write_design_audit(const std::filesystem::path& dir, const RotationDesign& design,
                        std::span<const int> audit_draws);
void write_evaluation(const std::filesystem::path& dir, const std::vector<PopulationResult>& results);
void write_optimization(const std::filesystem::path& dir, const std::vector<PopulationResult>& results);
void write_weights_audit_file(const std::filesystem::path& dir, const ExperimentConfig& config,
                              const PopulationResult& result);

enum class Command { generate_population, audit_design, evaluate, optimize, report };

// Runs one subcommand end to end and returns the files it wrote.
std::vector<std::filesystem::path> run(const ExperimentConfig& config, Command command, const Logger& log);

}  // namespace compest::tools
