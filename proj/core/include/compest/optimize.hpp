#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "compest/design.hpp"
#include "compest/estimators.hpp"
#include "compest/evaluation.hpp"
#include "compest/measurement_error.hpp"
#include "compest/population.hpp"

namespace compest {

struct TracePoint {
  int run = 0;
  long iteration = 0;
  std::vector<double> x;
  double value = 0.0;
};

struct OptimizationResult {
  std::vector<double> x;
  double value = 0.0;
  long evaluations = 0;
  bool converged = false;
  std::vector<TracePoint> trace;
  // grid searches: every evaluated point and its value, in evaluation order
  std::vector<std::vector<double>> grid_points;
  std::vector<double> grid_values;
};

using ObjectiveFn = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
  double tolerance = 1e-8;  // simplex diameter (max-norm distance to the best vertex)
  long max_evaluations = 100000;
  double initial_step = 0.1;
  bool record_trace = false;
};

OptimizationResult nelder_mead(const ObjectiveFn& f, std::vector<double> start, const NelderMeadOptions& options = {});

enum class ObjectiveKind { level, change, compromise };
const char* to_string(ObjectiveKind kind);
ObjectiveKind objective_kind(const std::string& name);

// Linearized rate variances of AK estimators as a function of
// p = (a_employed, k_employed, a_unemployed, k_unemployed). The covariance of
// the coefficient-free building blocks (direct, matched change, entering
// contrast) is formed once; each evaluation runs the AK recursion on 2x2
// covariance blocks.
class AkVarianceModel {
 public:
  AkVarianceModel(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& at, const RotationDesign& design);
  AkVarianceModel(const StructuredSigma& sigma, const Eigen::MatrixXd& at, const RotationDesign& design);

  LinearizedVariance evaluate(std::span<const double> p) const;
  double operator()(ObjectiveKind kind, std::span<const double> p) const;

  int months() const noexcept { return months_; }
  // Covariance of the building blocks, index (j, type, status) = j + M (type + 3 status), 0-based.
  const Eigen::MatrixXd& block_covariance() const noexcept { return g_; }

  // (6M x 24M) map from vec(mis) to the building blocks.
  static Eigen::MatrixXd block_map(const RotationDesign& design);

 private:
  void set_gradients(const Eigen::MatrixXd& at);

  int months_;
  Eigen::MatrixXd g_;
  std::vector<Eigen::RowVector2d> j_;
};

// AkCoefficients::cps() in rate-parameter order.
inline constexpr std::array<double, 4> kCpsRateParameters{0.4, 0.7, 0.3, 0.4};

struct AkSearchOptions {
  NelderMeadOptions nelder_mead;
  int restarts = 4;           // random starts in [-1, 1]^4 after the production start
  std::uint64_t seed = 1;
};

OptimizationResult optimal_ak(const AkVarianceModel& model, ObjectiveKind kind, const AkSearchOptions& options = {});
// Exhaustive search over {0.1, 0.2, ..., 1.0}^4.
OptimizationResult census_grid_ak(const AkVarianceModel& model, ObjectiveKind kind);
// Exhaustive search over the box center +- half_width with the given step.
OptimizationResult grid_ak(const AkVarianceModel& model, ObjectiveKind kind, std::span<const double> center,
                           double half_width, double step);

// ---------------------------------------------------------------- regression composite alpha

std::vector<double> alpha_grid(double step = 0.05);

struct AlphaSearch {
  std::vector<double> alphas;
  std::vector<MomentReport> reports;   // empty report for excluded alphas
  std::vector<double> level;           // summed rate MSE, NaN when excluded
  std::vector<double> change;
  std::vector<int> excluded;           // indices into alphas
  std::vector<std::string> exclusion_reasons;
};

double objective_value(const MomentReport& report, ObjectiveKind kind);

// Exact moments of the regression composite for every alpha by enumeration.
AlphaSearch rc_alpha_search(const Population& population, const RotationDesign& design,
                            std::span<const double> alphas, const MeasurementError* error = nullptr,
                            int threads = 1);

OptimizationResult best_alpha(const AlphaSearch& search, ObjectiveKind kind);

// ---------------------------------------------------------------- empirical best

enum class EmpiricalVariant { blue, ak };

// AK coefficients minimizing the objective under a plug-in covariance.
AkCoefficients empirical_best_ak(const StructuredSigma& sigma_hat, const Eigen::MatrixXd& at,
                                 const RotationDesign& design, ObjectiveKind kind,
                                 const AkSearchOptions& options);
AkCoefficients empirical_best_ak(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& at,
                                 const RotationDesign& design, ObjectiveKind kind,
                                 const AkSearchOptions& options);

// Per-sample estimator: estimates Sigma-hat from the sample and plugs it in.
// The AK variant searches from the production start only.
Estimator empirical_best(EmpiricalVariant variant, const RotationDesign& design,
                         ObjectiveKind kind = ObjectiveKind::compromise);

}  // namespace compest
