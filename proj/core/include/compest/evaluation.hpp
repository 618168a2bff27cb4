#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "compest/design.hpp"
#include "compest/estimators.hpp"
#include "compest/population.hpp"
#include "compest/sample.hpp"

namespace compest {

// ---------------------------------------------------------------- targets

// Estimation targets derived from (M,3) totals: levels (flattened (m,e)),
// unemployment rates per month, and month-to-month rate changes.
struct TargetSeries {
  Eigen::VectorXd level;
  Eigen::VectorXd rate;
  Eigen::VectorXd change;
};
TargetSeries target_series(const Eigen::MatrixXd& totals);

// ---------------------------------------------------------------- moments

struct Moments {
  Eigen::VectorXd mean;
  Eigen::VectorXd bias;
  Eigen::VectorXd variance;  // divisor R: the design is uniform over draws
  Eigen::VectorXd mse;
};

// Rows of `values` are realizations (one per draw).
Moments exact_moments(const Eigen::MatrixXd& values, const Eigen::VectorXd& truth);

struct MomentReport {
  Moments level;
  Moments rate;
  Moments change;
};

MomentReport exact_moments(std::span<const Eigen::MatrixXd> estimates, const Eigen::MatrixXd& truth_totals);

// ---------------------------------------------------------------- enumeration

// Runs body(r) for r = 1..draws on `threads` workers. The first exception, tagged
// with its draw, is rethrown after all workers stop.
void parallel_for_draws(int draws, int threads, const std::function<void(int)>& body);

using Estimator = std::function<Eigen::MatrixXd(const PanelSample&, const WeightSet&)>;
// Applied to every drawn sample before estimation (e.g. measurement error).
using SampleTransform = std::function<void(PanelSample&)>;

// Estimates for every draw, in draw order.
std::vector<Eigen::MatrixXd> enumerate_estimates(const Population& population, const RotationDesign& design,
                                                 const Estimator& estimator, int threads = 1,
                                                 const SampleTransform& transform = {});

MomentReport exact_moments(const Population& population, const RotationDesign& design, const Estimator& estimator,
                           int threads = 1, const SampleTransform& transform = {});

// Month-in-sample realizations: row r is vec(mis) of draw r under base weights.
Eigen::MatrixXd mis_realizations(const Population& population, const RotationDesign& design, int threads = 1,
                                 const SampleTransform& transform = {});

// Covariance over the equiprobable draws (divisor R).
Eigen::MatrixXd exact_sigma(const Eigen::MatrixXd& realizations);
Eigen::MatrixXd exact_sigma(const Population& population, const RotationDesign& design, int threads = 1);

// ---------------------------------------------------------------- estimated covariance

// Sigma-hat for one sample: block ((m,g),(m',g')) equals
//   same_cluster * s(m,m')   when both groups hold the same cluster,
//   other_cluster * s(m,m')  otherwise,
// where s(m,m') is the household-level cross covariance over households in
// S_m and S_m'.
class StructuredSigma {
 public:
  StructuredSigma(int months, std::array<int, kGroups> lag, double same_cluster, double other_cluster,
                  std::vector<Eigen::Matrix3d> household_covariance);

  int months() const noexcept { return months_; }
  double same_cluster() const noexcept { return same_cluster_; }
  double other_cluster() const noexcept { return other_cluster_; }
  const Eigen::Matrix3d& household_covariance(int m, int mp) const {
    return s_[static_cast<std::size_t>(m - 1) * static_cast<std::size_t>(months_) + static_cast<std::size_t>(mp - 1)];
  }
  bool same_cluster(int m, int g, int mp, int gp) const {
    return m + lag_[static_cast<std::size_t>(g - 1)] == mp + lag_[static_cast<std::size_t>(gp - 1)];
  }
  double group_factor(int m, int g, int mp, int gp) const {
    return same_cluster(m, g, mp, gp) ? same_cluster_ : other_cluster_;
  }
  const std::array<int, kGroups>& lag() const noexcept { return lag_; }

  Eigen::MatrixXd dense() const;

 private:
  int months_;
  std::array<int, kGroups> lag_;
  double same_cluster_;
  double other_cluster_;
  std::vector<Eigen::Matrix3d> s_;
};

// sum_i (a_i - mean(a)) b_i' / (n - 1) over paired household totals; zero when n < 2.
Eigen::Matrix3d household_cross_covariance(std::span<const Eigen::Vector3d> a, std::span<const Eigen::Vector3d> b);

StructuredSigma estimate_sigma(const PanelSample& sample, const RotationDesign& design);

// Empirical BLUE with Sigma replaced by a structured estimate.
Eigen::MatrixXd empirical_blue(const MisEstimates& mis, const StructuredSigma& sigma);

// ---------------------------------------------------------------- linearization

Eigen::RowVector3d rate_gradient(const Eigen::Vector3d& totals);
// Gradient of R(t_m) - R(t_{m-1}) with respect to (t_m, t_{m-1}).
Eigen::Matrix<double, 1, 6> change_gradient(const Eigen::Vector3d& current, const Eigen::Vector3d& previous);

struct LinearizedVariance {
  Eigen::VectorXd level;   // M entries
  Eigen::VectorXd change;  // M-1 entries, month pairs (m-1, m), m = 2..M
  double level_sum() const { return level.sum(); }
  double change_sum() const { return change.sum(); }
  double compromise() const { return level_sum() + change_sum(); }
};

// cov_totals: covariance of flattened (M,3) totals; gradients at `at`.
LinearizedVariance linearized_variance(const Eigen::MatrixXd& cov_totals, const Eigen::MatrixXd& at);
LinearizedVariance linearized_variance(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& sigma,
                                       const Eigen::MatrixXd& at);

// ---------------------------------------------------------------- exact oracle

struct OracleResult {
  bool exact = false;
  int rank = 0;
  double residual = 0.0;            // max |Y v - 1|
  Eigen::VectorXd combination;      // v with Y v = 1 when exact
  Eigen::MatrixXd weights;          // vec(t) v'
};

// Looks for weights reproducing `truth` on every realization.
OracleResult exact_linear_oracle(const Eigen::MatrixXd& realizations, const Eigen::VectorXd& truth);

// ---------------------------------------------------------------- tables

inline constexpr std::array<double, 5> kQuantileLevels{0.0, 0.25, 0.5, 0.75, 1.0};

struct RelativeMseSummary {
  std::array<double, 5> quantiles{};
  double mean = 0.0;
  std::vector<int> excluded;  // 1-based positions with zero baseline MSE
  Eigen::VectorXd ratios;     // NaN at excluded positions
};

// Type-1 (inverse empirical CDF) quantile of sorted data.
double type1_quantile(std::span<const double> sorted, double p);

RelativeMseSummary relative_mse_summary(const Eigen::VectorXd& mse, const Eigen::VectorXd& baseline_mse);

}  // namespace compest
