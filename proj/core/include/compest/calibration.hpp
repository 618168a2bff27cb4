#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace compest {

struct CalibrationResult {
  Eigen::VectorXd weights;
  std::vector<int> retained;  // constraint rows kept after redundancy elimination
  std::vector<int> dropped;
  int negative_weights = 0;
  double max_relative_residual = 0.0;
};

inline constexpr double kRedundancyTolerance = 1e-10;
inline constexpr double kConstraintTolerance = 1e-8;

// Chi-square calibration: minimise sum_k (v_k - w_k)^2 / w_k subject to
// constraints * v = targets, where constraints is (c x n). Units with w_k = 0
// keep weight zero. Redundant rows are removed by a column-pivoted QR of
// (A D^{1/2})'; a dropped row that the solution violates beyond
// kConstraintTolerance raises CalibrationError for `month`.
CalibrationResult calibrate(const Eigen::VectorXd& weights, const Eigen::MatrixXd& constraints,
                            const Eigen::VectorXd& targets, int month = 0);

// |a v - t| / max(|t|, 1), row-wise maximum.
double max_relative_residual(const Eigen::MatrixXd& constraints, const Eigen::VectorXd& v,
                             const Eigen::VectorXd& targets);

}  // namespace compest
