#include "compest/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "compest/error.hpp"

namespace compest {

double max_relative_residual(const Eigen::MatrixXd& constraints, const Eigen::VectorXd& v,
                             const Eigen::VectorXd& targets) {
  const Eigen::VectorXd r = constraints * v - targets;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    worst = std::max(worst, std::abs(r(i)) / std::max(std::abs(targets(i)), 1.0));
  }
  return worst;
}

CalibrationResult calibrate(const Eigen::VectorXd& weights, const Eigen::MatrixXd& constraints,
                            const Eigen::VectorXd& targets, int month) {
  const Eigen::Index n = weights.size();
  const Eigen::Index c = constraints.rows();
  if (constraints.cols() != n || targets.size() != c) {
    throw ShapeError("calibration: constraint matrix is " + std::to_string(c) + "x" +
                     std::to_string(constraints.cols()) + " for " + std::to_string(n) + " units and " +
                     std::to_string(targets.size()) + " targets");
  }
  if ((weights.array() < 0.0).any()) throw DomainError("calibration: starting weights must be nonnegative");

  CalibrationResult out;
  if (c == 0) {
    out.weights = weights;
    return out;
  }

  const Eigen::VectorXd root = weights.cwiseSqrt();
  const Eigen::MatrixXd scaled = (constraints * root.asDiagonal()).transpose();  // n x c
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(kRedundancyTolerance);
  const Eigen::Index rank = qr.rank();
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index i = 0; i < c; ++i) {
    (i < rank ? out.retained : out.dropped).push_back(perm(i));
  }
  std::sort(out.retained.begin(), out.retained.end());
  std::sort(out.dropped.begin(), out.dropped.end());

  Eigen::MatrixXd a(rank, n);
  Eigen::VectorXd t(rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    a.row(i) = constraints.row(out.retained[static_cast<std::size_t>(i)]);
    t(i) = targets(out.retained[static_cast<std::size_t>(i)]);
  }
  const Eigen::MatrixXd ad = a * weights.asDiagonal();
  const Eigen::MatrixXd gram = ad * a.transpose();
  const Eigen::VectorXd lambda = gram.ldlt().solve(t - a * weights);
  out.weights = weights + ad.transpose() * lambda;

  out.max_relative_residual = max_relative_residual(constraints, out.weights, targets);
  if (out.max_relative_residual > kConstraintTolerance) {
    throw CalibrationError("calibration constraints are inconsistent (relative residual " +
                               std::to_string(out.max_relative_residual) + ")",
                           month);
  }
  out.negative_weights = static_cast<int>((out.weights.array() < 0.0).count());
  return out;
}

}  // namespace compest
