#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "compest/sample.hpp"

namespace compest {

// One month of calibration input. Rows are sampled units.
struct RcMonth {
  Eigen::MatrixXd y;               // study variables
  Eigen::MatrixXd z;               // endogenous control variables
  Eigen::MatrixXd x;               // auxiliary variables
  Eigen::VectorXd w;               // base weights
  std::vector<int> previous_row;   // row of the same unit in the previous month, -1 if entering
};

// Scaling of the matched change term in the continuing-unit proxy.
//   expansion:  z_m + tau (z_{m-1} - z_m), tau = sum_{S_m} w / sum_{matched} w
//   as_printed: z_m + tau^{-1} (z_{m-1} - z_m)
// expansion keeps sum_k w_k proxy_k consistent for the previous-month total.
enum class MatchedScaling { expansion, as_printed };

struct RcOptions {
  MatchedScaling scaling = MatchedScaling::expansion;
};

struct RcResult {
  Eigen::MatrixXd totals;        // (M, y columns)
  Eigen::MatrixXd z_totals;      // (M, z columns), sum_k w^rc_k z_{m,k}
  std::vector<Eigen::VectorXd> weights;
  std::vector<int> negative_weights;
  std::vector<double> max_relative_residual;
};

// Proxy values for month `current` given the previous month, its composite
// z total and the sum of its composite weights.
Eigen::MatrixXd rc_proxy(double alpha, const RcMonth& current, const RcMonth& previous,
                         const Eigen::VectorXd& previous_z_total, double previous_weight_sum,
                         const RcOptions& options = {});

// x_targets: (M, x columns). Month 1 is left at the base weights.
RcResult regression_composite(double alpha, std::span<const RcMonth> months, const Eigen::MatrixXd& x_targets,
                              const RcOptions& options = {});

// z = y = one-hot observed status, x = the sample's covariates.
std::vector<RcMonth> rc_input(const PanelSample& sample, const WeightSet& weights);
RcResult regression_composite(double alpha, const PanelSample& sample, const WeightSet& weights,
                              const Eigen::VectorXd& x_targets, const RcOptions& options = {});

WeightSet to_weight_set(const RcResult& result, int month_size);

}  // namespace compest
