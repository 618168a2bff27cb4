#include "compest/regression_composite.hpp"

#include <string>

#include "compest/calibration.hpp"
#include "compest/error.hpp"

namespace compest {

Eigen::MatrixXd rc_proxy(double alpha, const RcMonth& current, const RcMonth& previous,
                         const Eigen::VectorXd& previous_z_total, double previous_weight_sum,
                         const RcOptions& options) {
  const Eigen::Index n = current.z.rows();
  if (static_cast<Eigen::Index>(current.previous_row.size()) != n) throw ShapeError("previous_row length differs from rows");
  if (!(previous_weight_sum != 0.0)) throw DomainError("previous composite weights sum to zero");
  double matched = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (current.previous_row[static_cast<std::size_t>(i)] >= 0) matched += current.w(i);
  }
  const double total = current.w.sum();
  double scale = 0.0;
  if (matched > 0.0) scale = options.scaling == MatchedScaling::expansion ? total / matched : matched / total;

  const Eigen::RowVectorXd imputed = previous_z_total.transpose() / previous_weight_sum;
  Eigen::MatrixXd proxy(n, current.z.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const int j = current.previous_row[static_cast<std::size_t>(i)];
    if (j >= 0) {
      const auto prev = previous.z.row(j);
      const auto now = current.z.row(i);
      proxy.row(i) = alpha * (scale * (prev - now) + now) + (1.0 - alpha) * prev;
    } else {
      proxy.row(i) = alpha * current.z.row(i) + (1.0 - alpha) * imputed;
    }
  }
  return proxy;
}

RcResult regression_composite(double alpha, std::span<const RcMonth> months, const Eigen::MatrixXd& x_targets,
                              const RcOptions& options) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0,1]");
  const auto count = static_cast<Eigen::Index>(months.size());
  if (count == 0) throw DomainError("regression composite needs at least one month");
  if (x_targets.rows() != count) throw ShapeError("x targets must have one row per month");

  RcResult out;
  out.totals.resize(count, months[0].y.cols());
  out.z_totals.resize(count, months[0].z.cols());
  out.weights.push_back(months[0].w);
  out.negative_weights.push_back(0);
  out.max_relative_residual.push_back(0.0);
  out.totals.row(0) = months[0].w.transpose() * months[0].y;
  out.z_totals.row(0) = months[0].w.transpose() * months[0].z;

  for (Eigen::Index m = 1; m < count; ++m) {
    const RcMonth& cur = months[static_cast<std::size_t>(m)];
    const RcMonth& prev = months[static_cast<std::size_t>(m - 1)];
    if (cur.x.cols() != x_targets.cols()) throw ShapeError("x columns differ from x targets");
    const Eigen::MatrixXd proxy =
        rc_proxy(alpha, cur, prev, out.z_totals.row(m - 1).transpose(), out.weights.back().sum(), options);

    Eigen::MatrixXd a(proxy.cols() + cur.x.cols(), cur.w.size());
    a << proxy.transpose(), cur.x.transpose();
    Eigen::VectorXd t(a.rows());
    t << out.z_totals.row(m - 1).transpose(), x_targets.row(m).transpose();

    CalibrationResult cal = calibrate(cur.w, a, t, static_cast<int>(m + 1));
    out.totals.row(m) = cal.weights.transpose() * cur.y;
    out.z_totals.row(m) = cal.weights.transpose() * cur.z;
    out.negative_weights.push_back(cal.negative_weights);
    out.max_relative_residual.push_back(cal.max_relative_residual);
    out.weights.push_back(std::move(cal.weights));
  }
  return out;
}

std::vector<RcMonth> rc_input(const PanelSample& sample, const WeightSet& weights) {
  const int n = sample.month_size();
  std::vector<RcMonth> months(static_cast<std::size_t>(sample.months()));
  std::vector<int> prev_row(static_cast<std::size_t>(sample.population_size()) + 1, -1);
  for (int m = 1; m <= sample.months(); ++m) {
    RcMonth& rc = months[static_cast<std::size_t>(m - 1)];
    rc.y = Eigen::MatrixXd::Zero(n, 3);
    rc.x.resize(n, kCovariates);
    rc.w = Eigen::Map<const Eigen::VectorXd>(weights.month(m).data(), n);
    rc.previous_row.assign(static_cast<std::size_t>(n), -1);
    const auto s = sample.status(m);
    const auto ids = sample.individuals(m);
    for (int i = 0; i < n; ++i) {
      rc.y(i, s[static_cast<std::size_t>(i)] - 1) = 1.0;
      for (int c = 1; c <= kCovariates; ++c) rc.x(i, c - 1) = sample.covariate(m, static_cast<std::size_t>(i), c);
      if (m > 1) rc.previous_row[static_cast<std::size_t>(i)] = prev_row[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])];
    }
    rc.z = rc.y;
    if (m > 1) {
      for (int id : sample.individuals(m - 1)) prev_row[static_cast<std::size_t>(id)] = -1;
    }
    for (int i = 0; i < n; ++i) prev_row[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])] = i;
  }
  return months;
}

RcResult regression_composite(double alpha, const PanelSample& sample, const WeightSet& weights,
                              const Eigen::VectorXd& x_targets, const RcOptions& options) {
  if (x_targets.size() != kCovariates) throw ShapeError("expected one target per covariate");
  const auto months = rc_input(sample, weights);
  const Eigen::MatrixXd targets = x_targets.transpose().replicate(sample.months(), 1);
  return regression_composite(alpha, months, targets, options);
}

WeightSet to_weight_set(const RcResult& result, int month_size) {
  WeightSet w(static_cast<int>(result.weights.size()), month_size);
  for (std::size_t m = 0; m < result.weights.size(); ++m) {
    if (result.weights[m].size() != month_size) throw ShapeError("composite weights do not match the month size");
    auto dst = w.month(static_cast<int>(m + 1));
    for (int i = 0; i < month_size; ++i) dst[static_cast<std::size_t>(i)] = result.weights[m](i);
  }
  return w;
}

}  // namespace compest
