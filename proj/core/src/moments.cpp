#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "compest/error.hpp"
#include "compest/evaluation.hpp"

namespace compest {

TargetSeries target_series(const Eigen::MatrixXd& totals) {
  TargetSeries t;
  t.level = flatten_totals(totals);
  const auto r = unemployment_rate(totals);
  t.rate = Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
  const Eigen::Index m = t.rate.size();
  t.change = m > 1 ? Eigen::VectorXd(t.rate.tail(m - 1) - t.rate.head(m - 1)) : Eigen::VectorXd(0);
  return t;
}

Moments exact_moments(const Eigen::MatrixXd& values, const Eigen::VectorXd& truth) {
  if (values.cols() != truth.size()) throw ShapeError("realizations and truth differ in length");
  if (values.rows() == 0) throw DomainError("no realizations");
  const double r = static_cast<double>(values.rows());
  Moments out;
  out.mean = values.colwise().sum().transpose() / r;
  out.bias = out.mean - truth;
  out.variance = (values.rowwise() - out.mean.transpose()).colwise().squaredNorm().transpose() / r;
  out.mse = (values.rowwise() - truth.transpose()).colwise().squaredNorm().transpose() / r;
  return out;
}

MomentReport exact_moments(std::span<const Eigen::MatrixXd> estimates, const Eigen::MatrixXd& truth_totals) {
  if (estimates.empty()) throw DomainError("no estimates");
  const TargetSeries truth = target_series(truth_totals);
  const auto n = static_cast<Eigen::Index>(estimates.size());
  Eigen::MatrixXd level(n, truth.level.size());
  Eigen::MatrixXd rate(n, truth.rate.size());
  Eigen::MatrixXd change(n, truth.change.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& est = estimates[static_cast<std::size_t>(i)];
    if (est.rows() != truth_totals.rows() || est.cols() != truth_totals.cols()) {
      throw ShapeError("estimate " + std::to_string(i + 1) + " has the wrong shape");
    }
    const TargetSeries s = target_series(est);
    level.row(i) = s.level.transpose();
    rate.row(i) = s.rate.transpose();
    change.row(i) = s.change.transpose();
  }
  return {exact_moments(level, truth.level), exact_moments(rate, truth.rate), exact_moments(change, truth.change)};
}

double type1_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (p <= 0.0) return sorted.front();
  const auto n = static_cast<double>(sorted.size());
  auto k = static_cast<std::size_t>(std::ceil(n * p - 1e-12));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  return sorted[k - 1];
}

RelativeMseSummary relative_mse_summary(const Eigen::VectorXd& mse, const Eigen::VectorXd& baseline_mse) {
  if (mse.size() != baseline_mse.size()) throw ShapeError("MSE vectors differ in length");
  RelativeMseSummary out;
  out.ratios = Eigen::VectorXd::Constant(mse.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> kept;
  for (Eigen::Index i = 0; i < mse.size(); ++i) {
    if (baseline_mse(i) == 0.0) {
      out.excluded.push_back(static_cast<int>(i + 1));
      continue;
    }
    out.ratios(i) = mse(i) / baseline_mse(i);
    kept.push_back(out.ratios(i));
  }
  std::sort(kept.begin(), kept.end());
  for (std::size_t q = 0; q < kQuantileLevels.size(); ++q) out.quantiles[q] = type1_quantile(kept, kQuantileLevels[q]);
  double sum = 0.0;
  for (double v : kept) sum += v;
  out.mean = kept.empty() ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(kept.size());
  return out;
}

}  // namespace compest
