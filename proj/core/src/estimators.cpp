#include "compest/estimators.hpp"

#include <string>

#include "compest/error.hpp"

namespace compest {

MisEstimates::MisEstimates(int months, Eigen::VectorXd values) : months_(months), v_(std::move(values)) {
  if (v_.size() != 24 * static_cast<Eigen::Index>(months)) {
    throw ShapeError("month-in-sample vector has length " + std::to_string(v_.size()) + ", expected " +
                     std::to_string(24 * months));
  }
}

LabeledArray MisEstimates::as_array() const {
  return LabeledArray({static_cast<std::size_t>(months_), 8, 3}, std::vector<double>(v_.data(), v_.data() + v_.size()));
}

Eigen::MatrixXd as_totals(const Eigen::VectorXd& flat, int months) {
  if (flat.size() != 3 * static_cast<Eigen::Index>(months)) throw ShapeError("totals vector must have length 3M");
  return Eigen::Map<const Eigen::MatrixXd>(flat.data(), months, 3);
}

Eigen::VectorXd flatten_totals(const Eigen::MatrixXd& totals) {
  if (totals.cols() != 3) throw ShapeError("totals must have 3 columns");
  return Eigen::Map<const Eigen::VectorXd>(totals.data(), totals.size());
}

Eigen::Vector3d weighted_totals(std::span<const std::uint8_t> status, std::span<const double> weights) {
  if (status.size() != weights.size()) throw ShapeError("status and weight vectors differ in length");
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < status.size(); ++i) t(status[i] - 1) += weights[i];
  return t;
}

Eigen::MatrixXd direct_estimator(const PanelSample& sample, const WeightSet& weights) {
  if (weights.months() != sample.months() || weights.month_size() != sample.month_size()) {
    throw ShapeError("weights do not match the sample");
  }
  Eigen::MatrixXd t(sample.months(), 3);
  for (int m = 1; m <= sample.months(); ++m) t.row(m - 1) = weighted_totals(sample.status(m), weights.month(m)).transpose();
  return t;
}

MisEstimates mis_estimator(const PanelSample& sample, const WeightSet& weights) {
  if (weights.months() != sample.months() || weights.month_size() != sample.month_size()) {
    throw ShapeError("weights do not match the sample");
  }
  MisEstimates mis(sample.months());
  const auto gs = static_cast<std::size_t>(sample.group_size());
  for (int m = 1; m <= sample.months(); ++m) {
    const auto w = weights.month(m);
    for (int g = 1; g <= kGroups; ++g) {
      const Eigen::Vector3d t =
          weighted_totals(sample.group_status(m, g), w.subspan(static_cast<std::size_t>(g - 1) * gs, gs));
      for (int e = 1; e <= 3; ++e) mis(m, g, e) = 8.0 * t(e - 1);
    }
  }
  return mis;
}

}  // namespace compest
