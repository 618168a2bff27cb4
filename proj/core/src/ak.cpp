#include <vector>

#include "compest/error.hpp"
#include "compest/estimators.hpp"

namespace compest {

Eigen::MatrixXd ak_recursive(const PanelSample& sample, const WeightSet& weights, const AkCoefficients& coeffs) {
  const Eigen::MatrixXd direct = direct_estimator(sample, weights);
  const int months = sample.months();
  Eigen::MatrixXd t(months, 3);
  t.row(0) = direct.row(0);

  // previous-month row of each individual, 0 when absent
  std::vector<int> prev_row(static_cast<std::size_t>(sample.population_size()) + 1, 0);
  for (int m = 2; m <= months; ++m) {
    const auto ids_prev = sample.individuals(m - 1);
    for (std::size_t i = 0; i < ids_prev.size(); ++i) prev_row[static_cast<std::size_t>(ids_prev[i])] = static_cast<int>(i) + 1;

    Eigen::Vector3d matched_now = Eigen::Vector3d::Zero();
    Eigen::Vector3d matched_prev = Eigen::Vector3d::Zero();
    Eigen::Vector3d entering = Eigen::Vector3d::Zero();
    const auto ids = sample.individuals(m);
    const auto s = sample.status(m);
    const auto s_prev = sample.status(m - 1);
    const auto w = weights.month(m);
    const auto w_prev = weights.month(m - 1);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const int j = prev_row[static_cast<std::size_t>(ids[i])];
      if (j > 0) {
        matched_now(s[i] - 1) += w[i];
        matched_prev(s_prev[static_cast<std::size_t>(j - 1)] - 1) += w_prev[static_cast<std::size_t>(j - 1)];
      } else {
        entering(s[i] - 1) += w[i];
      }
    }
    for (int e = 0; e < 3; ++e) {
      const double k = coeffs.k[static_cast<std::size_t>(e)];
      const double a = coeffs.a[static_cast<std::size_t>(e)];
      t(m - 1, e) = k * direct(m - 1, e) + (1.0 - k) * (t(m - 2, e) + matched_now(e) - matched_prev(e)) +
                    a * (entering(e) - matched_now(e) / 3.0);
    }
    for (int id : ids_prev) prev_row[static_cast<std::size_t>(id)] = 0;
  }
  return t;
}

LabeledArray ak_coefficients(double a, double k, const RotationDesign& design) {
  const auto roles = rotation_roles(design);
  const int months = design.months;
  const auto mm = static_cast<std::size_t>(months);
  LabeledArray c({mm, mm, kGroups});
  for (int g = 1; g <= kGroups; ++g) c({1, 1, static_cast<std::size_t>(g)}) = 1.0 / 8.0;
  for (int m = 2; m <= months; ++m) {
    const auto um = static_cast<std::size_t>(m);
    for (int g = 1; g <= kGroups; ++g) {
      const auto ug = static_cast<std::size_t>(g);
      const bool cont = roles.continuing[ug - 1];
      const bool stay = roles.staying[ug - 1];
      c({um, um, ug}) = k / 8.0 + (cont ? (1.0 - k) / 8.0 - a / 24.0 : a / 8.0);
      c({um, um - 1, ug}) = (1.0 - k) * c({um - 1, um - 1, ug}) - (stay ? (1.0 - k) / 8.0 : 0.0);
      for (std::size_t mp = 1; mp + 1 < um; ++mp) c({um, mp, ug}) = (1.0 - k) * c({um - 1, mp, ug});
    }
  }
  return c;
}

LinearWeights ak_linear_weights(const AkCoefficients& coeffs, const RotationDesign& design) {
  const auto mm = static_cast<std::size_t>(design.months);
  LinearWeights w({mm, 3}, {mm, kGroups, 3});
  for (std::size_t e = 1; e <= 3; ++e) {
    const LabeledArray c = ak_coefficients(coeffs.a[e - 1], coeffs.k[e - 1], design);
    for (std::size_t m = 1; m <= mm; ++m) {
      for (std::size_t mp = 1; mp <= m; ++mp) {
        for (std::size_t g = 1; g <= kGroups; ++g) w({m, e}, {mp, g, e}) = c({m, mp, g});
      }
    }
  }
  return w;
}

Eigen::VectorXd apply_linear(const LinearWeights& w, const MisEstimates& mis) {
  return w.apply(std::span<const double>(mis.vec().data(), static_cast<std::size_t>(mis.vec().size())));
}

}  // namespace compest
