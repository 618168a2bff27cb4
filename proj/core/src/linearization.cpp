#include <string>

#include "compest/error.hpp"
#include "compest/evaluation.hpp"

namespace compest {

Eigen::RowVector3d rate_gradient(const Eigen::Vector3d& totals) {
  const double lf = totals(0) + totals(1);
  if (!(lf > 0.0)) throw DomainError("rate gradient undefined: zero labor force");
  const double d = lf * lf;
  return {-totals(1) / d, totals(0) / d, 0.0};
}

Eigen::Matrix<double, 1, 6> change_gradient(const Eigen::Vector3d& current, const Eigen::Vector3d& previous) {
  Eigen::Matrix<double, 1, 6> j;
  j << rate_gradient(current), -rate_gradient(previous);
  return j;
}

LinearizedVariance linearized_variance(const Eigen::MatrixXd& cov_totals, const Eigen::MatrixXd& at) {
  const Eigen::Index months = at.rows();
  if (at.cols() != 3 || cov_totals.rows() != 3 * months || cov_totals.cols() != 3 * months) {
    throw ShapeError("linearized_variance: covariance must be 3M x 3M for (M,3) totals");
  }
  auto idx = [months](Eigen::Index m, int e) { return m + months * e; };  // 0-based m, e
  LinearizedVariance out;
  out.level.resize(months);
  out.change.resize(std::max<Eigen::Index>(months - 1, 0));
  std::vector<Eigen::RowVector3d> j(static_cast<std::size_t>(months));
  for (Eigen::Index m = 0; m < months; ++m) {
    try {
      j[static_cast<std::size_t>(m)] = rate_gradient(at.row(m).transpose());
    } catch (const DomainError&) {
      throw DomainError("rate gradient undefined: zero labor force in month " + std::to_string(m + 1));
    }
  }
  for (Eigen::Index m = 0; m < months; ++m) {
    Eigen::Matrix3d v;
    for (int e = 0; e < 3; ++e) {
      for (int f = 0; f < 3; ++f) v(e, f) = cov_totals(idx(m, e), idx(m, f));
    }
    out.level(m) = j[static_cast<std::size_t>(m)] * v * j[static_cast<std::size_t>(m)].transpose();
  }
  for (Eigen::Index m = 1; m < months; ++m) {
    Eigen::Matrix<double, 6, 6> v;
    const Eigen::Index rows[2] = {m, m - 1};
    for (int a = 0; a < 6; ++a) {
      for (int b = 0; b < 6; ++b) v(a, b) = cov_totals(idx(rows[a / 3], a % 3), idx(rows[b / 3], b % 3));
    }
    Eigen::Matrix<double, 1, 6> j2;
    j2 << j[static_cast<std::size_t>(m)], -j[static_cast<std::size_t>(m - 1)];
    out.change(m - 1) = j2 * v * j2.transpose();
  }
  return out;
}

LinearizedVariance linearized_variance(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& sigma,
                                       const Eigen::MatrixXd& at) {
  if (weights.cols() != sigma.rows() || sigma.rows() != sigma.cols()) throw ShapeError("weights and covariance disagree");
  return linearized_variance(Eigen::MatrixXd(weights * sigma * weights.transpose()), at);
}

}  // namespace compest
