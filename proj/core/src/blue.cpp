#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "compest/error.hpp"
#include "compest/estimators.hpp"

namespace compest {

namespace {

void check_sigma(const Eigen::MatrixXd& sigma, int months) {
  const Eigen::Index n = 24 * static_cast<Eigen::Index>(months);
  if (sigma.rows() != n || sigma.cols() != n) {
    throw ShapeError("covariance must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  const double scale = sigma.cwiseAbs().maxCoeff();
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw DomainError("covariance matrix is not symmetric");
  }
}

Eigen::MatrixXd status_sum_direction() { return Eigen::MatrixXd::Constant(3, 1, 1.0 / std::sqrt(3.0)); }

// Restrict the status factor of the basis to sum-zero contrasts when Sigma
// annihilates every (m,g) status-sum direction.
Eigen::MatrixXd status_factor(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& month_group_basis) {
  const Eigen::MatrixXd sums = Eigen::kroneckerProduct(status_sum_direction(), month_group_basis);
  const double scale = sigma.cwiseAbs().maxCoeff();
  if (scale == 0.0 || (sigma * sums).cwiseAbs().maxCoeff() <= 1e-9 * scale) return helmert_contrasts(3);
  return Eigen::MatrixXd::Identity(3, 3);
}

// left (I - Sigma U (U' Sigma U)+ U')
Eigen::MatrixXd projected_weights(const Eigen::MatrixXd& left, const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& u) {
  const Eigen::MatrixXd su = sigma * u;
  Eigen::MatrixXd b = u.transpose() * su;
  b = 0.5 * (b + b.transpose()).eval();
  const Eigen::MatrixXd b_pinv = symmetric_pseudo_inverse(b);
  return left - ((left * su) * b_pinv) * u.transpose();
}

}  // namespace

Eigen::MatrixXd helmert_contrasts(int n) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, std::max(n - 1, 0));
  for (int j = 1; j < n; ++j) {
    const double norm = std::sqrt(static_cast<double>(j) * (j + 1));
    for (int i = 0; i < j; ++i) h(i, j - 1) = 1.0 / norm;
    h(j, j - 1) = -static_cast<double>(j) / norm;
  }
  return h;
}

DesignMatrices design_matrices(int months) {
  if (months < 1) throw DomainError("design_matrices: months must be positive");
  const auto mm = static_cast<std::size_t>(months);
  DesignMatrices d{ArrayMatrix({mm, 8, 3}, {mm, 3}), ArrayMatrix({mm, 8, 3}, {7, 3})};
  for (std::size_t m = 1; m <= mm; ++m) {
    for (std::size_t g = 1; g <= 8; ++g) {
      for (std::size_t e = 1; e <= 3; ++e) {
        d.x({m, g, e}, {m, e}) = 1.0;
        if (g < 8) {
          d.x_bias({m, g, e}, {g, e}) = 1.0;
        } else {
          for (std::size_t gp = 1; gp <= 7; ++gp) d.x_bias({m, g, e}, {gp, e}) = -1.0;
        }
      }
    }
  }
  return d;
}

Eigen::MatrixXd blue_weights_dense(const Eigen::MatrixXd& x, const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != x.rows() || sigma.cols() != x.rows()) throw ShapeError("covariance and design disagree");
  const Eigen::MatrixXd x_pinv = pseudo_inverse(x);
  const Eigen::MatrixXd p = x * x_pinv;
  const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(x.rows(), x.rows()) - p;
  const Eigen::MatrixXd q_pinv = pseudo_inverse(q);
  Eigen::MatrixXd inner = q_pinv * sigma * q;
  inner = 0.5 * (inner + inner.transpose()).eval();
  const Eigen::MatrixXd inner_pinv = pseudo_inverse(inner);
  return x_pinv * p * (Eigen::MatrixXd::Identity(x.rows(), x.rows()) - sigma * inner_pinv);
}

Eigen::MatrixXd blue_weights(int months, const Eigen::MatrixXd& sigma) {
  check_sigma(sigma, months);
  const Eigen::MatrixXd month_group = Eigen::kroneckerProduct(helmert_contrasts(8), Eigen::MatrixXd::Identity(months, months));
  const Eigen::MatrixXd u = Eigen::kroneckerProduct(status_factor(sigma, Eigen::kroneckerProduct(Eigen::MatrixXd::Identity(8, 8),
                                                                                               Eigen::MatrixXd::Identity(months, months))),
                                                    month_group);
  const Eigen::MatrixXd x_pinv = design_matrices(months).x.matrix().transpose() / 8.0;
  return projected_weights(x_pinv, sigma, u);
}

Eigen::MatrixXd blue_bailar_weights(int months, const Eigen::MatrixXd& sigma) {
  check_sigma(sigma, months);
  if (months < 2) throw DomainError("rotation-bias model needs at least two months");
  const auto d = design_matrices(months);
  Eigen::MatrixXd x_star(d.x.matrix().rows(), d.x.matrix().cols() + d.x_bias.matrix().cols());
  x_star << d.x.matrix(), d.x_bias.matrix();
  const Eigen::MatrixXd left = pseudo_inverse(x_star).topRows(d.x.matrix().cols());
  const Eigen::MatrixXd month_group = Eigen::kroneckerProduct(helmert_contrasts(8), helmert_contrasts(months));
  const Eigen::MatrixXd u = Eigen::kroneckerProduct(status_factor(sigma, Eigen::kroneckerProduct(Eigen::MatrixXd::Identity(8, 8),
                                                                                               Eigen::MatrixXd::Identity(months, months))),
                                                    month_group);
  return projected_weights(left, sigma, u);
}

Eigen::MatrixXd blue(const MisEstimates& mis, const Eigen::MatrixXd& sigma) {
  return as_totals(blue_weights(mis.months(), sigma) * mis.vec(), mis.months());
}

Eigen::MatrixXd blue_bailar(const MisEstimates& mis, const Eigen::MatrixXd& sigma) {
  return as_totals(blue_bailar_weights(mis.months(), sigma) * mis.vec(), mis.months());
}

}  // namespace compest
