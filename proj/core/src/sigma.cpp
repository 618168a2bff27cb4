#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "compest/error.hpp"
#include "compest/evaluation.hpp"

namespace compest {

StructuredSigma::StructuredSigma(int months, std::array<int, kGroups> lag, double same_cluster, double other_cluster,
                                 std::vector<Eigen::Matrix3d> household_covariance)
    : months_(months), lag_(lag), same_cluster_(same_cluster), other_cluster_(other_cluster),
      s_(std::move(household_covariance)) {
  if (s_.size() != static_cast<std::size_t>(months) * static_cast<std::size_t>(months)) {
    throw ShapeError("structured covariance needs M*M household blocks");
  }
}

Eigen::MatrixXd StructuredSigma::dense() const {
  const MisEstimates layout(months_);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(24 * months_, 24 * months_);
  for (int m = 1; m <= months_; ++m) {
    for (int mp = 1; mp <= months_; ++mp) {
      const Eigen::Matrix3d& s = household_covariance(m, mp);
      if (s.isZero(0.0)) continue;
      for (int g = 1; g <= kGroups; ++g) {
        for (int gp = 1; gp <= kGroups; ++gp) {
          const double f = group_factor(m, g, mp, gp);
          for (int e = 1; e <= 3; ++e) {
            for (int ep = 1; ep <= 3; ++ep) out(layout.index(m, g, e), layout.index(mp, gp, ep)) = f * s(e - 1, ep - 1);
          }
        }
      }
    }
  }
  return out;
}

Eigen::Matrix3d household_cross_covariance(std::span<const Eigen::Vector3d> a, std::span<const Eigen::Vector3d> b) {
  if (a.size() != b.size()) throw ShapeError("household totals are not paired");
  const std::size_t n = a.size();
  if (n < 2) return Eigen::Matrix3d::Zero();
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& v : a) mean += v;
  mean /= static_cast<double>(n);
  Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) s += (a[i] - mean) * b[i].transpose();
  return s / static_cast<double>(n - 1);
}

StructuredSigma estimate_sigma(const PanelSample& sample, const RotationDesign& design) {
  const int months = sample.months();
  const int hs = sample.household_size();
  const int per_group = sample.group_size() / hs;

  // household totals, [m][g][household position]
  std::vector<Eigen::Vector3d> totals(static_cast<std::size_t>(months) * kGroups * per_group, Eigen::Vector3d::Zero());
  auto at = [&](int m, int g, int h) -> Eigen::Vector3d& {
    return totals[(static_cast<std::size_t>(m - 1) * kGroups + static_cast<std::size_t>(g - 1)) * per_group +
                  static_cast<std::size_t>(h)];
  };
  for (int m = 1; m <= months; ++m) {
    for (int g = 1; g <= kGroups; ++g) {
      const auto s = sample.group_status(m, g);
      for (int h = 0; h < per_group; ++h) {
        for (int k = 0; k < hs; ++k) at(m, g, h)(s[static_cast<std::size_t>(h * hs + k)] - 1) += 1.0;
      }
    }
  }

  std::vector<Eigen::Matrix3d> blocks(static_cast<std::size_t>(months) * months, Eigen::Matrix3d::Zero());
  std::vector<Eigen::Vector3d> a;
  std::vector<Eigen::Vector3d> b;
  for (int m = 1; m <= months; ++m) {
    for (int mp = 1; mp <= months; ++mp) {
      a.clear();
      b.clear();
      for (int g = 1; g <= kGroups; ++g) {
        for (int gp = 1; gp <= kGroups; ++gp) {
          if (m + design.lag[static_cast<std::size_t>(g - 1)] != mp + design.lag[static_cast<std::size_t>(gp - 1)]) continue;
          for (int h = 0; h < per_group; ++h) {
            a.push_back(at(m, g, h));
            b.push_back(at(mp, gp, h));
          }
        }
      }
      blocks[static_cast<std::size_t>(m - 1) * months + static_cast<std::size_t>(mp - 1)] = household_cross_covariance(a, b);
    }
  }
  const double h = design.households;
  const double n = static_cast<double>(kGroups) * design.group_households;
  const double same = h * h * (1.0 - n / h) / (n / kGroups);
  return StructuredSigma(months, design.lag, same, -h, std::move(blocks));
}

Eigen::MatrixXd empirical_blue(const MisEstimates& mis, const StructuredSigma& sigma) {
  const int months = mis.months();
  if (sigma.months() != months) throw ShapeError("covariance and estimates differ in months");
  const Eigen::MatrixXd hg = helmert_contrasts(kGroups);  // 8 x 7
  const Eigen::MatrixXd he = helmert_contrasts(3);        // 3 x 2
  const int cols = 2 * 7 * months;
  auto col = [months](int ce, int h, int m) { return ce * 7 * months + h * months + (m - 1); };

  // (c1 - c2) H' S_d H for every month lag d = m' - m
  const int span = months - 1;
  std::vector<Eigen::MatrixXd> group_blocks(static_cast<std::size_t>(2 * span + 1));
  for (int d = -span; d <= span; ++d) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(kGroups, kGroups);
    for (int g = 1; g <= kGroups; ++g) {
      for (int gp = 1; gp <= kGroups; ++gp) s(g - 1, gp - 1) = sigma.same_cluster(1, g, 1 + d, gp) ? 1.0 : 0.0;
    }
    group_blocks[static_cast<std::size_t>(d + span)] =
        (sigma.same_cluster() - sigma.other_cluster()) * hg.transpose() * s * hg;
  }

  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(cols, cols);
  for (int m = 1; m <= months; ++m) {
    for (int mp = 1; mp <= months; ++mp) {
      const Eigen::Matrix3d& s = sigma.household_covariance(m, mp);
      const Eigen::MatrixXd& gblock = group_blocks[static_cast<std::size_t>(mp - m + span)];
      if (s.isZero(0.0) || gblock.isZero(0.0)) continue;
      const Eigen::Matrix2d eblock = he.transpose() * s * he;
      for (int ce = 0; ce < 2; ++ce) {
        for (int cep = 0; cep < 2; ++cep) {
          for (int h = 0; h < 7; ++h) {
            for (int hp = 0; hp < 7; ++hp) b(col(ce, h, m), col(cep, hp, mp)) = gblock(h, hp) * eblock(ce, cep);
          }
        }
      }
    }
  }
  b = 0.5 * (b + b.transpose()).eval();

  Eigen::VectorXd v(cols);
  for (int m = 1; m <= months; ++m) {
    for (int ce = 0; ce < 2; ++ce) {
      for (int h = 0; h < 7; ++h) {
        double acc = 0.0;
        for (int g = 1; g <= kGroups; ++g) {
          for (int e = 1; e <= 3; ++e) acc += he(e - 1, ce) * hg(g - 1, h) * mis(m, g, e);
        }
        v(col(ce, h, m)) = acc;
      }
    }
  }

  Eigen::VectorXd x;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(b);
  if (ldlt.info() == Eigen::Success && ldlt.rcond() > 1e-11) {
    x = ldlt.solve(v);
  } else {
    x = symmetric_pseudo_inverse(b) * v;
  }

  // u = U x as (M,8,3)
  MisEstimates u(months);
  for (int m = 1; m <= months; ++m) {
    for (int g = 1; g <= kGroups; ++g) {
      for (int e = 1; e <= 3; ++e) {
        double acc = 0.0;
        for (int ce = 0; ce < 2; ++ce) {
          for (int h = 0; h < 7; ++h) acc += he(e - 1, ce) * hg(g - 1, h) * x(col(ce, h, m));
        }
        u(m, g, e) = acc;
      }
    }
  }

  // estimate = X+ (mis - Sigma u)
  Eigen::MatrixXd est(months, 3);
  for (int m = 1; m <= months; ++m) {
    Eigen::Matrix<double, 8, 3> y;
    for (int g = 1; g <= kGroups; ++g) {
      for (int e = 1; e <= 3; ++e) y(g - 1, e - 1) = mis(m, g, e);
    }
    for (int mp = 1; mp <= months; ++mp) {
      const Eigen::Matrix3d& s = sigma.household_covariance(m, mp);
      if (s.isZero(0.0)) continue;
      Eigen::Matrix<double, 8, 3> up;
      for (int gp = 1; gp <= kGroups; ++gp) {
        for (int ep = 1; ep <= 3; ++ep) up(gp - 1, ep - 1) = u(mp, gp, ep);
      }
      Eigen::Matrix<double, 8, 8> kappa;
      for (int g = 1; g <= kGroups; ++g) {
        for (int gp = 1; gp <= kGroups; ++gp) kappa(g - 1, gp - 1) = sigma.group_factor(m, g, mp, gp);
      }
      y -= kappa * up * s.transpose();
    }
    est.row(m - 1) = y.colwise().sum() / 8.0;
  }
  return est;
}

}  // namespace compest
