#include <array>
#include <vector>

#include "compest/error.hpp"
#include "compest/optimize.hpp"

namespace compest {

namespace {

enum BlockType { kDirect = 0, kMatchedChange = 1, kEnteringContrast = 2 };

struct Term {
  int month;  // 1-based
  std::array<double, kGroups> weight;
};

// Group weights defining each building block of month j (1-based).
std::vector<Term> block_terms(const RotationRoles& roles, int j, int type) {
  std::array<double, kGroups> now{};
  std::array<double, kGroups> prev{};
  switch (type) {
    case kDirect:
      now.fill(1.0 / 8.0);
      return {{j, now}};
    case kMatchedChange:
      if (j == 1) return {};
      for (int g = 0; g < kGroups; ++g) {
        now[g] = roles.continuing[g] ? 1.0 / 8.0 : 0.0;
        prev[g] = roles.staying[g] ? -1.0 / 8.0 : 0.0;
      }
      return {{j, now}, {j - 1, prev}};
    default:
      if (j == 1) return {};
      for (int g = 0; g < kGroups; ++g) now[g] = roles.entering[g] ? 1.0 / 8.0 : -1.0 / 24.0;
      return {{j, now}};
  }
}

}  // namespace

Eigen::MatrixXd AkVarianceModel::block_map(const RotationDesign& design) {
  const int months = design.months;
  const auto roles = rotation_roles(design);
  const MisEstimates layout(months);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(6 * months, 24 * months);
  for (int e = 0; e < 2; ++e) {
    for (int type = 0; type < 3; ++type) {
      for (int j = 1; j <= months; ++j) {
        const int row = (j - 1) + months * (type + 3 * e);
        for (const Term& t : block_terms(roles, j, type)) {
          for (int g = 1; g <= kGroups; ++g) l(row, layout.index(t.month, g, e + 1)) += t.weight[static_cast<std::size_t>(g - 1)];
        }
      }
    }
  }
  return l;
}

AkVarianceModel::AkVarianceModel(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& at, const RotationDesign& design)
    : months_(design.months) {
  if (sigma.rows() != 24 * months_ || sigma.cols() != 24 * months_) throw ShapeError("covariance must be 24M x 24M");
  const Eigen::MatrixXd l = block_map(design);
  g_ = l * sigma * l.transpose();
  set_gradients(at);
}

AkVarianceModel::AkVarianceModel(const StructuredSigma& sigma, const Eigen::MatrixXd& at, const RotationDesign& design)
    : months_(design.months) {
  if (sigma.months() != months_) throw ShapeError("covariance and design differ in months");
  const auto roles = rotation_roles(design);
  const double c_other = sigma.other_cluster();
  const double c_diff = sigma.same_cluster() - sigma.other_cluster();

  std::vector<std::vector<Term>> terms(static_cast<std::size_t>(3 * months_));
  for (int type = 0; type < 3; ++type) {
    for (int j = 1; j <= months_; ++j) terms[static_cast<std::size_t>(type * months_ + j - 1)] = block_terms(roles, j, type);
  }
  auto pair_factor = [&](const Term& a, const Term& b) {
    double sa = 0.0;
    double sb = 0.0;
    double same = 0.0;
    for (int g = 1; g <= kGroups; ++g) {
      sa += a.weight[static_cast<std::size_t>(g - 1)];
      sb += b.weight[static_cast<std::size_t>(g - 1)];
      for (int gp = 1; gp <= kGroups; ++gp) {
        if (sigma.same_cluster(a.month, g, b.month, gp)) {
          same += a.weight[static_cast<std::size_t>(g - 1)] * b.weight[static_cast<std::size_t>(gp - 1)];
        }
      }
    }
    return c_other * sa * sb + c_diff * same;
  };

  g_ = Eigen::MatrixXd::Zero(6 * months_, 6 * months_);
  for (std::size_t a = 0; a < terms.size(); ++a) {
    for (std::size_t b = 0; b < terms.size(); ++b) {
      Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
      for (const Term& ta : terms[a]) {
        for (const Term& tb : terms[b]) {
          const Eigen::Matrix3d& s = sigma.household_covariance(ta.month, tb.month);
          if (s.isZero(0.0)) continue;
          acc += pair_factor(ta, tb) * s.topLeftCorner<2, 2>();
        }
      }
      const int type_a = static_cast<int>(a) / months_;
      const int j_a = static_cast<int>(a) % months_;
      const int type_b = static_cast<int>(b) / months_;
      const int j_b = static_cast<int>(b) % months_;
      for (int e = 0; e < 2; ++e) {
        for (int f = 0; f < 2; ++f) g_(j_a + months_ * (type_a + 3 * e), j_b + months_ * (type_b + 3 * f)) = acc(e, f);
      }
    }
  }
  set_gradients(at);
}

void AkVarianceModel::set_gradients(const Eigen::MatrixXd& at) {
  if (at.rows() != months_ || at.cols() != 3) throw ShapeError("gradient totals must be (M,3)");
  j_.resize(static_cast<std::size_t>(months_));
  for (int m = 0; m < months_; ++m) {
    const Eigen::RowVector3d j = rate_gradient(at.row(m).transpose());
    j_[static_cast<std::size_t>(m)] = j.head<2>();
  }
}

LinearizedVariance AkVarianceModel::evaluate(std::span<const double> p) const {
  if (p.size() != 4) throw ShapeError("AK rate parameters are (a1, k1, a2, k2)");
  const int mm = months_;
  const std::array<double, 2> a{p[0], p[2]};
  const std::array<double, 2> k{p[1], p[3]};

  // coefficient of block type on u_j(e)
  auto coeff = [&](int j, int type, int e) {
    if (j == 0) return type == kDirect ? 1.0 : 0.0;
    switch (type) {
      case kDirect: return k[static_cast<std::size_t>(e)];
      case kMatchedChange: return 1.0 - k[static_cast<std::size_t>(e)];
      default: return a[static_cast<std::size_t>(e)];
    }
  };

  // u_j(e) = sum over block types of coeff * block(j, type, e); at most three terms each.
  struct Term {
    Eigen::Index row;
    double c;
  };
  std::vector<std::array<Term, 3>> terms(static_cast<std::size_t>(2 * mm));
  for (int e = 0; e < 2; ++e) {
    for (int j = 0; j < mm; ++j) {
      auto& t = terms[static_cast<std::size_t>(j + mm * e)];
      for (int type = 0; type < 3; ++type) t[static_cast<std::size_t>(type)] = {j + mm * (type + 3 * e), coeff(j, type, e)};
    }
  }

  // u = cov of (u_j(e)), index j + M e; cg = G C column by column, then cu = C' cg.
  Eigen::MatrixXd cg(6 * mm, 2 * mm);
  for (Eigen::Index q = 0; q < 2 * mm; ++q) {
    const auto& t = terms[static_cast<std::size_t>(q)];
    cg.col(q) = t[0].c * g_.col(t[0].row) + t[1].c * g_.col(t[1].row) + t[2].c * g_.col(t[2].row);
  }
  Eigen::MatrixXd cu(2 * mm, 2 * mm);
  for (Eigen::Index q = 0; q < 2 * mm; ++q) {
    const double* col = cg.col(q).data();
    for (Eigen::Index i = 0; i < 2 * mm; ++i) {
      const auto& t = terms[static_cast<std::size_t>(i)];
      cu(i, q) = t[0].c * col[t[0].row] + t[1].c * col[t[1].row] + t[2].c * col[t[2].row];
    }
  }
  auto ublock = [&](int i, int j) {
    Eigen::Matrix2d b;
    b << cu(i, j), cu(i, j + mm), cu(i + mm, j), cu(i + mm, j + mm);
    return b;
  };

  const Eigen::Matrix2d lambda = Eigen::Vector2d(1.0 - k[0], 1.0 - k[1]).asDiagonal();
  std::vector<Eigen::Matrix2d> c(static_cast<std::size_t>(mm));
  for (int j = 0; j < mm; ++j) c[static_cast<std::size_t>(j)] = ublock(0, j);
  Eigen::Matrix2d p_prev = ublock(0, 0);

  LinearizedVariance out;
  out.level.resize(mm);
  out.change.resize(std::max(mm - 1, 0));
  out.level(0) = j_[0] * p_prev * j_[0].transpose();
  for (int m = 1; m < mm; ++m) {
    const Eigen::Matrix2d x = c[static_cast<std::size_t>(m)];
    const Eigen::Matrix2d p_now = lambda * p_prev * lambda + lambda * x + x.transpose() * lambda + ublock(m, m);
    const Eigen::Matrix2d cross = lambda * p_prev + x.transpose();
    for (int j = m + 1; j < mm; ++j) c[static_cast<std::size_t>(j)] = lambda * c[static_cast<std::size_t>(j)] + ublock(m, j);
    const auto& jm = j_[static_cast<std::size_t>(m)];
    const auto& jp = j_[static_cast<std::size_t>(m - 1)];
    out.level(m) = jm * p_now * jm.transpose();
    out.change(m - 1) = out.level(m) + out.level(m - 1) - 2.0 * (jm * cross * jp.transpose())(0, 0);
    p_prev = p_now;
  }
  return out;
}

double AkVarianceModel::operator()(ObjectiveKind kind, std::span<const double> p) const {
  const LinearizedVariance v = evaluate(p);
  switch (kind) {
    case ObjectiveKind::level: return v.level_sum();
    case ObjectiveKind::change: return v.change_sum();
    default: return v.compromise();
  }
}

}  // namespace compest
