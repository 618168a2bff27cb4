#include <gtest/gtest.h>

#include <compest/error.hpp>
#include <compest/estimators.hpp>
#include <compest/regression_composite.hpp>

#include "support.hpp"

using namespace compest;

namespace {

RcMonth month(std::vector<double> z, std::vector<int> prev) {
  RcMonth m;
  const auto n = static_cast<Eigen::Index>(z.size());
  m.z = Eigen::Map<Eigen::VectorXd>(z.data(), n);
  m.y = m.z;
  m.x = Eigen::MatrixXd::Ones(n, 1);
  m.w = Eigen::VectorXd::Constant(n, 2.0);
  m.previous_row = std::move(prev);
  return m;
}

// units A,B,C,D then B,C,D,E then C,D,E,F
std::vector<RcMonth> toy() {
  return {month({1, 0, 1, 1}, {-1, -1, -1, -1}), month({1, 1, 0, 0}, {1, 2, 3, -1}), month({0, 1, 1, 0}, {1, 2, 3, -1})};
}

Eigen::VectorXd kkt_oracle(const Eigen::VectorXd& w, const Eigen::MatrixXd& a, const Eigen::VectorXd& t) {
  const Eigen::Index n = w.size(), c = a.rows();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + c, n + c);
  Eigen::VectorXd rhs(n + c);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 2.0 / w(i);
    rhs(i) = 2.0;
  }
  k.topRightCorner(n, c) = a.transpose();
  k.bottomLeftCorner(c, n) = a;
  rhs.tail(c) = t;
  return Eigen::FullPivLU<Eigen::MatrixXd>(k).solve(rhs).head(n);
}

}  // namespace

TEST(RcProxy, AlphaZeroCarriesPreviousValues) {
  const auto m = toy();
  const Eigen::MatrixXd p = rc_proxy(0.0, m[1], m[0], Eigen::VectorXd::Constant(1, 6.0), 8.0);
  Eigen::VectorXd want(4);
  want << 0, 1, 1, 0.75;
  EXPECT_TRUE(p.col(0).isApprox(want, 1e-15));
}

TEST(RcProxy, AlphaOneUsesScaledChange) {
  const auto m = toy();
  const Eigen::MatrixXd p = rc_proxy(1.0, m[1], m[0], Eigen::VectorXd::Constant(1, 6.0), 8.0);
  Eigen::VectorXd want(4);
  want << -1.0 / 3.0, 1.0, 4.0 / 3.0, 0.0;
  EXPECT_LE((p.col(0) - want).cwiseAbs().maxCoeff(), 1e-15);

  RcOptions printed;
  printed.scaling = MatchedScaling::as_printed;
  const Eigen::MatrixXd q = rc_proxy(1.0, m[1], m[0], Eigen::VectorXd::Constant(1, 6.0), 8.0, printed);
  want << 0.25, 1.0, 0.75, 0.0;
  EXPECT_LE((q.col(0) - want).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(RcProxy, Blend) {
  const auto m = toy();
  const Eigen::MatrixXd p0 = rc_proxy(0.0, m[1], m[0], Eigen::VectorXd::Constant(1, 6.0), 8.0);
  const Eigen::MatrixXd p1 = rc_proxy(1.0, m[1], m[0], Eigen::VectorXd::Constant(1, 6.0), 8.0);
  const Eigen::MatrixXd pa = rc_proxy(0.3, m[1], m[0], Eigen::VectorXd::Constant(1, 6.0), 8.0);
  EXPECT_LE((pa - (0.3 * p1 + 0.7 * p0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(RegressionComposite, ToyRecursionMatchesKkt) {
  const auto m = toy();
  Eigen::MatrixXd xt = Eigen::MatrixXd::Constant(3, 1, 8.0);
  for (double alpha : {0.0, 0.5, 1.0}) {
    const RcResult r = regression_composite(alpha, m, xt);
    EXPECT_EQ(r.weights[0], m[0].w);
    EXPECT_DOUBLE_EQ(r.z_totals(0, 0), 6.0);
    double prev_total = 6.0, prev_sum = 8.0;
    for (int k = 1; k < 3; ++k) {
      const auto& cur = m[static_cast<std::size_t>(k)];
      const auto& prv = m[static_cast<std::size_t>(k - 1)];
      // hand-built proxy
      double matched = 0;
      for (int i = 0; i < 4; ++i) matched += cur.previous_row[static_cast<std::size_t>(i)] >= 0 ? cur.w(i) : 0.0;
      const double tau = cur.w.sum() / matched;
      Eigen::VectorXd proxy(4);
      for (int i = 0; i < 4; ++i) {
        const int j = cur.previous_row[static_cast<std::size_t>(i)];
        proxy(i) = j >= 0 ? alpha * (tau * (prv.z(j, 0) - cur.z(i, 0)) + cur.z(i, 0)) + (1 - alpha) * prv.z(j, 0)
                          : alpha * cur.z(i, 0) + (1 - alpha) * prev_total / prev_sum;
      }
      Eigen::MatrixXd a(2, 4);
      a.row(0) = proxy.transpose();
      a.row(1) = Eigen::RowVectorXd::Ones(4);
      Eigen::VectorXd t(2);
      t << prev_total, 8.0;
      const Eigen::VectorXd want = kkt_oracle(cur.w, a, t);
      EXPECT_LE((r.weights[static_cast<std::size_t>(k)] - want).cwiseAbs().maxCoeff(), 1e-9) << alpha << " " << k;
      prev_total = want.dot(cur.z.col(0));
      prev_sum = want.sum();
      EXPECT_NEAR(r.z_totals(k, 0), prev_total, 1e-9);
      EXPECT_NEAR(r.totals(k, 0), prev_total, 1e-9);
    }
  }
}

TEST(RegressionComposite, RejectsAlphaOutsideUnitInterval) {
  const auto m = toy();
  EXPECT_THROW(regression_composite(1.5, m, Eigen::MatrixXd::Constant(3, 1, 8.0)), DomainError);
  EXPECT_THROW(regression_composite(0.5, m, Eigen::MatrixXd::Constant(2, 1, 8.0)), ShapeError);
}

TEST(RegressionComposite, PanelConstraintsHold) {
  const RotationDesign d = compest::testing::small_design();
  const Population p = compest::testing::small_population(3);
  const Eigen::VectorXd xt = covariate_totals(p);
  for (double alpha : {0.0, 0.35, 1.0}) {
    const PanelSample s(p, d, SampleAssignment(d, 11));
    const WeightSet w = base_weights(d, s);
    const RcResult r = regression_composite(alpha, s, w, xt);
    for (int m = 2; m <= d.months; ++m) {
      EXPECT_LE(r.max_relative_residual[static_cast<std::size_t>(m - 1)], 1e-8);
      // x controls reproduced by the calibrated weights
      const WeightSet cw = to_weight_set(r, s.month_size());
      const auto wm = cw.month(m);
      for (int c = 1; c <= kCovariates; ++c) {
        double tot = 0;
        for (std::size_t i = 0; i < wm.size(); ++i) tot += wm[i] * s.covariate(m, i, c);
        EXPECT_NEAR(tot, xt(c - 1), 1e-8 * std::max(1.0, xt(c - 1)));
      }
    }
    // month 1 stays at the base weights
    EXPECT_TRUE(r.totals.row(0).isApprox(direct_estimator(s, w).row(0)));
  }
}
