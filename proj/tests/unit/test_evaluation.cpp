#include <atomic>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <compest/error.hpp>
#include <compest/estimators.hpp>
#include <compest/evaluation.hpp>

#include "support.hpp"

using namespace compest;
using compest::testing::small_design;
using compest::testing::small_population;

TEST(Moments, ConstantEstimator) {
  Eigen::MatrixXd values = Eigen::MatrixXd::Constant(10, 3, 4.0);
  Eigen::VectorXd truth(3);
  truth << 1, 4, 6;
  const Moments m = exact_moments(values, truth);
  EXPECT_EQ(m.variance.norm(), 0.0);
  EXPECT_EQ(m.bias(0), 3.0);
  EXPECT_EQ(m.bias(2), -2.0);
  EXPECT_EQ(m.mse(0), 9.0);
}

TEST(Moments, MseDecomposition) {
  std::mt19937 gen(1);
  std::normal_distribution<double> nd(2.0, 3.0);
  Eigen::MatrixXd values(50, 4);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 50; ++i) values(i, j) = nd(gen);
  const Eigen::VectorXd truth = Eigen::VectorXd::LinSpaced(4, -1, 1);
  const Moments m = exact_moments(values, truth);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(m.mse(i), m.variance(i) + m.bias(i) * m.bias(i), 1e-10 * m.mse(i));
}

TEST(Moments, TargetSeries) {
  Eigen::MatrixXd t(3, 3);
  t << 3, 1, 0,
       1, 1, 0,
       4, 0, 2;
  const TargetSeries s = target_series(t);
  EXPECT_EQ(s.level.size(), 9);
  EXPECT_EQ(s.level(1), 1.0);
  EXPECT_EQ(s.level(3), 1.0);
  EXPECT_DOUBLE_EQ(s.rate(0), 0.25);
  EXPECT_DOUBLE_EQ(s.change(0), 0.25);
  EXPECT_DOUBLE_EQ(s.change(1), -0.5);
}

TEST(Enumeration, ParallelVisitsEveryDraw) {
  for (int threads : {1, 3}) {
    std::vector<std::atomic<int>> hits(50);
    parallel_for_draws(50, threads, [&](int r) { hits[static_cast<std::size_t>(r - 1)]++; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(Enumeration, FailureCarriesDraw) {
  for (int threads : {1, 2}) {
    try {
      parallel_for_draws(20, threads, [](int r) {
        if (r == 13) throw DomainError("boom");
      });
      FAIL() << "expected DrawError";
    } catch (const DrawError& e) {
      EXPECT_EQ(e.draw(), 13);
    }
  }
}

class SmallDesign : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    design_ = new RotationDesign(small_design());
    population_ = new Population(small_population(3));
    y_ = new Eigen::MatrixXd(mis_realizations(*population_, *design_, 2));
  }
  static void TearDownTestSuite() {
    delete design_;
    delete population_;
    delete y_;
  }
  static RotationDesign* design_;
  static Population* population_;
  static Eigen::MatrixXd* y_;
};
RotationDesign* SmallDesign::design_ = nullptr;
Population* SmallDesign::population_ = nullptr;
Eigen::MatrixXd* SmallDesign::y_ = nullptr;

TEST_F(SmallDesign, MisUnbiased) {
  const Eigen::MatrixXd truth = population_totals(*population_);
  const Eigen::RowVectorXd mean = y_->colwise().mean();
  const MisEstimates layout(design_->months);
  for (int m = 1; m <= design_->months; ++m)
    for (int g = 1; g <= 8; ++g)
      for (int e = 1; e <= 3; ++e) EXPECT_NEAR(mean(layout.index(m, g, e)), truth(m - 1, e - 1), 1e-10 * 1000);
}

TEST_F(SmallDesign, SigmaDiagonalIsMisVariance) {
  const Eigen::MatrixXd sigma = exact_sigma(*y_);
  EXPECT_LE((sigma - sigma.transpose()).cwiseAbs().maxCoeff(), 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8 * sigma.norm());
  const Eigen::VectorXd mean = y_->colwise().mean().transpose();
  const Moments m = exact_moments(*y_, mean);
  EXPECT_LE((sigma.diagonal() - m.variance).cwiseAbs().maxCoeff(), 1e-9 * m.variance.maxCoeff());
}

TEST_F(SmallDesign, SigmaIsReproducible) {
  const Eigen::MatrixXd again = mis_realizations(*population_, *design_, 1);
  EXPECT_EQ(again, *y_);
}

TEST_F(SmallDesign, ConstantCoordinateHasZeroVariance) {
  // sum over statuses of a mis estimate is 8 * n * weight on every draw
  const MisEstimates layout(design_->months);
  Eigen::VectorXd sums(y_->rows());
  for (Eigen::Index r = 0; r < y_->rows(); ++r)
    sums(r) = (*y_)(r, layout.index(3, 2, 1)) + (*y_)(r, layout.index(3, 2, 2)) + (*y_)(r, layout.index(3, 2, 3));
  EXPECT_EQ(sums.maxCoeff(), sums.minCoeff());
}

TEST_F(SmallDesign, LinearEstimatorMomentsMatchAlgebra) {
  const Eigen::MatrixXd w = ak_linear_weights(AkCoefficients::cps(), *design_).matrix();
  const Estimator ak = [](const PanelSample& s, const WeightSet& bw) { return ak_recursive(s, bw, AkCoefficients::cps()); };
  const auto est = enumerate_estimates(*population_, *design_, ak);
  Eigen::MatrixXd level(static_cast<Eigen::Index>(est.size()), 3 * design_->months);
  for (std::size_t r = 0; r < est.size(); ++r) level.row(static_cast<Eigen::Index>(r)) = flatten_totals(est[r]).transpose();
  const Eigen::VectorXd mean = level.colwise().mean().transpose();
  const Eigen::VectorXd algebra_mean = w * y_->colwise().mean().transpose();
  EXPECT_LE((mean - algebra_mean).cwiseAbs().maxCoeff(), 1e-8 * algebra_mean.cwiseAbs().maxCoeff());
  const Moments m = exact_moments(level, mean);
  const Eigen::VectorXd algebra_var = (w * exact_sigma(*y_) * w.transpose()).diagonal();
  EXPECT_LE((m.variance - algebra_var).cwiseAbs().maxCoeff(), 1e-8 * algebra_var.maxCoeff());
}

TEST_F(SmallDesign, DirectLinearizationGapIsSmall) {
  const Eigen::MatrixXd x = design_matrices(design_->months).x.matrix();
  const Eigen::MatrixXd w = x.transpose() / 8.0;
  const Eigen::MatrixXd truth = population_totals(*population_);
  const LinearizedVariance lin = linearized_variance(w, exact_sigma(*y_), truth);
  const Estimator direct = [](const PanelSample& s, const WeightSet& bw) { return direct_estimator(s, bw); };
  const MomentReport rep = exact_moments(*population_, *design_, direct);
  for (int m = 0; m < design_->months; ++m) {
    const double gap = std::abs(lin.level(m) - rep.rate.variance(m)) / rep.rate.variance(m);
    // small populations linearize poorly; this only guards against gross errors
    EXPECT_LT(gap, 0.5) << "month " << m + 1;
  }
}

TEST_F(SmallDesign, EstimatedSigmaSameMonthIsHouseholdCovariance) {
  const PanelSample s(*population_, *design_, SampleAssignment(*design_, 21));
  const StructuredSigma sig = estimate_sigma(s, *design_);
  const SampleAssignment a(*design_, 21);
  std::vector<Eigen::Vector3d> hh;
  const int m = 5;
  for (int h : a.month_households(m)) {
    Eigen::Vector3d t = Eigen::Vector3d::Zero();
    for (int k = population_->household_first(h); k < population_->household_first(h) + 5; ++k)
      t(population_->status(m, k) - 1) += 1;
    hh.push_back(t);
  }
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& v : hh) mean += v / static_cast<double>(hh.size());
  Eigen::Matrix3d want = Eigen::Matrix3d::Zero();
  for (const auto& v : hh) want += (v - mean) * (v - mean).transpose() / static_cast<double>(hh.size() - 1);
  EXPECT_LE((sig.household_covariance(m, m) - want).cwiseAbs().maxCoeff(), 1e-12);
  // no cluster is shared four to eight months apart
  EXPECT_EQ(sig.household_covariance(2, 7).norm(), 0.0);
  EXPECT_GT(sig.household_covariance(2, 3).norm(), 0.0);
  // group factors: cluster sampling for the same cluster, independent samples otherwise
  const double h = 200, n = 16;
  EXPECT_DOUBLE_EQ(sig.same_cluster(), h * h * (1 - n / h) / (n / 8));
  EXPECT_DOUBLE_EQ(sig.other_cluster(), -h);
  EXPECT_TRUE(sig.same_cluster(2, 4, 3, 3));
  EXPECT_FALSE(sig.same_cluster(2, 4, 3, 4));
}

TEST_F(SmallDesign, DenseStructuredSigmaLayout) {
  const PanelSample s(*population_, *design_, SampleAssignment(*design_, 2));
  const StructuredSigma sig = estimate_sigma(s, *design_);
  const Eigen::MatrixXd d = sig.dense();
  const MisEstimates layout(design_->months);
  EXPECT_LE((d - d.transpose()).cwiseAbs().maxCoeff(), 1e-9 * d.cwiseAbs().maxCoeff());
  EXPECT_DOUBLE_EQ(d(layout.index(4, 2, 1), layout.index(5, 1, 2)), sig.same_cluster() * sig.household_covariance(4, 5)(0, 1));
  EXPECT_DOUBLE_EQ(d(layout.index(4, 2, 1), layout.index(5, 2, 2)), sig.other_cluster() * sig.household_covariance(4, 5)(0, 1));
}

TEST_F(SmallDesign, EmpiricalBlueMatchesDenseBlue) {
  for (int r : {3, 64}) {
    const PanelSample s(*population_, *design_, SampleAssignment(*design_, r));
    const MisEstimates mis = mis_estimator(s, base_weights(*design_, s));
    const StructuredSigma sig = estimate_sigma(s, *design_);
    const Eigen::MatrixXd fast = empirical_blue(mis, sig);
    const Eigen::MatrixXd x = design_matrices(design_->months).x.matrix();
    const Eigen::VectorXd dense = blue_weights_dense(x, sig.dense()) * mis.vec();
    EXPECT_LE((flatten_totals(fast) - dense).cwiseAbs().maxCoeff(), 1e-6 * dense.cwiseAbs().maxCoeff()) << r;
  }
}

TEST(HouseholdCovariance, HandComputed) {
  std::vector<Eigen::Vector3d> a{{2, 1, 2}, {3, 0, 2}, {1, 1, 3}, {2, 0, 3}};
  std::vector<Eigen::Vector3d> b{{3, 0, 2}, {3, 1, 1}, {1, 0, 4}, {2, 1, 2}};
  // mean(a) = (2, 0.5, 2.5); centered a: (0,.5,-.5) (1,-.5,-.5) (-1,.5,.5) (0,-.5,.5)
  Eigen::Matrix3d want;
  want.row(0) = (Eigen::RowVector3d(3, 1, 1) - Eigen::RowVector3d(1, 0, 4)) / 3.0;
  want.row(1) = (0.5 * Eigen::RowVector3d(3, 0, 2) - 0.5 * Eigen::RowVector3d(3, 1, 1) + 0.5 * Eigen::RowVector3d(1, 0, 4) -
                 0.5 * Eigen::RowVector3d(2, 1, 2)) / 3.0;
  want.row(2) = (-0.5 * Eigen::RowVector3d(3, 0, 2) - 0.5 * Eigen::RowVector3d(3, 1, 1) + 0.5 * Eigen::RowVector3d(1, 0, 4) +
                 0.5 * Eigen::RowVector3d(2, 1, 2)) / 3.0;
  EXPECT_LE((household_cross_covariance(a, b) - want).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(household_cross_covariance(std::span(a).first(1), std::span(b).first(1)).norm(), 0.0);
  EXPECT_EQ(household_cross_covariance({}, {}).norm(), 0.0);
}

TEST(Gradient, AnalyticExample) {
  const Eigen::RowVector3d j = rate_gradient(Eigen::Vector3d(3, 1, 0));
  EXPECT_DOUBLE_EQ(j(0), -1.0 / 16.0);
  EXPECT_DOUBLE_EQ(j(1), 3.0 / 16.0);
  EXPECT_EQ(j(2), 0.0);
  EXPECT_THROW(rate_gradient(Eigen::Vector3d(0, 0, 5)), DomainError);
}

TEST(Gradient, CentralDifferences) {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(100.0, 10000.0);
  auto rate = [](const Eigen::Vector3d& x) { return x(1) / (x(0) + x(1)); };
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector3d x(u(gen), u(gen), u(gen));
    const Eigen::Vector3d xp(u(gen), u(gen), u(gen));
    const Eigen::RowVector3d j = rate_gradient(x);
    const Eigen::Matrix<double, 1, 6> j2 = change_gradient(x, xp);
    for (int i = 0; i < 3; ++i) {
      const double h = 1e-4 * x(i);
      Eigen::Vector3d up = x, dn = x;
      up(i) += h;
      dn(i) -= h;
      const double fd = (rate(up) - rate(dn)) / (2 * h);
      EXPECT_NEAR(j(i), fd, 1e-6 * std::max(std::abs(fd), 1e-12) + 1e-15);
      EXPECT_EQ(j2(i), j(i));
      Eigen::Vector3d up2 = xp, dn2 = xp;
      const double h2 = 1e-4 * xp(i);
      up2(i) += h2;
      dn2(i) -= h2;
      const double fd2 = -(rate(up2) - rate(dn2)) / (2 * h2);
      EXPECT_NEAR(j2(3 + i), fd2, 1e-6 * std::max(std::abs(fd2), 1e-12) + 1e-15);
    }
  }
}

TEST(Linearized, ZeroCovariance) {
  Eigen::MatrixXd at(4, 3);
  at << 90, 10, 50, 80, 20, 50, 85, 15, 50, 70, 30, 50;
  const LinearizedVariance v = linearized_variance(Eigen::MatrixXd::Zero(12, 12), at);
  EXPECT_EQ(v.level.norm(), 0.0);
  EXPECT_EQ(v.change.size(), 3);
  EXPECT_EQ(v.change.norm(), 0.0);
}

TEST(Linearized, QuadraticForms) {
  Eigen::MatrixXd at(2, 3);
  at << 90, 10, 50, 80, 20, 50;
  std::mt19937 gen(9);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd f(6, 6);
  for (int j = 0; j < 6; ++j)
    for (int i = 0; i < 6; ++i) f(i, j) = nd(gen);
  const Eigen::MatrixXd c = f * f.transpose();
  const LinearizedVariance v = linearized_variance(c, at);
  // totals flattened (m, e): index m + 2 e
  Eigen::RowVectorXd j1 = Eigen::RowVectorXd::Zero(6), j2 = Eigen::RowVectorXd::Zero(6);
  j1(0) = -10.0 / 10000;
  j1(2) = 90.0 / 10000;
  j2(1) = -20.0 / 10000;
  j2(3) = 80.0 / 10000;
  EXPECT_NEAR(v.level(0), (j1 * c * j1.transpose())(0, 0), 1e-15);
  EXPECT_NEAR(v.level(1), (j2 * c * j2.transpose())(0, 0), 1e-15);
  const Eigen::RowVectorXd d = j2 - j1;
  EXPECT_NEAR(v.change(0), (d * c * d.transpose())(0, 0), 1e-15);
  EXPECT_DOUBLE_EQ(v.compromise(), v.level_sum() + v.change_sum());
}

TEST(Oracle, DegeneratePopulationIsExact) {
  // every realization identical: any v with y.v = 1 reproduces the truth
  Eigen::RowVectorXd row = Eigen::RowVectorXd::LinSpaced(6, 1, 6);
  Eigen::MatrixXd y = row.replicate(10, 1);
  Eigen::VectorXd truth(2);
  truth << 5, 7;
  const OracleResult o = exact_linear_oracle(y, truth);
  EXPECT_TRUE(o.exact);
  EXPECT_EQ(o.rank, 1);
  const Eigen::MatrixXd est = y * o.weights.transpose();
  for (Eigen::Index r = 0; r < 10; ++r) EXPECT_LE((est.row(r).transpose() - truth).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Oracle, FullRowRankIsExact) {
  std::mt19937 gen(4);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd y(5, 9);
  for (int j = 0; j < 9; ++j)
    for (int i = 0; i < 5; ++i) y(i, j) = nd(gen);
  const OracleResult o = exact_linear_oracle(y, Eigen::VectorXd::Ones(3));
  EXPECT_TRUE(o.exact);
  EXPECT_EQ(o.rank, 5);
}

TEST(Oracle, InconsistentRowsAreNotExact) {
  Eigen::MatrixXd y(3, 4);
  y << 1, 2, 0, 1,
       2, 4, 0, 2,  // twice the first row
       0, 1, 1, 0;
  const OracleResult o = exact_linear_oracle(y, Eigen::VectorXd::Ones(2));
  EXPECT_FALSE(o.exact);
  EXPECT_EQ(o.rank, 2);
}

TEST(Quantile, TypeOne) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_EQ(type1_quantile(v, 0.0), 1.0);
  EXPECT_EQ(type1_quantile(v, 0.25), 1.0);
  EXPECT_EQ(type1_quantile(v, 0.5), 2.0);
  EXPECT_EQ(type1_quantile(v, 0.75), 3.0);
  EXPECT_EQ(type1_quantile(v, 1.0), 4.0);
  const std::vector<double> w{5, 6, 7, 8, 9};
  EXPECT_EQ(type1_quantile(w, 0.5), 7.0);
  EXPECT_EQ(type1_quantile(w, 0.25), 6.0);
}

TEST(RelativeMse, BaselineAgainstItself) {
  const Eigen::VectorXd mse = Eigen::VectorXd::LinSpaced(7, 1, 7);
  const RelativeMseSummary s = relative_mse_summary(mse, mse);
  for (double q : s.quantiles) EXPECT_EQ(q, 1.0);
  EXPECT_EQ(s.mean, 1.0);
  EXPECT_TRUE(s.excluded.empty());
}

TEST(RelativeMse, HandRatiosAndExclusion) {
  Eigen::VectorXd mse(5), base(5);
  mse << 2, 1, 9, 4, 3;
  base << 1, 2, 0, 4, 1;
  const RelativeMseSummary s = relative_mse_summary(mse, base);
  EXPECT_EQ(s.excluded, (std::vector<int>{3}));
  EXPECT_TRUE(std::isnan(s.ratios(2)));
  // ratios 2, 0.5, 1, 3
  EXPECT_EQ(s.quantiles[0], 0.5);
  EXPECT_EQ(s.quantiles[1], 0.5);
  EXPECT_EQ(s.quantiles[2], 1.0);
  EXPECT_EQ(s.quantiles[3], 2.0);
  EXPECT_EQ(s.quantiles[4], 3.0);
  EXPECT_DOUBLE_EQ(s.mean, 1.625);
  EXPECT_LE(s.quantiles[0], s.mean);
  EXPECT_LE(s.mean, s.quantiles[4]);
}
