#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <compest/error.hpp>
#include <compest/estimators.hpp>
#include <compest/optimize.hpp>

#include "support.hpp"

using namespace compest;
using compest::testing::small_design;
using compest::testing::small_population;

TEST(NelderMead, SeparableQuadratic) {
  const ObjectiveFn f = [](std::span<const double> x) {
    return std::pow(x[0] - 0.3, 2) + std::pow(x[1] - 0.7, 2) + 2 * std::pow(x[2] + 0.2, 2) + 0.5 * std::pow(x[3] - 1.1, 2);
  };
  const OptimizationResult r = nelder_mead(f, {0.0, 0.0, 0.0, 0.0});
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 0.3, 1e-6);
  EXPECT_NEAR(r.x[1], 0.7, 1e-6);
  EXPECT_NEAR(r.x[2], -0.2, 1e-6);
  EXPECT_NEAR(r.x[3], 1.1, 1e-6);
  EXPECT_EQ(r.value, f(r.x));
}

TEST(NelderMead, CorrelatedQuadratic) {
  Eigen::Matrix4d a;
  a << 4, 1, 0.5, 0, 1, 3, 0.2, 0.1, 0.5, 0.2, 2, 0.3, 0, 0.1, 0.3, 1;
  const Eigen::Vector4d c(-0.0704, -0.619, 0.25, 0.9);
  const ObjectiveFn f = [&](std::span<const double> x) {
    const Eigen::Vector4d d = Eigen::Map<const Eigen::Vector4d>(x.data()) - c;
    return d.dot(a * d) + 3.0;
  };
  const OptimizationResult r = nelder_mead(f, {0.3, 0.4, 0.4, 0.7});
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.x[static_cast<std::size_t>(i)], c(i), 1e-6);
  EXPECT_NEAR(r.value, 3.0, 1e-12);
}

TEST(NelderMead, BudgetExhaustionIsFlagged) {
  const ObjectiveFn f = [](std::span<const double> x) { return std::pow(1 - x[0], 2) + 100 * std::pow(x[1] - x[0] * x[0], 2); };
  NelderMeadOptions opt;
  opt.max_evaluations = 30;
  const OptimizationResult r = nelder_mead(f, {-1.2, 1.0}, opt);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.evaluations, 30 + 3);  // the last iteration may finish its shrink
  EXPECT_EQ(r.value, f(r.x));
}

TEST(NelderMead, Rosenbrock) {
  const ObjectiveFn f = [](std::span<const double> x) { return std::pow(1 - x[0], 2) + 100 * std::pow(x[1] - x[0] * x[0], 2); };
  NelderMeadOptions opt;
  opt.record_trace = true;
  const OptimizationResult r = nelder_mead(f, {-1.2, 1.0}, opt);
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x[1], 1.0, 1e-5);
  ASSERT_FALSE(r.trace.empty());
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i].value, r.trace[i - 1].value);
}

TEST(NelderMead, NanTreatedAsInfinite) {
  const ObjectiveFn f = [](std::span<const double> x) { return x[0] < -0.5 ? std::nan("") : (x[0] - 1) * (x[0] - 1); };
  const OptimizationResult r = nelder_mead(f, {-0.45});
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
}

TEST(ObjectiveKind, Names) {
  for (auto k : {ObjectiveKind::level, ObjectiveKind::change, ObjectiveKind::compromise})
    EXPECT_EQ(objective_kind(to_string(k)), k);
  EXPECT_THROW(objective_kind("median"), ConfigError);
}

TEST(AlphaGrid, TwentyOnePoints) {
  const auto g = alpha_grid();
  ASSERT_EQ(g.size(), 21u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_NEAR(g[7], 0.35, 1e-15);
}

class AkModel : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    design_ = new RotationDesign(small_design());
    population_ = new Population(small_population(3));
    sigma_ = new Eigen::MatrixXd(exact_sigma(*population_, *design_));
    truth_ = new Eigen::MatrixXd(population_totals(*population_));
  }
  static void TearDownTestSuite() {
    delete design_;
    delete population_;
    delete sigma_;
    delete truth_;
  }
  static RotationDesign* design_;
  static Population* population_;
  static Eigen::MatrixXd* sigma_;
  static Eigen::MatrixXd* truth_;
};
RotationDesign* AkModel::design_ = nullptr;
Population* AkModel::population_ = nullptr;
Eigen::MatrixXd* AkModel::sigma_ = nullptr;
Eigen::MatrixXd* AkModel::truth_ = nullptr;

TEST_F(AkModel, MatchesLinearWeightVariance) {
  const AkVarianceModel model(*sigma_, *truth_, *design_);
  std::mt19937 gen(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const std::array<double, 4> p{u(gen), u(gen), u(gen), u(gen)};
    const Eigen::MatrixXd w = ak_linear_weights(AkCoefficients::from_rate_parameters(p), *design_).matrix();
    const LinearizedVariance want = linearized_variance(w, *sigma_, *truth_);
    const LinearizedVariance got = model.evaluate(p);
    EXPECT_LE((got.level - want.level).cwiseAbs().maxCoeff(), 1e-9 * want.level.cwiseAbs().maxCoeff());
    EXPECT_LE((got.change - want.change).cwiseAbs().maxCoeff(), 1e-9 * want.change.cwiseAbs().maxCoeff());
  }
}

TEST_F(AkModel, StructuredAndDenseRoutesAgree) {
  const PanelSample s(*population_, *design_, SampleAssignment(*design_, 40));
  const StructuredSigma sig = estimate_sigma(s, *design_);
  const AkVarianceModel structured(sig, *truth_, *design_);
  const AkVarianceModel dense(sig.dense(), *truth_, *design_);
  const Eigen::MatrixXd& a = structured.block_covariance();
  const Eigen::MatrixXd& b = dense.block_covariance();
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-9 * b.cwiseAbs().maxCoeff());
  const std::array<double, 4> p{0.3, 0.4, 0.4, 0.7};
  EXPECT_NEAR(structured(ObjectiveKind::compromise, p), dense(ObjectiveKind::compromise, p),
              1e-9 * std::abs(dense(ObjectiveKind::compromise, p)));
}

TEST_F(AkModel, CompromiseIsSum) {
  const AkVarianceModel model(*sigma_, *truth_, *design_);
  for (const std::array<double, 4>& p : {std::array<double, 4>{0.3, 0.4, 0.4, 0.7}, std::array<double, 4>{-0.5, 0.9, 0.1, -0.2}}) {
    EXPECT_DOUBLE_EQ(model(ObjectiveKind::compromise, p), model(ObjectiveKind::level, p) + model(ObjectiveKind::change, p));
  }
}

TEST_F(AkModel, OptimumBeatsProductionAndGrids) {
  const AkVarianceModel model(*sigma_, *truth_, *design_);
  for (auto kind : {ObjectiveKind::level, ObjectiveKind::change, ObjectiveKind::compromise}) {
    const OptimizationResult best = optimal_ak(model, kind);
    EXPECT_LE(best.value, model(kind, kCpsRateParameters));
    EXPECT_NEAR(best.value, model(kind, best.x), 1e-10 * std::abs(best.value));
    const OptimizationResult census = census_grid_ak(model, kind);
    EXPECT_EQ(census.grid_values.size(), 10000u);
    EXPECT_GE(census.value, best.value);
    const OptimizationResult fine = grid_ak(model, kind, best.x, 0.02, 0.005);
    EXPECT_EQ(fine.grid_values.size(), 9u * 9 * 9 * 9);
    EXPECT_GE(fine.value, best.value - 1e-12 * std::abs(best.value));
    for (std::size_t d = 0; d < 4; ++d) EXPECT_LE(std::abs(fine.x[d] - best.x[d]), 0.005 + 1e-12);
  }
}

TEST_F(AkModel, ArgminInvariantToScaling) {
  const AkVarianceModel a(*sigma_, *truth_, *design_);
  const AkVarianceModel b(Eigen::MatrixXd(250.0 * *sigma_), *truth_, *design_);
  AkSearchOptions opt;
  opt.restarts = 0;
  const auto ra = optimal_ak(a, ObjectiveKind::level, opt);
  const auto rb = optimal_ak(b, ObjectiveKind::level, opt);
  for (std::size_t d = 0; d < 4; ++d) EXPECT_NEAR(ra.x[d], rb.x[d], 1e-5);
  EXPECT_NEAR(rb.value, 250.0 * ra.value, 1e-8 * rb.value);
}

TEST_F(AkModel, CensusGridFindsNearestPointOfSeparableModel) {
  // the exhaustive search must return the grid argmin of its own values
  const AkVarianceModel model(*sigma_, *truth_, *design_);
  const auto g = census_grid_ak(model, ObjectiveKind::change);
  const auto it = std::min_element(g.grid_values.begin(), g.grid_values.end());
  EXPECT_EQ(*it, g.value);
  EXPECT_EQ(g.grid_points[static_cast<std::size_t>(it - g.grid_values.begin())], g.x);
}

TEST_F(AkModel, EmpiricalBestWithExactSigmaIsBest) {
  AkSearchOptions opt;
  opt.restarts = 0;
  const AkVarianceModel model(*sigma_, *truth_, *design_);
  const auto best = optimal_ak(model, ObjectiveKind::compromise, opt);
  const AkCoefficients c = empirical_best_ak(*sigma_, *truth_, *design_, ObjectiveKind::compromise, opt);
  EXPECT_EQ(c.a[0], best.x[0]);
  EXPECT_EQ(c.k[0], best.x[1]);
  EXPECT_EQ(c.a[1], best.x[2]);
  EXPECT_EQ(c.k[1], best.x[3]);
}

TEST_F(AkModel, CorruptedSigmaDoesNotBeatBest) {
  AkSearchOptions opt;
  opt.restarts = 0;
  const AkVarianceModel model(*sigma_, *truth_, *design_);
  const auto best = optimal_ak(model, ObjectiveKind::level, opt);
  std::mt19937 gen(8);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd noise(sigma_->rows(), sigma_->cols());
  for (Eigen::Index j = 0; j < noise.cols(); ++j)
    for (Eigen::Index i = 0; i < noise.rows(); ++i) noise(i, j) = nd(gen);
  const Eigen::MatrixXd corrupted = *sigma_ + 0.3 * sigma_->cwiseAbs().maxCoeff() * (noise + noise.transpose()) / 2.0;
  const AkCoefficients c = empirical_best_ak(corrupted, *truth_, *design_, ObjectiveKind::level, opt);
  const std::array<double, 4> p{c.a[0], c.k[0], c.a[1], c.k[1]};
  EXPECT_GE(model(ObjectiveKind::level, p), best.value * (1 - 1e-9));
}

TEST_F(AkModel, AlphaSearchIsDeterministic) {
  const std::vector<double> alphas{0.0, 0.5, 1.0};
  const AlphaSearch a = rc_alpha_search(*population_, *design_, alphas);
  const AlphaSearch b = rc_alpha_search(*population_, *design_, alphas, nullptr, 2);
  ASSERT_EQ(a.level.size(), 3u);
  EXPECT_TRUE(a.excluded.empty());
  EXPECT_EQ(a.level, b.level);
  EXPECT_EQ(a.change, b.change);
  const OptimizationResult r = best_alpha(a, ObjectiveKind::level);
  EXPECT_EQ(r.value, *std::min_element(a.level.begin(), a.level.end()));
  EXPECT_EQ(r.grid_values.size(), 3u);
}

TEST_F(AkModel, AlphaSearchOnTimeConstantPopulation) {
  // statuses frozen in time: the first month repeated
  const int n = population_->individuals();
  std::vector<std::uint8_t> st;
  for (int m = 1; m <= design_->months; ++m) {
    const auto s = population_->month_statuses(1);
    st.insert(st.end(), s.begin(), s.end());
  }
  const Population flat(design_->months, n, 5, st,
                        std::vector<std::uint8_t>(population_->covariates().begin(), population_->covariates().end()));
  const auto grid = alpha_grid(0.25);
  const AlphaSearch a = rc_alpha_search(flat, *design_, grid);
  const AlphaSearch b = rc_alpha_search(flat, *design_, grid);
  EXPECT_EQ(best_alpha(a, ObjectiveKind::level).x, best_alpha(b, ObjectiveKind::level).x);
}
