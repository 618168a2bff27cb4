#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "compest/calibration.hpp"
#include "compest/error.hpp"
#include "compest/optimize.hpp"
#include "compest/regression_composite.hpp"
#include "compest/rng.hpp"

namespace compest {

const char* to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::level: return "level";
    case ObjectiveKind::change: return "change";
    default: return "compromise";
  }
}

ObjectiveKind objective_kind(const std::string& name) {
  if (name == "level") return ObjectiveKind::level;
  if (name == "change") return ObjectiveKind::change;
  if (name == "compromise") return ObjectiveKind::compromise;
  throw ConfigError("unknown objective '" + name + "'");
}

OptimizationResult optimal_ak(const AkVarianceModel& model, ObjectiveKind kind, const AkSearchOptions& options) {
  const ObjectiveFn f = [&](std::span<const double> p) { return model(kind, p); };
  Rng rng(options.seed, streams::kOptimizerRestarts);
  OptimizationResult best;
  best.value = std::numeric_limits<double>::infinity();
  long evaluations = 0;
  std::vector<TracePoint> trace;
  for (int run = 0; run <= options.restarts; ++run) {
    std::vector<double> start(kCpsRateParameters.begin(), kCpsRateParameters.end());
    if (run > 0) {
      for (double& v : start) v = 2.0 * rng.uniform() - 1.0;
    }
    OptimizationResult r = nelder_mead(f, start, options.nelder_mead);
    evaluations += r.evaluations;
    for (TracePoint& t : r.trace) {
      t.run = run;
      trace.push_back(std::move(t));
    }
    if (r.value < best.value || run == 0) {
      best.x = r.x;
      best.value = r.value;
      best.converged = r.converged;
    }
  }
  best.evaluations = evaluations;
  best.trace = std::move(trace);
  return best;
}

namespace {

OptimizationResult box_search(const AkVarianceModel& model, ObjectiveKind kind, const std::vector<std::vector<double>>& axes) {
  OptimizationResult out;
  out.value = std::numeric_limits<double>::infinity();
  std::array<std::size_t, 4> idx{};
  std::array<double, 4> p{};
  for (;;) {
    for (std::size_t d = 0; d < 4; ++d) p[d] = axes[d][idx[d]];
    double v = model(kind, p);
    if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
    out.grid_points.emplace_back(p.begin(), p.end());
    out.grid_values.push_back(v);
    if (v < out.value) {
      out.value = v;
      out.x.assign(p.begin(), p.end());
    }
    std::size_t d = 0;
    while (d < 4 && ++idx[d] == axes[d].size()) idx[d++] = 0;
    if (d == 4) break;
  }
  out.evaluations = static_cast<long>(out.grid_values.size());
  out.converged = true;
  return out;
}

}  // namespace

OptimizationResult census_grid_ak(const AkVarianceModel& model, ObjectiveKind kind) {
  std::vector<double> axis;
  for (int i = 1; i <= 10; ++i) axis.push_back(i / 10.0);
  return box_search(model, kind, std::vector<std::vector<double>>(4, axis));
}

OptimizationResult grid_ak(const AkVarianceModel& model, ObjectiveKind kind, std::span<const double> center,
                           double half_width, double step) {
  if (center.size() != 4) throw ShapeError("grid center must have 4 coordinates");
  if (!(step > 0.0) || half_width < 0.0) throw DomainError("grid step must be positive");
  const int half = static_cast<int>(std::llround(half_width / step));
  std::vector<std::vector<double>> axes(4);
  for (std::size_t d = 0; d < 4; ++d) {
    for (int i = -half; i <= half; ++i) axes[d].push_back(center[d] + i * step);
  }
  return box_search(model, kind, axes);
}

std::vector<double> alpha_grid(double step) {
  if (!(step > 0.0) || step > 1.0) throw DomainError("alpha step must lie in (0, 1]");
  const int n = static_cast<int>(std::llround(1.0 / step));
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) out.push_back(std::min(1.0, i * step));
  return out;
}

double objective_value(const MomentReport& report, ObjectiveKind kind) {
  const double level = report.rate.mse.sum();
  const double change = report.change.mse.sum();
  switch (kind) {
    case ObjectiveKind::level: return level;
    case ObjectiveKind::change: return change;
    default: return level + change;
  }
}

AlphaSearch rc_alpha_search(const Population& population, const RotationDesign& design, std::span<const double> alphas,
                            const MeasurementError* error, int threads) {
  const std::size_t na = alphas.size();
  const int draws = design.draws();
  const Eigen::VectorXd cov = covariate_totals(population);
  const Eigen::MatrixXd x_targets = cov.transpose().replicate(design.months, 1);

  std::vector<std::vector<Eigen::MatrixXd>> totals(na, std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(draws)));
  // first failing draw per alpha, 0 when none
  std::vector<int> failed(na, 0);
  std::vector<std::string> reasons(na);
  std::mutex mu;
  parallel_for_draws(draws, threads, [&](int r) {
    PanelSample sample(population, design, SampleAssignment(design, r));
    if (error) inject_measurement_error(sample, *error);
    const std::vector<RcMonth> input = rc_input(sample, base_weights(design, sample));
    for (std::size_t i = 0; i < na; ++i) {
      try {
        totals[i][static_cast<std::size_t>(r - 1)] = regression_composite(alphas[i], input, x_targets).totals;
      } catch (const CalibrationError& e) {
        std::lock_guard lock(mu);
        if (failed[i] == 0 || r < failed[i]) {
          failed[i] = r;
          reasons[i] = "draw " + std::to_string(r) + ": " + e.what();
        }
      }
    }
  });

  const Eigen::MatrixXd truth = population_totals(population).topRows(design.months);
  AlphaSearch out;
  out.alphas.assign(alphas.begin(), alphas.end());
  for (std::size_t i = 0; i < na; ++i) {
    if (failed[i] != 0) {
      out.reports.emplace_back();
      out.level.push_back(std::numeric_limits<double>::quiet_NaN());
      out.change.push_back(std::numeric_limits<double>::quiet_NaN());
      out.excluded.push_back(static_cast<int>(i));
      out.exclusion_reasons.push_back(reasons[i]);
      continue;
    }
    out.reports.push_back(exact_moments(totals[i], truth));
    out.level.push_back(objective_value(out.reports.back(), ObjectiveKind::level));
    out.change.push_back(objective_value(out.reports.back(), ObjectiveKind::change));
  }
  return out;
}

OptimizationResult best_alpha(const AlphaSearch& search, ObjectiveKind kind) {
  OptimizationResult out;
  out.value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < search.alphas.size(); ++i) {
    if (std::find(search.excluded.begin(), search.excluded.end(), static_cast<int>(i)) != search.excluded.end()) continue;
    const double v = objective_value(search.reports[i], kind);
    out.grid_points.push_back({search.alphas[i]});
    out.grid_values.push_back(v);
    if (v < out.value) {
      out.value = v;
      out.x = {search.alphas[i]};
    }
  }
  out.evaluations = static_cast<long>(out.grid_values.size());
  out.converged = !out.x.empty();
  return out;
}

namespace {

AkCoefficients search_coefficients(const AkVarianceModel& model, ObjectiveKind kind, const AkSearchOptions& options) {
  const OptimizationResult r = optimal_ak(model, kind, options);
  return AkCoefficients::from_rate_parameters(std::span<const double, 4>(r.x.data(), 4));
}

}  // namespace

AkCoefficients empirical_best_ak(const StructuredSigma& sigma_hat, const Eigen::MatrixXd& at,
                                 const RotationDesign& design, ObjectiveKind kind, const AkSearchOptions& options) {
  return search_coefficients(AkVarianceModel(sigma_hat, at, design), kind, options);
}

AkCoefficients empirical_best_ak(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& at,
                                 const RotationDesign& design, ObjectiveKind kind, const AkSearchOptions& options) {
  return search_coefficients(AkVarianceModel(sigma, at, design), kind, options);
}

Estimator empirical_best(EmpiricalVariant variant, const RotationDesign& design, ObjectiveKind kind) {
  if (variant == EmpiricalVariant::blue) {
    return [design](const PanelSample& sample, const WeightSet& weights) {
      return empirical_blue(mis_estimator(sample, weights), estimate_sigma(sample, design));
    };
  }
  return [design, kind](const PanelSample& sample, const WeightSet& weights) {
    const Eigen::MatrixXd at = direct_estimator(sample, weights);
    AkSearchOptions options;
    options.restarts = 0;
    const AkCoefficients c = empirical_best_ak(estimate_sigma(sample, design), at, design, kind, options);
    return ak_recursive(sample, weights, c);
  };
}

}  // namespace compest
