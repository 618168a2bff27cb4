#include "compest_tools/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include <compest/calibration.hpp>
#include <compest/csv.hpp>
#include <compest/design.hpp>
#include <compest/error.hpp>
#include <compest/estimators.hpp>
#include <compest/measurement_error.hpp>
#include <compest/regression_composite.hpp>
#include <compest/sample.hpp>

namespace compest::tools {

namespace fs = std::filesystem;

const EstimatorResult* SettingResult::find(const std::string& estimator) const {
  for (const auto& e : estimators) {
    if (e.name == estimator) return &e;
  }
  return nullptr;
}

RotationDesign experiment_design(const ExperimentConfig& config) {
  RotationDesign d;
  d.months = config.months;
  d.validate();
  return d;
}

RateTargets experiment_targets(const ExperimentConfig& config) {
  const RateTargets all = config.rate_targets.empty() ? default_rate_targets() : read_rate_targets(config.rate_targets);
  return truncate(all, config.months);
}

Population experiment_population(const ExperimentConfig& config, int variant) {
  PopulationSpec spec;
  spec.variant = variant;
  spec.targets = experiment_targets(config);
  spec.seed = config.seed;
  return generate_population(spec);
}

namespace {

bool wants(const ExperimentConfig& c, const std::string& name) {
  return std::find(c.estimators.begin(), c.estimators.end(), name) != c.estimators.end();
}

std::string kind_name(ObjectiveKind k) { return to_string(k); }

class Stopwatch {
 public:
  explicit Stopwatch(const Logger& log) : log_(log), start_(std::chrono::steady_clock::now()) {}
  void note(const std::string& what) const {
    if (!log_) return;
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(1);
    os << "[" << s << " s] " << what;
    log_(os.str());
  }

 private:
  const Logger& log_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<Eigen::MatrixXd> linear_estimates(const Eigen::MatrixXd& realizations, const Eigen::MatrixXd& weights,
                                              int months) {
  const Eigen::MatrixXd e = realizations * weights.transpose();
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(e.rows()));
  for (Eigen::Index r = 0; r < e.rows(); ++r) out.push_back(as_totals(e.row(r).transpose(), months));
  return out;
}

EstimatorResult moments_of(std::string name, const std::vector<Eigen::MatrixXd>& values, const Eigen::MatrixXd& truth,
                           int audit_draw) {
  EstimatorResult out{std::move(name), {}, values[static_cast<std::size_t>(audit_draw - 1)], 0};
  for (const auto& v : values) {
    if (((v.col(0) + v.col(1)).array() <= 0.0).any()) ++out.undefined_draws;
  }
  if (out.undefined_draws == 0) {
    out.report = exact_moments(values, truth);
    return out;
  }
  const TargetSeries t = target_series(truth);
  Eigen::MatrixXd level(static_cast<Eigen::Index>(values.size()), t.level.size());
  for (std::size_t r = 0; r < values.size(); ++r) level.row(static_cast<Eigen::Index>(r)) = flatten_totals(values[r]).transpose();
  out.report.level = exact_moments(level, t.level);
  auto undefined = [](Eigen::Index n) {
    const Eigen::VectorXd nan = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
    return Moments{nan, nan, nan, nan};
  };
  out.report.rate = undefined(t.rate.size());
  out.report.change = undefined(t.change.size());
  return out;
}

struct LinearEstimator {
  std::string name;
  Eigen::MatrixXd weights;
};

void evaluate_linear(SettingResult& setting, const std::vector<LinearEstimator>& estimators,
                     const Eigen::MatrixXd& realizations, const Eigen::MatrixXd& truth, int audit_draw, int months) {
  for (const auto& est : estimators) {
    setting.estimators.push_back(moments_of(est.name, linear_estimates(realizations, est.weights, months), truth, audit_draw));
  }
}

// Mean of the structured covariance estimate over all draws, accumulated in draw order.
StructuredSigma mean_sigma_hat(const Population& pop, const RotationDesign& design, int threads) {
  const auto m = static_cast<std::size_t>(design.months);
  std::vector<Eigen::Matrix3d> sum(m * m, Eigen::Matrix3d::Zero());
  double same = 0.0;
  double other = 0.0;
  const int batch = 50;
  for (int first = 1; first <= design.draws(); first += batch) {
    const int count = std::min(batch, design.draws() - first + 1);
    std::vector<std::optional<StructuredSigma>> part(static_cast<std::size_t>(count));
    parallel_for_draws(count, threads, [&](int i) {
      const int r = first + i - 1;
      const PanelSample sample(pop, design, SampleAssignment(design, r));
      part[static_cast<std::size_t>(i - 1)] = estimate_sigma(sample, design);
    });
    for (const auto& s : part) {
      same = s->same_cluster();
      other = s->other_cluster();
      for (int a = 1; a <= design.months; ++a) {
        for (int b = 1; b <= design.months; ++b) {
          sum[static_cast<std::size_t>(a - 1) * m + static_cast<std::size_t>(b - 1)] += s->household_covariance(a, b);
        }
      }
    }
  }
  for (auto& s : sum) s /= design.draws();
  return StructuredSigma(design.months, design.lag, same, other, std::move(sum));
}

}  // namespace

PopulationResult analyse_population(const ExperimentConfig& config, int variant, const Plan& plan,
                                    const Logger& log) {
  const Stopwatch clock(log);
  const std::string tag = "population " + std::to_string(variant) + ": ";
  const RotationDesign design = experiment_design(config);
  const int months = design.months;
  const int threads = config.parallel;
  const int audit = config.audit_draws.empty() ? 1 : config.audit_draws.front();

  PopulationResult out;
  out.variant = variant;
  out.population = experiment_population(config, variant);
  out.truth = population_totals(out.population);
  clock.note(tag + "generated");

  const Eigen::MatrixXd y = mis_realizations(out.population, design, threads);
  clock.note(tag + "month-in-sample realizations");

  const Eigen::MatrixXd sigma = config.sigma_source == "exact"
                                    ? exact_sigma(y)
                                    : mean_sigma_hat(out.population, design, threads).dense();
  clock.note(tag + "covariance (" + config.sigma_source + ")");

  if (plan.oracle) {
    const OracleResult o = exact_linear_oracle(y, flatten_totals(out.truth));
    out.oracle = {o.rank, o.exact, o.residual};
    clock.note(tag + "exactness oracle, rank " + std::to_string(o.rank));
  }

  // AK coefficient optima under the linearized rate variance.
  const AkVarianceModel model(sigma, out.truth, design);
  AkSearchOptions search;
  search.restarts = config.optimizer_restarts;
  search.seed = config.seed;
  search.nelder_mead.tolerance = config.optimizer_tolerance;
  search.nelder_mead.max_evaluations = config.optimizer_max_evaluations;
  search.nelder_mead.record_trace = true;
  for (ObjectiveKind kind : kObjectives) {
    AkOptimum opt{kind, optimal_ak(model, kind, search), {}};
    opt.census = census_grid_ak(model, kind);
    out.ak.push_back(std::move(opt));
  }
  clock.note(tag + "AK optima");

  // Regression composite over the alpha grid, by enumeration.
  const bool rc = wants(config, "rc");
  if (rc) {
    out.alphas = rc_alpha_search(out.population, design, alpha_grid(config.alpha_step), nullptr, threads);
    for (ObjectiveKind kind : kObjectives) out.alpha_best.push_back(best_alpha(out.alphas, kind));
    clock.note(tag + "regression composite alpha grid");
  }
  if (!plan.evaluate) return out;

  auto ak_weights = [&](const AkCoefficients& c) { return ak_linear_weights(c, design).matrix(); };
  auto rate_coefficients = [](const std::vector<double>& x) {
    return AkCoefficients::from_rate_parameters(std::span<const double, 4>(x.data(), 4));
  };

  std::vector<LinearEstimator> linear;
  linear.push_back({"direct", ak_weights(AkCoefficients{})});
  if (wants(config, "ak_cps")) {
    linear.push_back({"ak_cps", ak_weights(AkCoefficients::from_rate_parameters(config.ak_parameters))});
  }
  if (wants(config, "best_ak")) {
    for (const auto& opt : out.ak) {
      linear.push_back({"best_ak_" + kind_name(opt.kind), ak_weights(rate_coefficients(opt.nelder_mead.x))});
    }
  }
  if (wants(config, "census_ak")) {
    for (const auto& opt : out.ak) {
      linear.push_back({"census_ak_" + kind_name(opt.kind), ak_weights(rate_coefficients(opt.census.x))});
    }
  }
  if (wants(config, "blue")) {
    linear.push_back({"blue", blue_weights(months, sigma)});
    clock.note(tag + "BLUE weights");
  }
  if (wants(config, "blue_bailar")) {
    linear.push_back({"blue_bailar", blue_bailar_weights(months, sigma)});
    clock.note(tag + "Bailar BLUE weights");
  }

  out.clean.name = "no_error";
  evaluate_linear(out.clean, linear, y, out.truth, audit, months);

  const Eigen::VectorXd x_targets = covariate_totals(out.population);
  const PanelSample audit_sample(out.population, design, SampleAssignment(design, audit));
  const WeightSet audit_weights = base_weights(design, audit_sample);

  // Alphas carried into the error setting: the no-error optima plus the arbitrary choice.
  std::vector<double> error_alphas;
  if (rc) {
    auto add_rc = [&](const std::string& name, std::size_t i) {
      const double alpha = out.alphas.alphas[i];
      out.clean.estimators.push_back(
          {name, out.alphas.reports[i], regression_composite(alpha, audit_sample, audit_weights, x_targets).totals, 0});
      if (std::find(error_alphas.begin(), error_alphas.end(), alpha) == error_alphas.end()) error_alphas.push_back(alpha);
    };
    for (std::size_t k = 0; k < kObjectives.size(); ++k) {
      const auto& best = out.alpha_best[k];
      if (best.x.empty()) continue;
      const auto it = std::find(out.alphas.alphas.begin(), out.alphas.alphas.end(), best.x.front());
      add_rc("rc_best_" + kind_name(kObjectives[k]), static_cast<std::size_t>(it - out.alphas.alphas.begin()));
    }
    for (std::size_t i = 0; i < out.alphas.alphas.size(); ++i) {
      const bool excluded = std::find(out.alphas.excluded.begin(), out.alphas.excluded.end(), static_cast<int>(i)) !=
                            out.alphas.excluded.end();
      if (!excluded && std::abs(out.alphas.alphas[i] - kArbitraryAlpha) < 1e-9) add_rc("rc_arbitrary", i);
    }
  }

  auto add_enumerated = [&](const std::string& name, const Estimator& est) {
    out.clean.estimators.push_back(moments_of(name, enumerate_estimates(out.population, design, est, threads), out.truth, audit));
    const int undefined = out.clean.estimators.back().undefined_draws;
    clock.note(tag + name + (undefined ? ", rate undefined in " + std::to_string(undefined) + " draws" : ""));
  };
  if (wants(config, "emp_ak")) add_enumerated("emp_ak", empirical_best(EmpiricalVariant::ak, design));
  if (wants(config, "emp_blue")) add_enumerated("emp_blue", empirical_best(EmpiricalVariant::blue, design));

  // Measurement error: estimators tuned without error, applied to contaminated samples.
  if (config.measurement_error) {
    const MeasurementError error = config.error;
    const SampleTransform contaminate = [error](PanelSample& s) { inject_measurement_error(s, error); };
    const Eigen::MatrixXd y_error = mis_realizations(out.population, design, threads, contaminate);
    out.error.name = "error";
    evaluate_linear(out.error, linear, y_error, out.truth, audit, months);

    if (rc && !error_alphas.empty()) {
      const AlphaSearch search = rc_alpha_search(out.population, design, error_alphas, &error, threads);
      PanelSample contaminated = audit_sample;
      inject_measurement_error(contaminated, error);
      auto add_rc = [&](const std::string& name, double alpha) {
        const auto i = static_cast<std::size_t>(
            std::find(search.alphas.begin(), search.alphas.end(), alpha) - search.alphas.begin());
        if (std::find(search.excluded.begin(), search.excluded.end(), static_cast<int>(i)) != search.excluded.end()) {
          return;
        }
        out.error.estimators.push_back(
            {name, search.reports[i], regression_composite(alpha, contaminated, audit_weights, x_targets).totals, 0});
      };
      for (std::size_t k = 0; k < kObjectives.size(); ++k) {
        if (!out.alpha_best[k].x.empty()) add_rc("rc_best_" + kind_name(kObjectives[k]), out.alpha_best[k].x.front());
      }
      if (out.clean.find("rc_arbitrary")) add_rc("rc_arbitrary", kArbitraryAlpha);
    }
    clock.note(tag + "measurement-error setting");
  }
  return out;
}

// ---------------------------------------------------------------- writers

void write_population_summary(const fs::path& path, const std::vector<Population>& populations,
                              const RateTargets& targets) {
  CsvWriter csv(path, {"population", "month", "employed", "unemployed", "not_in_labor_force", "unemployment_rate",
                       "target_unemployment_rate", "labor_force_rate", "target_labor_force_rate", "movers"});
  for (const auto& p : populations) {
    const Eigen::MatrixXd t = population_totals(p);
    for (int m = 1; m <= p.months(); ++m) {
      const auto i = static_cast<Eigen::Index>(m - 1);
      const double lf = (t(i, 0) + t(i, 1)) / p.individuals();
      csv.row({p.variant(), m, static_cast<long long>(t(i, 0)), static_cast<long long>(t(i, 1)),
               static_cast<long long>(t(i, 2)), unemployment_rate(t(i, 0), t(i, 1)),
               targets.unemployment_rate[static_cast<std::size_t>(m - 1)], lf,
               targets.labor_force_rate[static_cast<std::size_t>(m - 1)], m == 1 ? 0LL : movers(p, m)});
    }
  }
}

void write_design_audit(const fs::path& dir, const RotationDesign& design, std::span<const int> audit_draws) {
  write_rotation_chart(dir / "rotation_chart.csv", design, audit_draws);

  const auto h = static_cast<std::size_t>(design.households);
  std::vector<int> inclusion(static_cast<std::size_t>(design.months) * h, 0);
  long long consecutive_min = std::numeric_limits<long long>::max(), consecutive_max = 0;
  long long lag_min = std::numeric_limits<long long>::max(), lag_max = 0;
  auto overlap = [&](const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    return static_cast<long long>(common.size()) * design.household_size;
  };
  for (int r = 1; r <= design.draws(); ++r) {
    const SampleAssignment a(design, r);
    std::vector<std::vector<int>> month(static_cast<std::size_t>(design.months));
    for (int m = 1; m <= design.months; ++m) {
      auto& hh = month[static_cast<std::size_t>(m - 1)];
      hh = a.month_households(m);
      std::sort(hh.begin(), hh.end());
      for (int i : hh) ++inclusion[static_cast<std::size_t>(m - 1) * h + static_cast<std::size_t>(i - 1)];
      if (m >= 2) {
        const long long o = overlap(hh, month[static_cast<std::size_t>(m - 2)]);
        consecutive_min = std::min(consecutive_min, o);
        consecutive_max = std::max(consecutive_max, o);
      }
      if (m >= 13) {
        const long long o = overlap(hh, month[static_cast<std::size_t>(m - 13)]);
        lag_min = std::min(lag_min, o);
        lag_max = std::max(lag_max, o);
      }
    }
  }
  const auto [lo, hi] = std::minmax_element(inclusion.begin(), inclusion.end());
  const long long groups_continuing = rotation_roles(design).continuing_count();
  CsvWriter csv(dir / "design_audit.csv", {"check", "min", "max", "expected"});
  csv.row({"inclusion_count_per_individual_month", *lo, *hi, design.draws() * kGroups * design.group_households /
                                                                 design.households});
  if (design.months >= 2) {
    csv.row({"overlap_consecutive_months", consecutive_min, consecutive_max,
             groups_continuing * design.group_individuals()});
  }
  if (design.months >= 13) csv.row({"overlap_lag_12", lag_min, lag_max, 4LL * design.group_individuals()});
}

namespace {

void write_relative_mse(const fs::path& path, const std::vector<PopulationResult>& results) {
  CsvWriter csv(path, {"setting", "target", "population", "estimator", "q0", "q25", "q50", "q75", "q100", "mean",
                       "excluded_months"});
  for (const auto* setting_name : {"no_error", "error"}) {
    for (const auto* target : {"rate", "change"}) {
      for (const auto& res : results) {
        const SettingResult& s = std::string(setting_name) == "no_error" ? res.clean : res.error;
        const EstimatorResult* base = s.find("direct");
        if (!base) continue;
        const bool rate = std::string(target) == "rate";
        for (const auto& e : s.estimators) {
          if (e.undefined_draws > 0) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            csv.row({setting_name, target, res.variant, e.name, nan, nan, nan, nan, nan, nan,
                     "rate undefined in " + std::to_string(e.undefined_draws) + " draws"});
            continue;
          }
          const RelativeMseSummary sum = relative_mse_summary(rate ? e.report.rate.mse : e.report.change.mse,
                                                              rate ? base->report.rate.mse : base->report.change.mse);
          std::string excluded;
          for (int m : sum.excluded) excluded += (excluded.empty() ? "" : ";") + std::to_string(rate ? m : m + 1);
          csv.row({setting_name, target, res.variant, e.name, sum.quantiles[0], sum.quantiles[1], sum.quantiles[2],
                   sum.quantiles[3], sum.quantiles[4], sum.mean, excluded});
        }
      }
    }
  }
}

void write_relative_mse_series(const fs::path& path, const std::vector<PopulationResult>& results) {
  CsvWriter csv(path, {"setting", "target", "population", "estimator", "month", "relative_mse"});
  for (const auto& res : results) {
    for (const SettingResult* s : {&res.clean, &res.error}) {
      const EstimatorResult* base = s->find("direct");
      if (!base) continue;
      for (const auto& e : s->estimators) {
        if (e.undefined_draws > 0) continue;
        const RelativeMseSummary rate = relative_mse_summary(e.report.rate.mse, base->report.rate.mse);
        const RelativeMseSummary change = relative_mse_summary(e.report.change.mse, base->report.change.mse);
        for (Eigen::Index i = 0; i < rate.ratios.size(); ++i) {
          csv.row({s->name, "rate", res.variant, e.name, static_cast<int>(i + 1), rate.ratios(i)});
        }
        for (Eigen::Index i = 0; i < change.ratios.size(); ++i) {
          csv.row({s->name, "change", res.variant, e.name, static_cast<int>(i + 2), change.ratios(i)});
        }
      }
    }
  }
}

void write_differences(const fs::path& path, const std::vector<PopulationResult>& results) {
  CsvWriter csv(path, {"setting", "population", "estimator", "month", "rate", "direct_rate", "difference"});
  for (const auto& res : results) {
    for (const SettingResult* s : {&res.clean, &res.error}) {
      const EstimatorResult* base = s->find("direct");
      if (!base) continue;
      const std::vector<double> direct = unemployment_rate(base->audit_totals);
      for (const auto& e : s->estimators) {
        if (e.name == "direct" || ((e.audit_totals.col(0) + e.audit_totals.col(1)).array() <= 0.0).any()) continue;
        const std::vector<double> rate = unemployment_rate(e.audit_totals);
        for (std::size_t m = 0; m < rate.size(); ++m) {
          csv.row({s->name, res.variant, e.name, static_cast<int>(m + 1), rate[m], direct[m], rate[m] - direct[m]});
        }
      }
    }
  }
}

}  // namespace

void write_evaluation(const fs::path& dir, const std::vector<PopulationResult>& results) {
  for (const auto& res : results) {
    for (const SettingResult* s : {&res.clean, &res.error}) {
      if (s->estimators.empty()) continue;
      std::vector<NamedReport> reports;
      for (const auto& e : s->estimators) reports.push_back({e.name, e.report});
      write_moments(dir / ("moments_pop" + std::to_string(res.variant) + "_" + s->name + ".csv"), reports);
    }
  }
  write_relative_mse(dir / "relative_mse.csv", results);
  write_relative_mse_series(dir / "relative_mse_series.csv", results);
  write_differences(dir / "differences.csv", results);

  CsvWriter oracle(dir / "blue_oracle.csv", {"population", "rank", "exact", "max_residual"});
  for (const auto& res : results) {
    oracle.row({res.variant, res.oracle.rank, res.oracle.exact ? "true" : "false", res.oracle.residual});
  }
}

void write_optimization(const fs::path& dir, const std::vector<PopulationResult>& results) {
  CsvWriter ak(dir / "ak_optima.csv", {"population", "method", "objective", "a_employed", "k_employed",
                                       "a_unemployed", "k_unemployed", "value", "evaluations", "converged"});
  for (const auto& res : results) {
    for (const auto& opt : res.ak) {
      for (const auto& [method, r] : {std::pair<const char*, const OptimizationResult*>{"nelder_mead", &opt.nelder_mead},
                                      {"census_grid", &opt.census}}) {
        if (r->x.size() != 4) continue;
        ak.row({res.variant, method, to_string(opt.kind), r->x[0], r->x[1], r->x[2], r->x[3], r->value, r->evaluations,
                r->converged ? "true" : "false"});
      }
    }
  }

  fs::create_directories(dir / "traces");
  for (const auto& res : results) {
    for (const auto& opt : res.ak) {
      write_trace(dir / "traces" / ("ak_pop" + std::to_string(res.variant) + "_" + to_string(opt.kind) + ".csv"),
                  opt.nelder_mead.trace);
    }
  }

  CsvWriter grid(dir / "rc_alpha.csv", {"population", "alpha", "level", "change", "compromise", "status", "reason"});
  CsvWriter best(dir / "best_alpha.csv", {"population", "objective", "alpha", "value"});
  for (const auto& res : results) {
    const AlphaSearch& s = res.alphas;
    for (std::size_t i = 0; i < s.alphas.size(); ++i) {
      const auto ex = std::find(s.excluded.begin(), s.excluded.end(), static_cast<int>(i));
      if (ex != s.excluded.end()) {
        grid.row({res.variant, s.alphas[i], s.level[i], s.change[i], s.level[i], "excluded",
                  s.exclusion_reasons[static_cast<std::size_t>(ex - s.excluded.begin())]});
      } else {
        grid.row({res.variant, s.alphas[i], s.level[i], s.change[i], s.level[i] + s.change[i], "ok", ""});
      }
    }
    for (std::size_t k = 0; k < res.alpha_best.size(); ++k) {
      const auto& b = res.alpha_best[k];
      if (b.x.empty()) {
        best.row({res.variant, to_string(kObjectives[k]), std::numeric_limits<double>::quiet_NaN(),
                  std::numeric_limits<double>::quiet_NaN()});
      } else {
        best.row({res.variant, to_string(kObjectives[k]), b.x.front(), b.value});
      }
    }
  }
}

void write_weights_audit_file(const fs::path& dir, const ExperimentConfig& config, const PopulationResult& result) {
  if (result.alpha_best.empty() || result.alpha_best.front().x.empty()) return;
  const RotationDesign design = experiment_design(config);
  const int audit = config.audit_draws.empty() ? 1 : config.audit_draws.front();
  const PanelSample sample(result.population, design, SampleAssignment(design, audit));
  const WeightSet base = base_weights(design, sample);
  const RcResult rc = regression_composite(result.alpha_best.front().x.front(), sample, base,
                                           covariate_totals(result.population));
  write_weights_audit(dir / ("weights_audit_pop" + std::to_string(result.variant) + ".csv"), sample, base,
                      to_weight_set(rc, sample.month_size()));
}

// ---------------------------------------------------------------- run

std::vector<fs::path> run(const ExperimentConfig& config, Command command, const Logger& log) {
  const auto problems = validate(config);
  if (!problems.empty()) {
    std::string all;
    for (const auto& p : problems) all += "\n  " + p;
    throw ConfigError("invalid configuration:" + all);
  }
  const fs::path dir = config.output;
  fs::create_directories(dir);
  const Stopwatch clock(log);

  if (command == Command::generate_population || command == Command::report) {
    std::vector<Population> pops;
    for (int v : config.populations) {
      pops.push_back(experiment_population(config, v));
      if (command == Command::generate_population) {
        write_population_binary(dir / ("population_" + std::to_string(v) + ".bin"), pops.back());
      }
    }
    write_population_summary(dir / "population_summary.csv", pops, experiment_targets(config));
    write_rate_targets(dir / "rate_targets.csv", experiment_targets(config));
    clock.note("population summary");
  }
  if (command == Command::audit_design || command == Command::report) {
    write_design_audit(dir, experiment_design(config), config.audit_draws);
    clock.note("design audit");
  }
  if (command == Command::evaluate || command == Command::optimize || command == Command::report) {
    Plan plan;
    plan.evaluate = command != Command::optimize;
    plan.oracle = plan.evaluate;
    std::vector<PopulationResult> results;
    for (int v : config.populations) results.push_back(analyse_population(config, v, plan, log));
    if (command != Command::optimize) write_evaluation(dir, results);
    if (command != Command::evaluate) {
      write_optimization(dir, results);
      for (const auto& r : results) write_weights_audit_file(dir, config, r);
    }
    clock.note("tables written");
  }
  {
    std::ofstream cfg(dir / "config.json");
    cfg << dump_config(config, false);
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), dir));
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace compest::tools
