#include "compest/population.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "compest/error.hpp"
#include "compest/rng.hpp"

namespace compest {

namespace {

struct Knot {
  int month;
  double ur;
  double lf;
};

// Linear interpolation between knots; shaped like a mid-2000s expansion, a
// recession peaking late in year five and a slow recovery.
constexpr std::array<Knot, 9> kDefaultKnots{{
    {1, 0.053, 0.660},
    {12, 0.049, 0.661},
    {24, 0.044, 0.662},
    {36, 0.050, 0.662},
    {48, 0.073, 0.657},
    {58, 0.100, 0.651},
    {72, 0.093, 0.643},
    {80, 0.089, 0.641},
    {85, 0.083, 0.640},
}};

using Counts = std::array<long long, 3>;

Counts as_array(const StatusCounts& c) { return {c.employed, c.unemployed, c.not_in_labor_force}; }

void check_spec(const PopulationSpec& spec) {
  if (spec.variant < 1 || spec.variant > 3) throw DomainError("population variant must be 1, 2 or 3");
  if (spec.targets.months() < 1) throw DomainError("rate targets are empty");
  if (spec.targets.labor_force_rate.size() != spec.targets.unemployment_rate.size()) {
    throw DomainError("unemployment and labor-force series differ in length");
  }
  if (spec.individuals < 1 || spec.household_size < 1 || spec.individuals % spec.household_size != 0) {
    throw DomainError("individuals must be a positive multiple of the household size");
  }
  for (int m = 0; m < spec.targets.months(); ++m) {
    const double u = spec.targets.unemployment_rate[m];
    const double l = spec.targets.labor_force_rate[m];
    if (!(u >= 0.0 && u <= 1.0) || !(l >= 0.0 && l <= 1.0)) {
      throw GenerationError("rate target outside [0,1]", m + 1);
    }
  }
}

// Net-preserving flows with the fewest movers: surplus statuses send to deficit
// statuses, both taken in index order.
std::array<Counts, 3> minimal_flows(const Counts& from, const Counts& to) {
  std::array<Counts, 3> f{};
  Counts d;
  for (int a = 0; a < 3; ++a) d[a] = to[a] - from[a];
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3 && d[a] < 0; ++b) {
      if (d[b] <= 0) continue;
      const long long q = std::min(-d[a], d[b]);
      f[a][b] += q;
      d[a] += q;
      d[b] -= q;
    }
  }
  return f;
}

// Baseline gross flows adjusted so that the net change matches the targets.
std::array<Counts, 3> gross_flows(const Counts& from, const Counts& to, const GrossFlows& p) {
  std::array<Counts, 3> f{};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (a != b) f[a][b] = std::llround(p.flow[a][b] * static_cast<double>(from[a]));
    }
  }
  Counts res;
  for (int a = 0; a < 3; ++a) {
    long long net = 0;
    for (int b = 0; b < 3; ++b) net += f[b][a] - f[a][b];
    res[a] = (to[a] - from[a]) - net;
  }
  for (;;) {
    int a = 0;
    while (a < 3 && res[a] >= 0) ++a;
    if (a == 3) break;
    int b = 0;
    while (res[b] <= 0) ++b;
    const long long q = std::min(-res[a], res[b]);
    const long long r = std::min(q, f[b][a]);
    f[b][a] -= r;
    f[a][b] += q - r;
    res[a] += q;
    res[b] -= q;
  }
  return f;
}

// Picks `count` holders in selection order.
std::vector<int> select_movers(std::vector<int>& holders, long long count, int variant, int individuals, Rng& rng) {
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(count));
  if (variant == 2) {
    // Efraimidis-Spirakis keys log(u)/w with w = exp(-5k/N); largest keys win.
    std::vector<std::pair<double, int>> keyed(holders.size());
    for (std::size_t i = 0; i < holders.size(); ++i) {
      double u;
      do {
        u = rng.uniform();
      } while (u == 0.0);
      const double w = std::exp(-5.0 * holders[i] / individuals);
      keyed[i] = {std::log(u) / w, holders[i]};
    }
    auto greater = [](const auto& x, const auto& y) {
      return x.first > y.first || (x.first == y.first && x.second < y.second);
    };
    std::partial_sort(keyed.begin(), keyed.begin() + count, keyed.end(), greater);
    for (long long i = 0; i < count; ++i) chosen.push_back(keyed[static_cast<std::size_t>(i)].second);
  } else {
    for (long long i = 0; i < count; ++i) {
      const auto j = static_cast<std::size_t>(i) +
                     static_cast<std::size_t>(rng.below(holders.size() - static_cast<std::size_t>(i)));
      std::swap(holders[static_cast<std::size_t>(i)], holders[j]);
      chosen.push_back(holders[static_cast<std::size_t>(i)]);
    }
  }
  return chosen;
}

}  // namespace

RateTargets default_rate_targets() {
  RateTargets t;
  for (int m = 1; m <= kDefaultKnots.back().month; ++m) {
    std::size_t i = 0;
    while (kDefaultKnots[i + 1].month < m) ++i;
    const Knot& a = kDefaultKnots[i];
    const Knot& b = kDefaultKnots[i + 1];
    const double s = static_cast<double>(m - a.month) / (b.month - a.month);
    t.unemployment_rate.push_back(a.ur + s * (b.ur - a.ur));
    t.labor_force_rate.push_back(a.lf + s * (b.lf - a.lf));
  }
  return t;
}

RateTargets truncate(const RateTargets& targets, int months) {
  if (months < 1 || months > targets.months()) {
    throw DomainError("requested " + std::to_string(months) + " months from a series of " +
                      std::to_string(targets.months()));
  }
  RateTargets t;
  t.unemployment_rate.assign(targets.unemployment_rate.begin(), targets.unemployment_rate.begin() + months);
  t.labor_force_rate.assign(targets.labor_force_rate.begin(), targets.labor_force_rate.begin() + months);
  return t;
}

StatusCounts target_counts(long long individuals, double unemployment_rate, double labor_force_rate) {
  const long long lf = std::llround(static_cast<double>(individuals) * labor_force_rate);
  const long long u = std::llround(static_cast<double>(lf) * unemployment_rate);
  return {lf - u, u, individuals - lf};
}

Population::Population(int months, int individuals, int household_size, std::vector<std::uint8_t> statuses,
                       std::vector<std::uint8_t> covariates, int variant, std::uint64_t seed)
    : months_(months),
      individuals_(individuals),
      household_size_(household_size),
      variant_(variant),
      seed_(seed),
      statuses_(std::move(statuses)),
      covariates_(std::move(covariates)) {
  if (months < 1 || individuals < 1 || household_size < 1 || individuals % household_size != 0) {
    throw ShapeError("population dimensions are invalid");
  }
  if (statuses_.size() != static_cast<std::size_t>(months) * individuals) {
    throw ShapeError("status array has " + std::to_string(statuses_.size()) + " entries, expected " +
                     std::to_string(static_cast<std::size_t>(months) * individuals));
  }
  if (covariates_.empty()) covariates_.assign(static_cast<std::size_t>(individuals) * kCovariates, 0);
  if (covariates_.size() != static_cast<std::size_t>(individuals) * kCovariates) {
    throw ShapeError("covariate array has the wrong length");
  }
  for (auto s : statuses_) {
    if (s < 1 || s > 3) throw DomainError("status code outside {1,2,3}");
  }
}

Population generate_population(const PopulationSpec& spec) {
  check_spec(spec);
  const int months = spec.targets.months();
  const int n = spec.individuals;
  std::vector<std::uint8_t> statuses(static_cast<std::size_t>(months) * n);

  Rng init(spec.seed, streams::kInitialStatus);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 1);
  init.shuffle(std::span<int>(order));

  Counts prev = as_array(target_counts(n, spec.targets.unemployment_rate[0], spec.targets.labor_force_rate[0]));
  {
    std::size_t i = 0;
    for (int e = 0; e < 3; ++e) {
      for (long long c = 0; c < prev[e]; ++c, ++i) statuses[static_cast<std::size_t>(order[i] - 1)] = static_cast<std::uint8_t>(e + 1);
    }
  }

  Rng rng(spec.seed, streams::kTransitions);
  for (int m = 2; m <= months; ++m) {
    const Counts next =
        as_array(target_counts(n, spec.targets.unemployment_rate[m - 1], spec.targets.labor_force_rate[m - 1]));
    const auto flows = spec.variant == 1 ? minimal_flows(prev, next) : gross_flows(prev, next, spec.flows);

    const std::uint8_t* before = statuses.data() + static_cast<std::size_t>(m - 2) * n;
    std::uint8_t* after = statuses.data() + static_cast<std::size_t>(m - 1) * n;
    std::copy(before, before + n, after);

    std::array<std::vector<int>, 3> holders;
    for (int k = 1; k <= n; ++k) holders[before[k - 1] - 1].push_back(k);

    for (int a = 0; a < 3; ++a) {
      long long out = 0;
      for (int b = 0; b < 3; ++b) out += flows[a][b];
      if (out == 0) continue;
      if (out > static_cast<long long>(holders[a].size())) {
        throw GenerationError("status " + std::to_string(a + 1) + " needs " + std::to_string(out) +
                                  " movers but only " + std::to_string(holders[a].size()) + " hold it",
                              m);
      }
      const auto chosen = select_movers(holders[a], out, spec.variant, n, rng);
      std::size_t i = 0;
      for (int b = 0; b < 3; ++b) {
        for (long long c = 0; c < flows[a][b]; ++c, ++i) {
          after[chosen[i] - 1] = static_cast<std::uint8_t>(b + 1);
        }
      }
    }
    prev = next;
  }

  Rng cov(spec.seed, streams::kCovariates);
  std::vector<std::uint8_t> covariates(static_cast<std::size_t>(n) * kCovariates);
  for (int k = 0; k < n; ++k) {
    for (int c = 0; c < kCovariates; ++c) {
      covariates[static_cast<std::size_t>(k) * kCovariates + c] = cov.uniform() < spec.covariate_probability[c] ? 1 : 0;
    }
  }
  return Population(months, n, spec.household_size, std::move(statuses), std::move(covariates), spec.variant,
                    spec.seed);
}

Eigen::MatrixXd population_totals(const Population& p) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(p.months(), kStatuses);
  for (int m = 1; m <= p.months(); ++m) {
    std::array<long long, 3> c{};
    for (auto s : p.month_statuses(m)) ++c[s - 1];
    for (int e = 0; e < 3; ++e) t(m - 1, e) = static_cast<double>(c[e]);
  }
  return t;
}

Eigen::VectorXd covariate_totals(const Population& p) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(kCovariates);
  for (int k = 1; k <= p.individuals(); ++k) {
    for (int c = 1; c <= kCovariates; ++c) x(c - 1) += p.covariate(k, c);
  }
  return x;
}

long long movers(const Population& p, int month) {
  if (month < 2 || month > p.months()) throw DomainError("movers: month out of range");
  const auto a = p.month_statuses(month - 1);
  const auto b = p.month_statuses(month);
  long long c = 0;
  for (std::size_t k = 0; k < a.size(); ++k) c += a[k] != b[k];
  return c;
}

double unemployment_rate(double employed, double unemployed) {
  const double lf = employed + unemployed;
  if (!(lf > 0.0)) throw DomainError("unemployment rate undefined: zero labor force");
  return unemployed / lf;
}

std::vector<double> unemployment_rate(const Eigen::MatrixXd& totals) {
  if (totals.cols() != kStatuses) throw ShapeError("totals must have 3 status columns");
  std::vector<double> r(static_cast<std::size_t>(totals.rows()));
  for (Eigen::Index m = 0; m < totals.rows(); ++m) {
    const double lf = totals(m, 0) + totals(m, 1);
    if (!(lf > 0.0)) throw DomainError("unemployment rate undefined: zero labor force in month " + std::to_string(m + 1));
    r[static_cast<std::size_t>(m)] = totals(m, 1) / lf;
  }
  return r;
}

}  // namespace compest
