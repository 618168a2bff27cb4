#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace compest {

// Labor-force status codes. R(x) = x_2 / (x_1 + x_2) is the unemployment rate.
enum Status : std::uint8_t { kEmployed = 1, kUnemployed = 2, kNotInLaborForce = 3 };
inline constexpr int kStatuses = 3;

// Number of binary auxiliary covariates carried per individual.
inline constexpr int kCovariates = 2;

struct RateTargets {
  std::vector<double> unemployment_rate;
  std::vector<double> labor_force_rate;

  int months() const noexcept { return static_cast<int>(unemployment_rate.size()); }
};

// Synthetic 85-month series (January 2005 to January 2012 shaped).
RateTargets default_rate_targets();
// CSV with header month,unemployment_rate,labor_force_rate; months must be 1..M in order.
RateTargets read_rate_targets(const std::filesystem::path& path);
void write_rate_targets(const std::filesystem::path& path, const RateTargets& targets);
RateTargets truncate(const RateTargets& targets, int months);

struct StatusCounts {
  long long employed = 0;
  long long unemployed = 0;
  long long not_in_labor_force = 0;

  long long operator[](int e) const { return e == 1 ? employed : e == 2 ? unemployed : not_in_labor_force; }
  friend bool operator==(const StatusCounts&, const StatusCounts&) = default;
};

// Integer counts realizing the targets: LF = round(N * lf), U = round(LF * ur),
// E = LF - U, remainder not in the labor force.
StatusCounts target_counts(long long individuals, double unemployment_rate, double labor_force_rate);

// Monthly gross-flow probabilities used as the starting point of variants 2 and 3.
// flow[a][b] is the probability that a holder of status a+1 moves to b+1.
struct GrossFlows {
  double flow[3][3] = {{0.0, 0.010, 0.020}, {0.20, 0.0, 0.15}, {0.03, 0.015, 0.0}};
};

struct PopulationSpec {
  int variant = 1;
  int individuals = 100000;
  int household_size = 5;
  RateTargets targets;
  GrossFlows flows;
  double covariate_probability[kCovariates] = {0.5, 0.25};
  std::uint64_t seed = 1;
};

class Population {
 public:
  Population() = default;
  // statuses: month-major, value in {1,2,3}; covariates: individual-major, kCovariates per individual.
  Population(int months, int individuals, int household_size, std::vector<std::uint8_t> statuses,
             std::vector<std::uint8_t> covariates, int variant = 0, std::uint64_t seed = 0);

  int months() const noexcept { return months_; }
  int individuals() const noexcept { return individuals_; }
  int household_size() const noexcept { return household_size_; }
  int households() const noexcept { return individuals_ / household_size_; }
  int variant() const noexcept { return variant_; }
  std::uint64_t seed() const noexcept { return seed_; }

  // 1-based month and individual.
  int status(int month, int individual) const {
    return statuses_[static_cast<std::size_t>(month - 1) * individuals_ + (individual - 1)];
  }
  int covariate(int individual, int c) const {
    return covariates_[static_cast<std::size_t>(individual - 1) * kCovariates + (c - 1)];
  }
  std::span<const std::uint8_t> month_statuses(int month) const {
    return {statuses_.data() + static_cast<std::size_t>(month - 1) * individuals_,
            static_cast<std::size_t>(individuals_)};
  }
  std::span<const std::uint8_t> statuses() const noexcept { return statuses_; }
  std::span<const std::uint8_t> covariates() const noexcept { return covariates_; }

  // First individual of household i (1-based); members are first..first+size-1.
  int household_first(int household) const { return (household - 1) * household_size_ + 1; }

  friend bool operator==(const Population&, const Population&) = default;

 private:
  int months_ = 0;
  int individuals_ = 0;
  int household_size_ = 5;
  int variant_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::uint8_t> statuses_;
  std::vector<std::uint8_t> covariates_;
};

Population generate_population(const PopulationSpec& spec);

// (M,3) totals; column-major storage equals the flattened (m,e) order.
Eigen::MatrixXd population_totals(const Population& p);
// Per-individual month-invariant covariate totals (kCovariates entries).
Eigen::VectorXd covariate_totals(const Population& p);
// Number of individuals whose status differs between month m-1 and m (m >= 2).
long long movers(const Population& p, int month);

double unemployment_rate(double employed, double unemployed);
std::vector<double> unemployment_rate(const Eigen::MatrixXd& totals);

// Binary cache: "CPOP", u32 version, i32 months, i32 individuals, i32 household size,
// i32 variant, u64 seed, then months*individuals status bytes (month-major) and
// individuals*kCovariates covariate bytes. Integers little-endian.
void write_population_binary(const std::filesystem::path& path, const Population& p);
Population read_population_binary(const std::filesystem::path& path);
// Long format: month,individual,status.
void write_population_csv(const std::filesystem::path& path, const Population& p);

}  // namespace compest
