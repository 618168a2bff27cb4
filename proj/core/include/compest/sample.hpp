#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "compest/design.hpp"
#include "compest/population.hpp"

namespace compest {

// Observed microdata of one draw. Month m holds kGroups blocks of
// group_individuals() rows; within a block, households follow cluster order and
// members follow household order, so a continuing cluster occupies the same
// in-block positions in consecutive months.
class PanelSample {
 public:
  PanelSample(const Population& population, const RotationDesign& design, const SampleAssignment& assignment);

  int months() const noexcept { return months_; }
  int draw() const noexcept { return draw_; }
  int population_size() const noexcept { return population_size_; }
  int group_size() const noexcept { return group_size_; }
  int household_size() const noexcept { return household_size_; }
  int month_size() const noexcept { return kGroups * group_size_; }
  int cluster_index(int month, int group) const {
    return month + lag_[static_cast<std::size_t>(group - 1)];
  }

  std::span<const int> individuals(int month) const { return {ids_.data() + offset(month), size()}; }
  std::span<const std::uint8_t> status(int month) const { return {status_.data() + offset(month), size()}; }
  std::span<std::uint8_t> status(int month) { return {status_.data() + offset(month), size()}; }
  std::span<const std::uint8_t> group_status(int month, int group) const {
    return status(month).subspan(static_cast<std::size_t>(group - 1) * group_size_, static_cast<std::size_t>(group_size_));
  }
  std::span<std::uint8_t> group_status(int month, int group) {
    return status(month).subspan(static_cast<std::size_t>(group - 1) * group_size_, static_cast<std::size_t>(group_size_));
  }
  // Covariate c (1-based) of row i (0-based) in month m.
  int covariate(int month, std::size_t row, int c) const {
    return covariates_[(static_cast<std::size_t>(offset(month)) + row) * kCovariates + static_cast<std::size_t>(c - 1)];
  }

 private:
  std::size_t offset(int month) const { return static_cast<std::size_t>(month - 1) * size(); }
  std::size_t size() const { return static_cast<std::size_t>(month_size()); }

  int months_;
  int draw_;
  int population_size_;
  int group_size_;
  int household_size_;
  std::array<int, kGroups> lag_;
  std::vector<int> ids_;
  std::vector<std::uint8_t> status_;
  std::vector<std::uint8_t> covariates_;
};

// Per-month weights aligned with PanelSample rows; units outside S_m carry
// weight zero implicitly.
class WeightSet {
 public:
  WeightSet(int months, int month_size, double value = 0.0)
      : months_(months), month_size_(month_size), w_(static_cast<std::size_t>(months) * month_size, value) {}

  int months() const noexcept { return months_; }
  int month_size() const noexcept { return month_size_; }
  std::span<const double> month(int m) const { return {w_.data() + offset(m), static_cast<std::size_t>(month_size_)}; }
  std::span<double> month(int m) { return {w_.data() + offset(m), static_cast<std::size_t>(month_size_)}; }

  friend bool operator==(const WeightSet&, const WeightSet&) = default;

 private:
  std::size_t offset(int m) const { return static_cast<std::size_t>(m - 1) * month_size_; }
  int months_;
  int month_size_;
  std::vector<double> w_;
};

// Inverse inclusion probability H / (8 n) on every sampled unit.
WeightSet base_weights(const RotationDesign& design, const PanelSample& sample);

}  // namespace compest
