#include "compest/sample.hpp"

#include "compest/error.hpp"

namespace compest {

PanelSample::PanelSample(const Population& population, const RotationDesign& design,
                         const SampleAssignment& assignment)
    : months_(assignment.months()),
      draw_(assignment.draw()),
      population_size_(population.individuals()),
      group_size_(design.group_individuals()),
      household_size_(design.household_size),
      lag_(design.lag) {
  if (population.household_size() != design.household_size || population.households() != design.households) {
    throw ShapeError("population households do not match the rotation design");
  }
  if (population.months() < months_) throw ShapeError("population has fewer months than the design");
  const std::size_t total = static_cast<std::size_t>(months_) * month_size();
  ids_.reserve(total);
  status_.reserve(total);
  covariates_.reserve(total * kCovariates);
  for (int m = 1; m <= months_; ++m) {
    const auto statuses = population.month_statuses(m);
    for (int g = 1; g <= kGroups; ++g) {
      for (int h : assignment.households(m, g)) {
        const int first = population.household_first(h);
        for (int k = first; k < first + household_size_; ++k) {
          ids_.push_back(k);
          status_.push_back(statuses[static_cast<std::size_t>(k - 1)]);
          for (int c = 1; c <= kCovariates; ++c) covariates_.push_back(static_cast<std::uint8_t>(population.covariate(k, c)));
        }
      }
    }
  }
}

WeightSet base_weights(const RotationDesign& design, const PanelSample& sample) {
  return WeightSet(sample.months(), sample.month_size(), design.base_weight());
}

}  // namespace compest
