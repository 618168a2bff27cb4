#pragma once

#include <compest/design.hpp>
#include <compest/population.hpp>

namespace compest::testing {

// 200 households, clusters of 2 households, 12 months: 100 draws.
inline RotationDesign small_design(int months = 12) {
  RotationDesign d;
  d.households = 200;
  d.group_households = 2;
  d.months = months;
  return d;
}

// Random-walk statuses on the population matching small_design.
inline Population small_population(int variant = 3, int months = 12, std::uint64_t seed = 7) {
  PopulationSpec spec;
  spec.variant = variant;
  spec.individuals = 1000;
  spec.targets.unemployment_rate.clear();
  spec.targets.labor_force_rate.clear();
  for (int m = 0; m < months; ++m) {
    spec.targets.unemployment_rate.push_back(0.10 + 0.01 * (m % 4));
    spec.targets.labor_force_rate.push_back(0.65 + 0.005 * (m % 3));
  }
  spec.seed = seed;
  return generate_population(spec);
}

}  // namespace compest::testing
