#pragma once

#include "compest/sample.hpp"

namespace compest {

// Misclassification injected into month-in-sample group 1 of every month.
//   employed_to_unemployed: round(fraction * employed in the group) units flip E -> U
//   unemployed_to_employed: min(cap, ceil(fraction * unemployed in the group)) units flip U -> E
// Flipped units are those with the smallest individual index.
enum class ErrorMode { employed_to_unemployed, unemployed_to_employed };

struct MeasurementError {
  ErrorMode mode = ErrorMode::unemployed_to_employed;
  double fraction = 1.0;
  int cap = 2;
};

// Returns the number of flipped units over all months.
long long inject_measurement_error(PanelSample& sample, const MeasurementError& error);

}  // namespace compest
