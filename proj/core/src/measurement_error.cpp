#include "compest/measurement_error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "compest/error.hpp"

namespace compest {

long long inject_measurement_error(PanelSample& sample, const MeasurementError& error) {
  if (!(error.fraction >= 0.0 && error.fraction <= 1.0)) throw DomainError("error fraction must lie in [0,1]");
  if (error.cap < 0) throw DomainError("error cap must be nonnegative");
  const std::uint8_t from = error.mode == ErrorMode::employed_to_unemployed ? kEmployed : kUnemployed;
  const std::uint8_t to = error.mode == ErrorMode::employed_to_unemployed ? kUnemployed : kEmployed;
  const auto gs = static_cast<std::size_t>(sample.group_size());

  long long flipped = 0;
  std::vector<std::pair<int, std::size_t>> holders;
  for (int m = 1; m <= sample.months(); ++m) {
    auto status = sample.group_status(m, 1);
    const auto ids = sample.individuals(m).first(gs);
    holders.clear();
    for (std::size_t i = 0; i < gs; ++i) {
      if (status[i] == from) holders.emplace_back(ids[i], i);
    }
    const double n = static_cast<double>(holders.size());
    long long count = error.mode == ErrorMode::employed_to_unemployed
                          ? std::llround(error.fraction * n)
                          : std::min<long long>(error.cap, static_cast<long long>(std::ceil(error.fraction * n)));
    count = std::min<long long>(count, static_cast<long long>(holders.size()));
    std::partial_sort(holders.begin(), holders.begin() + count, holders.end());
    for (long long c = 0; c < count; ++c) status[holders[static_cast<std::size_t>(c)].second] = to;
    flipped += count;
  }
  return flipped;
}

}  // namespace compest
