#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "compest/error.hpp"
#include "compest/optimize.hpp"

namespace compest {

OptimizationResult nelder_mead(const ObjectiveFn& f, std::vector<double> start, const NelderMeadOptions& options) {
  const std::size_t n = start.size();
  if (n == 0) throw DomainError("nelder_mead: empty start point");
  OptimizationResult out;

  auto eval = [&](const std::vector<double>& x) {
    ++out.evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  long iteration = 0;
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  for (;;) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    if (options.record_trace) out.trace.push_back({0, iteration, simplex[best], values[best]});

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t d = 0; d < n; ++d) diameter = std::max(diameter, std::abs(simplex[i][d] - simplex[best][d]));
    }
    if (diameter < options.tolerance) {
      out.converged = true;
      break;
    }
    if (out.evaluations >= options.max_evaluations) break;
    ++iteration;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d] / static_cast<double>(n);
    }
    for (std::size_t d = 0; d < n; ++d) xr[d] = centroid[d] + (centroid[d] - simplex[worst][d]);
    const double fr = eval(xr);
    if (fr < values[best]) {
      for (std::size_t d = 0; d < n; ++d) xe[d] = centroid[d] + 2.0 * (centroid[d] - simplex[worst][d]);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = xr;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    for (std::size_t d = 0; d < n; ++d) {
      xc[d] = outside ? centroid[d] + 0.5 * (xr[d] - centroid[d]) : centroid[d] + 0.5 * (simplex[worst][d] - centroid[d]);
    }
    const double fc = eval(xc);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = xc;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < n; ++d) simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
      values[i] = eval(simplex[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  out.x = simplex[best];
  out.value = values[best];
  return out;
}

}  // namespace compest
