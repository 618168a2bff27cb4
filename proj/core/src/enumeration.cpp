#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "compest/error.hpp"
#include "compest/evaluation.hpp"

namespace compest {

namespace {

[[noreturn]] void rethrow_for_draw(int r) {
  try {
    throw;
  } catch (const DrawError&) {
    throw;
  } catch (const std::exception& e) {
    std::throw_with_nested(DrawError(e.what(), r));
  }
}

}  // namespace

void parallel_for_draws(int draws, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || draws <= 1) {
    for (int r = 1; r <= draws; ++r) {
      try {
        body(r);
      } catch (...) {
        rethrow_for_draw(r);
      }
    }
    return;
  }
  std::atomic<int> next{1};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;
  int failed_draw = 0;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r > draws || stop.load()) return;
      try {
        body(r);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure || r < failed_draw) {
          failure = std::current_exception();
          failed_draw = r;
        }
        stop = true;
      }
    }
  };
  std::vector<std::jthread> pool;
  for (int t = 0; t < std::min(threads, draws); ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (...) {
      rethrow_for_draw(failed_draw);
    }
  }
}

std::vector<Eigen::MatrixXd> enumerate_estimates(const Population& population, const RotationDesign& design,
                                                 const Estimator& estimator, int threads,
                                                 const SampleTransform& transform) {
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(design.draws()));
  parallel_for_draws(design.draws(), threads, [&](int r) {
    PanelSample sample(population, design, SampleAssignment(design, r));
    if (transform) transform(sample);
    out[static_cast<std::size_t>(r - 1)] = estimator(sample, base_weights(design, sample));
  });
  return out;
}

MomentReport exact_moments(const Population& population, const RotationDesign& design, const Estimator& estimator,
                           int threads, const SampleTransform& transform) {
  const auto estimates = enumerate_estimates(population, design, estimator, threads, transform);
  Eigen::MatrixXd truth = population_totals(population).topRows(design.months);
  return exact_moments(estimates, truth);
}

Eigen::MatrixXd mis_realizations(const Population& population, const RotationDesign& design, int threads,
                                 const SampleTransform& transform) {
  Eigen::MatrixXd y(design.draws(), 24 * design.months);
  parallel_for_draws(design.draws(), threads, [&](int r) {
    PanelSample sample(population, design, SampleAssignment(design, r));
    if (transform) transform(sample);
    y.row(r - 1) = mis_estimator(sample, base_weights(design, sample)).vec().transpose();
  });
  return y;
}

Eigen::MatrixXd exact_sigma(const Eigen::MatrixXd& realizations) {
  const Eigen::RowVectorXd mean = realizations.colwise().mean();
  const Eigen::MatrixXd centered = realizations.rowwise() - mean;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(centered.cols(), centered.cols());
  sigma.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), 1.0 / static_cast<double>(realizations.rows()));
  sigma.triangularView<Eigen::StrictlyUpper>() = sigma.transpose();
  return sigma;
}

Eigen::MatrixXd exact_sigma(const Population& population, const RotationDesign& design, int threads) {
  return exact_sigma(mis_realizations(population, design, threads));
}

}  // namespace compest
