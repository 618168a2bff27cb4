#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "compest/evaluation.hpp"
#include "compest/optimize.hpp"
#include "compest/sample.hpp"

namespace compest {

// Numbers use 12 significant digits and the C locale.
std::string format_number(double v);

class CsvWriter {
 public:
  using Field = std::variant<std::string, std::string_view, const char*, int, long, long long, double>;

  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

  void row(std::initializer_list<Field> fields);
  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

struct NamedEstimate {
  std::string estimator;
  Eigen::MatrixXd totals;  // (M, 3)
};

// estimator, month, status, value
void write_estimates(const std::filesystem::path& path, const std::vector<NamedEstimate>& estimates);

// estimator, target, month, status, mean, bias, variance, mse
struct NamedReport {
  std::string estimator;
  MomentReport report;
};
void write_moments(const std::filesystem::path& path, const std::vector<NamedReport>& reports);

// month, individual, base_weight, calibrated_weight
void write_weights_audit(const std::filesystem::path& path, const PanelSample& sample, const WeightSet& base,
                         const WeightSet& calibrated);

// run, iteration, p1..pn, value
void write_trace(const std::filesystem::path& path, const std::vector<TracePoint>& trace);

}  // namespace compest
