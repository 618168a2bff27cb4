#include "compest/csv.hpp"

#include <cmath>
#include <cstdio>
#include <type_traits>

#include "compest/error.hpp"

namespace compest {

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
    : out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw Error("cannot open " + path.string() + " for writing");
  bool first = true;
  for (std::string_view h : header) {
    if (!first) out_ << ',';
    out_ << h;
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<Field> fields) {
  std::vector<std::string> text;
  text.reserve(fields.size());
  for (const Field& f : fields) {
    text.push_back(std::visit(
        [](const auto& v) -> std::string {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            return format_number(v);
          } else if constexpr (std::is_integral_v<T>) {
            return std::to_string(v);
          } else {
            return std::string(v);
          }
        },
        f));
  }
  row(text);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw ShapeError("csv row has the wrong number of fields");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
  if (!out_) throw Error("csv write failed");
}

void write_estimates(const std::filesystem::path& path, const std::vector<NamedEstimate>& estimates) {
  CsvWriter csv(path, {"estimator", "month", "status", "value"});
  for (const NamedEstimate& est : estimates) {
    for (Eigen::Index e = 0; e < est.totals.cols(); ++e) {
      for (Eigen::Index m = 0; m < est.totals.rows(); ++m) {
        csv.row({est.estimator, static_cast<long>(m + 1), static_cast<long>(e + 1), est.totals(m, e)});
      }
    }
  }
}

void write_moments(const std::filesystem::path& path, const std::vector<NamedReport>& reports) {
  CsvWriter csv(path, {"estimator", "target", "month", "status", "mean", "bias", "variance", "mse"});
  for (const NamedReport& r : reports) {
    const Moments& level = r.report.level;
    const Eigen::Index months = r.report.rate.mean.size();
    for (Eigen::Index i = 0; i < level.mean.size(); ++i) {
      csv.row({r.estimator, "level", static_cast<long>(i % months + 1), static_cast<long>(i / months + 1),
               level.mean(i), level.bias(i), level.variance(i), level.mse(i)});
    }
    const Moments& rate = r.report.rate;
    for (Eigen::Index i = 0; i < rate.mean.size(); ++i) {
      csv.row({r.estimator, "rate", static_cast<long>(i + 1), "", rate.mean(i), rate.bias(i), rate.variance(i),
               rate.mse(i)});
    }
    const Moments& change = r.report.change;
    for (Eigen::Index i = 0; i < change.mean.size(); ++i) {
      csv.row({r.estimator, "change", static_cast<long>(i + 2), "", change.mean(i), change.bias(i),
               change.variance(i), change.mse(i)});
    }
  }
}

void write_weights_audit(const std::filesystem::path& path, const PanelSample& sample, const WeightSet& base,
                         const WeightSet& calibrated) {
  CsvWriter csv(path, {"month", "individual", "base_weight", "calibrated_weight"});
  for (int m = 1; m <= sample.months(); ++m) {
    const auto ids = sample.individuals(m);
    const auto b = base.month(m);
    const auto c = calibrated.month(m);
    for (std::size_t i = 0; i < ids.size(); ++i) csv.row({m, ids[i], b[i], c[i]});
  }
}

void write_trace(const std::filesystem::path& path, const std::vector<TracePoint>& trace) {
  CsvWriter csv(path, {"run", "iteration", "p1", "p2", "p3", "p4", "value"});
  for (const TracePoint& t : trace) {
    std::vector<std::string> fields{std::to_string(t.run), std::to_string(t.iteration)};
    for (std::size_t d = 0; d < 4; ++d) fields.push_back(d < t.x.size() ? format_number(t.x[d]) : "");
    fields.push_back(format_number(t.value));
    csv.row(fields);
  }
}

}  // namespace compest
