#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <compest/csv.hpp>
#include <compest/error.hpp>

using namespace compest;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Csv, NumberFormat) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(123456789012345.0), "1.23456789012e+14");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(std::nan("")), "NA");
}

TEST(Csv, WriterRows) {
  const auto path = std::filesystem::temp_directory_path() / "compest_csv_test.csv";
  {
    CsvWriter w(path, {"a", "b", "c"});
    w.row({"x", 3, 0.25});
    EXPECT_THROW(w.row({"x", 3}), ShapeError);
  }
  EXPECT_EQ(slurp(path), "a,b,c\nx,3,0.25\n");
  std::filesystem::remove(path);
}

TEST(Csv, Estimates) {
  const auto path = std::filesystem::temp_directory_path() / "compest_est_test.csv";
  Eigen::MatrixXd t(2, 3);
  t << 1, 2, 3, 4, 5, 6;
  write_estimates(path, {{"direct", t}});
  EXPECT_EQ(slurp(path),
            "estimator,month,status,value\n"
            "direct,1,1,1\ndirect,2,1,4\ndirect,1,2,2\ndirect,2,2,5\ndirect,1,3,3\ndirect,2,3,6\n");
  std::filesystem::remove(path);
}

TEST(Csv, Trace) {
  const auto path = std::filesystem::temp_directory_path() / "compest_trace_test.csv";
  write_trace(path, {{0, 1, {0.3, 0.4, 0.4, 0.7}, 2.5}});
  EXPECT_EQ(slurp(path), "run,iteration,p1,p2,p3,p4,value\n0,1,0.3,0.4,0.4,0.7,2.5\n");
  std::filesystem::remove(path);
}
