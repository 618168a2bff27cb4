#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "compest/error.hpp"
#include "compest/population.hpp"

namespace compest {

namespace {

constexpr char kMagic[4] = {'C', 'P', 'O', 'P'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw Error("population cache truncated");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return static_cast<T>(v);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  return cells;
}

}  // namespace

RateTargets read_rate_targets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open rate-target file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error("rate-target file " + path.string() + " is empty");
  const auto header = split(line);
  if (header != std::vector<std::string>{"month", "unemployment_rate", "labor_force_rate"}) {
    throw Error("rate-target file " + path.string() + " must have header month,unemployment_rate,labor_force_rate");
  }
  RateTargets t;
  int expected = 1;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != 3) throw Error("rate-target row " + std::to_string(expected) + " needs 3 columns");
    try {
      if (std::stoi(cells[0]) != expected) throw Error("rate-target months must run 1..M in order");
      t.unemployment_rate.push_back(std::stod(cells[1]));
      t.labor_force_rate.push_back(std::stod(cells[2]));
    } catch (const std::logic_error&) {
      throw Error("rate-target row " + std::to_string(expected) + " is not numeric");
    }
    ++expected;
  }
  return t;
}

void write_rate_targets(const std::filesystem::path& path, const RateTargets& targets) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(12);
  out << "month,unemployment_rate,labor_force_rate\n";
  for (int m = 0; m < targets.months(); ++m) {
    out << m + 1 << ',' << targets.unemployment_rate[m] << ',' << targets.labor_force_rate[m] << '\n';
  }
}

void write_population_binary(const std::filesystem::path& path, const Population& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::int32_t>(out, p.months());
  put<std::int32_t>(out, p.individuals());
  put<std::int32_t>(out, p.household_size());
  put<std::int32_t>(out, p.variant());
  put<std::uint64_t>(out, p.seed());
  out.write(reinterpret_cast<const char*>(p.statuses().data()), static_cast<std::streamsize>(p.statuses().size()));
  out.write(reinterpret_cast<const char*>(p.covariates().data()), static_cast<std::streamsize>(p.covariates().size()));
}

Population read_population_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw Error(path.string() + " is not a population cache");
  if (get<std::uint32_t>(in) != kVersion) throw Error("unsupported population cache version");
  const auto months = get<std::int32_t>(in);
  const auto individuals = get<std::int32_t>(in);
  const auto household_size = get<std::int32_t>(in);
  const auto variant = get<std::int32_t>(in);
  const auto seed = get<std::uint64_t>(in);
  if (months < 1 || individuals < 1) throw Error("population cache header is invalid");
  std::vector<std::uint8_t> statuses(static_cast<std::size_t>(months) * individuals);
  std::vector<std::uint8_t> covariates(static_cast<std::size_t>(individuals) * kCovariates);
  if (!in.read(reinterpret_cast<char*>(statuses.data()), static_cast<std::streamsize>(statuses.size())) ||
      !in.read(reinterpret_cast<char*>(covariates.data()), static_cast<std::streamsize>(covariates.size()))) {
    throw Error("population cache truncated");
  }
  return Population(months, individuals, household_size, std::move(statuses), std::move(covariates), variant, seed);
}

void write_population_csv(const std::filesystem::path& path, const Population& p) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "month,individual,status\n";
  for (int m = 1; m <= p.months(); ++m) {
    const auto s = p.month_statuses(m);
    for (int k = 1; k <= p.individuals(); ++k) out << m << ',' << k << ',' << int(s[k - 1]) << '\n';
  }
}

}  // namespace compest
