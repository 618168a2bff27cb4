#include "compest/design.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "compest/error.hpp"

namespace compest {

void RotationDesign::validate() const {
  if (households < 1 || group_households < 1 || household_size < 1 || months < 1) {
    throw DomainError("rotation design sizes must be positive");
  }
  if (households % group_households != 0) {
    throw DomainError("household count must be a multiple of the group size");
  }
  if (lag[0] != 0) throw DomainError("first rotation lag must be 0");
  for (int g = 1; g < kGroups; ++g) {
    if (lag[g] <= lag[g - 1]) throw DomainError("rotation lags must be strictly increasing");
  }
  if (clusters() > draws()) {
    throw DomainError("design has " + std::to_string(clusters()) + " clusters but only " +
                      std::to_string(draws()) + " distinct offsets");
  }
}

int RotationRoles::continuing_count() const {
  return static_cast<int>(std::count(continuing.begin(), continuing.end(), true));
}

RotationRoles rotation_roles(const RotationDesign& design) {
  RotationRoles roles;
  auto group_with_lag = [&](int lag) {
    for (int g = 0; g < kGroups; ++g) {
      if (design.lag[g] == lag) return g + 1;
    }
    return 0;
  };
  for (int g = 0; g < kGroups; ++g) {
    roles.predecessor[g] = group_with_lag(design.lag[g] + 1);
    roles.continuing[g] = roles.predecessor[g] != 0;
    roles.entering[g] = !roles.continuing[g];
    roles.staying[g] = group_with_lag(design.lag[g] - 1) != 0;
  }
  return roles;
}

std::vector<int> cluster(const RotationDesign& design, int ell, int r) {
  if (r < 1 || r > design.draws()) {
    throw DomainError("draw r = " + std::to_string(r) + " outside 1.." + std::to_string(design.draws()));
  }
  if (ell < 1 || ell > design.clusters()) {
    throw DomainError("cluster index " + std::to_string(ell) + " outside 1.." + std::to_string(design.clusters()));
  }
  const long long h = design.households;
  const long long step = design.draws();
  std::vector<int> ids(static_cast<std::size_t>(design.group_households));
  for (int j = 1; j <= design.group_households; ++j) {
    ids[static_cast<std::size_t>(j - 1)] = static_cast<int>(((r - 1 + ell - 1) + step * (j - 1)) % h + 1);
  }
  return ids;
}

SampleAssignment::SampleAssignment(const RotationDesign& design, int r)
    : r_(r), months_(design.months), group_households_(design.group_households), lag_(design.lag) {
  design.validate();
  if (r < 1 || r > design.draws()) {
    throw DomainError("draw r = " + std::to_string(r) + " outside 1.." + std::to_string(design.draws()));
  }
  cluster_households_.reserve(static_cast<std::size_t>(design.clusters()) * group_households_);
  for (int ell = 1; ell <= design.clusters(); ++ell) {
    const auto c = cluster(design, ell, r);
    cluster_households_.insert(cluster_households_.end(), c.begin(), c.end());
  }
}

std::span<const int> SampleAssignment::households(int month, int group) const {
  if (month < 1 || month > months_ || group < 1 || group > kGroups) {
    throw DomainError("(month, group) = (" + std::to_string(month) + ", " + std::to_string(group) +
                      ") outside the design");
  }
  const auto ell = static_cast<std::size_t>(cluster_index(month, group));
  return {cluster_households_.data() + (ell - 1) * group_households_, static_cast<std::size_t>(group_households_)};
}

std::vector<int> SampleAssignment::month_households(int month) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(kGroups) * group_households_);
  for (int g = 1; g <= kGroups; ++g) {
    const auto h = households(month, g);
    out.insert(out.end(), h.begin(), h.end());
  }
  return out;
}

SampleAssignment assignment(const RotationDesign& design, int r) { return SampleAssignment(design, r); }

std::vector<SampleAssignment> enumerate_assignments(const RotationDesign& design) {
  std::vector<SampleAssignment> all;
  all.reserve(static_cast<std::size_t>(design.draws()));
  for (int r = 1; r <= design.draws(); ++r) all.emplace_back(design, r);
  return all;
}

std::array<CpsRotationGroup, kGroups> cps_month_mapping(int month) {
  if (month < 1) throw DomainError("month must be positive");
  std::array<CpsRotationGroup, kGroups> out{};
  for (int jp = 1; jp <= kGroups; ++jp) {
    const int q = (month + jp - 2) / 8;
    out[static_cast<std::size_t>(jp - 1)] = {(jp <= 4 ? 85 : 86) + q, month + jp - 1 - 8 * q};
  }
  return out;
}

void write_rotation_chart(const std::filesystem::path& path, const RotationDesign& design,
                          std::span<const int> draws) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "r,m,g,ell,household_ids\n";
  for (int r : draws) {
    const SampleAssignment a(design, r);
    for (int m = 1; m <= design.months; ++m) {
      for (int g = 1; g <= kGroups; ++g) {
        out << r << ',' << m << ',' << g << ',' << a.cluster_index(m, g) << ',';
        const auto h = a.households(m, g);
        for (std::size_t i = 0; i < h.size(); ++i) out << (i ? ";" : "") << h[i];
        out << '\n';
      }
    }
  }
}

}  // namespace compest
