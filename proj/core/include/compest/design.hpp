#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <vector>

namespace compest {

inline constexpr int kGroups = 8;

// 4-8-4 rotating panel over H households: the sample of month m, group g is
// cluster m + lag[g]. A cluster of draw r is the systematic sample of
// group_households households starting at offset (r - 1 + l - 1).
struct RotationDesign {
  int households = 20000;
  int group_households = 20;
  int household_size = 5;
  int months = 85;
  std::array<int, kGroups> lag{0, 1, 2, 3, 12, 13, 14, 15};

  int draws() const noexcept { return households / group_households; }
  int clusters() const noexcept { return months + lag.back(); }
  int group_individuals() const noexcept { return group_households * household_size; }
  int month_individuals() const noexcept { return kGroups * group_individuals(); }
  double base_weight() const noexcept {
    return static_cast<double>(households) / (kGroups * group_households);
  }

  // Throws DomainError unless lags are strictly increasing, H is a multiple of
  // the group size and every cluster of a draw is distinct.
  void validate() const;
};

// Rotation roles, derived from the lags. A group continues from month m-1 when
// its cluster sat in group predecessor(g) the month before.
struct RotationRoles {
  std::array<bool, kGroups> continuing{};
  std::array<bool, kGroups> entering{};
  // Groups of month m-1 whose cluster stays in sample in month m.
  std::array<bool, kGroups> staying{};
  // For continuing g, the 1-based group the same cluster held in month m-1; 0 otherwise.
  std::array<int, kGroups> predecessor{};

  int continuing_count() const;
};

RotationRoles rotation_roles(const RotationDesign& design);

// Household indices (1-based) of cluster ell in draw r.
std::vector<int> cluster(const RotationDesign& design, int ell, int r);

class SampleAssignment {
 public:
  SampleAssignment(const RotationDesign& design, int r);

  int draw() const noexcept { return r_; }
  int months() const noexcept { return months_; }
  int cluster_index(int month, int group) const { return month + lag_[static_cast<std::size_t>(group - 1)]; }
  // Households of S_{m,g} in cluster order.
  std::span<const int> households(int month, int group) const;
  // Union over groups, group-major.
  std::vector<int> month_households(int month) const;

 private:
  int r_;
  int months_;
  int group_households_;
  std::array<int, kGroups> lag_;
  std::vector<int> cluster_households_;  // clusters x group_households
};

SampleAssignment assignment(const RotationDesign& design, int r);
std::vector<SampleAssignment> enumerate_assignments(const RotationDesign& design);

struct CpsRotationGroup {
  int sample;  // designation A_l
  int group;   // rotation group 1..8
  friend bool operator==(const CpsRotationGroup&, const CpsRotationGroup&) = default;
};

// The eight (sample designation, rotation group) pairs that make up month m of
// the production rotation chart, m counted from the chart's reference month.
std::array<CpsRotationGroup, kGroups> cps_month_mapping(int month);

// r,m,g,ell,household_ids (ids separated by ';').
void write_rotation_chart(const std::filesystem::path& path, const RotationDesign& design,
                          std::span<const int> draws);

}  // namespace compest
