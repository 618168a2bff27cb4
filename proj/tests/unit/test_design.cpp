#include <algorithm>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include <compest/design.hpp>
#include <compest/error.hpp>

using namespace compest;

namespace {

std::set<int> as_set(std::span<const int> v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(Cluster, Draw506Cluster14) {
  const RotationDesign d;
  const auto c = cluster(d, 14, 506);
  ASSERT_EQ(c.size(), 20u);
  // offset (506 - 1) + (14 - 1) = 518
  std::vector<int> expected;
  for (int j = 0; j < 20; ++j) expected.push_back(519 + 1000 * j);
  EXPECT_EQ(c, expected);
}

TEST(Cluster, FirstDrawFirstCluster) {
  const RotationDesign d;
  std::vector<int> expected;
  for (int j = 0; j < 20; ++j) expected.push_back(1 + 1000 * j);
  EXPECT_EQ(cluster(d, 1, 1), expected);
}

TEST(Cluster, DistinctMembers) {
  const RotationDesign d;
  for (int r : {1, 17, 506, 1000}) {
    for (int ell : {1, 50, 100}) {
      const auto c = cluster(d, ell, r);
      EXPECT_EQ(as_set(c).size(), 20u);
      for (int h : c) {
        EXPECT_GE(h, 1);
        EXPECT_LE(h, d.households);
      }
    }
  }
}

TEST(Cluster, OutOfRange) {
  const RotationDesign d;
  EXPECT_THROW(cluster(d, 1, 0), DomainError);
  EXPECT_THROW(cluster(d, 1, 1001), DomainError);
  EXPECT_THROW(cluster(d, 0, 1), DomainError);
  EXPECT_THROW(cluster(d, d.months + 16, 1), DomainError);
  EXPECT_THROW(SampleAssignment(d, 0), DomainError);
}

TEST(Assignment, GroupIsLaggedCluster) {
  const RotationDesign d;
  const SampleAssignment a(d, 506);
  EXPECT_EQ(a.cluster_index(12, 3), 14);
  const auto c14 = cluster(d, 14, 506);
  const auto s = a.households(12, 3);
  EXPECT_EQ(std::vector<int>(s.begin(), s.end()), c14);
}

TEST(Assignment, RotationChartPattern) {
  // month m, group g holds cluster m + lag(g): the first month reads 1,2,3,4,13,14,15,16
  const RotationDesign d;
  const SampleAssignment a(d, 1);
  const int first[8] = {1, 2, 3, 4, 13, 14, 15, 16};
  for (int g = 1; g <= 8; ++g) EXPECT_EQ(a.cluster_index(1, g), first[g - 1]);
  for (int m = 1; m <= 20; ++m) {
    for (int g = 1; g <= 8; ++g) {
      const auto s = a.households(m, g);
      const auto c = cluster(d, m + d.lag[static_cast<std::size_t>(g - 1)], 1);
      EXPECT_EQ(std::vector<int>(s.begin(), s.end()), c);
    }
  }
  // one month apart within a run of four; twelve months apart across the gap
  for (int m = 1; m <= 20; ++m) {
    EXPECT_EQ(a.cluster_index(m + 1, 3), a.cluster_index(m, 4));
    EXPECT_EQ(a.cluster_index(m + 12, 1), a.cluster_index(m, 5));
  }
}

TEST(Assignment, MonthSizesAndDisjointGroups) {
  const RotationDesign d;
  for (int r : {1, 333, 1000}) {
    const SampleAssignment a(d, r);
    for (int m = 1; m <= d.months; ++m) {
      const auto h = a.month_households(m);
      EXPECT_EQ(h.size(), 160u);
      EXPECT_EQ(as_set(h).size(), 160u);
    }
  }
}

TEST(Assignment, OverlapCounts) {
  const RotationDesign d;
  for (int r = 1; r <= d.draws(); r += 37) {
    const SampleAssignment a(d, r);
    for (int m = 1; m < d.months; ++m) {
      const auto now = as_set(a.month_households(m));
      const auto next = a.month_households(m + 1);
      const auto common = std::count_if(next.begin(), next.end(), [&](int h) { return now.count(h) > 0; });
      EXPECT_EQ(common * d.household_size, 600);
      if (m + 12 <= d.months) {
        const auto later = a.month_households(m + 12);
        const auto c12 = std::count_if(later.begin(), later.end(), [&](int h) { return now.count(h) > 0; });
        EXPECT_EQ(c12 * d.household_size, 400);
      }
    }
  }
}

TEST(Assignment, InclusionCountsOverEnumeration) {
  const RotationDesign d;
  const auto all = enumerate_assignments(d);
  ASSERT_EQ(all.size(), 1000u);
  for (int m : {1, 40, 85}) {
    std::vector<int> count(static_cast<std::size_t>(d.households) + 1, 0);
    for (const auto& a : all)
      for (int h : a.month_households(m)) ++count[static_cast<std::size_t>(h)];
    for (int h = 1; h <= d.households; ++h) ASSERT_EQ(count[static_cast<std::size_t>(h)], 8) << "household " << h;
  }
  EXPECT_NE(as_set(all[0].month_households(1)), as_set(all[1].month_households(1)));
}

TEST(Roles, FourEightFour) {
  const auto roles = rotation_roles(RotationDesign{});
  EXPECT_EQ(roles.continuing_count(), 6);
  const bool entering[8] = {false, false, false, true, false, false, false, true};
  const bool staying[8] = {false, true, true, true, false, true, true, true};
  for (int g = 0; g < 8; ++g) {
    EXPECT_EQ(roles.entering[static_cast<std::size_t>(g)], entering[g]) << g;
    EXPECT_EQ(roles.staying[static_cast<std::size_t>(g)], staying[g]) << g;
    EXPECT_EQ(roles.continuing[static_cast<std::size_t>(g)], !entering[g]) << g;
  }
  EXPECT_EQ(roles.predecessor[0], 2);
  EXPECT_EQ(roles.predecessor[4], 6);
}

TEST(CpsMapping, WorkedMonth) {
  const auto got = cps_month_mapping(44);
  const std::array<CpsRotationGroup, 8> expected{{{90, 4}, {90, 5}, {90, 6}, {90, 7}, {91, 8}, {92, 1}, {92, 2}, {92, 3}}};
  EXPECT_EQ(got, expected);
}

TEST(CpsMapping, FirstMonth) {
  const auto got = cps_month_mapping(1);
  EXPECT_EQ(got[0], (CpsRotationGroup{85, 1}));
}

TEST(CpsMapping, GroupsArePermutation) {
  for (int m = 1; m <= 120; ++m) {
    std::set<int> groups;
    for (const auto& p : cps_month_mapping(m)) groups.insert(p.group);
    EXPECT_EQ(groups, (std::set<int>{1, 2, 3, 4, 5, 6, 7, 8})) << "month " << m;
  }
}

TEST(Design, ValidateRejectsBadLags) {
  RotationDesign d;
  d.lag = {0, 1, 1, 3, 12, 13, 14, 15};
  EXPECT_THROW(d.validate(), DomainError);
}
