// FilterStep and SOAFilter.
#include <gtest/gtest.h>

#include "property_checks.hpp"
#include "privreg/stability_filter.hpp"

namespace privreg {
namespace {

using testing::f_toy;

std::vector<Labels> soas(ClassEngine& e, const std::vector<Mask>& ms) {
  std::vector<Labels> out;
  for (const Mask& m : ms) out.push_back(e.soa(m));
  return out;
}

TEST(Schedule, LadderAndDefaults) {
  const LadderSchedule s = default_schedule(2, 3);
  EXPECT_EQ(s.r_max, 3);
  EXPECT_EQ(s.tau_max, 36);
  EXPECT_EQ(s.ell(0, 0), 3);
  EXPECT_EQ(s.ell(1, 2), 27);
  EXPECT_EQ(s.ell(2, 2), 48);
  LadderSchedule bad = s;
  bad.ell_bar = 0;
  EXPECT_THROW(bad.validate(), PrivregError);
}

TEST(FilterStepTest, Singleton) {
  ClassEngine e(DiscreteClass(Domain::numbered(2), 4, {{2, 3}}));
  const FilteredSets fs = filter_step(e, default_schedule(0, 1));
  EXPECT_EQ(fs.d, 0);
  ASSERT_EQ(fs.levels.size(), 1u);
  ASSERT_EQ(fs.levels[0].size(), 1u);
  EXPECT_EQ(fs.levels[0][0], e.full());
  EXPECT_EQ(fs.rep.at(e.full()), e.full());
}

TEST(FilterStepTest, EveryRepresentativeIsFilteredAndIrreducible) {
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    properties::Filtered f = properties::random_filter(rng);
    ClassEngine& e = f.engine;
    for (const auto& [H, L] : f.fs.rep) {
      EXPECT_EQ(e.sfat2(H), e.sfat2(L));
      EXPECT_GE(e.level(L), f.schedule.ell_bar);
    }
    for (const auto& lv : f.fs.levels)
      for (const Mask& L : lv) EXPECT_EQ(f.fs.rep.at(L), L);
  }
}

TEST(SoaFilterTest, SingletonClass) {
  ClassEngine e(DiscreteClass(Domain::numbered(2), 4, {{2, 3}}));
  LadderSchedule s = default_schedule(0, 1);
  const RepSetResult near = soa_filter(e, {2, 3}, s);
  EXPECT_EQ(soas(e, near.members), (std::vector<Labels>{{2, 3}}));
  EXPECT_EQ(soa_filter(e, {1, 4}, s).members.size(), 1u);
  s.tau_max = 1;
  const RepSetResult far = soa_filter(e, {4, 3}, s);
  EXPECT_TRUE(far.members.empty());
  EXPECT_EQ(far.removed_far, 1u);
}

TEST(SoaFilterTest, LowLabelsOnOnePoint) {
  ClassEngine e(DiscreteClass(Domain::numbered(1), 4, {{1}, {2}}));
  const LadderSchedule s = default_schedule(0, 1);
  for (int y = 1; y <= 4; ++y) {
    const RepSetResult rs = soa_filter(e, {y}, s);
    EXPECT_EQ(soas(e, rs.members), (std::vector<Labels>{{1}})) << "y=" << y;
  }
}

TEST(SoaFilterTest, DimensionZeroOnThreeLabels) {
  ClassEngine e(DiscreteClass(Domain::numbered(1), 3, {{1}, {2}, {3}}));
  EXPECT_EQ(e.sfat2(e.full()), 1);
  ClassEngine z(DiscreteClass(Domain::numbered(1), 3, {{2}, {3}}));
  EXPECT_EQ(z.sfat2(z.full()), 0);
  const LadderSchedule s = default_schedule(0, 1);
  for (int y = 1; y <= 3; ++y) {
    const RepSetResult rs = soa_filter(z, {y}, s);
    ASSERT_EQ(rs.members.size(), 1u);
    EXPECT_EQ(z.soa(rs.members[0]), (Labels{2}));
  }
}

TEST(SoaFilterTest, Preconditions) {
  ClassEngine e(f_toy());
  LadderSchedule s = default_schedule(2, 1);
  EXPECT_THROW(soa_filter(e, {1}, s), PrivregError);
  EXPECT_THROW(soa_filter(e, {1, 5}, s), PrivregError);
  s.r_max = 2;
  try {
    soa_filter(e, {1, 1}, s);
    FAIL();
  } catch (const PrivregError& err) {
    EXPECT_EQ(err.kind(), ErrorKind::kConfig);
  }
  ClassEngine empty(DiscreteClass(Domain::numbered(2), 4, {}));
  EXPECT_THROW(soa_filter(empty, {1, 1}, default_schedule(0, 1)), PrivregError);
}

TEST(SoaFilterTest, SharedFilterStepDoesNotChangeOutput) {
  Rng rng(8);
  for (int i = 0; i < 60; ++i) {
    properties::FilterRun run = properties::random_soa_filter(rng);
    const RepSetResult fresh = soa_filter(run.f.engine, run.g_hat, run.f.schedule);
    EXPECT_EQ(fresh.members, run.rs.members);
    EXPECT_EQ(fresh.removed_far, run.rs.removed_far);
  }
}

void run_check(properties::Outcome (*check)(Rng&), std::uint64_t seed, int instances, int min_nonvacuous) {
  Rng rng(seed);
  int used = 0;
  for (int i = 0; i < instances; ++i) {
    const properties::Outcome o = check(rng);
    ASSERT_TRUE(o.ok) << o.reason;
    used += !o.vacuous;
  }
  EXPECT_GE(used, min_nonvacuous);
}

TEST(SoaFilterTest, QueuedClassesAreIrreducible) { run_check(properties::m_irred, 11, 150, 30); }
TEST(SoaFilterTest, QueuedRestrictionsAreShort) { run_check(properties::a_size, 12, 150, 30); }
TEST(SoaFilterTest, RepSetSizeAndCloseness) { run_check(properties::rep_size, 13, 150, 150); }

}  // namespace
}  // namespace privreg
