// sfat2, fat and sfat at real scales, and shattering certificates.
#include <gtest/gtest.h>

#include "privreg/engine.hpp"
#include "test_util.hpp"

namespace privreg {
namespace {

using testing::f_toy;

TEST(Sfat2, Conventions) {
  EXPECT_EQ(sfat2(DiscreteClass(Domain::numbered(2), 4, {})), -1);
  // Every labeling into {1,2} over three points.
  std::vector<Labels> low;
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b)
      for (int c = 1; c <= 2; ++c) low.push_back({a, b, c});
  EXPECT_EQ(sfat2(DiscreteClass(Domain::numbered(3), 4, low)), 0);
  EXPECT_EQ(sfat2(f_toy()), 2);
}

TEST(Sfat2, MonotoneUnderRestriction) {
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    const DiscreteClass F = testing::random_class(rng, 3, 4, 20);
    const int x = rng.below(3), k = 1 + rng.below(4);
    EXPECT_LE(sfat2(restrict(F, {{x, k}})), sfat2(F));
    std::vector<Labels> sub(F.hypotheses().begin(), F.hypotheses().begin() + (F.size() + 1) / 2);
    EXPECT_LE(sfat2(DiscreteClass(F.domain_ptr(), 4, sub)), sfat2(F));
    EXPECT_GE(sfat2(F), 0);
  }
}

TEST(FatAlpha, Examples) {
  const auto d1 = Domain::numbered(1);
  EXPECT_EQ(fat_alpha(RealClass(d1, {{0}}), 0.5), 0);
  EXPECT_EQ(fat_alpha(RealClass(d1, {{-1}, {1}}), 0.5), 1);
  EXPECT_EQ(fat_alpha(RealClass(d1, {}), 0.5), -1);
}

TEST(SfatAlpha, Examples) {
  const auto d2 = Domain::numbered(2);
  EXPECT_EQ(sfat_alpha(RealClass(d2, {{0.3, 0.1}}), 0.5), 0);
  EXPECT_EQ(sfat_alpha(RealClass(d2, {{-1, -1}, {-1, 1}, {1, -1}, {1, 1}}), 1), 2);
  EXPECT_EQ(sfat_alpha(RealClass(d2, {}), 1), -1);
}

TEST(SfatAlpha, MonotoneInScale) {
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const RealClass H = testing::random_real_class(rng, 3, 8);
    const double a = 0.05 + rng.uniform01(), b = a + rng.uniform01();
    EXPECT_GE(sfat_alpha(H, a), sfat_alpha(H, b));
    EXPECT_GE(fat_alpha(H, a), fat_alpha(H, b));
  }
}

TEST(FatDisc, InequalitiesAtExactScales) {
  Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    const int K = 3 + rng.below(6);
    const double eta = 2.0 / K;
    const RealClass H = testing::random_real_class(rng, 1 + rng.below(3), 10);
    const DiscreteClass F = discretize_class(H, eta);
    EXPECT_LE(fat2(F), fat_alpha(H, eta));
    EXPECT_LE(sfat2(F), sfat_alpha(H, eta));
  }
}

// With 2/eta non-integer, labels two buckets apart can sit closer than eta.
TEST(FatDisc, FailsWhenTwoOverEtaIsFractional) {
  const double eta = 0.3;  // K = 7, bucket width 2/7 < eta
  const RealClass H(Domain::numbered(1), {{-1 + 2.0 / 7 - 1e-6}, {-1 + 4.0 / 7}});
  const DiscreteClass F = discretize_class(H, eta);
  EXPECT_EQ(F.K(), 7);
  EXPECT_EQ(F.hypotheses(), (std::vector<Labels>{{1}, {3}}));
  EXPECT_EQ(sfat2(F), 1);
  EXPECT_EQ(sfat_alpha(H, eta), 0);
}

TEST(Certificate, Toy) {
  const DiscreteClass F = f_toy();
  const ShatteringCertificate c = extract_sfat_certificate(F);
  EXPECT_EQ(c.depth, 2);
  ASSERT_EQ(c.points.size(), 3u);
  EXPECT_EQ(c.points[0], 0);
  EXPECT_DOUBLE_EQ(c.witness[0], 2.0);
  EXPECT_TRUE(verify_certificate(F, c));
  ShatteringCertificate shifted = c;
  for (double& s : shifted.witness) s += 3;
  EXPECT_FALSE(verify_certificate(F, shifted));
  EXPECT_FALSE(verify_certificate(DiscreteClass(Domain::numbered(2), 4, {}), c));
}

TEST(Certificate, RefusesDimensionZero) {
  const DiscreteClass F(Domain::numbered(2), 4, {{1, 1}, {2, 2}});
  EXPECT_THROW(extract_sfat_certificate(F), PrivregError);
}

TEST(Certificate, ShapeMismatchIsFormatError) {
  ShatteringCertificate c = extract_sfat_certificate(f_toy());
  c.witness.pop_back();
  try {
    verify_certificate(f_toy(), c);
    FAIL();
  } catch (const PrivregError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
  }
}

TEST(Certificate, DepthEqualsSfat2) {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const DiscreteClass F = testing::random_class(rng, 3, 5, 20);
    if (sfat2(F) < 1) continue;
    const ShatteringCertificate c = extract_sfat_certificate(F);
    EXPECT_EQ(c.depth, sfat2(F));
    EXPECT_TRUE(verify_certificate(F, c));
  }
}

}  // namespace
}  // namespace privreg
