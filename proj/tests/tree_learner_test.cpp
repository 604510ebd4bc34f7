// ReduceTreeReg on hand-built and random instances.
#include <gtest/gtest.h>

#include "property_checks.hpp"
#include "privreg/tree_learner.hpp"

namespace privreg {
namespace {

using testing::f_toy;

EmpiricalDistribution point_mass(std::size_t n, int K, std::vector<Atom> atoms) {
  return EmpiricalDistribution(n, K, std::move(atoms));
}

TEST(ReduceTreeParamsTest, Ladder) {
  ReduceTreeParams p{3.0, 0.5, 2};
  EXPECT_DOUBLE_EQ(p.alpha(1), 3.0);
  EXPECT_DOUBLE_EQ(p.alpha(3), 2.0);
  EXPECT_EQ(p.ell(0), 2);
  EXPECT_EQ(p.ell(3), 16);
  EXPECT_NO_THROW(p.validate());
  EXPECT_THROW((ReduceTreeParams{1, 0, 1}.validate()), PrivregError);
  EXPECT_THROW((ReduceTreeParams{1, 1, 0}.validate()), PrivregError);
}

TEST(HypothesisErrors, Toy) {
  ClassEngine e(f_toy());
  const auto P = point_mass(2, 4, {{0, 1, 0.5}, {1, 3, 0.5}});
  const auto errs = hypothesis_errors(e, P);
  EXPECT_EQ(errs, (std::vector<double>{1, 0, 2, 1}));
  EXPECT_EQ(low_error_mask(errs, 1).members(), (std::vector<std::size_t>{0, 1, 3}));
}

TEST(ReduceTree, SingletonClass) {
  ClassEngine e(DiscreteClass(Domain::numbered(2), 4, {{2, 4}}));
  const auto P = point_mass(2, 4, {{0, 1, 1}});
  const ReduceTreeOutput out = reduce_tree_reg(e, P, {2.0, 1.0, 1});
  ASSERT_FALSE(out.error);
  EXPECT_EQ(out.d, 0);
  EXPECT_EQ(out.t_final, 0);
  EXPECT_EQ(output_tree_depth(out), 0);
  ASSERT_EQ(out.candidates.size(), 1u);
  EXPECT_EQ(out.candidates[0].g, (Labels{2, 4}));
}

TEST(ReduceTree, ErrorWhenThresholdBelowMinimum) {
  ClassEngine e(f_toy());
  const auto P = point_mass(2, 4, {{0, 4, 0.5}, {1, 4, 0.5}});
  const ReduceTreeOutput out = reduce_tree_reg(e, P, {0.5, 0.25, 1});
  EXPECT_TRUE(out.error);
  EXPECT_FALSE(out.error_reason.empty());
  EXPECT_TRUE(out.candidates.empty());
}

TEST(ReduceTree, ToyFindsTheMinimizer) {
  ClassEngine e(f_toy());
  const auto P = point_mass(2, 4, {{0, 3, 0.5}, {1, 1, 0.5}});
  const auto errs = hypothesis_errors(e, P);
  ReduceTreeParams p{0, 0.5, 1};
  p.alpha1 = 0 + 3 * p.alpha_delta + 0.1;
  const ReduceTreeOutput out = reduce_tree_reg(e, errs, p);
  ASSERT_FALSE(out.error);
  EXPECT_EQ(out.d, 2);
  bool has_best = false;
  for (const Candidate& c : out.candidates) has_best |= c.g == Labels{3, 1};
  EXPECT_TRUE(has_best);
  EXPECT_LE(output_tree_depth(out), p.ell(out.t_final + 1) - p.ell_prime);
}

TEST(ReduceTree, DeterministicForFixedInput) {
  Rng a(9), b(9);
  const properties::TreeRun r1 = properties::random_tree_run(a);
  const properties::TreeRun r2 = properties::random_tree_run(b);
  EXPECT_EQ(r1.out.tree, r2.out.tree);
  ASSERT_EQ(r1.out.candidates.size(), r2.out.candidates.size());
  for (std::size_t i = 0; i < r1.out.candidates.size(); ++i)
    EXPECT_EQ(r1.out.candidates[i].g, r2.out.candidates[i].g);
}

TEST(ReduceTree, DepthBoundOnRandomInstances) {
  Rng rng(44);
  for (int i = 0; i < 300; ++i) {
    const properties::Outcome o = properties::depth_ub(rng);
    ASSERT_TRUE(o.ok) << o.reason;
  }
}

TEST(ReduceTree, CandidateSetOnRandomInstances) {
  Rng rng(45);
  for (int i = 0; i < 300; ++i) {
    const properties::Outcome o = properties::s_size(rng);
    ASSERT_TRUE(o.ok) << o.reason;
  }
}

}  // namespace
}  // namespace privreg
