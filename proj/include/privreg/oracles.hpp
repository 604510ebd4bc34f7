// Brute-force oracles for small instances: dimensions, irreducibility,
// restriction subclasses, reducing-tree validation and stability targets.
// Every oracle refuses inputs above its size cap.
#pragma once

#include <string>
#include <vector>

#include "privreg/dp.hpp"
#include "privreg/reducing_tree.hpp"
#include "privreg/stability_filter.hpp"
#include "privreg/tree_learner.hpp"

namespace privreg {

// Caps. Complete binary trees of depth 3 over 3 points number 3^7 = 2187;
// K-ary trees of depth <= 2 number 1 + |X|(1+|X|)^K <= 769 at |X|=3, K=4;
// restriction sets over X x [K] number 2^(|X| K) <= 4096.
struct OracleCaps {
  static constexpr std::size_t kMaxPoints = 3;
  static constexpr int kMaxLabels = 4;
  static constexpr int kMaxDepth = 3;
  static constexpr int kMaxIrredLevel = 2;
  // Weak-stability enumeration over partial assignments: (K+1)^|X|.
  static constexpr std::size_t kMaxWeakPoints = 3;
  static constexpr int kMaxWeakLabels = 6;
  static constexpr std::size_t kMaxStrongSubclasses = 20000;
};

// Largest depth <= depth_cap of a complete binary point-labeled tree that F
// shatters with gap 2, quantifying over every tree and every half-integer
// witness. With K <= 4 each point splits at most once per path, so the
// answer is exact whenever depth_cap >= |X|.
int sfat2_bruteforce(const DiscreteClass& F, int depth_cap = OracleCaps::kMaxDepth);

// Quantifies over every K-ary tree of depth <= l, partial shapes included.
bool irreducible_bruteforce(const DiscreteClass& F, int l);

// F|_S for every S subset of X x [K]; distinct, nonempty, canonical order.
std::vector<DiscreteClass> restriction_subclasses_bruteforce(const DiscreteClass& F);

struct Verdict {
  bool ok = true;
  std::string reason;
  static Verdict fail(std::string why) { return {false, std::move(why)}; }
};

// Checks the reducing-tree conditions and the per-level leaf-count bound.
Verdict validate_reducing_tree(ClassEngine& engine, const Mask& H, int x, int y,
                               const EllSequence& ell, const KaryTree& tree);

struct WeakStabilityTarget {
  std::vector<RestrictionSet> M;  // by size then lexicographic
  bool nonempty = false;
  RestrictionSet S_star;
  int q_star = -1;
  Labels sigma_star;
};

// Population errors `pop_errors` are in the engine's ambient order.
// Enumerates S with |S| <= ell_t - ell_prime, ell_t = ell_prime 2^t.
WeakStabilityTarget weak_stability_target(ClassEngine& engine,
                                          const std::vector<double>& pop_errors,
                                          double alpha, int t,
                                          const ReduceTreeParams& params);

struct StrongStabilityTarget {
  // mu[r][tau] for r in 0..r_max, tau in 0..(2+2 chi)(d+1); -1 if undefined.
  std::vector<std::vector<int>> mu;
  int j_star = -1;
  int r_star = -1;
  int tau_star = -1;
  Mask H_star;
  Mask L_star;
};

// Requires G to be a nonempty restriction subclass that is
// ell(r_max, d)-irreducible; `fs` must come from filter_step(engine, schedule).
StrongStabilityTarget strong_stability_target(ClassEngine& engine, const Mask& G,
                                              const LadderSchedule& schedule,
                                              const FilteredSets& fs);

struct C1Calibration {
  std::size_t n = 0;
  std::vector<double> deviations;  // sorted
  double quantile = 0;
  double c1 = 1;
};

// Empirical (1-gamma)-quantile of sup_f |err_P(f) - err_emp(f)| over
// datasets of size ceil(C0 K^2 (fat2(F) log K + log(1/gamma))) drawn from
// the finite-atom distribution P; c1 = max(1, quantile).
C1Calibration calibrate_c1(const DiscreteClass& F, const EmpiricalDistribution& P,
                           double C0, double gamma, std::size_t trials, Rng& rng);

struct OracleGridReport {
  std::size_t exhaustive_classes = 0;
  std::size_t random_classes = 0;
  std::size_t sfat_checks = 0;
  std::size_t irred_checks = 0;
  std::size_t subclass_checks = 0;
  std::size_t disagreements = 0;
  std::vector<std::string> examples;  // first few disagreements
};

// Exhaustive over every class with |X| <= 2, K <= 3, plus `random_classes`
// random classes with |X| = 3, K = 4 and 1..20 hypotheses; compares sfat2,
// l-irreducibility (l <= 2) and restriction subclasses with the oracles.
OracleGridReport run_oracle_grid(std::size_t random_classes, std::uint64_t seed);

}  // namespace privreg
