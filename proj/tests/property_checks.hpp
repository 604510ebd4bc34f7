// Randomized structural checks. Each call draws one instance and verifies
// one property exactly; instances where the hypotheses never apply are
// reported as vacuous.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "privreg/engine.hpp"
#include "privreg/oracles.hpp"
#include "privreg/reducing_tree.hpp"
#include "privreg/stability_filter.hpp"
#include "privreg/tree_learner.hpp"
#include "test_util.hpp"

namespace privreg::properties {

struct Outcome {
  bool ok = true;
  bool vacuous = false;
  std::string reason;
  static Outcome pass() { return {}; }
  static Outcome none() { return {true, true, ""}; }
  static Outcome fail(std::string why) { return {false, false, std::move(why)}; }
};

inline std::string show(const Labels& g) {
  std::string s = "(";
  for (std::size_t i = 0; i < g.size(); ++i) s += (i ? "," : "") + std::to_string(g[i]);
  return s + ")";
}

inline std::string show(const DiscreteClass& F) {
  std::string s = "K=" + std::to_string(F.K()) + " {";
  for (const auto& f : F.hypotheses()) s += show(f);
  return s + "}";
}

inline DiscreteClass small_class(Rng& rng, int max_points = 3, int max_K = 5, std::size_t max_size = 20) {
  const int n = 1 + rng.below(max_points);
  const int K = 3 + rng.below(max_K - 2);
  return testing::random_class(rng, n, K, max_size);
}

inline Mask random_submask(const Mask& m, Rng& rng) {
  Mask out(m.universe(), false);
  for (std::size_t i : m.members())
    if (rng.below(2)) out.set(i);
  if (out.none()) out.set(m.members()[rng.below(m.count())]);
  return out;
}

inline long long sat_sub(long long a, long long b) {
  if (a == kInfiniteLevel) return kInfiniteLevel;
  return a - b;
}

// At most two labels preserve sfat2 at any point, and they are adjacent.
inline Outcome consec_k(Rng& rng) {
  ClassEngine e(small_class(rng));
  bool any = false;
  for (const Mask& G : e.restriction_subclasses()) {
    if (e.level(G) < 1) continue;
    any = true;
    for (std::size_t x = 0; x < e.num_points(); ++x) {
      const auto ks = e.preserving_labels(G, static_cast<int>(x));
      if (ks.size() > 2 || (ks.size() == 2 && ks[1] != ks[0] + 1))
        return Outcome::fail("preserving labels not <=2 adjacent on " + show(e.materialize(G)));
    }
  }
  return any ? Outcome::pass() : Outcome::none();
}

// H subset of G with equal sfat2 and H irreducible: soa(H), soa(G) within 1.
inline Outcome soa_stability(Rng& rng) {
  ClassEngine e(small_class(rng));
  const auto& subs = e.restriction_subclasses();
  for (int attempt = 0; attempt < 20; ++attempt) {
    const Mask G = subs[rng.below(subs.size())];
    const Mask H = random_submask(G, rng);
    if (e.sfat2(H) != e.sfat2(G) || e.level(H) < 1) continue;
    if (e.level(G) < 1) return Outcome::fail("G not irreducible although H is: " + show(e.materialize(G)));
    if (sup_distance(e.soa(H), e.soa(G)) > 1)
      return Outcome::fail("soa(H)=" + show(e.soa(H)) + " soa(G)=" + show(e.soa(G)));
    return Outcome::pass();
  }
  return Outcome::none();
}

// H subset of G with equal sfat2: level(G) >= level(H).
inline Outcome irred_hg(Rng& rng) {
  ClassEngine e(small_class(rng));
  const auto& subs = e.restriction_subclasses();
  for (int attempt = 0; attempt < 20; ++attempt) {
    const Mask G = subs[rng.below(subs.size())];
    const Mask H = random_submask(G, rng);
    if (e.sfat2(H) != e.sfat2(G)) continue;
    if (e.level(G) < e.level(H))
      return Outcome::fail("level(G) < level(H) for G=" + show(e.materialize(G)) +
                           " H=" + show(e.materialize(H)));
    return Outcome::pass();
  }
  return Outcome::none();
}

// Restricting an l-irreducible G along l' points to soa(G) keeps sfat2 and
// leaves an (l - l')-irreducible class.
inline Outcome many_irred(Rng& rng) {
  ClassEngine e(small_class(rng));
  const auto& subs = e.restriction_subclasses();
  for (int attempt = 0; attempt < 20; ++attempt) {
    const Mask G = subs[rng.below(subs.size())];
    const long long L = e.level(G);
    if (L < 1) continue;
    const long long cap = std::min<long long>(L, static_cast<long long>(e.num_points()));
    const int lp = 1 + static_cast<int>(rng.below(cap));
    std::vector<int> pts(e.num_points());
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = static_cast<int>(i);
    for (std::size_t i = pts.size(); i > 1; --i) std::swap(pts[i - 1], pts[rng.below(i)]);
    const Labels g = e.soa(G);
    RestrictionSet a;
    for (int i = 0; i < lp; ++i) a.push_back({pts[i], g[pts[i]]});
    const Mask Gp = e.restrict(G, a);
    if (e.sfat2(Gp) != e.sfat2(G)) return Outcome::fail("sfat2 dropped on " + show(e.materialize(G)));
    if (e.level(Gp) < sat_sub(L, lp)) return Outcome::fail("irreducibility dropped too far on " + show(e.materialize(G)));
    return Outcome::pass();
  }
  return Outcome::none();
}

// sfat2 of {soa(G) : G a nonempty (d+1)-irreducible restriction subclass} is d.
inline Outcome irred_sfat_bound(Rng& rng) {
  const DiscreteClass F = small_class(rng, 3, 4, 10);
  ClassEngine e(F);
  const int d = e.sfat2(e.full());
  std::vector<Labels> soas;
  for (const Mask& G : e.restriction_subclasses())
    if (e.level(G) >= d + 1) soas.push_back(e.soa(G));
  const int got = sfat2(DiscreteClass(F.domain_ptr(), F.K(), soas));
  if (got != d) return Outcome::fail("soa class has sfat2 " + std::to_string(got) + " on " + show(F));
  return Outcome::pass();
}

// fat2 and sfat2 of the discretization at eta = 2/K never exceed the real
// dimensions at scale eta.
inline Outcome fat_disc(Rng& rng) {
  const int K = 3 + rng.below(6);
  const double eta = 2.0 / K;
  const RealClass H = testing::random_real_class(rng, 1 + rng.below(3), 10);
  const DiscreteClass F = discretize_class(H, eta);
  if (fat2(F) > fat_alpha(H, eta)) return Outcome::fail("fat2 exceeds fat_eta at K=" + std::to_string(K));
  if (sfat2(F) > sfat_alpha(H, eta)) return Outcome::fail("sfat2 exceeds sfat_eta at K=" + std::to_string(K));
  return Outcome::pass();
}

// K err_Q(h)/2 - 1 <= err of the discretizations <= K err_Q(h)/2 + 1.
inline Outcome disc_sandwich(Rng& rng) {
  const double eta = 0.05 + 0.9 * rng.uniform01();
  const int K = label_count(eta), n = 1 + rng.below(3);
  Values h(n);
  for (double& v : h) v = -1 + 2 * rng.uniform01();
  std::vector<Atom> atoms;
  double total = 0;
  for (int j = 0, m = 1 + rng.below(6); j < m; ++j) {
    atoms.push_back({static_cast<int>(rng.below(n)), -1 + 2 * rng.uniform01(), rng.uniform01() + 0.01});
    total += atoms.back().weight;
  }
  for (auto& a : atoms) a.weight /= total;
  const EmpiricalDistribution Q(n, 0, atoms);
  Labels g(n);
  for (int x = 0; x < n; ++x) g[x] = discretize_value(h[x], eta);
  const double disc = abs_error(g, discretize_distribution(Q, eta));
  const double scaled = K * abs_error(h, Q) / 2;
  if (disc < scaled - 1 - 1e-9 || disc > scaled + 1 + 1e-9)
    return Outcome::fail("sandwich violated at eta=" + std::to_string(eta));
  return Outcome::pass();
}

// Reducing trees built for random (H, x, y, ell) pass the validator,
// including the per-level leaf-count bound.
inline Outcome make_tree(Rng& rng) {
  ClassEngine e(small_class(rng));
  const auto& subs = e.restriction_subclasses();
  const Mask H = subs[rng.below(subs.size())];
  const int s = e.sfat2(H);
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t x = 0; x < e.num_points(); ++x)
    for (int y = 1; y <= e.K(); ++y)
      if (e.sfat2(e.restrict(H, static_cast<int>(x), y)) < s) pairs.push_back({static_cast<int>(x), y});
  if (pairs.empty()) return Outcome::none();
  const auto [x, y] = pairs[rng.below(pairs.size())];
  std::vector<long long> ell;
  long long v = 1;
  for (int t = 0; t <= s; ++t) {
    v += rng.below(2);
    ell.push_back(v);
  }
  const EllSequence seq(ell);
  const KaryTree tree = build_reducing_tree(e, H, x, y, seq);
  const Verdict ok = validate_reducing_tree(e, H, x, y, seq, tree);
  if (!ok.ok) return Outcome::fail(ok.reason + " on " + show(e.materialize(H)));
  return Outcome::pass();
}

struct TreeRun {
  ClassEngine engine;
  ReduceTreeParams params;
  ReduceTreeOutput out;
};

// One ReduceTreeReg run on a random class and dataset with alpha1 high
// enough that ERROR cannot occur.
inline TreeRun random_tree_run(Rng& rng) {
  const DiscreteClass F = small_class(rng, 3, 5, 10);
  ClassEngine e(F);
  std::vector<Sample> data;
  for (int i = 0, n = 5 + rng.below(20); i < n; ++i)
    data.push_back({static_cast<int>(rng.below(F.num_points())), 1.0 + rng.below(F.K())});
  const auto P = EmpiricalDistribution::from_samples(F.num_points(), F.K(), data);
  const auto errs = hypothesis_errors(e, P);
  const int d = e.sfat2(e.full());
  ReduceTreeParams p;
  p.alpha_delta = 0.25 + 2 * rng.uniform01();
  p.alpha1 = *std::min_element(errs.begin(), errs.end()) + (d + 1) * p.alpha_delta + rng.uniform01() * p.alpha_delta;
  p.ell_prime = 1 + rng.below(3);
  ReduceTreeOutput out = reduce_tree_reg(e, errs, p);
  return {std::move(e), p, std::move(out)};
}

// Output tree depth <= ell_{t_final+1} - ell_prime.
inline Outcome depth_ub(Rng& rng) {
  TreeRun run = random_tree_run(rng);
  if (run.out.error) return Outcome::fail("ERROR although alpha1 clears the minimum error");
  const long long bound = run.params.ell(run.out.t_final + 1) - run.params.ell_prime;
  if (output_tree_depth(run.out) > bound)
    return Outcome::fail("depth " + std::to_string(output_tree_depth(run.out)) + " > " + std::to_string(bound));
  return Outcome::pass();
}

// |S_hat| <= K^(ell_prime 2^(d+1)); every candidate is the soa of an
// ell_prime-irreducible nonempty class.
inline Outcome s_size(Rng& rng) {
  TreeRun run = random_tree_run(rng);
  if (run.out.error) return Outcome::fail("ERROR although alpha1 clears the minimum error");
  ClassEngine& e = run.engine;
  const int d = e.sfat2(e.full());
  const double log_bound = run.params.ell_prime * std::pow(2.0, d + 1) * std::log(double(e.K()));
  if (std::log(double(std::max<std::size_t>(1, run.out.candidates.size()))) > log_bound + 1e-9)
    return Outcome::fail("too many candidates");
  if (run.out.candidates.empty()) return Outcome::fail("empty candidate set");
  for (const Candidate& c : run.out.candidates) {
    if (c.defining.none()) return Outcome::fail("empty defining class");
    if (e.level(c.defining) < run.params.ell_prime) return Outcome::fail("defining class not ell'-irreducible");
    if (e.soa(c.defining) != c.g) return Outcome::fail("candidate is not the soa of its class");
  }
  return Outcome::pass();
}

struct Filtered {
  ClassEngine engine;
  LadderSchedule schedule;
  FilteredSets fs;
};

inline Filtered random_filter(Rng& rng, int min_d = 0) {
  DiscreteClass F = small_class(rng, 3, 4, 12);
  while (sfat2(F) < min_d) F = small_class(rng, 3, 4, 12);
  ClassEngine e(F);
  const LadderSchedule s = default_schedule(e.sfat2(e.full()), 1);
  FilteredSets fs = filter_step(e, s);
  return {std::move(e), s, std::move(fs)};
}

// soa(H) and soa(Rep(H)) within 1; Rep(H) sits in the level of H.
inline Outcome close_reps(Rng& rng) {
  Filtered f = random_filter(rng);
  ClassEngine& e = f.engine;
  for (const auto& [H, L] : f.fs.rep) {
    const int s = e.sfat2(H);
    const auto& lv = f.fs.levels.at(s);
    if (std::find(lv.begin(), lv.end(), L) == lv.end()) return Outcome::fail("Rep(H) outside its level");
    if (sup_distance(e.soa(H), e.soa(L)) > 1)
      return Outcome::fail("soa(H)=" + show(e.soa(H)) + " soa(Rep)=" + show(e.soa(L)));
  }
  return f.fs.rep.empty() ? Outcome::none() : Outcome::pass();
}

// Partial assignments over all points with at most `max_size` constraints.
inline std::vector<RestrictionSet> partial_assignments(std::size_t n, int K, long long max_size) {
  std::vector<RestrictionSet> out;
  std::vector<int> lab(n, 0);
  while (true) {
    RestrictionSet a;
    for (std::size_t x = 0; x < n; ++x)
      if (lab[x]) a.push_back({static_cast<int>(x), lab[x]});
    if (static_cast<long long>(a.size()) <= max_size) out.push_back(a);
    std::size_t i = 0;
    while (i < n && ++lab[i] > K) lab[i++] = 0;
    if (i == n) break;
  }
  return out;
}

inline bool agrees(const Labels& g, const RestrictionSet& a) {
  for (const auto& [x, y] : a)
    if (g[x] != y) return false;
  return true;
}

// For every qualifying a, at most one filtered L at the right level agrees
// with a through its soa.
inline Outcome at_most_one(Rng& rng) {
  Filtered f = random_filter(rng);
  ClassEngine& e = f.engine;
  const int d = f.fs.d;
  const Mask full = e.full();
  for (int r = 0; r <= f.schedule.r_max; ++r)
    for (int t = 0; t <= d; ++t) {
      const long long ell = f.schedule.ell(r, t);
      for (const RestrictionSet& a : partial_assignments(e.num_points(), e.K(), ell - 1)) {
        if (e.sfat2(e.restrict(full, a)) != d - t) continue;
        int hits = 0;
        for (const Mask& L : f.fs.levels[d - t])
          hits += e.level(L) >= ell && agrees(e.soa(L), a);
        if (hits > 1) return Outcome::fail("two filtered classes agree with one restriction");
      }
    }
  return Outcome::pass();
}

struct FilterRun {
  Filtered f;
  Labels g_hat;
  RepSetResult rs;
};

inline FilterRun random_soa_filter(Rng& rng) {
  Filtered f = random_filter(rng, 1);
  Labels g(f.engine.num_points());
  for (int& v : g) v = 1 + rng.below(f.engine.K());
  RepSetResult rs = soa_filter(f.engine, g, f.schedule, &f.fs);
  return {std::move(f), std::move(g), std::move(rs)};
}

// Every queued a has F|a ell_{r,t}-irreducible, t = d - sfat2(F|a).
inline Outcome m_irred(Rng& rng) {
  FilterRun run = random_soa_filter(rng);
  ClassEngine& e = run.f.engine;
  const int d = run.f.fs.d, r0 = run.f.schedule.r_max / (d + 1);
  for (const QueuedSet& q : run.rs.queued) {
    const Mask H = e.restrict(e.full(), q.a);
    const int r = run.f.schedule.r_max - q.j * r0 - 1;
    const int t = d - e.sfat2(H);
    if (e.level(H) < run.f.schedule.ell(r, t)) return Outcome::fail("queued class below its irreducibility budget");
  }
  return run.rs.queued.empty() ? Outcome::none() : Outcome::pass();
}

// Every queued a has |a| <= sum_{t' < t} ell_{r,t'}.
inline Outcome a_size(Rng& rng) {
  FilterRun run = random_soa_filter(rng);
  ClassEngine& e = run.f.engine;
  const int d = run.f.fs.d, r0 = run.f.schedule.r_max / (d + 1);
  for (const QueuedSet& q : run.rs.queued) {
    const int r = run.f.schedule.r_max - q.j * r0 - 1;
    const int t = d - e.sfat2(e.restrict(e.full(), q.a));
    long long bound = 0;
    for (int tp = 0; tp < t; ++tp) bound += run.f.schedule.ell(r, tp);
    if (static_cast<long long>(q.a.size()) > bound)
      return Outcome::fail("|a|=" + std::to_string(q.a.size()) + " > " + std::to_string(bound));
  }
  return run.rs.queued.empty() ? Outcome::none() : Outcome::pass();
}

// |R| <= K^(ell_bar (d+4)^d), members ell_bar-irreducible and tau_max-close.
inline Outcome rep_size(Rng& rng) {
  FilterRun run = random_soa_filter(rng);
  ClassEngine& e = run.f.engine;
  const int d = run.f.fs.d;
  const double log_bound = run.f.schedule.ell_bar * std::pow(d + 4.0, d) * std::log(double(e.K()));
  if (std::log(double(std::max<std::size_t>(1, run.rs.members.size()))) > log_bound + 1e-9)
    return Outcome::fail("RepSet larger than the size bound");
  for (const Mask& L : run.rs.members) {
    if (e.level(L) < run.f.schedule.ell_bar) return Outcome::fail("member not ell_bar-irreducible");
    if (sup_distance(e.soa(L), run.g_hat) > run.f.schedule.tau_max) return Outcome::fail("member too far");
  }
  return Outcome::pass();
}

struct Named {
  const char* name;
  std::function<Outcome(Rng&)> check;
};

inline std::vector<Named> all_checks() {
  return {{"consec-k", consec_k},         {"soa-stability", soa_stability},
          {"many-irred", many_irred},     {"irred-hg", irred_hg},
          {"irred-sfat-bound", irred_sfat_bound},
          {"fat-disc", fat_disc},         {"disc-cont-rel", disc_sandwich},
          {"make-tree", make_tree},       {"depth-ub", depth_ub},
          {"s-size", s_size},             {"close-reps", close_reps},
          {"at-most-one", at_most_one},   {"m-irred", m_irred},
          {"a-size", a_size},             {"rep-size", rep_size}};
}

}  // namespace privreg::properties
