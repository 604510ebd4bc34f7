// Brute-force oracle implementations.
#include "privreg/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace privreg {

namespace {

void refuse_if(bool cond, const std::string& what) {
  if (cond) throw PrivregError(ErrorKind::kRefusal, "oracle instance too large: " + what);
}

// Whether the subtree at heap node `node` with `depth_left` levels is
// shattered by some witness, given the hypotheses still consistent.
bool shattered(const std::vector<Labels>& hyps, const std::vector<int>& points, int K,
               std::size_t node, int depth_left, const std::vector<int>& members) {
  if (depth_left == 0) return !members.empty();
  const int x = points[node];
  // Witness s = s2 / 2 over the half-integer grid [1, K].
  for (int s2 = 2; s2 <= 2 * K; ++s2) {
    std::vector<int> upper, lower;
    for (int i : members) {
      const int f2 = 2 * hyps[i][x];
      if (f2 - s2 >= 2) upper.push_back(i);
      if (s2 - f2 >= 2) lower.push_back(i);
    }
    if (upper.empty() || lower.empty()) continue;
    if (shattered(hyps, points, K, 2 * node + 1, depth_left - 1, upper) &&
        shattered(hyps, points, K, 2 * node + 2, depth_left - 1, lower))
      return true;
  }
  return false;
}

struct KTree {
  int point = -1;
  std::vector<KTree> kids;
};

std::vector<KTree> all_trees(int depth, int num_points, int K) {
  std::vector<KTree> out{KTree{}};
  if (depth == 0) return out;
  const std::vector<KTree> sub = all_trees(depth - 1, num_points, K);
  for (int x = 0; x < num_points; ++x) {
    std::vector<std::size_t> idx(K, 0);
    while (true) {
      KTree t;
      t.point = x;
      for (int k = 0; k < K; ++k) t.kids.push_back(sub[idx[k]]);
      out.push_back(std::move(t));
      int k = K - 1;
      while (k >= 0 && ++idx[k] == sub.size()) idx[k--] = 0;
      if (k < 0) break;
    }
  }
  return out;
}

std::vector<Labels> restrict_list(const std::vector<Labels>& hyps, const RestrictionSet& a) {
  std::vector<Labels> out;
  for (const auto& f : hyps) {
    bool keep = true;
    for (const auto& [x, k] : a)
      if (f[x] != k) keep = false;
    if (keep) out.push_back(f);
  }
  return out;
}

class BruteSfat {
 public:
  BruteSfat(DomainPtr dom, int K) : dom_(std::move(dom)), K_(K) {}
  int operator()(const std::vector<Labels>& hyps) {
    auto it = memo_.find(hyps);
    if (it != memo_.end()) return it->second;
    const int v = sfat2_bruteforce(DiscreteClass(dom_, K_, hyps));
    memo_.emplace(hyps, v);
    return v;
  }

 private:
  DomainPtr dom_;
  int K_;
  std::map<std::vector<Labels>, int> memo_;
};

// True when every leaf of `t` lowers sfat2 below `target`.
bool all_leaves_drop(const KTree& t, const std::vector<Labels>& hyps, RestrictionSet& path,
                     int target, BruteSfat& sfat) {
  if (t.point < 0) return sfat(restrict_list(hyps, path)) < target;
  for (std::size_t k = 0; k < t.kids.size(); ++k) {
    path.emplace_back(t.point, static_cast<int>(k) + 1);
    const bool drop = all_leaves_drop(t.kids[k], hyps, path, target, sfat);
    path.pop_back();
    if (!drop) return false;
  }
  return true;
}

bool log_leq_pow(std::size_t count, int K, long long exponent) {
  if (count <= 1) return true;
  if (K <= 1) return false;
  return std::log(static_cast<double>(count)) <=
         static_cast<double>(exponent) * std::log(static_cast<double>(K)) + 1e-9;
}

}  // namespace

int sfat2_bruteforce(const DiscreteClass& F, int depth_cap) {
  refuse_if(F.num_points() > OracleCaps::kMaxPoints, "|X| > 3");
  refuse_if(F.K() > OracleCaps::kMaxLabels, "K > 4");
  refuse_if(depth_cap < 0 || depth_cap > OracleCaps::kMaxDepth, "depth cap outside 0..3");
  if (F.empty()) return -1;
  const int n = static_cast<int>(F.num_points());
  std::vector<int> all(F.size());
  for (std::size_t i = 0; i < F.size(); ++i) all[i] = static_cast<int>(i);
  int best = 0;
  for (int D = 1; D <= depth_cap; ++D) {
    const std::size_t internal = (std::size_t{1} << D) - 1;
    std::vector<int> points(internal, 0);
    bool found = false;
    while (!found) {
      found = shattered(F.hypotheses(), points, F.K(), 0, D, all);
      std::size_t i = 0;
      while (i < internal && ++points[i] == n) points[i++] = 0;
      if (i == internal) break;
    }
    if (!found) break;
    best = D;
  }
  return best;
}

bool irreducible_bruteforce(const DiscreteClass& F, int l) {
  refuse_if(F.num_points() > OracleCaps::kMaxPoints, "|X| > 3");
  refuse_if(F.K() > OracleCaps::kMaxLabels, "K > 4");
  refuse_if(l < 0 || l > OracleCaps::kMaxIrredLevel, "l outside 0..2");
  if (l == 0 || F.empty()) return true;
  BruteSfat sfat(F.domain_ptr(), F.K());
  const int d = sfat(F.hypotheses());
  for (const KTree& t : all_trees(l, static_cast<int>(F.num_points()), F.K())) {
    RestrictionSet path;
    if (all_leaves_drop(t, F.hypotheses(), path, d, sfat)) return false;
  }
  return true;
}

std::vector<DiscreteClass> restriction_subclasses_bruteforce(const DiscreteClass& F) {
  refuse_if(F.num_points() > OracleCaps::kMaxPoints, "|X| > 3");
  refuse_if(F.K() > OracleCaps::kMaxLabels, "K > 4");
  const int n = static_cast<int>(F.num_points()), K = F.K();
  const int bits = n * K;
  std::set<std::vector<Labels>> seen;
  for (std::uint64_t S = 0; S < (std::uint64_t{1} << bits); ++S) {
    RestrictionSet a;
    for (int b = 0; b < bits; ++b)
      if (S >> b & 1) a.emplace_back(b / K, b % K + 1);
    auto sub = restrict_list(F.hypotheses(), a);
    if (!sub.empty()) seen.insert(std::move(sub));
  }
  std::vector<std::vector<Labels>> lists(seen.begin(), seen.end());
  std::stable_sort(lists.begin(), lists.end(), [](const auto& a, const auto& b) {
    return a.size() > b.size();
  });
  std::vector<DiscreteClass> out;
  for (auto& l : lists) out.emplace_back(F.domain_ptr(), K, std::move(l));
  return out;
}

Verdict validate_reducing_tree(ClassEngine& engine, const Mask& H, int x, int y,
                               const EllSequence& ell, const KaryTree& tree) {
  const int d = engine.sfat2(H);
  if (!tree.is_augmented()) return Verdict::fail("tree is not augmented");
  if (tree.K() != engine.K()) return Verdict::fail("arity differs from K");
  const TreeNode& root = tree.node(0);
  if (root.point != x || root.children.size() != 1 || tree.node(root.children[0]).edge != y)
    return Verdict::fail("root pair differs from (x, y)");
  if (engine.sfat2(engine.restrict(H, x, y)) >= d)
    return Verdict::fail("root pair does not reduce sfat2");
  if (tree.depth() < 1) return Verdict::fail("depth below 1");
  std::vector<std::size_t> per_level(d + 2, 0);
  for (int v : tree.leaves()) {
    const Mask C = engine.restrict(H, tree.ancestors(v));
    const int s = engine.sfat2(C);
    const int t = d - s;
    if (C.any() && engine.level(C) < ell.at(t))
      return Verdict::fail("leaf " + std::to_string(v) + " is not irreducible at its budget");
    if (tree.node(v).depth > ell.prefix(t))
      return Verdict::fail("leaf " + std::to_string(v) + " is too deep");
    for (int tt = 1; tt < t; ++tt) {
      bool found = false;
      for (int u = v; u >= 0 && !found; u = tree.node(u).parent) {
        const int su = engine.sfat2(engine.restrict(H, tree.ancestors(u)));
        found = su <= d - tt && tree.node(u).depth <= ell.prefix(tt);
      }
      if (!found)
        return Verdict::fail("leaf " + std::to_string(v) + " lacks an ancestor for level " +
                             std::to_string(tt));
    }
    if (t >= 1 && t <= d) ++per_level[t];
  }
  for (int t = 1; t <= d; ++t)
    if (!log_leq_pow(per_level[t], engine.K(), ell.prefix(t)))
      return Verdict::fail("too many leaves at level " + std::to_string(t));
  return {};
}

WeakStabilityTarget weak_stability_target(ClassEngine& engine,
                                          const std::vector<double>& pop_errors,
                                          double alpha, int t,
                                          const ReduceTreeParams& params) {
  refuse_if(engine.num_points() > OracleCaps::kMaxWeakPoints, "|X| > 3");
  refuse_if(engine.K() > OracleCaps::kMaxWeakLabels, "K > 6");
  if (pop_errors.size() != engine.num_hypotheses())
    throw PrivregError(ErrorKind::kDomain, "one error per hypothesis required");
  const Mask lo = low_error_mask(pop_errors, alpha - params.alpha_delta / 3);
  const Mask mid = low_error_mask(pop_errors, alpha);
  const Mask hi = low_error_mask(pop_errors, alpha + params.alpha_delta / 3);
  const long long ell_t = params.ell(t);
  const long long budget = ell_t - params.ell_prime;

  // Partial assignments X -> {0 (free), 1..K} with at most `budget` entries.
  const int n = static_cast<int>(engine.num_points()), K = engine.K();
  std::vector<RestrictionSet> candidates;
  std::vector<int> code(n, 0);
  while (true) {
    RestrictionSet S;
    for (int x = 0; x < n; ++x)
      if (code[x]) S.emplace_back(x, code[x]);
    if (static_cast<long long>(S.size()) <= budget) candidates.push_back(S);
    int x = n - 1;
    while (x >= 0 && ++code[x] == K + 1) code[x--] = 0;
    if (x < 0) break;
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });

  WeakStabilityTarget out;
  for (const auto& S : candidates) {
    const Mask L = engine.restrict(lo, S);
    if (L.none() || engine.level(L) < ell_t) continue;
    if (engine.sfat2(L) != engine.sfat2(engine.restrict(hi, S))) continue;
    out.M.push_back(S);
    const int q = engine.sfat2(engine.restrict(mid, S));
    if (q > out.q_star) {
      out.q_star = q;
      out.S_star = S;
    }
  }
  out.nonempty = !out.M.empty();
  if (out.nonempty) out.sigma_star = engine.soa(engine.restrict(mid, out.S_star));
  return out;
}

StrongStabilityTarget strong_stability_target(ClassEngine& engine, const Mask& G,
                                              const LadderSchedule& schedule,
                                              const FilteredSets& fs) {
  schedule.validate();
  const auto& subs = engine.restriction_subclasses();
  refuse_if(subs.size() > OracleCaps::kMaxStrongSubclasses, "too many restriction subclasses");
  const int d = engine.sfat2(engine.full());
  if (fs.d != d) throw PrivregError(ErrorKind::kPrecondition, "filtered sets belong to another class");
  if (G.none() || engine.min_constraints(G) < 0)
    throw PrivregError(ErrorKind::kPrecondition, "G must be a nonempty restriction subclass");
  if (engine.level(G) < schedule.ell(schedule.r_max, d))
    throw PrivregError(ErrorKind::kPrecondition, "G is not irreducible enough");
  if (schedule.r_max < d + 1)
    throw PrivregError(ErrorKind::kPrecondition, "r_max must be at least sfat2 + 1");

  const int B = 2 + 2 * schedule.chi;
  const int tau_hi = B * (d + 1);
  const Labels gG = engine.soa(G);
  struct Row {
    Mask H;
    int s;
    long long level;
    int dist;
  };
  std::vector<Row> rows;
  for (const Mask& H : subs) {
    const long long lv = engine.level(H);
    if (lv < 1) continue;
    rows.push_back({H, engine.sfat2(H), lv, sup_distance(engine.soa(H), gG)});
  }
  auto qualifies = [&](const Row& row, int r, int tau) {
    return row.level >= schedule.ell(r, d - row.s) && row.dist <= tau;
  };

  StrongStabilityTarget out;
  out.mu.assign(schedule.r_max + 1, std::vector<int>(tau_hi + 1, -1));
  for (int r = 0; r <= schedule.r_max; ++r)
    for (int tau = 0; tau <= tau_hi; ++tau)
      for (const Row& row : rows)
        if (qualifies(row, r, tau)) out.mu[r][tau] = std::max(out.mu[r][tau], row.s);

  for (int j = 0; j <= d && out.j_star < 0; ++j)
    if (out.mu[schedule.r_max - j][B * j] == out.mu[schedule.r_max - j - 1][B * (j + 1)])
      out.j_star = j;
  if (out.j_star < 0) throw std::logic_error("no stable pair in the mu table");
  out.r_star = schedule.r_max - out.j_star;
  out.tau_star = B * out.j_star;
  const int target = out.mu[out.r_star][out.tau_star];
  for (const Row& row : rows) {
    if (row.s == target && qualifies(row, out.r_star, out.tau_star)) {
      out.H_star = row.H;
      break;
    }
  }
  auto it = fs.rep.find(out.H_star);
  if (it == fs.rep.end()) throw std::logic_error("H* was not processed by filter_step");
  out.L_star = it->second;
  return out;
}

C1Calibration calibrate_c1(const DiscreteClass& F, const EmpiricalDistribution& P,
                           double C0, double gamma, std::size_t trials, Rng& rng) {
  if (F.empty()) throw PrivregError(ErrorKind::kPrecondition, "empty class");
  if (!(gamma > 0 && gamma < 0.5)) throw PrivregError(ErrorKind::kDomain, "gamma must lie in (0, 1/2)");
  if (trials < 1) throw PrivregError(ErrorKind::kDomain, "trials must be >= 1");
  const double K = F.K();
  C1Calibration out;
  out.n = static_cast<std::size_t>(
      std::ceil(C0 * K * K * (fat2(F) * std::log(K) + std::log(1.0 / gamma))));
  out.n = std::max<std::size_t>(out.n, 1);
  std::vector<double> pop;
  for (const auto& f : F.hypotheses()) pop.push_back(abs_error(f, P));
  for (std::size_t i = 0; i < trials; ++i) {
    std::vector<Sample> data;
    data.reserve(out.n);
    for (std::size_t j = 0; j < out.n; ++j) data.push_back(sample_atom(P, rng));
    const auto emp = EmpiricalDistribution::from_samples(P.num_points(), P.K(), data);
    double dev = 0;
    for (std::size_t h = 0; h < F.size(); ++h)
      dev = std::max(dev, std::abs(pop[h] - abs_error(F[h], emp)));
    out.deviations.push_back(dev);
  }
  std::sort(out.deviations.begin(), out.deviations.end());
  const auto idx = static_cast<std::size_t>(std::ceil((1.0 - gamma) * trials));
  out.quantile = out.deviations[std::min(trials, std::max<std::size_t>(idx, 1)) - 1];
  out.c1 = std::max(1.0, out.quantile);
  return out;
}

namespace {

void compare_class(const DiscreteClass& F, OracleGridReport& rep) {
  auto note = [&](const std::string& what) {
    ++rep.disagreements;
    if (rep.examples.size() < 10) {
      std::string s = what + " on {";
      for (const auto& f : F.hypotheses()) {
        s += "(";
        for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + std::to_string(f[i]);
        s += ")";
      }
      rep.examples.push_back(s + "} K=" + std::to_string(F.K()));
    }
  };
  ++rep.sfat_checks;
  if (sfat2(F) != sfat2_bruteforce(F)) note("sfat2");
  for (int l = 0; l <= OracleCaps::kMaxIrredLevel; ++l) {
    ++rep.irred_checks;
    if (is_l_irreducible(F, l) != irreducible_bruteforce(F, l)) note("irreducible l=" + std::to_string(l));
  }
  ++rep.subclass_checks;
  std::set<std::vector<Labels>> a, b;
  for (const auto& c : enumerate_restriction_subclasses(F)) a.insert(c.hypotheses());
  for (const auto& c : restriction_subclasses_bruteforce(F)) b.insert(c.hypotheses());
  if (a != b) note("restriction subclasses");
}

std::vector<Labels> all_functions(int n, int K) {
  std::vector<Labels> out;
  Labels f(n, 1);
  while (true) {
    out.push_back(f);
    int i = n - 1;
    while (i >= 0 && ++f[i] > K) f[i--] = 1;
    if (i < 0) break;
  }
  return out;
}

}  // namespace

OracleGridReport run_oracle_grid(std::size_t random_classes, std::uint64_t seed) {
  OracleGridReport rep;
  for (int n = 1; n <= 2; ++n) {
    const DomainPtr dom = Domain::numbered(n);
    for (int K = 1; K <= 3; ++K) {
      const auto fns = all_functions(n, K);
      for (std::uint64_t S = 0; S < (std::uint64_t{1} << fns.size()); ++S) {
        std::vector<Labels> hyps;
        for (std::size_t i = 0; i < fns.size(); ++i)
          if (S >> i & 1) hyps.push_back(fns[i]);
        compare_class(DiscreteClass(dom, K, std::move(hyps)), rep);
        ++rep.exhaustive_classes;
      }
    }
  }
  Rng rng(seed);
  const DomainPtr dom = Domain::numbered(3);
  const auto fns = all_functions(3, 4);
  for (std::size_t c = 0; c < random_classes; ++c) {
    const std::size_t size = 1 + rng.below(20);
    std::vector<Labels> hyps;
    for (std::size_t i = 0; i < size; ++i) hyps.push_back(fns[rng.below(fns.size())]);
    compare_class(DiscreteClass(dom, 4, std::move(hyps)), rep);
    ++rep.random_classes;
  }
  return rep;
}

}  // namespace privreg
