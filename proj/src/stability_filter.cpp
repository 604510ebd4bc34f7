// FilterStep and SOAFilter implementation.
#include "privreg/stability_filter.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <unordered_set>

namespace privreg {

namespace {

constexpr long long kSaturate = std::numeric_limits<long long>::max() / 4;

long long sat_mul(long long a, long long b) {
  if (a == 0 || b == 0) return 0;
  return a > kSaturate / b ? kSaturate : a * b;
}

// Subsets of `items` with at most max_size elements, by size then
// lexicographically; stops when `visit` returns true.
template <typename Visit>
bool for_each_subset(const RestrictionSet& items, long long max_size, Visit visit) {
  const int n = static_cast<int>(items.size());
  const int cap = static_cast<int>(std::min<long long>(max_size, n));
  for (int size = 0; size <= cap; ++size) {
    std::vector<int> idx(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      RestrictionSet a;
      for (int i : idx) a.push_back(items[i]);
      if (visit(a)) return true;
      int i = size - 1;
      while (i >= 0 && idx[i] == n - size + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int k = i + 1; k < size; ++k) idx[k] = idx[k - 1] + 1;
    }
  }
  return false;
}

bool agrees(const Labels& g, const RestrictionSet& a) {
  for (const auto& [x, y] : a)
    if (g[x] != y) return false;
  return true;
}

}  // namespace

long long LadderSchedule::ell(int r, int t) const {
  long long v = ell_bar;
  for (int i = 0; i < t; ++i) v = sat_mul(v, r + 2);
  return v;
}

EllSequence LadderSchedule::sequence(int r, int t_offset, int d) const {
  std::vector<long long> vals;
  for (int q = 0; q <= d - t_offset + 1; ++q) vals.push_back(ell(r, t_offset + q));
  return EllSequence(std::move(vals));
}

void LadderSchedule::validate() const {
  if (ell_bar < 1) throw PrivregError(ErrorKind::kConfig, "ell_bar must be >= 1");
  if (r_max < 1) throw PrivregError(ErrorKind::kConfig, "r_max must be >= 1");
  if (tau_max < 1) throw PrivregError(ErrorKind::kConfig, "tau_max must be >= 1");
  if (chi < 1) throw PrivregError(ErrorKind::kConfig, "chi must be >= 1");
}

LadderSchedule default_schedule(int d, long long ell_bar, int chi) {
  LadderSchedule s;
  s.ell_bar = ell_bar;
  s.r_max = d + 1;
  s.tau_max = 12 * (d + 1);
  s.chi = chi;
  return s;
}

FilteredSets filter_step(ClassEngine& engine, const LadderSchedule& schedule) {
  schedule.validate();
  FilteredSets out;
  const Mask full = engine.full();
  out.d = engine.sfat2(full);
  if (out.d < 0) return out;
  const int d = out.d;
  out.levels.assign(d + 1, {});
  const auto& subs = engine.restriction_subclasses();
  for (int t = 0; t <= d; ++t) {
    for (int r = schedule.r_max; r >= 0; --r) {
      const long long ell = schedule.ell(r, t);
      for (const Mask& H : subs) {
        if (engine.sfat2(H) != d - t) continue;
        const long long lv = engine.level(H);
        if (lv < ell) continue;
        if (r < schedule.r_max && lv >= schedule.ell(r + 1, t)) continue;
        const Labels gH = engine.soa(H);
        std::optional<Mask> found;
        for (const Mask& L : out.levels[d - t]) {
          const Labels gL = engine.soa(L);
          RestrictionSet agreement;
          for (std::size_t x = 0; x < gH.size(); ++x)
            if (gL[x] == gH[x]) agreement.emplace_back(static_cast<int>(x), gH[x]);
          const bool hit = for_each_subset(agreement, ell - 1, [&](const RestrictionSet& a) {
            return engine.sfat2(engine.restrict(full, a)) == d - t;
          });
          if (hit) {
            found = L;
            break;
          }
        }
        if (found) {
          out.rep.insert_or_assign(H, *found);
        } else {
          out.levels[d - t].push_back(H);
          out.rep.insert_or_assign(H, H);
        }
        out.processed.push_back({H, r, t});
      }
    }
  }
  return out;
}

RepSetResult soa_filter(ClassEngine& engine, const Labels& g_hat,
                        const LadderSchedule& schedule, const FilteredSets* shared) {
  schedule.validate();
  const Mask full = engine.full();
  const int d = engine.sfat2(full);
  if (d < 0) throw PrivregError(ErrorKind::kPrecondition, "SOAFilter needs a nonempty class");
  if (g_hat.size() != engine.num_points())
    throw PrivregError(ErrorKind::kDomain, "candidate length does not match domain");
  for (int v : g_hat)
    if (v < 1 || v > engine.K()) throw PrivregError(ErrorKind::kDomain, "candidate label outside 1..K");
  if (schedule.r_max % (d + 1) || schedule.tau_max % (d + 1))
    throw PrivregError(ErrorKind::kConfig, "r_max and tau_max must be multiples of sfat2+1");
  const int r0 = schedule.r_max / (d + 1), tau0 = schedule.tau_max / (d + 1);

  FilteredSets local;
  if (!shared) local = filter_step(engine, schedule);
  const FilteredSets& fs = shared ? *shared : local;
  if (fs.d != d) throw PrivregError(ErrorKind::kPrecondition, "filtered sets belong to another class");

  RepSetResult out;
  std::unordered_set<Mask, MaskHash> members;
  for (int j = 0; j <= d; ++j) {
    const int r = schedule.r_max - j * r0 - 1;
    const int tau = j * tau0 + 2 + schedule.chi;
    std::vector<std::vector<RestrictionSet>> Q(d + 2);
    std::vector<std::set<RestrictionSet>> seen(d + 2);
    Q[0].push_back({});
    for (int s = 0; s <= d; ++s) {
      for (std::size_t qi = 0; qi < Q[s].size(); ++qi) {
        const RestrictionSet a = Q[s][qi];
        const Mask H = engine.restrict(full, a);
        if (H.none()) continue;
        const int ta = d - engine.sfat2(H);
        const bool irreducible = engine.level(H) >= 1;
        Labels gH;
        if (irreducible) {
          gH = engine.soa(H);
          if (sup_distance(gH, g_hat) <= tau) {
            const long long ell = schedule.ell(r, ta);
            std::optional<Mask> pick;
            for (const Mask& L : fs.levels[d - ta]) {
              if (engine.level(L) < ell || !agrees(engine.soa(L), a)) continue;
              if (!pick || canonical_less(L, *pick)) pick = L;
            }
            if (pick) members.insert(*pick);
            continue;
          }
        }
        // Far branch. A class that is not 1-irreducible has no SOA; it
        // branches on the first point where every label lowers sfat2.
        int xa = -1;
        for (std::size_t x = 0; x < engine.num_points() && xa < 0; ++x) {
          if (irreducible) {
            if (std::abs(gH[x] - g_hat[x]) >= tau + 1) xa = static_cast<int>(x);
          } else if (engine.preserving_labels(H, static_cast<int>(x)).empty()) {
            xa = static_cast<int>(x);
          }
        }
        const int k = g_hat[xa];
        const EllSequence seq = schedule.sequence(r, ta, d);
        for (int y = std::max(k - tau + 1, 1); y <= std::min(k + tau - 1, engine.K()); ++y) {
          const KaryTree tree = build_reducing_tree(engine, H, xa, y, seq);
          ++out.reducing_trees;
          for (int v : tree.leaves()) {
            const RestrictionSet av = tree.ancestors(v);
            bool close = true;
            for (const auto& [x, yy] : av)
              if (std::abs(g_hat[x] - yy) > tau - 1) close = false;
            if (!close) continue;
            RestrictionSet b = merge(a, av);
            if (engine.restrict(full, b).none()) continue;
            if (seen[s + 1].insert(b).second) {
              Q[s + 1].push_back(b);
              out.queued.push_back({j, s + 1, b});
            }
          }
        }
      }
    }
  }
  for (const Mask& L : members) {
    if (sup_distance(engine.soa(L), g_hat) > schedule.tau_max) {
      ++out.removed_far;
      continue;
    }
    out.members.push_back(L);
  }
  std::sort(out.members.begin(), out.members.end(), canonical_less);
  return out;
}

}  // namespace privreg
