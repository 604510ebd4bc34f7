// sfat2, irreducibility levels, SOA hypotheses, witness trees and shattering
// certificates over masks of an ambient class.
#include "privreg/engine.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <functional>
#include <map>
#include <unordered_set>

namespace privreg {

namespace {

constexpr double kMarginTol = 1e-12;

[[noreturn]] void precondition(const std::string& msg) {
  throw PrivregError(ErrorKind::kPrecondition, msg);
}

int log2_floor(std::size_t n) {
  return n == 0 ? -1 : static_cast<int>(std::bit_width(n)) - 1;
}

}  // namespace

ClassEngine::ClassEngine(DiscreteClass F) : F_(std::move(F)) {
  const int K = F_.K();
  const std::size_t n = F_.size(), X = F_.num_points();
  eq_.assign(X * (K + 1), Mask(n));
  ge_.assign(X * (K + 2), Mask(n));
  le_.assign(X * (K + 2), Mask(n));
  for (std::size_t x = 0; x < X; ++x) {
    for (std::size_t i = 0; i < n; ++i) eq_[x * (K + 1) + F_[i][x]].set(i);
    for (int k = 0; k <= K + 1; ++k)
      for (std::size_t i = 0; i < n; ++i) {
        if (F_[i][x] >= k) ge_[x * (K + 2) + k].set(i);
        if (F_[i][x] <= k) le_[x * (K + 2) + k].set(i);
      }
  }
}

Mask ClassEngine::restrict(const Mask& m, const RestrictionSet& a) const {
  Mask out = m;
  for (const auto& [x, k] : a) {
    if (x < 0 || static_cast<std::size_t>(x) >= num_points() || k < 1 || k > K())
      throw PrivregError(ErrorKind::kDomain, "restriction outside domain or labels");
    out = out & eq(x, k);
  }
  return out;
}

Mask ClassEngine::mask_of(const DiscreteClass& sub) const {
  Mask m = none();
  for (const auto& h : sub.hypotheses()) {
    auto it = std::lower_bound(F_.hypotheses().begin(), F_.hypotheses().end(), h);
    if (it == F_.hypotheses().end() || *it != h)
      precondition("class is not a subclass of the ambient class");
    m.set(static_cast<std::size_t>(it - F_.hypotheses().begin()));
  }
  return m;
}

DiscreteClass ClassEngine::materialize(const Mask& m) const {
  std::vector<Labels> hyps;
  for (auto i : m.members()) hyps.push_back(F_[i]);
  return DiscreteClass(F_.domain_ptr(), K(), std::move(hyps));
}

std::vector<int> ClassEngine::values_at(const Mask& m, int x) const {
  std::vector<int> out;
  for (int k = 1; k <= K(); ++k)
    if ((m & eq(x, k)).any()) out.push_back(k);
  return out;
}

bool ClassEngine::constant_at(const Mask& m, int x) const {
  return values_at(m, x).size() <= 1;
}

int ClassEngine::sfat2(const Mask& m) {
  if (m.none()) return -1;
  if (auto it = sfat_memo_.find(m); it != sfat_memo_.end()) return it->second;
  const int cap = log2_floor(m.count());
  int best = 0;
  for (std::size_t x = 0; x < num_points() && best < cap; ++x)
    for (int s = 2; s <= K() - 1 && best < cap; ++s) {
      Mask up = m & ge(static_cast<int>(x), s + 1);
      if (up.none()) break;
      Mask lo = m & le(static_cast<int>(x), s - 1);
      if (lo.none()) continue;
      best = std::max(best, 1 + std::min(sfat2(up), sfat2(lo)));
    }
  sfat_memo_.emplace(m, best);
  return best;
}

long long ClassEngine::level(const Mask& m) {
  if (m.none()) return kInfiniteLevel;
  if (auto it = level_memo_.find(m); it != level_memo_.end()) return it->second;
  const int d = sfat2(m);
  long long result = kInfiniteLevel;
  if (d > 0) {
    // Points where m is constant only restate the condition on m itself, so
    // the recursion runs over strictly smaller classes.
    for (std::size_t xi = 0; xi < num_points() && result > 0; ++xi) {
      const int x = static_cast<int>(xi);
      if (constant_at(m, x)) continue;
      long long best = -1;
      for (int k : values_at(m, x)) {
        Mask c = restrict(m, x, k);
        if (sfat2(c) == d) best = std::max(best, level(c));
      }
      if (best < 0) {
        result = 0;
      } else if (best != kInfiniteLevel) {
        result = std::min(result, best + 1);
      }
    }
  }
  level_memo_.emplace(m, result);
  return result;
}

std::vector<int> ClassEngine::preserving_labels(const Mask& m, int x) {
  const int d = sfat2(m);
  std::vector<int> out;
  for (int k = 1; k <= K(); ++k)
    if (sfat2(restrict(m, x, k)) == d) out.push_back(k);
  return out;
}

Labels ClassEngine::soa(const Mask& m) {
  if (m.none()) precondition("soa of an empty class");
  if (level(m) < 1) precondition("soa requires a 1-irreducible class");
  Labels g(num_points());
  for (std::size_t xi = 0; xi < num_points(); ++xi) {
    const int x = static_cast<int>(xi);
    auto ks = preserving_labels(m, x);
    if (ks.empty() || ks.size() > 2 || (ks.size() == 2 && ks[1] != ks[0] + 1))
      throw std::logic_error("sfat-preserving labels are not 1 or 2 adjacent values");
    int k = ks[0];
    if (ks.size() == 2 && level(restrict(m, x, ks[1])) > level(restrict(m, x, ks[0])))
      k = ks[1];
    g[xi] = k;
  }
  return g;
}

std::optional<KaryTree> ClassEngine::reduction_witness_tree(const Mask& m, long long l) {
  if (l < 1) precondition("witness trees need l >= 1");
  if (level(m) >= l) return std::nullopt;
  const int d = sfat2(m);
  for (std::size_t xi = 0; xi < num_points(); ++xi) {
    const int x = static_cast<int>(xi);
    bool qualifies = true;
    for (int k = 1; k <= K() && qualifies; ++k) {
      Mask c = restrict(m, x, k);
      if (sfat2(c) == d && level(c) >= l - 1) qualifies = false;
    }
    if (!qualifies) continue;
    KaryTree tree = KaryTree::leaf(K());
    tree.expand(0, x);
    // Children of the root are nodes 1..K with edges 1..K.
    for (int k = 1; k <= K(); ++k) {
      Mask c = restrict(m, x, k);
      if (sfat2(c) != d) continue;
      auto sub = reduction_witness_tree(c, l - 1);
      tree = attach(tree, *sub, tree.node(0).children[k - 1]);
    }
    return tree;
  }
  throw std::logic_error("no reducing point for a class that is not l-irreducible");
}

ShatteringCertificate ClassEngine::certificate(const Mask& m, int depth) {
  if (depth > sfat2(m)) precondition("certificate deeper than sfat2");
  ShatteringCertificate cert;
  cert.depth = depth;
  const std::size_t nodes = (std::size_t{1} << depth) - 1;
  cert.points.assign(nodes, -1);
  cert.witness.assign(nodes, 0.0);
  std::function<void(const Mask&, int, std::size_t)> fill =
      [&](const Mask& c, int dep, std::size_t i) {
        if (dep == 0) return;
        for (std::size_t xi = 0; xi < num_points(); ++xi)
          for (int s = 2; s <= K() - 1; ++s) {
            Mask up = c & ge(static_cast<int>(xi), s + 1);
            Mask lo = c & le(static_cast<int>(xi), s - 1);
            if (up.none() || lo.none()) continue;
            if (std::min(sfat2(up), sfat2(lo)) < dep - 1) continue;
            cert.points[i] = static_cast<int>(xi);
            cert.witness[i] = s;
            fill(up, dep - 1, 2 * i + 1);
            fill(lo, dep - 1, 2 * i + 2);
            return;
          }
        throw std::logic_error("certificate extraction found no split");
      };
  fill(m, depth, 0);
  return cert;
}

void ClassEngine::build_subclasses() {
  if (subclasses_ready_) return;
  subclasses_ready_ = true;
  if (F_.empty()) return;
  std::deque<Mask> queue{full()};
  min_constraints_.emplace(full(), 0);
  while (!queue.empty()) {
    Mask cur = queue.front();
    queue.pop_front();
    const int depth = min_constraints_.at(cur);
    for (std::size_t x = 0; x < num_points(); ++x)
      for (int k = 1; k <= K(); ++k) {
        Mask next = restrict(cur, static_cast<int>(x), k);
        if (next.none() || min_constraints_.count(next)) continue;
        min_constraints_.emplace(next, depth + 1);
        queue.push_back(next);
      }
  }
  for (const auto& [m, c] : min_constraints_) subclasses_.push_back(m);
  std::sort(subclasses_.begin(), subclasses_.end(), canonical_less);
}

const std::vector<Mask>& ClassEngine::restriction_subclasses() {
  build_subclasses();
  return subclasses_;
}

int ClassEngine::min_constraints(const Mask& m) {
  build_subclasses();
  auto it = min_constraints_.find(m);
  return it == min_constraints_.end() ? -1 : it->second;
}

int sfat2(const DiscreteClass& F) {
  ClassEngine e(F);
  return e.sfat2(e.full());
}

bool is_l_irreducible(const DiscreteClass& F, long long l) {
  if (l <= 0) return true;
  ClassEngine e(F);
  return e.is_irreducible(e.full(), l);
}

IrreducibilityLevel irreducibility_level(const DiscreteClass& F, long long cap) {
  if (cap < 1) precondition("irreducibility cap must be >= 1");
  ClassEngine e(F);
  const long long lv = e.level(e.full());
  IrreducibilityLevel out;
  if (lv == kInfiniteLevel) {
    out.infinite = true;
    out.value = cap;
  } else {
    out.value = std::min(lv, cap);
    out.capped = lv > cap;
  }
  return out;
}

Labels soa(const DiscreteClass& G) {
  ClassEngine e(G);
  return e.soa(e.full());
}

std::optional<KaryTree> reduction_witness_tree(const DiscreteClass& F, long long l) {
  ClassEngine e(F);
  return e.reduction_witness_tree(e.full(), l);
}

ShatteringCertificate extract_sfat_certificate(const DiscreteClass& F) {
  ClassEngine e(F);
  const int d = e.sfat2(e.full());
  if (d <= 0) precondition("no certificate: sfat2 <= 0");
  return e.certificate(e.full(), d);
}

bool verify_certificate(const DiscreteClass& F, const ShatteringCertificate& cert) {
  if (cert.depth < 0 || cert.depth > 30)
    throw PrivregError(ErrorKind::kFormat, "certificate depth out of range");
  const std::size_t nodes = (std::size_t{1} << cert.depth) - 1;
  if (cert.points.size() != nodes || cert.witness.size() != nodes)
    throw PrivregError(ErrorKind::kFormat, "certificate is not a complete binary tree");
  for (int p : cert.points)
    if (p < 0 || static_cast<std::size_t>(p) >= F.num_points())
      throw PrivregError(ErrorKind::kFormat, "certificate point outside domain");
  if (F.empty()) return false;
  for (std::size_t path = 0; path < (std::size_t{1} << cert.depth); ++path) {
    bool found = false;
    for (const auto& f : F.hypotheses()) {
      bool ok = true;
      std::size_t i = 0;
      for (int t = 0; t < cert.depth && ok; ++t) {
        const bool lower = (path >> t) & 1u;
        const double diff = f[cert.points[i]] - cert.witness[i];
        ok = (lower ? -diff : diff) >= 1.0 - kMarginTol;
        i = 2 * i + (lower ? 2 : 1);
      }
      if (ok) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

namespace {

// Sequential dimension with required realized gap `gap` on value vectors.
class SeqDim {
 public:
  SeqDim(const std::vector<Values>& hyps, double gap) : hyps_(hyps), gap_(gap) {}

  int run() {
    Mask all(hyps_.size(), true);
    return solve(all);
  }

 private:
  int solve(const Mask& m) {
    if (m.none()) return -1;
    if (auto it = memo_.find(m); it != memo_.end()) return it->second;
    const auto members = m.members();
    const int cap = log2_floor(members.size());
    int best = 0;
    const std::size_t X = hyps_.empty() ? 0 : hyps_[0].size();
    for (std::size_t x = 0; x < X && best < cap; ++x) {
      std::vector<double> vals;
      for (auto i : members) vals.push_back(hyps_[i][x]);
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      for (double a : vals) {
        // Largest realized b with a - b >= gap gives the largest lower side.
        double b = 0;
        bool have = false;
        for (double v : vals)
          if (a - v >= gap_ - kMarginTol) {
            b = v;
            have = true;
          }
        if (!have) continue;
        Mask up(hyps_.size()), lo(hyps_.size());
        for (auto i : members) {
          if (hyps_[i][x] >= a) up.set(i);
          if (hyps_[i][x] <= b) lo.set(i);
        }
        best = std::max(best, 1 + std::min(solve(up), solve(lo)));
        if (best >= cap) break;
      }
    }
    memo_.emplace(m, best);
    return best;
  }

  const std::vector<Values>& hyps_;
  double gap_;
  std::unordered_map<Mask, int, MaskHash> memo_;
};

// Non-sequential fat-shattering dimension with margin `margin` per side.
int fat_core(const std::vector<Values>& hyps, double margin) {
  if (hyps.empty()) return -1;
  const std::size_t X = hyps[0].size();
  // Candidate (low, high) value pairs per point with high - low >= 2 margin.
  std::vector<std::vector<std::pair<double, double>>> cuts(X);
  for (std::size_t x = 0; x < X; ++x) {
    std::vector<double> vals;
    for (const auto& h : hyps) vals.push_back(h[x]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (double lo : vals)
      for (double hi : vals)
        if (hi - lo >= 2 * margin - kMarginTol) cuts[x].emplace_back(lo, hi);
  }
  const int cap = std::min<int>(static_cast<int>(X), log2_floor(hyps.size()));
  int best = 0;
  // groups: hypotheses per realized sign pattern of the chosen points.
  std::function<void(std::size_t, int, const std::vector<std::vector<std::size_t>>&)> dfs =
      [&](std::size_t start, int depth,
          const std::vector<std::vector<std::size_t>>& groups) {
        best = std::max(best, depth);
        if (best >= cap) return;
        for (std::size_t x = start; x < X; ++x) {
          if (depth + 1 + static_cast<int>(X - x - 1) <= best) return;
          for (const auto& [lo, hi] : cuts[x]) {
            std::vector<std::vector<std::size_t>> next;
            bool ok = true;
            for (const auto& g : groups) {
              std::vector<std::size_t> a, b;
              for (auto i : g) {
                if (hyps[i][x] >= hi) a.push_back(i);
                if (hyps[i][x] <= lo) b.push_back(i);
              }
              if (a.empty() || b.empty()) {
                ok = false;
                break;
              }
              next.push_back(std::move(a));
              next.push_back(std::move(b));
            }
            if (ok) dfs(x + 1, depth + 1, next);
            if (best >= cap) return;
          }
        }
      };
  std::vector<std::size_t> all(hyps.size());
  for (std::size_t i = 0; i < hyps.size(); ++i) all[i] = i;
  dfs(0, 0, {all});
  return best;
}

std::vector<Values> as_values(const DiscreteClass& F) {
  std::vector<Values> out;
  for (const auto& f : F.hypotheses()) out.emplace_back(f.begin(), f.end());
  return out;
}

}  // namespace

int sfat_alpha(const RealClass& H, double alpha) {
  if (!(alpha > 0)) throw PrivregError(ErrorKind::kDomain, "alpha must be positive");
  if (H.empty()) return -1;
  return SeqDim(H.hypotheses(), alpha).run();
}

int fat_alpha(const RealClass& H, double alpha) {
  if (!(alpha > 0)) throw PrivregError(ErrorKind::kDomain, "alpha must be positive");
  return fat_core(H.hypotheses(), alpha);
}

int fat2(const DiscreteClass& F) { return fat_core(as_values(F), 2.0); }

}  // namespace privreg
