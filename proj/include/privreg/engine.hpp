// Memoized sfat2 / irreducibility / SOA engine over the subclasses of one
// ambient discrete class. Not thread-safe; use one engine per thread.
#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "privreg/core.hpp"
#include "privreg/mask.hpp"
#include "privreg/tree.hpp"

namespace privreg {

// Irreducibility levels are either finite (at most the number of points on
// which the class is non-constant) or infinite.
constexpr long long kInfiniteLevel = INT64_MAX;

class ClassEngine {
 public:
  explicit ClassEngine(DiscreteClass F);

  const DiscreteClass& ambient() const { return F_; }
  int K() const { return F_.K(); }
  std::size_t num_points() const { return F_.num_points(); }
  std::size_t num_hypotheses() const { return F_.size(); }
  const Labels& hyp(std::size_t i) const { return F_[i]; }

  Mask full() const { return Mask(F_.size(), true); }
  Mask none() const { return Mask(F_.size(), false); }
  const Mask& eq(int x, int k) const { return eq_[x * (K() + 1) + k]; }
  Mask restrict(const Mask& m, int x, int k) const { return m & eq(x, k); }
  Mask restrict(const Mask& m, const RestrictionSet& a) const;
  // Mask of a class whose hypotheses all belong to the ambient class.
  Mask mask_of(const DiscreteClass& sub) const;
  DiscreteClass materialize(const Mask& m) const;
  // Labels realized at x by members of m (sorted).
  std::vector<int> values_at(const Mask& m, int x) const;

  int sfat2(const Mask& m);
  // Exact irreducibility level; kInfiniteLevel when irreducible at every l.
  long long level(const Mask& m);
  bool is_irreducible(const Mask& m, long long l) { return level(m) >= l; }

  // Labels k with sfat2(m|(x,k)) == sfat2(m).
  std::vector<int> preserving_labels(const Mask& m, int x);
  // Requires m nonempty and 1-irreducible.
  Labels soa(const Mask& m);

  // A tree of depth <= l on whose every leaf sfat2 drops, or nullopt when m
  // is l-irreducible. Requires l >= 1.
  std::optional<KaryTree> reduction_witness_tree(const Mask& m, long long l);

  // Certificate of depth exactly `depth` <= sfat2(m).
  ShatteringCertificate certificate(const Mask& m, int depth);

  // Distinct nonempty restriction subclasses in canonical order, with the
  // minimum number of constraints needed to reach each one.
  const std::vector<Mask>& restriction_subclasses();
  int min_constraints(const Mask& m);

 private:
  DiscreteClass F_;
  std::vector<Mask> eq_;
  std::vector<Mask> ge_;  // f(x) >= k
  std::vector<Mask> le_;  // f(x) <= k
  std::unordered_map<Mask, int, MaskHash> sfat_memo_;
  std::unordered_map<Mask, long long, MaskHash> level_memo_;
  std::vector<Mask> subclasses_;
  std::unordered_map<Mask, int, MaskHash> min_constraints_;
  bool subclasses_ready_ = false;

  const Mask& ge(int x, int k) const { return ge_[x * (K() + 2) + k]; }
  const Mask& le(int x, int k) const { return le_[x * (K() + 2) + k]; }
  bool constant_at(const Mask& m, int x) const;
  void build_subclasses();
};

// Free-function wrappers with a fresh engine per call.
int sfat2(const DiscreteClass& F);
bool is_l_irreducible(const DiscreteClass& F, long long l);

struct IrreducibilityLevel {
  bool infinite = false;
  long long value = 0;  // min(level, cap) when finite
  bool capped = false;  // true level exceeds cap
};
IrreducibilityLevel irreducibility_level(const DiscreteClass& F, long long cap);
Labels soa(const DiscreteClass& G);
std::optional<KaryTree> reduction_witness_tree(const DiscreteClass& F, long long l);
ShatteringCertificate extract_sfat_certificate(const DiscreteClass& F);
bool verify_certificate(const DiscreteClass& F, const ShatteringCertificate& cert);

// Real-valued dimensions. sfat_alpha uses margin alpha/2 (children need a
// realized gap >= alpha); fat_alpha uses margin alpha on each side.
int sfat_alpha(const RealClass& H, double alpha);
int fat_alpha(const RealClass& H, double alpha);
// fat_2 of a discrete class, treating labels as reals.
int fat2(const DiscreteClass& F);

}  // namespace privreg
