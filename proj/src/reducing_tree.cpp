// Reducing-tree construction by iterated attachment of witness trees.
#include "privreg/reducing_tree.hpp"

#include <algorithm>
#include <limits>

namespace privreg {

namespace {
constexpr long long kSaturate = std::numeric_limits<long long>::max() / 4;
}

EllSequence::EllSequence(std::vector<long long> values) : values_(std::move(values)) {
  if (values_.empty()) throw PrivregError(ErrorKind::kDomain, "empty budget sequence");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] < 1) throw PrivregError(ErrorKind::kDomain, "budgets must be positive");
    if (i && values_[i] < values_[i - 1])
      throw PrivregError(ErrorKind::kDomain, "budget sequence must be nondecreasing");
  }
}

long long EllSequence::at(int t) const {
  if (t < 0) return 0;
  return values_[std::min<std::size_t>(static_cast<std::size_t>(t), values_.size() - 1)];
}

long long EllSequence::prefix(int t) const {
  long long s = 0;
  for (int i = 0; i < t; ++i) s = std::min(kSaturate, s + at(i));
  return s;
}

KaryTree build_reducing_tree(ClassEngine& engine, const Mask& H, int x, int y,
                             const EllSequence& ell) {
  if (H.none()) throw PrivregError(ErrorKind::kPrecondition, "reducing tree of an empty class");
  if (x < 0 || static_cast<std::size_t>(x) >= engine.num_points() || y < 1 || y > engine.K())
    throw PrivregError(ErrorKind::kDomain, "reducing pair outside domain or labels");
  const int d = engine.sfat2(H);
  if (engine.sfat2(engine.restrict(H, x, y)) >= d)
    throw PrivregError(ErrorKind::kPrecondition, "pair does not reduce sfat2");
  KaryTree tree = KaryTree::augmented(engine.K(), x, y);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v : tree.leaves()) {
      const Mask C = engine.restrict(H, tree.ancestors(v));
      if (C.none()) continue;
      const long long budget = ell.at(d - engine.sfat2(C));
      auto witness = engine.reduction_witness_tree(C, budget);
      if (!witness) continue;
      tree = attach(tree, *witness, v);
      changed = true;
    }
  }
  return tree;
}

KaryTree build_reducing_tree(const DiscreteClass& H, int x, int y,
                             const std::vector<long long>& ell) {
  ClassEngine engine(H);
  return build_reducing_tree(engine, engine.full(), x, y, EllSequence(ell));
}

}  // namespace privreg
