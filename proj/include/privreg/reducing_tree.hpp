// Reducing trees: augmented trees rooted by an sfat-reducing pair whose leaf
// restrictions are empty or irreducible at a per-level budget.
#pragma once

#include <vector>

#include "privreg/engine.hpp"

namespace privreg {

// Budget sequence l_0, l_1, ...; indices past the end reuse the last entry.
class EllSequence {
 public:
  explicit EllSequence(std::vector<long long> values);
  long long at(int t) const;
  // Saturating sum of l_0..l_{t-1}.
  long long prefix(int t) const;

 private:
  std::vector<long long> values_;
};

// Builds a reducing tree for H (a mask of the engine's ambient class) at the
// pair (x, y). Requires H nonempty and sfat2(H|(x,y)) < sfat2(H).
KaryTree build_reducing_tree(ClassEngine& engine, const Mask& H, int x, int y,
                             const EllSequence& ell);
KaryTree build_reducing_tree(const DiscreteClass& H, int x, int y,
                             const std::vector<long long>& ell);

}  // namespace privreg
