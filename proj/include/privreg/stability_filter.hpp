// FilterStep and SOAFilter: map candidate hypotheses to sets of irreducible
// representative classes that do not depend on the candidate.
#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "privreg/engine.hpp"
#include "privreg/reducing_tree.hpp"

namespace privreg {

struct LadderSchedule {
  long long ell_bar = 1;
  int r_max = 1;
  int tau_max = 12;
  int chi = 5;

  // ell_bar * (r+2)^t, saturating.
  long long ell(int r, int t) const;
  EllSequence sequence(int r, int t_offset, int d) const;
  void validate() const;
};

// Schedule used by RegLearn for a class of dimension d.
LadderSchedule default_schedule(int d, long long ell_bar, int chi = 5);

struct FilteredSets {
  int d = -1;
  // levels[s]: the filtered set of classes with sfat2 == s, insertion order.
  std::vector<std::vector<Mask>> levels;
  std::unordered_map<Mask, Mask, MaskHash> rep;
  struct Processed {
    Mask H;
    int r;
    int t;
  };
  std::vector<Processed> processed;
};

FilteredSets filter_step(ClassEngine& engine, const LadderSchedule& schedule);

struct QueuedSet {
  int j;
  int s;
  RestrictionSet a;
};

struct RepSetResult {
  std::vector<Mask> members;  // canonical order
  std::vector<QueuedSet> queued;  // every admitted set with s >= 1
  std::size_t removed_far = 0;
  std::size_t reducing_trees = 0;
};

RepSetResult soa_filter(ClassEngine& engine, const Labels& g_hat,
                        const LadderSchedule& schedule,
                        const FilteredSets* shared = nullptr);

}  // namespace privreg
