// K-ary domain-labeled trees (plain and augmented) and complete binary
// shattering certificates.
#pragma once

#include <vector>

#include "privreg/core.hpp"

namespace privreg {

struct TreeNode {
  int point = -1;  // -1 for leaves
  int parent = -1;
  int edge = 0;  // label on the edge from the parent
  int depth = 0;
  std::vector<int> children;
};

// Node 0 is the root. Leaves are reported in construction order, which is
// the order of node indices.
class KaryTree {
 public:
  // A single unlabeled leaf of depth 0.
  static KaryTree leaf(int K);
  // Root labeled x with the single child reached by label k1.
  static KaryTree augmented(int K, int x, int k1);

  int K() const { return K_; }
  bool is_augmented() const { return augmented_; }
  std::size_t size() const { return nodes_.size(); }
  const TreeNode& node(int v) const { return nodes_.at(v); }
  bool is_leaf(int v) const { return nodes_.at(v).children.empty(); }
  std::vector<int> leaves() const;
  int depth() const;

  // Ancestor set a(v): the (point, edge-label) pairs along the root path.
  RestrictionSet ancestors(int v) const;

  // Label leaf v with a point and give it K leaf children.
  void expand(int v, int point);

  bool operator==(const KaryTree& o) const;

 private:
  friend KaryTree attach(const KaryTree& base, const KaryTree& sub, int leaf);
  int add_child(int parent, int edge);

  int K_ = 0;
  bool augmented_ = false;
  std::vector<TreeNode> nodes_;
};

// Attach `sub` at leaf `leaf` of `base`; the leaf takes the sub root's label.
KaryTree attach(const KaryTree& base, const KaryTree& sub, int leaf);

// Complete binary tree in heap layout: node i has children 2i+1 (label 1,
// upper side) and 2i+2 (label 2, lower side).
struct ShatteringCertificate {
  int depth = 0;
  std::vector<int> points;
  std::vector<double> witness;
};

}  // namespace privreg
