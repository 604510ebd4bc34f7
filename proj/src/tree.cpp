// K-ary tree construction and attachment.
#include "privreg/tree.hpp"

#include <algorithm>
#include <functional>

namespace privreg {

KaryTree KaryTree::leaf(int K) {
  if (K < 1) throw PrivregError(ErrorKind::kDomain, "tree arity must be positive");
  KaryTree t;
  t.K_ = K;
  t.nodes_.push_back(TreeNode{});
  return t;
}

KaryTree KaryTree::augmented(int K, int x, int k1) {
  if (k1 < 1 || k1 > K)
    throw PrivregError(ErrorKind::kDomain, "augmented root label outside 1..K");
  KaryTree t = leaf(K);
  t.augmented_ = true;
  t.nodes_[0].point = x;
  t.add_child(0, k1);
  return t;
}

int KaryTree::add_child(int parent, int edge) {
  TreeNode c;
  c.parent = parent;
  c.edge = edge;
  c.depth = nodes_[parent].depth + 1;
  nodes_.push_back(c);
  const int id = static_cast<int>(nodes_.size()) - 1;
  nodes_[parent].children.push_back(id);
  return id;
}

std::vector<int> KaryTree::leaves() const {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(nodes_.size()); ++v)
    if (nodes_[v].children.empty()) out.push_back(v);
  return out;
}

int KaryTree::depth() const {
  int d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.depth);
  return d;
}

RestrictionSet KaryTree::ancestors(int v) const {
  RestrictionSet a;
  while (nodes_.at(v).parent >= 0) {
    const auto& n = nodes_[v];
    a.emplace_back(nodes_[n.parent].point, n.edge);
    v = n.parent;
  }
  return canonical(std::move(a));
}

void KaryTree::expand(int v, int point) {
  if (!is_leaf(v)) throw PrivregError(ErrorKind::kPrecondition, "expand on a non-leaf");
  nodes_[v].point = point;
  for (int k = 1; k <= K_; ++k) add_child(v, k);
}

bool KaryTree::operator==(const KaryTree& o) const {
  if (K_ != o.K_ || augmented_ != o.augmented_ || nodes_.size() != o.nodes_.size())
    return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto &a = nodes_[i], &b = o.nodes_[i];
    if (a.point != b.point || a.parent != b.parent || a.edge != b.edge ||
        a.children != b.children)
      return false;
  }
  return true;
}

KaryTree attach(const KaryTree& base, const KaryTree& sub, int leaf) {
  if (leaf < 0 || leaf >= static_cast<int>(base.size()) || !base.is_leaf(leaf))
    throw PrivregError(ErrorKind::kPrecondition, "attach target is not a leaf");
  if (base.K() != sub.K())
    throw PrivregError(ErrorKind::kPrecondition, "attach arity mismatch");
  KaryTree out = base;
  out.nodes_[leaf].point = sub.node(0).point;
  std::function<void(int, int)> copy = [&](int sv, int ov) {
    for (int c : sub.node(sv).children) {
      const int oc = out.add_child(ov, sub.node(c).edge);
      out.nodes_[oc].point = sub.node(c).point;
      copy(c, oc);
    }
  };
  copy(0, leaf);
  return out;
}

}  // namespace privreg
