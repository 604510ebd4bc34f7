// ReduceTreeReg: grows a K-ary tree over low-error subclasses until an
// irreducible leaf appears and emits candidate SOA hypotheses.
#pragma once

#include <string>
#include <vector>

#include "privreg/engine.hpp"

namespace privreg {

struct ReduceTreeParams {
  double alpha1 = 0;
  double alpha_delta = 0;
  long long ell_prime = 1;

  double alpha(int t) const { return alpha1 - (t - 1) * alpha_delta; }
  long long ell(int t) const;  // ell_prime * 2^t, saturating
  void validate() const;
};

struct Candidate {
  Labels g;
  Mask defining;  // the l'-irreducible nonempty class with soa == g
  int leaf = -1;
};

struct ReduceTreeOutput {
  bool error = false;
  std::string error_reason;
  int d = 0;
  int t_final = 0;
  KaryTree tree = KaryTree::leaf(1);
  std::vector<int> final_leaves;  // L'_{t_final+1}
  std::vector<Candidate> candidates;  // distinct hypotheses, leaf order
  std::vector<int> expansions_per_round;
};

// Errors of every ambient hypothesis against P_hat, in ambient order.
std::vector<double> hypothesis_errors(const ClassEngine& engine,
                                      const EmpiricalDistribution& P_hat);
// {f : err(f) <= alpha} as a mask, with a small comparison tolerance.
Mask low_error_mask(const std::vector<double>& errors, double alpha);

ReduceTreeOutput reduce_tree_reg(ClassEngine& engine,
                                 const EmpiricalDistribution& P_hat,
                                 const ReduceTreeParams& params);
ReduceTreeOutput reduce_tree_reg(ClassEngine& engine,
                                 const std::vector<double>& errors,
                                 const ReduceTreeParams& params);

int output_tree_depth(const ReduceTreeOutput& out);

}  // namespace privreg
