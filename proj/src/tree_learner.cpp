// ReduceTreeReg implementation.
#include "privreg/tree_learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace privreg {

namespace {
constexpr double kErrTol = 1e-9;
constexpr long long kSaturate = std::numeric_limits<long long>::max() / 4;
}  // namespace

long long ReduceTreeParams::ell(int t) const {
  long long v = ell_prime;
  for (int i = 0; i < t; ++i) v = v > kSaturate / 2 ? kSaturate : v * 2;
  return v;
}

void ReduceTreeParams::validate() const {
  if (!(alpha_delta > 0))
    throw PrivregError(ErrorKind::kDomain, "alpha_delta must be positive");
  if (ell_prime < 1) throw PrivregError(ErrorKind::kDomain, "ell_prime must be >= 1");
  if (!std::isfinite(alpha1)) throw PrivregError(ErrorKind::kDomain, "alpha1 must be finite");
}

std::vector<double> hypothesis_errors(const ClassEngine& engine,
                                      const EmpiricalDistribution& P_hat) {
  if (!P_hat.discrete() || P_hat.K() != engine.K() ||
      P_hat.num_points() != engine.num_points())
    throw PrivregError(ErrorKind::kDomain,
                       "distribution must be discrete over the class's domain and labels");
  std::vector<double> errs;
  errs.reserve(engine.num_hypotheses());
  for (std::size_t i = 0; i < engine.num_hypotheses(); ++i)
    errs.push_back(abs_error(engine.hyp(i), P_hat));
  return errs;
}

Mask low_error_mask(const std::vector<double>& errors, double alpha) {
  Mask m(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (errors[i] <= alpha + kErrTol) m.set(i);
  return m;
}

ReduceTreeOutput reduce_tree_reg(ClassEngine& engine,
                                 const EmpiricalDistribution& P_hat,
                                 const ReduceTreeParams& params) {
  return reduce_tree_reg(engine, hypothesis_errors(engine, P_hat), params);
}

ReduceTreeOutput reduce_tree_reg(ClassEngine& engine,
                                 const std::vector<double>& errors,
                                 const ReduceTreeParams& params) {
  params.validate();
  if (engine.ambient().empty())
    throw PrivregError(ErrorKind::kPrecondition, "ReduceTreeReg needs a nonempty class");
  ReduceTreeOutput out;
  out.d = engine.sfat2(engine.full());
  out.tree = KaryTree::leaf(engine.K());
  const int d = out.d;

  auto G = [&](double alpha, int v) {
    return engine.restrict(low_error_mask(errors, alpha), out.tree.ancestors(v));
  };
  // Leaves attaining the maximal sfat2 of G(alpha_t, v); returns that max.
  auto argmax_leaves = [&](int t, std::vector<int>* best) {
    int w = std::numeric_limits<int>::min();
    best->clear();
    for (int v : out.tree.leaves()) {
      const int s = engine.sfat2(G(params.alpha(t), v));
      if (s > w) {
        w = s;
        best->clear();
      }
      if (s == w) best->push_back(v);
    }
    return w;
  };

  int t_final = d;
  std::vector<int> Lt;
  for (int t = 1; t <= d; ++t) {
    const int w = argmax_leaves(t, &Lt);
    if (w < 0) {
      out.error = true;
      out.error_reason = "no low-error hypothesis at any leaf (round " + std::to_string(t) + ")";
      return out;
    }
    const double a_t = params.alpha(t), a_lo = a_t - params.alpha_delta;
    bool stop = false;
    for (int v : Lt) {
      const Mask lo = G(a_lo, v);
      const int s_lo = engine.sfat2(lo);
      if (s_lo >= 0 && s_lo == engine.sfat2(G(a_t, v)) &&
          engine.is_irreducible(lo, params.ell(t))) {
        stop = true;
        break;
      }
    }
    if (stop) {
      t_final = t - 1;
      break;
    }
    int expansions = 0;
    for (int v : Lt) {
      const Mask hi = G(a_t, v);
      const Mask lo = G(a_lo, v);
      if (hi.none() || engine.sfat2(lo) < engine.sfat2(hi)) continue;
      // lo is nonempty with equal sfat2 and not ell_t-irreducible here; the
      // smallest failing budget is one above its level.
      const long long ell_v = engine.level(lo) + 1;
      auto witness = engine.reduction_witness_tree(lo, ell_v);
      out.tree = attach(out.tree, *witness, v);
      ++expansions;
    }
    out.expansions_per_round.push_back(expansions);
  }

  out.t_final = t_final;
  const int t = t_final + 1;
  const int w = argmax_leaves(t, &out.final_leaves);
  if (w < 0) {
    out.error = true;
    out.error_reason = "no low-error hypothesis at any leaf (output round)";
    return out;
  }
  const double a_out = params.alpha(t) - 2.0 * params.alpha_delta / 3.0;
  for (int v : out.final_leaves) {
    const Mask c = G(a_out, v);
    if (c.none() || !engine.is_irreducible(c, params.ell_prime)) continue;
    Labels g = engine.soa(c);
    const bool seen = std::any_of(out.candidates.begin(), out.candidates.end(),
                                  [&](const Candidate& e) { return e.g == g; });
    if (!seen) out.candidates.push_back({std::move(g), c, v});
  }
  return out;
}

int output_tree_depth(const ReduceTreeOutput& out) { return out.tree.depth(); }

}  // namespace privreg
