// RegLearn: parameter resolution, m-fold ReduceTreeReg + SOAFilter, sparse
// selection and the final real-valued hypothesis.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "privreg/dp.hpp"
#include "privreg/stability_filter.hpp"
#include "privreg/tree_learner.hpp"

namespace privreg {

struct RegLearnConfig {
  double epsilon = 0.5;
  double delta = 1e-6;
  double eta_bar = 0.5;
  double beta = 0.2;
  long long ell_bar = 1;
  double C0 = 4;
  double c0 = 0.25;
  double C1 = 2;
  double C = 4;
  int chi = 5;
  // alpha1 = eta_hat + alpha_delta/2 + (d + alpha1_extra_rounds) alpha_delta.
  int alpha1_extra_rounds = 1;
  std::optional<long long> m;
  std::optional<long long> n0;
  std::optional<long long> n1;
  std::optional<long long> ell_prime;
  std::uint64_t seed = 0;

  void validate() const;
};

// Values above this many samples per formula are refused without override.
constexpr double kDeskScaleLimit = 1e7;

struct ResolvedParams {
  int K = 0;
  int d = 0;
  int fat = 0;  // fat_{c0 eta_bar}(H)
  long long m = 0;
  long long n0 = 0;
  long long n1 = 0;
  long long n = 0;  // n0 * m
  long long ell_prime = 0;
  double alpha_delta = 18;
  int tau_max = 0;
  int r_max = 0;
  int chi = 5;
  long long ell_bar = 1;
  double m_formula = 0;
  double n0_formula = 0;
  double n1_formula = 0;
  double ell_prime_formula = 0;
  // log_K of the sparsity formula.
  double log_sparsity_formula = 0;
  bool m_overridden = false;
  bool n0_overridden = false;
  bool n1_overridden = false;
  bool ell_prime_overridden = false;

  LadderSchedule schedule() const;
};

ResolvedParams compute_parameters(const RealClass& H, const RegLearnConfig& cfg);

struct GroupRecord {
  bool error = false;
  std::string error_reason;
  int t_final = 0;
  int tree_depth = 0;
  std::vector<Labels> S_hat;
  std::vector<Labels> R;  // soa(L) over the RepSets, sorted
};

struct RegLearnTranscript {
  NoisyOptError eta_hat;
  double alpha1 = 0;
  std::size_t universe_size = 0;
  std::size_t sparsity = 0;
  std::size_t max_R = 0;
  std::vector<GroupRecord> groups;
  SparseSelectResult selection;
};

struct RegLearnOutput {
  bool bottom = true;
  Values h_hat;
  Labels g_hat;  // soa(L_hat)
  std::optional<DiscreteClass> L_hat;
  RegLearnTranscript transcript;
};

// Shared per-(H, cfg) state: discretized class, engine, FilterStep output
// and a SOAFilter cache keyed by candidate. Reusing it across runs does not
// change outputs.
class RegLearner {
 public:
  RegLearner(const RealClass& H, const RegLearnConfig& cfg);

  const ResolvedParams& params() const { return params_; }
  const DiscreteClass& discretized() const { return engine_.ambient(); }
  ClassEngine& engine() { return engine_; }
  const FilteredSets& filtered() const { return filtered_; }
  // soa(L) over the filtered sets: the selection universe.
  const std::vector<Labels>& universe() const { return universe_; }
  std::size_t sparsity() const { return sparsity_; }

  // Data: n1 samples for the error estimate, then m groups of n0.
  RegLearnOutput run(const std::vector<Sample>& data, Rng& rng);

  // soa(L) for L in SOAFilter(g_hat), sorted.
  const std::vector<Labels>& rep_soas(const Labels& g_hat);

 private:
  RegLearnConfig cfg_;
  ResolvedParams params_;
  std::size_t num_points_;
  ClassEngine engine_;
  LadderSchedule schedule_;
  FilteredSets filtered_;
  std::vector<Labels> universe_;
  std::vector<Mask> universe_class_;
  std::size_t sparsity_ = 1;
  std::map<Labels, std::vector<Labels>> rep_cache_;
};

RegLearnOutput reg_learn(const RealClass& H, const std::vector<Sample>& data,
                         const RegLearnConfig& cfg, Rng& rng);

// err_Q(h_hat) - min_{h in H} err_Q(h) for a real-labeled distribution Q.
double excess_risk(const Values& h_hat, const EmpiricalDistribution& Q, const RealClass& H);

std::vector<Sample> draw_samples(const EmpiricalDistribution& Q, std::size_t n, Rng& rng);

}  // namespace privreg
