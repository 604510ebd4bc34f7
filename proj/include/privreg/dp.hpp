// Laplace mechanism, private optimal-error estimate, thresholded sparse
// selection and an empirical (epsilon, delta) audit.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "privreg/core.hpp"

namespace privreg {

// Seeded 64-bit generator with platform-independent uniform draws and fixed
// stream splitting.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}
  std::uint64_t seed() const { return seed_; }
  std::uint64_t next() { return gen_(); }
  // Uniform on the open interval (0, 1).
  double uniform01();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  // Independent child stream; depends only on (seed, stream).
  Rng split(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

std::uint64_t splitmix64(std::uint64_t x);

double laplace_sample(double b, Rng& rng);

// Draws one (point, label) pair from a finite-atom distribution.
Sample sample_atom(const EmpiricalDistribution& P, Rng& rng);

struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 1e-6;
  // Throws on invalid values; returns a warning for epsilon >= 1.
  std::optional<std::string> validate() const;
};

struct NoisyOptError {
  double noiseless = 0;
  double noise = 0;
  double value = 0;
  double scale = 0;
};

// min_f err_emp(f) + Lap(2K / (epsilon n1)).
NoisyOptError noisy_opt_error(const DiscreteClass& F, const EmpiricalDistribution& emp,
                              double epsilon, std::size_t n1, Rng& rng);

using CandidateId = std::uint64_t;
// Stable content hash of a canonical hypothesis vector.
CandidateId candidate_id(const Labels& g);

struct SelectionInstance {
  std::vector<std::vector<CandidateId>> user_sets;
  std::size_t sparsity = 1;
};

struct SparseSelectOptions {
  std::optional<double> noise_scale;
  std::optional<double> threshold;
};

struct SparseSelectResult {
  std::optional<CandidateId> winner;  // nullopt is BOTTOM
  std::map<CandidateId, long> counts;
  std::map<CandidateId, double> noisy_counts;
  double noise_scale = 0;
  double threshold = 0;
  std::size_t truncated_users = 0;
};

double sparse_select_threshold(std::size_t s, const PrivacyParams& priv);

SparseSelectResult sparse_select(const SelectionInstance& inst, const PrivacyParams& priv,
                                 Rng& rng, const SparseSelectOptions& opts = {});

struct AuditEvent {
  std::string event;
  std::string direction;  // "D>D'" compares p = Pr_D against q = Pr_D'
  double p = 0;
  double q = 0;
  double bound = 0;
  double sigma = 0;
  bool flag = false;
};

struct AuditReport {
  std::size_t trials = 0;
  std::vector<AuditEvent> events;
  bool violation() const;
};

using OutputCounts = std::map<std::uint64_t, std::size_t>;

// Single-bucket events over the union of observed outputs, both directions.
AuditReport audit_from_counts(const OutputCounts& on_d, const OutputCounts& on_dprime,
                              std::size_t trials, const PrivacyParams& priv);

template <typename Record>
using Mechanism = std::function<std::uint64_t(const std::vector<Record>&, Rng&)>;

template <typename Record>
bool neighboring(const std::vector<Record>& D, const std::vector<Record>& Dp) {
  if (D.size() != Dp.size()) return false;
  std::size_t diff = 0;
  for (std::size_t i = 0; i < D.size(); ++i) diff += !(D[i] == Dp[i]);
  return diff == 1;
}

// Runs `mech` `trials` times on each dataset with streams split from `seed`.
template <typename Record>
AuditReport dp_audit(const Mechanism<Record>& mech, const std::vector<Record>& D,
                     const std::vector<Record>& Dp, const PrivacyParams& priv,
                     std::size_t trials, std::uint64_t seed) {
  if (!neighboring(D, Dp))
    throw PrivregError(ErrorKind::kPrecondition, "audit datasets must differ in exactly one record");
  OutputCounts a, b;
  const Rng master(seed);
  for (std::size_t i = 0; i < trials; ++i) {
    Rng r1 = master.split(2 * i), r2 = master.split(2 * i + 1);
    ++a[mech(D, r1)];
    ++b[mech(Dp, r2)];
  }
  return audit_from_counts(a, b, trials, priv);
}

}  // namespace privreg
