// DP primitives and the empirical audit.
#include "privreg/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace privreg {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double Rng::uniform01() {
  return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw PrivregError(ErrorKind::kDomain, "empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do v = gen_();
  while (v >= limit);
  return v % n;
}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x632be59bd9b4e019ull)));
}

double laplace_sample(double b, Rng& rng) {
  if (!(b > 0)) throw PrivregError(ErrorKind::kDomain, "Laplace scale must be positive");
  const double u = rng.uniform01();
  return u < 0.5 ? b * std::log(2.0 * u) : -b * std::log(2.0 * (1.0 - u));
}

std::optional<std::string> PrivacyParams::validate() const {
  if (!(epsilon > 0)) throw PrivregError(ErrorKind::kDomain, "epsilon must be positive");
  if (!(delta > 0 && delta < 1)) throw PrivregError(ErrorKind::kDomain, "delta must lie in (0,1)");
  if (epsilon >= 1) return "epsilon >= 1 is outside the usual (0,1) range";
  return std::nullopt;
}

Sample sample_atom(const EmpiricalDistribution& P, Rng& rng) {
  const double u = rng.uniform01();
  double acc = 0;
  for (const Atom& a : P.atoms()) {
    acc += a.weight;
    if (u < acc) return {a.point, a.y};
  }
  return {P.atoms().back().point, P.atoms().back().y};
}

NoisyOptError noisy_opt_error(const DiscreteClass& F, const EmpiricalDistribution& emp,
                              double epsilon, std::size_t n1, Rng& rng) {
  if (F.empty()) throw PrivregError(ErrorKind::kPrecondition, "empty class");
  if (n1 < 1) throw PrivregError(ErrorKind::kDomain, "n1 must be >= 1");
  if (!(epsilon > 0)) throw PrivregError(ErrorKind::kDomain, "epsilon must be positive");
  NoisyOptError out;
  out.noiseless = std::numeric_limits<double>::infinity();
  for (const auto& f : F.hypotheses()) out.noiseless = std::min(out.noiseless, abs_error(f, emp));
  out.scale = 2.0 * F.K() / (epsilon * static_cast<double>(n1));
  out.noise = laplace_sample(out.scale, rng);
  out.value = out.noiseless + out.noise;
  return out;
}

CandidateId candidate_id(const Labels& g) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  mix(g.size());
  for (int v : g) mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)));
  // Keep 0 free as the BOTTOM bucket in audits.
  return h == 0 ? 1 : h;
}

double sparse_select_threshold(std::size_t s, const PrivacyParams& priv) {
  const double ds = static_cast<double>(s);
  return 1.0 + (2.0 * ds / priv.epsilon) * std::log(2.0 * ds / priv.delta);
}

SparseSelectResult sparse_select(const SelectionInstance& inst, const PrivacyParams& priv,
                                 Rng& rng, const SparseSelectOptions& opts) {
  priv.validate();
  if (inst.user_sets.empty()) throw PrivregError(ErrorKind::kPrecondition, "sparse selection needs m >= 1");
  if (inst.sparsity < 1) throw PrivregError(ErrorKind::kDomain, "sparsity must be >= 1");
  SparseSelectResult out;
  const double s = static_cast<double>(inst.sparsity);
  out.noise_scale = opts.noise_scale.value_or(2.0 * s / priv.epsilon);
  out.threshold = opts.threshold.value_or(sparse_select_threshold(inst.sparsity, priv));
  for (const auto& set : inst.user_sets) {
    std::set<CandidateId> distinct(set.begin(), set.end());
    if (distinct.size() > inst.sparsity) ++out.truncated_users;
    std::size_t kept = 0;
    for (CandidateId c : distinct) {
      if (kept++ == inst.sparsity) break;
      ++out.counts[c];
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [c, n] : out.counts) {
    const double noisy = static_cast<double>(n) + laplace_sample(out.noise_scale, rng);
    out.noisy_counts[c] = noisy;
    if (noisy > out.threshold && noisy > best) {
      best = noisy;
      out.winner = c;
    }
  }
  return out;
}

bool AuditReport::violation() const {
  return std::any_of(events.begin(), events.end(), [](const AuditEvent& e) { return e.flag; });
}

AuditReport audit_from_counts(const OutputCounts& on_d, const OutputCounts& on_dprime,
                              std::size_t trials, const PrivacyParams& priv) {
  priv.validate();
  AuditReport rep;
  rep.trials = trials;
  const double T = static_cast<double>(trials);
  const double e = std::exp(priv.epsilon);
  std::set<std::uint64_t> outputs;
  for (const auto& [k, v] : on_d) outputs.insert(k);
  for (const auto& [k, v] : on_dprime) outputs.insert(k);
  auto freq = [&](const OutputCounts& c, std::uint64_t k) {
    auto it = c.find(k);
    return it == c.end() ? 0.0 : static_cast<double>(it->second) / T;
  };
  for (std::uint64_t k : outputs) {
    for (int dir = 0; dir < 2; ++dir) {
      AuditEvent ev;
      ev.event = std::to_string(k);
      ev.direction = dir == 0 ? "D>D'" : "D'>D";
      ev.p = freq(dir == 0 ? on_d : on_dprime, k);
      ev.q = freq(dir == 0 ? on_dprime : on_d, k);
      ev.bound = e * ev.q + priv.delta;
      // Binomial standard error of p - e q, floored at one count.
      const double pp = std::max(ev.p, 1.0 / T), qq = std::max(ev.q, 1.0 / T);
      ev.sigma = std::sqrt(pp * (1 - pp) / T + e * e * qq * (1 - qq) / T);
      ev.flag = ev.p - ev.bound > 3.0 * ev.sigma;
      rep.events.push_back(ev);
    }
  }
  return rep;
}

}  // namespace privreg
