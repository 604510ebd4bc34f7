// RegLearn pipeline.
#include "privreg/reglearn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace privreg {

namespace {

constexpr long long kSaturate = std::numeric_limits<long long>::max() / 4;

void require_positive(const std::optional<long long>& v, const char* name) {
  if (v && *v < 1) throw PrivregError(ErrorKind::kConfig, std::string(name) + " override must be >= 1");
}

void require_unit(double v, const char* name) {
  if (!(v > 0 && v < 1)) throw PrivregError(ErrorKind::kConfig, std::string(name) + " must lie in (0,1)");
}

long long resolve(const std::optional<long long>& override_value, double formula,
                  const char* name, bool* overridden, bool limit) {
  *overridden = override_value.has_value();
  if (override_value) return *override_value;
  if (!std::isfinite(formula) || (limit && formula > kDeskScaleLimit))
    throw PrivregError(ErrorKind::kTheoreticalScale,
                       std::string(name) + " evaluates to " + std::to_string(formula) +
                           ", beyond desk scale; supply an explicit override for " + name);
  if (formula >= static_cast<double>(kSaturate)) return kSaturate;
  return std::max<long long>(1, static_cast<long long>(std::ceil(formula - 1e-9)));
}

}  // namespace

void RegLearnConfig::validate() const {
  if (!(epsilon > 0)) throw PrivregError(ErrorKind::kConfig, "epsilon must be positive");
  require_unit(delta, "delta");
  require_unit(eta_bar, "eta_bar");
  require_unit(beta, "beta");
  if (ell_bar < 1) throw PrivregError(ErrorKind::kConfig, "ell_bar must be >= 1");
  if (!(C0 > 0 && c0 > 0 && C1 > 0 && C > 0))
    throw PrivregError(ErrorKind::kConfig, "constants C0, c0, C1, C must be positive");
  if (chi < 1) throw PrivregError(ErrorKind::kConfig, "chi must be >= 1");
  if (alpha1_extra_rounds < 0) throw PrivregError(ErrorKind::kConfig, "alpha1_extra_rounds must be >= 0");
  require_positive(m, "m");
  require_positive(n0, "n0");
  require_positive(n1, "n1");
  require_positive(ell_prime, "ell_prime");
}

LadderSchedule ResolvedParams::schedule() const {
  LadderSchedule s;
  s.ell_bar = ell_bar;
  s.r_max = r_max;
  s.tau_max = tau_max;
  s.chi = chi;
  return s;
}

ResolvedParams compute_parameters(const RealClass& H, const RegLearnConfig& cfg) {
  cfg.validate();
  if (H.empty()) throw PrivregError(ErrorKind::kPrecondition, "hypothesis class is empty");
  ResolvedParams p;
  const DiscreteClass F = discretize_class(H, cfg.eta_bar);
  p.K = F.K();
  p.d = sfat2(F);
  p.fat = std::max(0, fat_alpha(H, cfg.c0 * cfg.eta_bar));
  p.ell_bar = cfg.ell_bar;
  p.chi = cfg.chi;
  p.alpha_delta = 18;
  p.r_max = p.d + 1;
  p.tau_max = 12 * (p.d + 1);

  const double eps = cfg.epsilon, eta = cfg.eta_bar, d = p.d, K = p.K;
  const double L = std::log(1.0 / (eps * cfg.delta * cfg.beta * eta));
  p.m_formula = cfg.C * cfg.ell_bar * std::pow(2 * d + 6, d + 4) * L * L / (eps * eta * eta);
  p.m = resolve(cfg.m, p.m_formula, "m", &p.m_overridden, true);
  p.n0_formula = cfg.C0 * (p.fat * std::log(1.0 / eta) + std::log(4.0 * p.m / cfg.beta)) / (eta * eta);
  p.n0 = resolve(cfg.n0, p.n0_formula, "n0", &p.n0_overridden, true);
  p.n1_formula = (cfg.C0 * p.fat * std::log(1.0 / eta) + std::log(8.0 / cfg.beta)) / (eps * eta * eta);
  p.n1 = resolve(cfg.n1, p.n1_formula, "n1", &p.n1_overridden, true);
  p.ell_prime_formula = std::max(cfg.ell_bar * std::pow(d + 3, d),
                                 cfg.C0 * K * K * (d * std::log(K) + 1));
  p.ell_prime = resolve(cfg.ell_prime, p.ell_prime_formula, "ell_prime", &p.ell_prime_overridden, false);
  p.n = p.n0 > kSaturate / p.m ? kSaturate : p.n0 * p.m;
  p.log_sparsity_formula = cfg.C * cfg.ell_bar * std::pow(2 * d + 6, d + 2) * K * K * d * std::log(K);
  return p;
}

RegLearner::RegLearner(const RealClass& H, const RegLearnConfig& cfg)
    : cfg_(cfg),
      params_(compute_parameters(H, cfg)),
      num_points_(H.num_points()),
      engine_(discretize_class(H, cfg.eta_bar)),
      schedule_(params_.schedule()) {
  filtered_ = filter_step(engine_, schedule_);
  for (const auto& level : filtered_.levels)
    for (const Mask& L : level) {
      Labels g = engine_.soa(L);
      auto it = std::find(universe_.begin(), universe_.end(), g);
      if (it == universe_.end()) {
        universe_.push_back(std::move(g));
        universe_class_.push_back(L);
      } else if (canonical_less(L, universe_class_[it - universe_.begin()])) {
        universe_class_[it - universe_.begin()] = L;
      }
    }
  // Data-independent sparsity: |U| capped by K^(formula exponent).
  sparsity_ = std::max<std::size_t>(1, universe_.size());
  const double cap_log = params_.log_sparsity_formula * std::log(static_cast<double>(params_.K));
  if (cap_log < std::log(static_cast<double>(sparsity_)))
    sparsity_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::exp(cap_log) + 1e-9)));
}

const std::vector<Labels>& RegLearner::rep_soas(const Labels& g_hat) {
  auto it = rep_cache_.find(g_hat);
  if (it != rep_cache_.end()) return it->second;
  const RepSetResult rs = soa_filter(engine_, g_hat, schedule_, &filtered_);
  std::set<Labels> soas;
  for (const Mask& L : rs.members) soas.insert(engine_.soa(L));
  return rep_cache_.emplace(g_hat, std::vector<Labels>(soas.begin(), soas.end())).first->second;
}

RegLearnOutput RegLearner::run(const std::vector<Sample>& data, Rng& rng) {
  const ResolvedParams& p = params_;
  const long long need = p.n1 + p.n;
  if (static_cast<long long>(data.size()) < need)
    throw PrivregError(ErrorKind::kPrecondition, "insufficient data: need " + std::to_string(need) +
                                                     " samples, got " + std::to_string(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i)
    if (data[i].first < 0 || static_cast<std::size_t>(data[i].first) >= num_points_)
      throw PrivregError(ErrorKind::kDomain, "sample " + std::to_string(i) + ": point outside domain");
  const std::vector<Sample> disc = discretize_dataset(data, cfg_.eta_bar);

  Rng eta_rng = rng.split(0), sel_rng = rng.split(1);
  RegLearnOutput out;
  RegLearnTranscript& tr = out.transcript;
  tr.universe_size = universe_.size();
  tr.sparsity = sparsity_;

  auto slice = [&](long long begin, long long count) {
    return EmpiricalDistribution::from_samples(
        num_points_, p.K, std::vector<Sample>(disc.begin() + begin, disc.begin() + begin + count));
  };
  tr.eta_hat = noisy_opt_error(engine_.ambient(), slice(0, p.n1), cfg_.epsilon,
                               static_cast<std::size_t>(p.n1), eta_rng);
  tr.alpha1 = tr.eta_hat.value + p.alpha_delta / 2 + (p.d + cfg_.alpha1_extra_rounds) * p.alpha_delta;

  ReduceTreeParams rt;
  rt.alpha1 = tr.alpha1;
  rt.alpha_delta = p.alpha_delta;
  rt.ell_prime = p.ell_prime;
  SelectionInstance inst;
  inst.sparsity = sparsity_;
  for (long long j = 0; j < p.m; ++j) {
    GroupRecord rec;
    const auto emp = slice(p.n1 + j * p.n0, p.n0);
    const ReduceTreeOutput r = reduce_tree_reg(engine_, hypothesis_errors(engine_, emp), rt);
    rec.error = r.error;
    rec.error_reason = r.error_reason;
    rec.t_final = r.t_final;
    rec.tree_depth = output_tree_depth(r);
    std::set<Labels> R;
    if (!r.error) {
      for (const Candidate& c : r.candidates) {
        rec.S_hat.push_back(c.g);
        const auto& soas = rep_soas(c.g);
        R.insert(soas.begin(), soas.end());
      }
    }
    rec.R.assign(R.begin(), R.end());
    tr.max_R = std::max(tr.max_R, rec.R.size());
    std::vector<CandidateId> ids;
    for (const auto& g : rec.R) ids.push_back(candidate_id(g));
    inst.user_sets.push_back(std::move(ids));
    tr.groups.push_back(std::move(rec));
  }

  PrivacyParams priv;
  priv.epsilon = cfg_.epsilon;
  priv.delta = cfg_.delta;
  tr.selection = sparse_select(inst, priv, sel_rng);
  if (!tr.selection.winner) return out;
  for (std::size_t i = 0; i < universe_.size(); ++i) {
    if (candidate_id(universe_[i]) != *tr.selection.winner) continue;
    out.bottom = false;
    out.g_hat = universe_[i];
    out.L_hat = engine_.materialize(universe_class_[i]);
    out.h_hat = undisc_hypothesis(out.g_hat, p.K);
    break;
  }
  return out;
}

RegLearnOutput reg_learn(const RealClass& H, const std::vector<Sample>& data,
                         const RegLearnConfig& cfg, Rng& rng) {
  RegLearner learner(H, cfg);
  return learner.run(data, rng);
}

double excess_risk(const Values& h_hat, const EmpiricalDistribution& Q, const RealClass& H) {
  if (Q.discrete()) throw PrivregError(ErrorKind::kDomain, "excess risk needs real labels");
  if (h_hat.size() != H.num_points() || Q.num_points() != H.num_points())
    throw PrivregError(ErrorKind::kDomain, "hypothesis, class and distribution domains differ");
  if (H.empty()) throw PrivregError(ErrorKind::kPrecondition, "empty class");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : H.hypotheses()) best = std::min(best, abs_error(h, Q));
  return abs_error(h_hat, Q) - best;
}

std::vector<Sample> draw_samples(const EmpiricalDistribution& Q, std::size_t n, Rng& rng) {
  std::vector<Sample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_atom(Q, rng));
  return out;
}

}  // namespace privreg
