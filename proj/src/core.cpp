// Class-core implementation.
#include "privreg/core.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace privreg {

namespace {

constexpr double kRangeTol = 1e-12;

[[noreturn]] void domain_error(const std::string& msg) {
  throw PrivregError(ErrorKind::kDomain, msg);
}

void check_eta(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    std::ostringstream os;
    os << "eta must lie in (0,1), got " << eta;
    domain_error(os.str());
  }
}

template <typename V>
std::vector<V> canonicalize(std::vector<V> hyps, std::size_t* dups) {
  std::sort(hyps.begin(), hyps.end());
  const auto before = hyps.size();
  hyps.erase(std::unique(hyps.begin(), hyps.end()), hyps.end());
  *dups = before - hyps.size();
  return hyps;
}

}  // namespace

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kRefusal: return "refusal";
    case ErrorKind::kTheoreticalScale: return "theoretical-scale";
  }
  return "unknown";
}

RestrictionSet canonical(RestrictionSet a) {
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

RestrictionSet merge(const RestrictionSet& a, const RestrictionSet& b) {
  RestrictionSet out = a;
  out.insert(out.end(), b.begin(), b.end());
  return canonical(std::move(out));
}

Domain::Domain(std::vector<std::string> ids) : ids_(std::move(ids)) {
  if (ids_.empty()) domain_error("domain must be nonempty");
  std::set<std::string> seen(ids_.begin(), ids_.end());
  if (seen.size() != ids_.size()) domain_error("domain ids must be unique");
}

std::shared_ptr<const Domain> Domain::numbered(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("x" + std::to_string(i + 1));
  return std::make_shared<const Domain>(std::move(ids));
}

int Domain::index_of(const std::string& id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) return -1;
  return static_cast<int>(it - ids_.begin());
}

DiscreteClass::DiscreteClass(DomainPtr domain, int K,
                             std::vector<Labels> hypotheses)
    : domain_(std::move(domain)), K_(K) {
  if (!domain_) domain_error("null domain");
  if (K_ < 1) domain_error("label count K must be positive");
  for (const auto& h : hypotheses) {
    if (h.size() != domain_->size())
      domain_error("hypothesis length does not match domain size");
    for (int v : h)
      if (v < 1 || v > K_)
        domain_error("label " + std::to_string(v) + " outside 1.." +
                     std::to_string(K_));
  }
  hyps_ = canonicalize(std::move(hypotheses), &dups_);
}

RealClass::RealClass(DomainPtr domain, std::vector<Values> hypotheses)
    : domain_(std::move(domain)) {
  if (!domain_) domain_error("null domain");
  for (const auto& h : hypotheses) {
    if (h.size() != domain_->size())
      domain_error("hypothesis length does not match domain size");
    for (double v : h)
      if (!(v >= -1.0 - kRangeTol && v <= 1.0 + kRangeTol))
        domain_error("real hypothesis value outside [-1,1]");
  }
  hyps_ = canonicalize(std::move(hypotheses), &dups_);
}

EmpiricalDistribution::EmpiricalDistribution(std::size_t num_points, int K,
                                             std::vector<Atom> atoms)
    : num_points_(num_points), K_(K), atoms_(std::move(atoms)) {
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (a.point < 0 || static_cast<std::size_t>(a.point) >= num_points_)
      domain_error("atom point outside domain");
    if (a.weight < 0.0) domain_error("negative atom weight");
    if (K_ > 0) {
      if (a.y != std::floor(a.y) || a.y < 1 || a.y > K_)
        domain_error("discrete atom label outside 1..K");
    } else if (!(a.y >= -1.0 - kRangeTol && a.y <= 1.0 + kRangeTol)) {
      domain_error("real atom label outside [-1,1]");
    }
    total += a.weight;
  }
  if (!atoms_.empty() && std::fabs(total - 1.0) > 1e-12)
    domain_error("atom weights must sum to 1");
}

EmpiricalDistribution EmpiricalDistribution::from_samples(
    std::size_t num_points, int K, const std::vector<Sample>& samples) {
  std::map<std::pair<int, double>, std::size_t> counts;
  for (const auto& s : samples) ++counts[s];
  std::vector<Atom> atoms;
  const double n = static_cast<double>(samples.size());
  for (const auto& [key, c] : counts)
    atoms.push_back({key.first, key.second, static_cast<double>(c) / n});
  return EmpiricalDistribution(num_points, K, std::move(atoms));
}

int label_count(double eta) {
  check_eta(eta);
  // The tolerance keeps ceil(2/eta) exact when 2/eta is an integer that
  // floating-point division rounds up slightly.
  return static_cast<int>(std::ceil(2.0 / eta - 1e-9));
}

int discretize_value(double y, double eta) {
  const int K = label_count(eta);
  if (!(y >= -1.0 && y <= 1.0)) {
    std::ostringstream os;
    os << "value " << y << " outside [-1,1]";
    domain_error(os.str());
  }
  if (y == 1.0) return K;
  const int k = 1 + static_cast<int>(std::floor((y + 1.0) / 2.0 * K));
  return std::clamp(k, 1, K);
}

DiscreteClass discretize_class(const RealClass& H, double eta) {
  const int K = label_count(eta);
  std::vector<Labels> out;
  out.reserve(H.size());
  for (const auto& h : H.hypotheses()) {
    Labels g(h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
      g[i] = discretize_value(std::clamp(h[i], -1.0, 1.0), eta);
    out.push_back(std::move(g));
  }
  return DiscreteClass(H.domain_ptr(), K, std::move(out));
}

std::vector<Sample> discretize_dataset(const std::vector<Sample>& data,
                                       double eta) {
  std::vector<Sample> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    try {
      out.emplace_back(data[i].first, discretize_value(data[i].second, eta));
    } catch (const PrivregError& e) {
      domain_error("sample " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

EmpiricalDistribution discretize_distribution(const EmpiricalDistribution& Q,
                                              double eta) {
  if (Q.discrete()) domain_error("distribution is already discrete");
  std::map<std::pair<int, int>, double> merged;
  for (const auto& a : Q.atoms())
    merged[{a.point, discretize_value(std::clamp(a.y, -1.0, 1.0), eta)}] +=
        a.weight;
  std::vector<Atom> atoms;
  for (const auto& [key, w] : merged)
    atoms.push_back({key.first, static_cast<double>(key.second), w});
  return EmpiricalDistribution(Q.num_points(), label_count(eta),
                               std::move(atoms));
}

Values undisc_hypothesis(const Labels& g, int K) {
  Values h(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] < 1 || g[i] > K) domain_error("label outside 1..K");
    h[i] = -1.0 + (2.0 / K) * (g[i] - 1);
  }
  return h;
}

DiscreteClass restrict(const DiscreteClass& F, const RestrictionSet& a) {
  for (const auto& [x, k] : a) {
    if (x < 0 || static_cast<std::size_t>(x) >= F.num_points())
      domain_error("restriction point outside domain");
    if (k < 1 || k > F.K()) domain_error("restriction label outside 1..K");
  }
  std::vector<Labels> kept;
  for (const auto& f : F.hypotheses()) {
    bool ok = true;
    for (const auto& [x, k] : a)
      if (f[x] != k) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(f);
  }
  return DiscreteClass(F.domain_ptr(), F.K(), std::move(kept));
}

namespace {

template <typename V>
double error_of(const V& f, const EmpiricalDistribution& P) {
  if (f.size() != P.num_points())
    domain_error("hypothesis and distribution domains differ");
  double total = 0.0;
  for (const auto& a : P.atoms())
    total += a.weight * std::fabs(static_cast<double>(f[a.point]) - a.y);
  return total;
}

}  // namespace

double abs_error(const Labels& f, const EmpiricalDistribution& P) {
  return error_of(f, P);
}

double abs_error(const Values& h, const EmpiricalDistribution& P) {
  return error_of(h, P);
}

std::vector<DiscreteClass> enumerate_restriction_subclasses(
    const DiscreteClass& F) {
  using Members = std::vector<std::size_t>;
  std::vector<DiscreteClass> out;
  if (F.empty()) return out;
  Members all(F.size());
  for (std::size_t i = 0; i < F.size(); ++i) all[i] = i;
  std::set<Members> seen{all};
  std::deque<Members> queue{all};
  while (!queue.empty()) {
    Members cur = queue.front();
    queue.pop_front();
    for (std::size_t x = 0; x < F.num_points(); ++x)
      for (int k = 1; k <= F.K(); ++k) {
        Members next;
        for (auto i : cur)
          if (F[i][x] == k) next.push_back(i);
        if (!next.empty() && seen.insert(next).second) queue.push_back(next);
      }
  }
  std::vector<Members> sets(seen.begin(), seen.end());
  // Member indices follow the lexicographic hypothesis order, so comparing
  // index lists compares hypothesis lists.
  std::sort(sets.begin(), sets.end(), [](const Members& a, const Members& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  for (const auto& s : sets) {
    std::vector<Labels> hyps;
    for (auto i : s) hyps.push_back(F[i]);
    out.emplace_back(F.domain_ptr(), F.K(), std::move(hyps));
  }
  return out;
}

int sup_distance(const Labels& a, const Labels& b) {
  if (a.size() != b.size()) domain_error("hypotheses of different length");
  int best = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    best = std::max(best, std::abs(a[i] - b[i]));
  return best;
}

}  // namespace privreg
