// Finite domains, hypothesis classes, restrictions, discretization and
// absolute-loss error functionals.
#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace privreg {

enum class ErrorKind {
  kDomain,
  kPrecondition,
  kFormat,
  kConfig,
  kSchema,
  kRefusal,
  kTheoreticalScale,
};

const char* error_kind_name(ErrorKind kind);

class PrivregError : public std::runtime_error {
 public:
  PrivregError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Labels are 1..K; real values live in [-1, 1].
using Labels = std::vector<int>;
using Values = std::vector<double>;

// A (point index, label) constraint. Restriction sets are kept sorted and
// deduplicated; conflicting labels on one point are legal.
using Constraint = std::pair<int, int>;
using RestrictionSet = std::vector<Constraint>;

RestrictionSet canonical(RestrictionSet a);
RestrictionSet merge(const RestrictionSet& a, const RestrictionSet& b);

class Domain {
 public:
  explicit Domain(std::vector<std::string> ids);
  // Points named x1..xn.
  static std::shared_ptr<const Domain> numbered(std::size_t n);

  std::size_t size() const { return ids_.size(); }
  const std::string& id(std::size_t i) const { return ids_.at(i); }
  const std::vector<std::string>& ids() const { return ids_; }
  // -1 when absent.
  int index_of(const std::string& id) const;

 private:
  std::vector<std::string> ids_;
};

using DomainPtr = std::shared_ptr<const Domain>;

class DiscreteClass {
 public:
  DiscreteClass(DomainPtr domain, int K, std::vector<Labels> hypotheses);

  const Domain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  std::size_t num_points() const { return domain_->size(); }
  int K() const { return K_; }
  std::size_t size() const { return hyps_.size(); }
  bool empty() const { return hyps_.empty(); }
  const std::vector<Labels>& hypotheses() const { return hyps_; }
  const Labels& operator[](std::size_t i) const { return hyps_[i]; }
  // Number of duplicates removed during canonicalization.
  std::size_t duplicates_removed() const { return dups_; }

  bool operator==(const DiscreteClass& o) const {
    return K_ == o.K_ && num_points() == o.num_points() && hyps_ == o.hyps_;
  }

 private:
  DomainPtr domain_;
  int K_;
  std::vector<Labels> hyps_;
  std::size_t dups_ = 0;
};

class RealClass {
 public:
  RealClass(DomainPtr domain, std::vector<Values> hypotheses);

  const Domain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  std::size_t num_points() const { return domain_->size(); }
  std::size_t size() const { return hyps_.size(); }
  bool empty() const { return hyps_.empty(); }
  const std::vector<Values>& hypotheses() const { return hyps_; }
  const Values& operator[](std::size_t i) const { return hyps_[i]; }
  std::size_t duplicates_removed() const { return dups_; }

 private:
  DomainPtr domain_;
  std::vector<Values> hyps_;
  std::size_t dups_ = 0;
};

struct Atom {
  int point;
  double y;
  double weight;
};

// Weighted finite set of (point, label) pairs. Labels are either reals in
// [-1, 1] (K == 0) or integers in 1..K.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution(std::size_t num_points, int K, std::vector<Atom> atoms);
  // Uniform weights over samples; repeated samples are merged.
  static EmpiricalDistribution from_samples(
      std::size_t num_points, int K,
      const std::vector<std::pair<int, double>>& samples);

  std::size_t num_points() const { return num_points_; }
  int K() const { return K_; }
  bool discrete() const { return K_ > 0; }
  const std::vector<Atom>& atoms() const { return atoms_; }

 private:
  std::size_t num_points_;
  int K_;
  std::vector<Atom> atoms_;
};

using Sample = std::pair<int, double>;

int label_count(double eta);
int discretize_value(double y, double eta);
DiscreteClass discretize_class(const RealClass& H, double eta);
std::vector<Sample> discretize_dataset(const std::vector<Sample>& data,
                                       double eta);
EmpiricalDistribution discretize_distribution(const EmpiricalDistribution& Q,
                                              double eta);
Values undisc_hypothesis(const Labels& g, int K);

DiscreteClass restrict(const DiscreteClass& F, const RestrictionSet& a);

double abs_error(const Labels& f, const EmpiricalDistribution& P);
double abs_error(const Values& h, const EmpiricalDistribution& P);

// All distinct nonempty classes F|_S, descending size then lexicographic.
std::vector<DiscreteClass> enumerate_restriction_subclasses(
    const DiscreteClass& F);

int sup_distance(const Labels& a, const Labels& b);

}  // namespace privreg
