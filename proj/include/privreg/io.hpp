// JSON file formats for classes, datasets, trees and certificates.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "privreg/core.hpp"
#include "privreg/tree.hpp"

namespace privreg {

using Json = nlohmann::json;

struct LoadedClass {
  std::optional<DiscreteClass> discrete;
  std::optional<RealClass> real;
  std::vector<std::string> warnings;
  const Domain& domain() const { return discrete ? discrete->domain() : real->domain(); }
  const DomainPtr& domain_ptr() const {
    return discrete ? discrete->domain_ptr() : real->domain_ptr();
  }
};

// {"domain": [ids], "K": int | "real": true, "hypotheses": [[...]]}.
LoadedClass parse_class(const Json& j);
LoadedClass load_class_file(const std::string& path);

Json class_to_json(const DiscreteClass& F);
Json class_to_json(const RealClass& H);

// {"samples": [[point_id, y], ...]} with point ids resolved against `domain`.
std::vector<Sample> parse_dataset(const Json& j, const Domain& domain);
Json dataset_to_json(const std::vector<Sample>& data, const Domain& domain);

// Finite-atom distribution {"atoms": [[point_id, y, weight], ...]}; K == 0
// for real labels.
EmpiricalDistribution parse_distribution(const Json& j, const Domain& domain, int K);

// Nested records {"point": id | null, "children": {"label": subtree}}.
Json tree_to_json(const KaryTree& tree, const Domain& domain);

Json certificate_to_json(const ShatteringCertificate& cert, const Domain& domain);
ShatteringCertificate parse_certificate(const Json& j, const Domain& domain);

// Parse errors and missing files are schema errors naming the path.
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace privreg
