// JSON serialization with field-level schema diagnostics.
#include "privreg/io.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace privreg {

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw PrivregError(ErrorKind::kSchema, where + ": " + what);
}

void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) schema_error(where, "unknown key \"" + key + "\"");
}

const Json& require(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) schema_error(where, "missing key \"" + key + "\"");
  return j.at(key);
}

int point_index(const Json& v, const Domain& domain, const std::string& where) {
  if (!v.is_string()) schema_error(where, "point id must be a string");
  const int idx = domain.index_of(v.get<std::string>());
  if (idx < 0) schema_error(where, "unknown point id \"" + v.get<std::string>() + "\"");
  return idx;
}

double number(const Json& v, const std::string& where) {
  if (!v.is_number()) schema_error(where, "expected a number");
  return v.get<double>();
}

DomainPtr parse_domain(const Json& j) {
  const Json& d = require(j, "domain", "class");
  if (!d.is_array() || d.empty()) schema_error("class.domain", "expected a nonempty array of ids");
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!d[i].is_string()) schema_error("class.domain[" + std::to_string(i) + "]", "expected a string");
    ids.push_back(d[i].get<std::string>());
  }
  try {
    return std::make_shared<const Domain>(std::move(ids));
  } catch (const PrivregError& e) {
    schema_error("class.domain", e.what());
  }
}

}  // namespace

LoadedClass parse_class(const Json& j) {
  reject_unknown_keys(j, {"domain", "K", "real", "hypotheses"}, "class");
  const DomainPtr dom = parse_domain(j);
  const bool real = j.contains("real");
  if (real && (!j["real"].is_boolean() || !j["real"].get<bool>()))
    schema_error("class.real", "must be true when present");
  if (real == j.contains("K")) schema_error("class", "exactly one of \"K\" and \"real\" is required");
  int K = 0;
  if (!real) {
    const Json& k = j["K"];
    if (!k.is_number_integer() || k.get<long long>() < 1) schema_error("class.K", "expected an integer >= 1");
    K = k.get<int>();
  }
  const Json& hs = require(j, "hypotheses", "class");
  if (!hs.is_array()) schema_error("class.hypotheses", "expected an array");
  std::vector<Labels> disc;
  std::vector<Values> vals;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const std::string where = "class.hypotheses[" + std::to_string(i) + "]";
    if (!hs[i].is_array() || hs[i].size() != dom->size())
      schema_error(where, "expected an array of " + std::to_string(dom->size()) + " values");
    Labels g;
    Values h;
    for (std::size_t x = 0; x < dom->size(); ++x) {
      const std::string w = where + "[" + std::to_string(x) + "]";
      const Json& v = hs[i][x];
      if (real) {
        const double y = number(v, w);
        if (!(y >= -1 && y <= 1)) schema_error(w, "value " + v.dump() + " outside [-1,1]");
        h.push_back(y);
      } else {
        if (!v.is_number_integer()) schema_error(w, "expected an integer label");
        const long long y = v.get<long long>();
        if (y < 1 || y > K) schema_error(w, "label " + v.dump() + " outside 1.." + std::to_string(K));
        g.push_back(static_cast<int>(y));
      }
    }
    if (real) vals.push_back(std::move(h));
    else disc.push_back(std::move(g));
  }
  LoadedClass out;
  std::size_t dups;
  if (real) {
    out.real.emplace(dom, std::move(vals));
    dups = out.real->duplicates_removed();
  } else {
    out.discrete.emplace(dom, K, std::move(disc));
    dups = out.discrete->duplicates_removed();
  }
  if (dups) out.warnings.push_back("removed " + std::to_string(dups) + " duplicate hypotheses");
  return out;
}

LoadedClass load_class_file(const std::string& path) { return parse_class(read_json_file(path)); }

Json class_to_json(const DiscreteClass& F) {
  return Json{{"domain", F.domain().ids()}, {"K", F.K()}, {"hypotheses", F.hypotheses()}};
}

Json class_to_json(const RealClass& H) {
  return Json{{"domain", H.domain().ids()}, {"real", true}, {"hypotheses", H.hypotheses()}};
}

std::vector<Sample> parse_dataset(const Json& j, const Domain& domain) {
  reject_unknown_keys(j, {"samples"}, "dataset");
  const Json& s = require(j, "samples", "dataset");
  if (!s.is_array()) schema_error("dataset.samples", "expected an array");
  std::vector<Sample> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::string where = "dataset.samples[" + std::to_string(i) + "]";
    if (!s[i].is_array() || s[i].size() != 2) schema_error(where, "expected [point_id, y]");
    out.emplace_back(point_index(s[i][0], domain, where + "[0]"), number(s[i][1], where + "[1]"));
  }
  return out;
}

Json dataset_to_json(const std::vector<Sample>& data, const Domain& domain) {
  Json s = Json::array();
  for (const auto& [x, y] : data) s.push_back(Json::array({domain.id(x), y}));
  return Json{{"samples", s}};
}

EmpiricalDistribution parse_distribution(const Json& j, const Domain& domain, int K) {
  reject_unknown_keys(j, {"atoms"}, "distribution");
  const Json& a = require(j, "atoms", "distribution");
  if (!a.is_array() || a.empty()) schema_error("distribution.atoms", "expected a nonempty array");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string where = "distribution.atoms[" + std::to_string(i) + "]";
    if (!a[i].is_array() || a[i].size() != 3) schema_error(where, "expected [point_id, y, weight]");
    atoms.push_back({point_index(a[i][0], domain, where + "[0]"), number(a[i][1], where + "[1]"),
                     number(a[i][2], where + "[2]")});
  }
  try {
    return EmpiricalDistribution(domain.size(), K, std::move(atoms));
  } catch (const PrivregError& e) {
    schema_error("distribution", e.what());
  }
}

Json tree_to_json(const KaryTree& tree, const Domain& domain) {
  std::function<Json(int)> rec = [&](int v) {
    const TreeNode& n = tree.node(v);
    Json children = Json::object();
    for (int c : n.children) children[std::to_string(tree.node(c).edge)] = rec(c);
    return Json{{"point", n.point < 0 ? Json(nullptr) : Json(domain.id(n.point))},
                {"children", children}};
  };
  return rec(0);
}

Json certificate_to_json(const ShatteringCertificate& cert, const Domain& domain) {
  Json pts = Json::array();
  for (int p : cert.points) pts.push_back(domain.id(p));
  return Json{{"depth", cert.depth}, {"points", pts}, {"witness", cert.witness}};
}

ShatteringCertificate parse_certificate(const Json& j, const Domain& domain) {
  reject_unknown_keys(j, {"depth", "points", "witness"}, "certificate");
  ShatteringCertificate c;
  const Json& d = require(j, "depth", "certificate");
  if (!d.is_number_integer()) schema_error("certificate.depth", "expected an integer");
  c.depth = d.get<int>();
  const Json& p = require(j, "points", "certificate");
  const Json& w = require(j, "witness", "certificate");
  if (!p.is_array() || !w.is_array()) schema_error("certificate", "points and witness must be arrays");
  for (std::size_t i = 0; i < p.size(); ++i)
    c.points.push_back(point_index(p[i], domain, "certificate.points[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < w.size(); ++i)
    c.witness.push_back(number(w[i], "certificate.witness[" + std::to_string(i) + "]"));
  return c;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) schema_error(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    schema_error(path, e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw PrivregError(ErrorKind::kConfig, "cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace privreg
