// Experiment driver: config handling, subcommands and run reports.
#include "privreg/cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>

#include "CLI11.hpp"
#include "privreg/dp.hpp"
#include "privreg/engine.hpp"
#include "privreg/oracles.hpp"
#include "privreg/reducing_tree.hpp"
#include "privreg/reglearn.hpp"
#include "privreg/stability_filter.hpp"
#include "privreg/tree_learner.hpp"

namespace privreg {

const char* const kVersion = "privreg 0.1.0";
const std::vector<std::string> kCommands = {
    "dims", "irred", "soa", "reduce-tree", "reduce-tree-cert", "filter",
    "soafilter", "reglearn", "audit", "oracle-check"};

namespace {

namespace fs = std::filesystem;

[[noreturn]] void config_error(const std::string& what) {
  throw PrivregError(ErrorKind::kConfig, what);
}

// Outcome flags that are not exceptions.
struct Outcome {
  int exit_code = kExitOk;
  Json outputs = Json::object();
};

// Typed accessors over the command's config object; every key read is
// checked against the command's allowed set up front.
class Config {
 public:
  Config(Json j, std::string base_dir) : j_(std::move(j)), base_(std::move(base_dir)) {}

  void check_keys(const std::set<std::string>& allowed, const std::string& command) const {
    for (const auto& [key, value] : j_.items())
      if (!allowed.count(key)) config_error("unknown config key \"" + key + "\" for command " + command);
  }

  // Null values count as absent so overrides can clear a key.
  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const Json& raw(const std::string& key) const {
    if (!has(key)) config_error("missing config key \"" + key + "\"");
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key) const {
    try {
      return raw(key).get<T>();
    } catch (const Json::exception&) {
      config_error("config key \"" + key + "\" has the wrong type");
    }
  }
  template <typename T>
  T get(const std::string& key, T fallback) const {
    return has(key) ? get<T>(key) : fallback;
  }

  Config sub(const std::string& key) const {
    if (!has(key)) return Config(Json::object(), base_);
    if (!raw(key).is_object()) config_error("config key \"" + key + "\" must be an object");
    return Config(raw(key), base_);
  }

  // Inline object, or a path relative to the config file.
  Json document(const std::string& key) const {
    const Json& v = raw(key);
    if (v.is_object()) return v;
    if (!v.is_string()) config_error("config key \"" + key + "\" must be an object or a path");
    fs::path p(v.get<std::string>());
    if (p.is_relative()) p = fs::path(base_) / p;
    return read_json_file(p.string());
  }

  const Json& json() const { return j_; }

 private:
  Json j_;
  std::string base_;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json level_json(long long level) { return level == kInfiniteLevel ? Json("inf") : Json(level); }

struct Context {
  const Config& cfg;
  std::optional<std::uint64_t> seed;
  Json inputs = Json::object();  // expanded documents for the digest
  std::vector<std::string> warnings;

  std::uint64_t require_seed() const {
    if (!seed) config_error("this command is randomized; --seed or config key \"seed\" is required");
    return *seed;
  }

  LoadedClass load_class(const std::string& key = "class") {
    Json doc = cfg.document(key);
    inputs[key] = doc;
    LoadedClass c = parse_class(doc);
    for (const auto& w : c.warnings) {
      spdlog::warn("{}: {}", key, w);
      warnings.push_back(key + ": " + w);
    }
    return c;
  }

  // Discrete classes pass through; real classes need "eta".
  DiscreteClass discrete_class() {
    LoadedClass c = load_class();
    if (c.discrete) return *c.discrete;
    if (!cfg.has("eta")) config_error("real-valued class needs \"eta\" for discretization");
    return discretize_class(*c.real, cfg.get<double>("eta"));
  }

  RealClass real_class() {
    LoadedClass c = load_class();
    if (!c.real) config_error("this command needs a real-valued class");
    return *c.real;
  }
};

Json hypotheses_json(const ClassEngine& engine, const Mask& m) {
  return engine.materialize(m).hypotheses();
}

int point_of(const Config& cfg, const std::string& key, const Domain& dom) {
  const int x = dom.index_of(cfg.get<std::string>(key));
  if (x < 0) config_error("config key \"" + key + "\" names an unknown point");
  return x;
}

LadderSchedule schedule_from(const Config& cfg, int d) {
  LadderSchedule s = default_schedule(d, cfg.get<long long>("ell_bar", 1), cfg.get<int>("chi", 5));
  s.r_max = cfg.get<int>("r_max", s.r_max);
  s.tau_max = cfg.get<int>("tau_max", s.tau_max);
  s.validate();
  return s;
}

Json schedule_json(const LadderSchedule& s) {
  return Json{{"ell_bar", s.ell_bar}, {"r_max", s.r_max}, {"tau_max", s.tau_max}, {"chi", s.chi}};
}

// ---------------------------------------------------------------- commands

Outcome cmd_dims(Context& ctx) {
  ctx.cfg.check_keys({"class", "alpha", "eta", "seed"}, "dims");
  Outcome o;
  LoadedClass c = ctx.load_class();
  auto discrete_dims = [&](const DiscreteClass& F) {
    Json r;
    r["K"] = F.K();
    r["size"] = F.size();
    r["sfat2"] = sfat2(F);
    r["fat2"] = fat2(F);
    if (sfat2(F) >= 1) {
      const ShatteringCertificate cert = extract_sfat_certificate(F);
      r["certificate"] = certificate_to_json(cert, F.domain());
      r["certificate_verified"] = verify_certificate(F, cert);
    } else {
      r["certificate"] = nullptr;
    }
    return r;
  };
  if (c.discrete) {
    o.outputs = discrete_dims(*c.discrete);
  } else {
    const double alpha = ctx.cfg.get<double>("alpha", 0.5);
    if (!(alpha > 0)) config_error("alpha must be positive");
    o.outputs["alpha"] = alpha;
    o.outputs["sfat_alpha"] = sfat_alpha(*c.real, alpha);
    o.outputs["fat_alpha"] = fat_alpha(*c.real, alpha);
    if (ctx.cfg.has("eta")) {
      const double eta = ctx.cfg.get<double>("eta");
      o.outputs["discretized"] = discrete_dims(discretize_class(*c.real, eta));
      o.outputs["discretized"]["eta"] = eta;
    }
  }
  return o;
}

Outcome cmd_irred(Context& ctx) {
  ctx.cfg.check_keys({"class", "eta", "l", "cap", "seed"}, "irred");
  Outcome o;
  const DiscreteClass F = ctx.discrete_class();
  const long long cap = ctx.cfg.get<long long>("cap", 8);
  if (cap < 1) config_error("cap must be >= 1");
  const IrreducibilityLevel lv = irreducibility_level(F, cap);
  o.outputs["sfat2"] = sfat2(F);
  o.outputs["level"] = lv.infinite ? Json("inf") : Json(lv.value);
  o.outputs["capped"] = lv.capped;
  if (ctx.cfg.has("l")) {
    const long long l = ctx.cfg.get<long long>("l");
    if (l < 0) config_error("l must be >= 0");
    o.outputs["l"] = l;
    o.outputs["l_irreducible"] = is_l_irreducible(F, l);
    if (l >= 1) {
      const auto w = reduction_witness_tree(F, l);
      o.outputs["witness_tree"] = w ? tree_to_json(*w, F.domain()) : Json(nullptr);
    }
  }
  return o;
}

Outcome cmd_soa(Context& ctx) {
  ctx.cfg.check_keys({"class", "eta", "seed"}, "soa");
  Outcome o;
  const DiscreteClass G = ctx.discrete_class();
  o.outputs["soa"] = soa(G);
  return o;
}

Outcome cmd_reduce_tree(Context& ctx) {
  ctx.cfg.check_keys({"class", "eta", "dataset", "alpha1", "alpha_delta", "ell_prime", "seed"},
                     "reduce-tree");
  Outcome o;
  const DiscreteClass F = ctx.discrete_class();
  Json ds = ctx.cfg.document("dataset");
  ctx.inputs["dataset"] = ds;
  std::vector<Sample> data = parse_dataset(ds, F.domain());
  if (ctx.cfg.has("eta")) data = discretize_dataset(data, ctx.cfg.get<double>("eta"));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double y = data[i].second;
    if (y != std::floor(y) || y < 1 || y > F.K())
      throw PrivregError(ErrorKind::kSchema, "dataset.samples[" + std::to_string(i) +
                                                 "][1]: expected an integer label in 1.." +
                                                 std::to_string(F.K()));
  }
  if (data.empty()) throw PrivregError(ErrorKind::kPrecondition, "dataset is empty");
  ReduceTreeParams p;
  p.alpha1 = ctx.cfg.get<double>("alpha1");
  p.alpha_delta = ctx.cfg.get<double>("alpha_delta");
  p.ell_prime = ctx.cfg.get<long long>("ell_prime");
  p.validate();
  ClassEngine engine(F);
  const ReduceTreeOutput r =
      reduce_tree_reg(engine, EmpiricalDistribution::from_samples(F.num_points(), F.K(), data), p);
  o.outputs["error"] = r.error;
  if (r.error) {
    o.outputs["error_reason"] = r.error_reason;
    o.exit_code = kExitTreeError;
    return o;
  }
  o.outputs["d"] = r.d;
  o.outputs["t_final"] = r.t_final;
  o.outputs["expansions_per_round"] = r.expansions_per_round;
  o.outputs["tree"] = tree_to_json(r.tree, F.domain());
  o.outputs["tree_depth"] = output_tree_depth(r);
  Json cands = Json::array();
  for (const Candidate& c : r.candidates)
    cands.push_back(Json{{"soa", c.g}, {"class", hypotheses_json(engine, c.defining)}});
  o.outputs["S_hat"] = cands;
  return o;
}

Outcome cmd_reduce_tree_cert(Context& ctx) {
  ctx.cfg.check_keys({"class", "eta", "x", "y", "ell", "seed"}, "reduce-tree-cert");
  Outcome o;
  const DiscreteClass H = ctx.discrete_class();
  const int x = point_of(ctx.cfg, "x", H.domain());
  const int y = ctx.cfg.get<int>("y");
  if (y < 1 || y > H.K()) config_error("y must lie in 1..K");
  const auto ell_values = ctx.cfg.get<std::vector<long long>>("ell");
  if (ell_values.empty()) config_error("ell must be a nonempty list");
  ClassEngine engine(H);
  const EllSequence ell(ell_values);
  const KaryTree tree = build_reducing_tree(engine, engine.full(), x, y, ell);
  const Verdict v = validate_reducing_tree(engine, engine.full(), x, y, ell, tree);
  o.outputs["tree"] = tree_to_json(tree, H.domain());
  o.outputs["depth"] = tree.depth();
  o.outputs["valid"] = v.ok;
  if (!v.ok) o.outputs["invalid_reason"] = v.reason;
  return o;
}

Outcome cmd_filter(Context& ctx) {
  ctx.cfg.check_keys({"class", "eta", "ell_bar", "r_max", "tau_max", "chi", "seed"}, "filter");
  Outcome o;
  ClassEngine engine(ctx.discrete_class());
  const LadderSchedule s = schedule_from(ctx.cfg, engine.sfat2(engine.full()));
  const FilteredSets fs = filter_step(engine, s);
  o.outputs["schedule"] = schedule_json(s);
  o.outputs["d"] = fs.d;
  Json levels = Json::array();
  for (std::size_t lv = 0; lv < fs.levels.size(); ++lv) {
    Json entries = Json::array();
    for (const Mask& H : fs.levels[lv]) {
      Json e{{"class", hypotheses_json(engine, H)}, {"level", level_json(engine.level(H))}};
      const auto it = fs.rep.find(H);
      if (it != fs.rep.end()) {
        e["rep"] = hypotheses_json(engine, it->second);
        e["rep_soa"] = engine.soa(it->second);
      }
      entries.push_back(std::move(e));
    }
    levels.push_back(Json{{"sfat2", lv}, {"sets", entries}});
  }
  o.outputs["levels"] = levels;
  return o;
}

Outcome cmd_soafilter(Context& ctx) {
  ctx.cfg.check_keys({"class", "eta", "g_hat", "ell_bar", "r_max", "tau_max", "chi", "seed"},
                     "soafilter");
  Outcome o;
  ClassEngine engine(ctx.discrete_class());
  const LadderSchedule s = schedule_from(ctx.cfg, engine.sfat2(engine.full()));
  const Labels g = ctx.cfg.get<Labels>("g_hat");
  if (g.size() != engine.num_points()) config_error("g_hat must have one label per point");
  for (int v : g)
    if (v < 1 || v > engine.K()) config_error("g_hat labels must lie in 1..K");
  const RepSetResult r = soa_filter(engine, g, s);
  o.outputs["schedule"] = schedule_json(s);
  Json members = Json::array();
  for (const Mask& L : r.members)
    members.push_back(Json{{"class", hypotheses_json(engine, L)},
                           {"soa", engine.soa(L)},
                           {"level", level_json(engine.level(L))}});
  o.outputs["members"] = members;
  o.outputs["removed_far"] = r.removed_far;
  o.outputs["reducing_trees"] = r.reducing_trees;
  o.outputs["queued"] = r.queued.size();
  return o;
}

RegLearnConfig reglearn_config(const Config& cfg, std::uint64_t seed) {
  const Config p = cfg.sub("params"), ov = cfg.sub("overrides");
  p.check_keys({"epsilon", "delta", "eta_bar", "beta", "ell_bar", "C0", "c0", "C1", "C", "chi",
                "alpha1_extra_rounds"},
               "reglearn params");
  ov.check_keys({"m", "n0", "n1", "ell_prime"}, "reglearn overrides");
  RegLearnConfig c;
  c.epsilon = p.get<double>("epsilon", c.epsilon);
  c.delta = p.get<double>("delta", c.delta);
  c.eta_bar = p.get<double>("eta_bar", c.eta_bar);
  c.beta = p.get<double>("beta", c.beta);
  c.ell_bar = p.get<long long>("ell_bar", c.ell_bar);
  c.C0 = p.get<double>("C0", c.C0);
  c.c0 = p.get<double>("c0", c.c0);
  c.C1 = p.get<double>("C1", c.C1);
  c.C = p.get<double>("C", c.C);
  c.chi = p.get<int>("chi", c.chi);
  c.alpha1_extra_rounds = p.get<int>("alpha1_extra_rounds", c.alpha1_extra_rounds);
  for (const char* k : {"m", "n0", "n1", "ell_prime"}) {
    if (!ov.has(k)) continue;
    const long long v = ov.get<long long>(k);
    if (std::string(k) == "m") c.m = v;
    else if (std::string(k) == "n0") c.n0 = v;
    else if (std::string(k) == "n1") c.n1 = v;
    else c.ell_prime = v;
  }
  c.seed = seed;
  c.validate();
  return c;
}

Json params_json(const ResolvedParams& p, const RegLearnConfig& c) {
  return Json{{"K", p.K}, {"d", p.d}, {"fat", p.fat}, {"m", p.m}, {"n0", p.n0}, {"n1", p.n1},
              {"n", p.n}, {"ell_prime", p.ell_prime}, {"alpha_delta", p.alpha_delta},
              {"tau_max", p.tau_max}, {"r_max", p.r_max}, {"chi", p.chi}, {"ell_bar", p.ell_bar},
              {"epsilon", c.epsilon}, {"delta", c.delta}, {"eta_bar", c.eta_bar}, {"beta", c.beta},
              {"C0", c.C0}, {"c0", c.c0}, {"C1", c.C1}, {"C", c.C},
              {"alpha1_extra_rounds", c.alpha1_extra_rounds},
              {"formulas", {{"m", p.m_formula}, {"n0", p.n0_formula}, {"n1", p.n1_formula},
                            {"ell_prime", p.ell_prime_formula},
                            {"log_K_sparsity", p.log_sparsity_formula}}},
              {"overridden", {{"m", p.m_overridden}, {"n0", p.n0_overridden},
                              {"n1", p.n1_overridden}, {"ell_prime", p.ell_prime_overridden}}}};
}

// Dataset from "dataset", or drawn from "distribution" on stream 1.
std::vector<Sample> reglearn_data(Context& ctx, const RealClass& H, const ResolvedParams& p,
                                  const Rng& master, std::optional<EmpiricalDistribution>* Q) {
  if (ctx.cfg.has("dataset") == ctx.cfg.has("distribution"))
    config_error("exactly one of \"dataset\" and \"distribution\" is required");
  if (ctx.cfg.has("dataset")) {
    Json ds = ctx.cfg.document("dataset");
    ctx.inputs["dataset"] = ds;
    return parse_dataset(ds, H.domain());
  }
  Json dj = ctx.cfg.document("distribution");
  ctx.inputs["distribution"] = dj;
  Q->emplace(parse_distribution(dj, H.domain(), 0));
  Rng sample_rng = master.split(1);
  return draw_samples(**Q, static_cast<std::size_t>(p.n1 + p.n), sample_rng);
}

Outcome cmd_reglearn(Context& ctx) {
  ctx.cfg.check_keys({"class", "dataset", "distribution", "params", "overrides", "seed"}, "reglearn");
  Outcome o;
  const std::uint64_t seed = ctx.require_seed();
  const RealClass H = ctx.real_class();
  const RegLearnConfig c = reglearn_config(ctx.cfg, seed);
  RegLearner learner(H, c);
  const ResolvedParams& p = learner.params();
  spdlog::info("reglearn: K={} d={} m={} n0={} n1={} ell_prime={}", p.K, p.d, p.m, p.n0, p.n1,
               p.ell_prime);
  const Rng master(seed);
  std::optional<EmpiricalDistribution> Q;
  const std::vector<Sample> data = reglearn_data(ctx, H, p, master, &Q);
  Rng run_rng = master.split(0);
  const RegLearnOutput r = learner.run(data, run_rng);
  const RegLearnTranscript& tr = r.transcript;

  o.outputs["params"] = params_json(p, c);
  o.outputs["bottom"] = r.bottom;
  if (!r.bottom) {
    o.outputs["h_hat"] = r.h_hat;
    o.outputs["g_hat"] = r.g_hat;
    o.outputs["L_hat"] = r.L_hat->hypotheses();
  }
  Json groups = Json::array();
  std::size_t errors = 0;
  for (const GroupRecord& g : tr.groups) {
    errors += g.error;
    Json gj{{"error", g.error}, {"t_final", g.t_final}, {"tree_depth", g.tree_depth},
            {"S_hat", g.S_hat}, {"R", g.R}};
    if (g.error) gj["error_reason"] = g.error_reason;
    groups.push_back(std::move(gj));
  }
  Json counts = Json::array();
  for (const auto& [id, n] : tr.selection.counts)
    counts.push_back(Json{{"id", hex(id)}, {"count", n}, {"noisy", tr.selection.noisy_counts.at(id)}});
  o.outputs["transcript"] = {
      {"eta_hat", {{"noiseless", tr.eta_hat.noiseless}, {"noise", tr.eta_hat.noise},
                   {"value", tr.eta_hat.value}, {"scale", tr.eta_hat.scale}}},
      {"alpha1", tr.alpha1},
      {"universe_size", tr.universe_size},
      {"sparsity", tr.sparsity},
      {"max_R", tr.max_R},
      {"error_groups", errors},
      {"groups", groups},
      {"selection", {{"threshold", tr.selection.threshold},
                     {"noise_scale", tr.selection.noise_scale},
                     {"truncated_users", tr.selection.truncated_users},
                     {"winner", tr.selection.winner ? Json(hex(*tr.selection.winner)) : Json(nullptr)},
                     {"counts", counts}}}};
  if (Q && !r.bottom) {
    const double excess = excess_risk(r.h_hat, *Q, H);
    const double bound = 30.0 * (p.d + 2) * c.eta_bar + 2 * c.C1 * c.eta_bar;
    o.outputs["excess_risk"] = excess;
    o.outputs["excess_risk_bound"] = bound;
    o.outputs["within_bound"] = excess <= bound;
  }
  if (r.bottom) o.exit_code = kExitBottom;
  return o;
}

Json audit_json(const AuditReport& rep) {
  Json ev = Json::array();
  for (const AuditEvent& e : rep.events)
    ev.push_back(Json{{"event", e.event}, {"direction", e.direction}, {"p", e.p}, {"q", e.q},
                      {"bound", e.bound}, {"sigma", e.sigma}, {"flag", e.flag}});
  return Json{{"trials", rep.trials}, {"violation", rep.violation()}, {"events", ev}};
}

Outcome cmd_audit(Context& ctx) {
  const std::string mech = ctx.cfg.get<std::string>("mechanism");
  const std::uint64_t seed = ctx.require_seed();
  const std::size_t trials = ctx.cfg.get<std::size_t>("trials", 10000);
  if (trials == 0) config_error("trials must be positive");
  PrivacyParams priv;
  AuditReport rep;
  Outcome o;
  if (mech == "laplace_count") {
    ctx.cfg.check_keys({"mechanism", "trials", "epsilon", "delta", "D", "D_prime", "bucket_width", "seed"},
                       "audit laplace_count");
    priv.epsilon = ctx.cfg.get<double>("epsilon", 1.0);
    priv.delta = ctx.cfg.get<double>("delta", 1e-6);
    priv.validate();
    const auto D = ctx.cfg.get<std::vector<int>>("D"), Dp = ctx.cfg.get<std::vector<int>>("D_prime");
    for (const auto* v : {&D, &Dp})
      for (int b : *v)
        if (b != 0 && b != 1) config_error("laplace_count records must be 0 or 1");
    const double width = ctx.cfg.get<double>("bucket_width", 1.0);
    if (!(width > 0)) config_error("bucket_width must be positive");
    const double b = 1.0 / priv.epsilon;
    Mechanism<int> m = [&](const std::vector<int>& data, Rng& rng) {
      double count = 0;
      for (int v : data) count += v;
      const double bucket = std::floor((count + laplace_sample(b, rng)) / width);
      return static_cast<std::uint64_t>(static_cast<std::int64_t>(bucket) + (std::int64_t{1} << 32));
    };
    rep = dp_audit(m, D, Dp, priv, trials, seed);
  } else if (mech == "sparse_select") {
    ctx.cfg.check_keys({"mechanism", "trials", "epsilon", "delta", "D", "D_prime", "sparsity", "seed"},
                       "audit sparse_select");
    priv.epsilon = ctx.cfg.get<double>("epsilon", 1.0);
    priv.delta = ctx.cfg.get<double>("delta", 1e-6);
    priv.validate();
    using Set = std::vector<CandidateId>;
    const auto D = ctx.cfg.get<std::vector<Set>>("D"), Dp = ctx.cfg.get<std::vector<Set>>("D_prime");
    for (const auto* v : {&D, &Dp})
      for (const Set& s : *v)
        for (CandidateId c : s)
          if (c == 0) config_error("candidate ids must be positive; 0 is reserved for BOTTOM");
    const std::size_t sparsity = ctx.cfg.get<std::size_t>("sparsity", 1);
    if (sparsity == 0) config_error("sparsity must be >= 1");
    Mechanism<Set> m = [&](const std::vector<Set>& users, Rng& rng) {
      SelectionInstance inst{users, sparsity};
      const auto r = sparse_select(inst, priv, rng);
      return r.winner ? *r.winner : CandidateId{0};
    };
    rep = dp_audit(m, D, Dp, priv, trials, seed);
  } else if (mech == "reglearn") {
    ctx.cfg.check_keys({"mechanism", "trials", "epsilon", "delta", "class", "distribution", "params",
                        "overrides", "replace", "seed"},
                       "audit reglearn");
    const RealClass H = ctx.real_class();
    const RegLearnConfig c = reglearn_config(ctx.cfg, seed);
    priv.epsilon = ctx.cfg.get<double>("epsilon", c.epsilon);
    priv.delta = ctx.cfg.get<double>("delta", c.delta);
    priv.validate();
    RegLearner learner(H, c);
    const ResolvedParams& p = learner.params();
    Json dj = ctx.cfg.document("distribution");
    ctx.inputs["distribution"] = dj;
    const EmpiricalDistribution Q = parse_distribution(dj, H.domain(), 0);
    Rng sample_rng = Rng(seed).split(1);
    const std::vector<Sample> D = draw_samples(Q, static_cast<std::size_t>(p.n1 + p.n), sample_rng);
    const Config rp = ctx.cfg.sub("replace");
    rp.check_keys({"index", "point", "y"}, "audit reglearn replace");
    const std::size_t index = rp.get<std::size_t>("index", 0);
    if (index >= D.size()) config_error("replace.index beyond the dataset");
    std::vector<Sample> Dp = D;
    Dp[index] = {rp.has("point") ? point_of(rp, "point", H.domain()) : D[index].first,
                 rp.get<double>("y", -D[index].second)};
    if (Dp[index] == D[index]) config_error("replacement record equals the original");
    Mechanism<Sample> m = [&](const std::vector<Sample>& data, Rng& rng) {
      const RegLearnOutput r = learner.run(data, rng);
      return r.bottom ? CandidateId{0} : candidate_id(r.g_hat);
    };
    rep = dp_audit(m, D, Dp, priv, trials, seed);
    o.outputs["params"] = params_json(p, c);
    o.outputs["replaced"] = {{"index", index},
                             {"from", Json::array({H.domain().id(D[index].first), D[index].second})},
                             {"to", Json::array({H.domain().id(Dp[index].first), Dp[index].second})}};
  } else {
    config_error("unknown audit mechanism \"" + mech + "\"");
  }
  o.outputs["mechanism"] = mech;
  o.outputs["epsilon"] = priv.epsilon;
  o.outputs["delta"] = priv.delta;
  o.outputs["audit"] = audit_json(rep);
  if (rep.violation()) o.exit_code = kExitCheckFailed;
  return o;
}

Outcome cmd_oracle_check(Context& ctx) {
  ctx.cfg.check_keys({"random_classes", "seed"}, "oracle-check");
  Outcome o;
  const std::size_t n = ctx.cfg.get<std::size_t>("random_classes", 200);
  const OracleGridReport rep = run_oracle_grid(n, n ? ctx.require_seed() : 0);
  o.outputs = {{"exhaustive_classes", rep.exhaustive_classes},
               {"random_classes", rep.random_classes},
               {"sfat_checks", rep.sfat_checks},
               {"irred_checks", rep.irred_checks},
               {"subclass_checks", rep.subclass_checks},
               {"disagreements", rep.disagreements},
               {"examples", rep.examples}};
  if (rep.disagreements) o.exit_code = kExitCheckFailed;
  return o;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::kConfig:
      return kExitUsage;
    case ErrorKind::kSchema:
    case ErrorKind::kFormat:
      return kExitSchema;
    case ErrorKind::kTheoreticalScale:
      return kExitTheoretical;
    case ErrorKind::kDomain:
    case ErrorKind::kPrecondition:
    case ErrorKind::kRefusal:
      return kExitPrecondition;
  }
  return kExitPrecondition;
}

void set_path(Json& root, const std::string& dotted, Json value) {
  Json* cur = &root;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) config_error("override key \"" + dotted + "\" has an empty component");
    if (!cur->is_object()) config_error("override key \"" + dotted + "\" descends into a non-object");
    if (dot == std::string::npos) {
      (*cur)[key] = std::move(value);
      return;
    }
    cur = &(*cur)[key];
    if (cur->is_null()) *cur = Json::object();
    start = dot + 1;
  }
}

void configure_logging() {
  static bool done = false;
  if (done) return;
  done = true;
  auto logger = spdlog::stderr_color_mt("privreg");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("PRIVREG_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

}  // namespace

void apply_override(Json& config, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) config_error("override \"" + assignment + "\" is not KEY=VAL");
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  set_path(config, assignment.substr(0, eq), std::move(value));
}

RunResult run_experiment(const ExperimentOptions& opts) {
  configure_logging();
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  Json body{{"command", opts.command}, {"version", kVersion}};
  try {
    static const std::map<std::string, std::function<Outcome(Context&)>> commands = {
        {"dims", cmd_dims},           {"irred", cmd_irred},
        {"soa", cmd_soa},             {"reduce-tree", cmd_reduce_tree},
        {"reduce-tree-cert", cmd_reduce_tree_cert},
        {"filter", cmd_filter},       {"soafilter", cmd_soafilter},
        {"reglearn", cmd_reglearn},   {"audit", cmd_audit},
        {"oracle-check", cmd_oracle_check}};
    const auto it = commands.find(opts.command);
    if (it == commands.end()) config_error("unknown command \"" + opts.command + "\"");

    Json config = Json::object();
    std::string base = ".";
    if (opts.config_path) {
      config = read_json_file(*opts.config_path);
      if (!config.is_object()) throw PrivregError(ErrorKind::kSchema, *opts.config_path + ": expected an object");
      base = fs::path(*opts.config_path).parent_path().string();
      if (base.empty()) base = ".";
    }
    for (const auto& o : opts.overrides) apply_override(config, o);

    std::optional<std::uint64_t> seed = opts.seed;
    if (!seed && config.contains("seed")) {
      if (!config["seed"].is_number_unsigned()) config_error("config key \"seed\" must be a non-negative integer");
      seed = config["seed"].get<std::uint64_t>();
    }
    body["config"] = config;
    body["seed"] = seed ? Json(*seed) : Json(nullptr);

    const Config cfg(config, base);
    Context ctx{cfg, seed, Json::object(), {}};
    Outcome out = it->second(ctx);
    body["inputs_digest"] = hex(fnv1a(Json{{"config", config}, {"documents", ctx.inputs}}.dump()));
    body["warnings"] = ctx.warnings;
    body["outputs"] = std::move(out.outputs);
    result.exit_code = out.exit_code;
  } catch (const PrivregError& e) {
    body["error"] = {{"kind", error_kind_name(e.kind())}, {"message", e.what()}};
    result.exit_code = exit_code_for(e.kind());
    spdlog::error("{}: {}", error_kind_name(e.kind()), e.what());
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  result.report = Json{{"body", body}, {"meta", {{"wall_time_ms", ms}, {"version", kVersion}}}};
  if (opts.out_path) {
    try {
      write_json_file(*opts.out_path, result.report);
    } catch (const PrivregError& e) {
      spdlog::error("{}", e.what());
      if (result.exit_code == kExitOk) result.exit_code = kExitUsage;
    }
  }
  return result;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Private regression experiments over finite hypothesis classes", "privreg_cli"};
  ExperimentOptions opts;
  std::string seed_text;
  app.add_option("command", opts.command, "Subcommand")->required()->check(CLI::IsMember(kCommands));
  app.add_option("--config", opts.config_path, "JSON config file");
  app.add_option("--seed", opts.seed, "Master seed (unsigned 64-bit)");
  app.add_option("--out", opts.out_path, "Write the report here instead of stdout");
  app.add_option("--override", opts.overrides, "KEY=VAL config override, dotted keys, repeatable")
      ->take_all();
  app.set_version_flag("--version", kVersion);
  app.footer(
      "Commands: dims irred soa reduce-tree reduce-tree-cert filter soafilter reglearn audit oracle-check\n"
      "\n"
      "Exit codes:\n"
      "  0  success\n"
      "  1  usage or config error (unknown key, wrong type, missing seed)\n"
      "  2  schema or format error in a class, dataset or JSON file\n"
      "  3  precondition, domain or oracle size-cap refusal\n"
      "  4  ReduceTreeReg halted with ERROR\n"
      "  5  sparse selection returned BOTTOM\n"
      "  6  theoretical-scale refusal: a sample-size formula needs an override\n"
      "  7  check failed: oracle disagreement or privacy-audit violation\n"
      "\n"
      "Environment: PRIVREG_LOG sets the log level (trace, debug, info, warn, error, off).");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  const RunResult r = run_experiment(opts);
  if (!opts.out_path) std::cout << r.report.dump(2) << "\n";
  return r.exit_code;
}

}  // namespace privreg
