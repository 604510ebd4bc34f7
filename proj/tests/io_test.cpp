// JSON schemas, round trips and the experiment driver.
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "privreg/cli.hpp"
#include "privreg/engine.hpp"
#include "privreg/io.hpp"
#include "test_util.hpp"

namespace privreg {
namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const PrivregError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no PrivregError thrown";
  return ErrorKind::kDomain;
}

TEST(ClassJson, RoundTrip) {
  const DiscreteClass F = testing::f_toy();
  const LoadedClass back = parse_class(class_to_json(F));
  ASSERT_TRUE(back.discrete.has_value());
  EXPECT_EQ(*back.discrete, F);
  const RealClass H(Domain::numbered(2), {{-1, 0.25}, {0.5, 1}});
  const LoadedClass rb = parse_class(class_to_json(H));
  ASSERT_TRUE(rb.real.has_value());
  EXPECT_EQ(rb.real->hypotheses(), H.hypotheses());
}

TEST(ClassJson, DuplicateWarning) {
  const Json j = Json::parse(R"({"domain":["a","b"],"K":3,"hypotheses":[[1,2],[1,2],[3,3]]})");
  const LoadedClass c = parse_class(j);
  EXPECT_EQ(c.discrete->size(), 2u);
  ASSERT_EQ(c.warnings.size(), 1u);
}

TEST(ClassJson, SchemaErrors) {
  const char* bad[] = {
      R"({"domain":["a"],"K":3,"hypotheses":[[1.5]]})",
      R"({"domain":["a"],"K":3,"hypotheses":[[4]]})",
      R"({"domain":["a"],"K":3,"hypotheses":[[1,1]]})",
      R"({"domain":["a","a"],"K":3,"hypotheses":[]})",
      R"({"domain":["a"],"K":3,"real":true,"hypotheses":[]})",
      R"({"domain":["a"],"real":true,"hypotheses":[[1.5]]})",
      R"({"domain":["a"],"K":3,"hypotheses":[],"extra":1})",
      R"({"K":3,"hypotheses":[]})",
  };
  for (const char* s : bad)
    EXPECT_EQ(kind_of([&] { parse_class(Json::parse(s)); }), ErrorKind::kSchema) << s;
}

TEST(ClassJson, EmptyClassAccepted) {
  const LoadedClass c = parse_class(Json::parse(R"({"domain":["a"],"K":2,"hypotheses":[]})"));
  EXPECT_TRUE(c.discrete->empty());
  EXPECT_EQ(sfat2(*c.discrete), -1);
}

TEST(DatasetJson, RoundTripAndErrors) {
  const auto dom = Domain::numbered(2);
  const std::vector<Sample> data = {{0, 0.5}, {1, -1}};
  EXPECT_EQ(parse_dataset(dataset_to_json(data, *dom), *dom), data);
  EXPECT_EQ(kind_of([&] { parse_dataset(Json::parse(R"({"samples":[["x9",0]]})"), *dom); }),
            ErrorKind::kSchema);
  EXPECT_EQ(kind_of([&] { parse_dataset(Json::parse(R"({"samples":[["x1"]]})"), *dom); }),
            ErrorKind::kSchema);
}

TEST(DistributionJson, Validates) {
  const auto dom = Domain::numbered(1);
  const auto P = parse_distribution(Json::parse(R"({"atoms":[["x1",0.5,1]]})"), *dom, 0);
  EXPECT_EQ(P.atoms().size(), 1u);
  EXPECT_EQ(kind_of([&] { parse_distribution(Json::parse(R"({"atoms":[["x1",0.5,0.3]]})"), *dom, 0); }),
            ErrorKind::kSchema);
}

TEST(CertificateJson, RoundTrip) {
  const DiscreteClass F = testing::f_toy();
  const ShatteringCertificate c = extract_sfat_certificate(F);
  const ShatteringCertificate back = parse_certificate(certificate_to_json(c, F.domain()), F.domain());
  EXPECT_EQ(back.points, c.points);
  EXPECT_EQ(back.witness, c.witness);
  EXPECT_TRUE(verify_certificate(F, back));
}

TEST(Override, DottedKeysAndTypes) {
  Json cfg = Json::object();
  apply_override(cfg, "params.epsilon=0.5");
  apply_override(cfg, "name=abc");
  apply_override(cfg, "list=[1,2]");
  EXPECT_DOUBLE_EQ(cfg["params"]["epsilon"].get<double>(), 0.5);
  EXPECT_EQ(cfg["name"], "abc");
  EXPECT_EQ(cfg["list"], Json::array({1, 2}));
  EXPECT_THROW(apply_override(cfg, "novalue"), PrivregError);
}

class Experiment : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / ("privreg_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string write(const std::string& name, const std::string& body) {
    const auto p = dir_ / name;
    std::ofstream(p) << body;
    return p.string();
  }
  std::filesystem::path dir_;
};

TEST_F(Experiment, DimsReport) {
  write("toy.json", R"({"domain":["x1","x2"],"K":4,"hypotheses":[[1,1],[1,3],[3,1],[3,3]]})");
  ExperimentOptions o;
  o.command = "dims";
  o.config_path = write("cfg.json", R"({"class":"toy.json"})");
  const RunResult r = run_experiment(o);
  ASSERT_EQ(r.exit_code, kExitOk) << r.report.dump();
  EXPECT_EQ(r.report["body"]["outputs"]["sfat2"], 2);
  EXPECT_EQ(r.report["body"]["command"], "dims");
  EXPECT_TRUE(r.report["meta"].contains("wall_time_ms"));
}

TEST_F(Experiment, ExitCodes) {
  ExperimentOptions o;
  o.command = "dims";
  o.config_path = write("unknown.json", R"({"class":{"domain":["a"],"K":2,"hypotheses":[]},"bogus":1})");
  EXPECT_EQ(run_experiment(o).exit_code, kExitUsage);
  o.config_path = write("schema.json", R"({"class":{"domain":["a"],"K":2,"hypotheses":[[1.5]]}})");
  EXPECT_EQ(run_experiment(o).exit_code, kExitSchema);
  o.command = "soa";
  o.config_path = write("soa.json", R"({"class":{"domain":["a"],"K":3,"hypotheses":[[1],[3]]}})");
  EXPECT_EQ(run_experiment(o).exit_code, kExitPrecondition);
  o.command = "reglearn";
  o.config_path = write("rl.json", R"({"class":{"domain":["a"],"real":true,"hypotheses":[[0]]}})");
  const RunResult r = run_experiment(o);
  EXPECT_EQ(r.exit_code, kExitUsage);
  EXPECT_EQ(r.report["body"]["error"]["kind"], "config");
}

}  // namespace
}  // namespace privreg
