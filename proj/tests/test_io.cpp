#include "degensink/io.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>

using namespace degensink;
using oracle::mat;
using oracle::vec;

TEST(ParseInstanceJson, RoundTrip) {
  const auto inst = parse_instance_json(R"({"R":[[1,1,1],[0,1,1],[0,0,1]],"mu":[2,2,2],"nu":[2,3,1]})");
  EXPECT_TRUE(inst.R.isApprox(oracle::appendix_R()));
  EXPECT_TRUE(inst.nu.isApprox(oracle::appendix_nu()));
  const auto back = parse_instance_json(instance_to_json(inst));
  EXPECT_EQ(back.R, inst.R);
  EXPECT_EQ(back.mu, inst.mu);
  EXPECT_EQ(back.nu, inst.nu);
}

TEST(ParseInstanceJson, Errors) {
  EXPECT_THROW(parse_instance_json("{"), InvalidInput);
  EXPECT_THROW(parse_instance_json(R"({"R":[[1,2],[3]],"mu":[1,1],"nu":[1,1]})"), InvalidInput);
  EXPECT_THROW(parse_instance_json(R"({"R":[[1]],"mu":[1,1],"nu":[1]})"), InvalidInput);
  EXPECT_THROW(parse_instance_json(R"({"R":[[1]],"mu":[-1],"nu":[1]})"), InvalidInput);
  EXPECT_THROW(parse_instance_json(R"({"R":[[1]],"nu":[1]})"), InvalidInput);
  EXPECT_THROW(parse_instance_json(R"({"R":[["a"]],"mu":[1],"nu":[1]})"), InvalidInput);
  EXPECT_THROW(load_instance("/nonexistent/instance.json"), InvalidInput);
}

TEST(ReportJson, Fields) {
  StopConfig cfg;
  cfg.max_iter = 5000;
  const auto rep = run_sinkhorn(oracle::appendix_R(), oracle::appendix_mu(),
                                oracle::appendix_nu(), cfg);
  const auto j = nlohmann::json::parse(report_to_json(rep));
  for (const char* key : {"p_star", "q_star", "r_star", "r_bar_star", "mu_star", "nu_star", "mu_g",
                          "nu_g", "z_norm", "iterations", "converged", "support"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_NEAR(j["p_star"][0][0].get<double>(), 1.6, 1e-6);
  EXPECT_TRUE(j["converged"].get<bool>());
}

TEST(ClassificationJson, Fields) {
  ScalabilityClass c{ScalabilityTag::NonScalable, IndexSet{2}};
  const auto j = nlohmann::json::parse(classification_to_json(c));
  EXPECT_EQ(j["tag"], "NonScalable");
  EXPECT_EQ(j["witness"], nlohmann::json::array({2}));
  const auto s = nlohmann::json::parse(classification_to_json({ScalabilityTag::Scalable, {}}));
  EXPECT_TRUE(s["witness"].is_null());
}

TEST(MaskJson, Compact) {
  BipartiteSupport S(2, 2);
  S.set(0, 1, true);
  EXPECT_EQ(mask_to_json(S), "[[false,true],[false,false]]");
}

TEST(TraceJson, WorkedExample) {
  const auto tr = exact_support_procedure(oracle::appendix_R(), oracle::appendix_mu(),
                                          oracle::appendix_nu());
  const auto j = nlohmann::json::parse(trace_to_json(tr));
  ASSERT_EQ(j["steps"].size(), 2u);
  EXPECT_EQ(j["steps"][0]["chosen"], nlohmann::json::array({2}));
  EXPECT_EQ(j["stationary_at"], 2);
}

TEST(GapTraceCsv, Header) {
  StopConfig cfg;
  cfg.max_iter = 3;
  const auto rep = run_sinkhorn(oracle::appendix_R(), oracle::appendix_mu(),
                                oracle::appendix_nu(), cfg);
  const auto csv = gap_trace_csv(rep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "iteration,gap");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}
