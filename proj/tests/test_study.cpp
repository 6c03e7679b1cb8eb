#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cipstokes/errors.hpp"
#include "cipstokes/study.hpp"

using namespace cipstokes;

TEST(StudyConfig, ParsesEnums) {
  EXPECT_EQ(parse_method("mini"), Method::mini);
  EXPECT_EQ(parse_method("streamfct"), Method::streamfct);
  EXPECT_EQ(parse_rhs("g_tilde"), RhsKind::g_tilde);
  EXPECT_EQ(to_string(parse_rhs("f_scalar")), "f_scalar");
  EXPECT_THROW((void)parse_method("taylor-hood"), std::invalid_argument);
  EXPECT_THROW((void)parse_rhs("h"), std::invalid_argument);
}

TEST(StudyConfig, ParsesSizeLists) {
  EXPECT_EQ(parse_size_list("4,8,16"), (std::vector<std::size_t>{4, 8, 16}));
  EXPECT_EQ(parse_size_list("32"), (std::vector<std::size_t>{32}));
  EXPECT_THROW((void)parse_size_list(""), std::invalid_argument);
  EXPECT_THROW((void)parse_size_list("4,x"), std::invalid_argument);
}

TEST(StudyConfig, AppliesConfigStream) {
  StudyConfig cfg;
  std::istringstream in("# comment\nmethod = mini\n degree=3\ndg-order = 1\neta = 55.5\n"
                        "mesh-list = 4,8\nsteps-list=16\nrhs = g_tilde  # trailing\nassert = true\n");
  apply_config(cfg, in);
  EXPECT_EQ(cfg.method, Method::mini);
  EXPECT_EQ(cfg.degree, 3);
  EXPECT_EQ(cfg.dg_order, 1);
  EXPECT_DOUBLE_EQ(cfg.penalty(), 55.5);
  EXPECT_EQ(cfg.meshes, (std::vector<std::size_t>{4, 8}));
  EXPECT_EQ(cfg.steps, (std::vector<std::size_t>{16}));
  EXPECT_EQ(cfg.rhs, RhsKind::g_tilde);
  EXPECT_TRUE(cfg.assert_checks);

  std::istringstream bad("colour = red\n");
  EXPECT_THROW(apply_config(cfg, bad), std::invalid_argument);
  EXPECT_THROW(apply_config_file(cfg, "/nonexistent/study.cfg"), std::exception);
}

TEST(StudyConfig, DefaultPenaltyFollowsDegree) {
  StudyConfig cfg;
  EXPECT_EQ(cfg.penalty(), 20.0);
  cfg.degree = 3;
  EXPECT_EQ(cfg.penalty(), 40.0);
}

TEST(StudyConfig, ValidateRejectsMismatches) {
  StudyConfig cfg;
  cfg.meshes = {4};
  cfg.steps = {4};
  EXPECT_NO_THROW(cfg.validate());
  cfg.method = Method::mini;
  cfg.rhs = RhsKind::f_scalar;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.rhs = RhsKind::g;
  cfg.degree = 4;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.degree = 2;
  cfg.meshes = {0};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Study, FittedRateIsExactForPowerLaws) {
  std::vector<ConvergenceRow> rows;
  for (double x : {0.5, 0.25, 0.125, 0.0625}) rows.push_back({x, 3.0 * x * x});
  EXPECT_NEAR(fitted_rate(rows), 2.0, 1e-12);
  // only the last three rows count
  rows.front().error = 1e6;
  EXPECT_NEAR(fitted_rate(rows), 2.0, 1e-12);
  rows = {{0.5, 1.0}, {0.25, 0.5}};
  EXPECT_NEAR(fitted_rate(rows), 1.0, 1e-12);
}

TEST(Study, FormatsNumbersWithTwelveDigits) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(1.5e-9), "1.5e-09");
}

TEST(Study, CsvOutputIsDeterministic) {
  StudyConfig cfg;
  cfg.meshes = {2, 4};
  cfg.steps = {4};
  auto render = [&] {
    std::ostringstream os;
    write_csv(os, converge_h(cfg));
    return os.str();
  };
  const std::string a = render();
  EXPECT_EQ(a, render());
  EXPECT_EQ(a.rfind("h,error\n", 0), 0u);
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 3);
}

TEST(Study, StreamFunctionIgnoresGradientPerturbation) {
  StudyConfig cfg;
  cfg.meshes = {4};
  cfg.steps = {4};
  StudyConfig tilde = cfg;
  tilde.rhs = RhsKind::g_tilde;
  EXPECT_NEAR(run_error(cfg, 4, 4), run_error(tilde, 4, 4), 1e-12);
}

TEST(Study, DiagnosticsWithZeroDataPass) {
  StudyConfig cfg;
  cfg.meshes = {4};
  cfg.steps = {4};
  cfg.rhs = RhsKind::zero;
  const Report report = diagnostics(cfg);
  EXPECT_TRUE(report.passed());
  for (const auto& [name, value] : report.values) {
    if (name == "error" || name == "S1" || name == "S2" || name == "S3") {
      EXPECT_EQ(value, 0.0) << name;
    }
  }
}

TEST(Study, DiagnosticsRejectsSmallPenalty) {
  StudyConfig cfg;
  cfg.meshes = {16};
  cfg.steps = {2};
  cfg.eta = 0.1;
  EXPECT_THROW((void)diagnostics(cfg), CoercivityError);
}

TEST(Study, SummaryAppliesRateBand) {
  StudyConfig cfg;
  ConvergenceResult result{"converge-h", "h", {{0.5, 1.0}, {0.25, 0.25}}, 2.0};
  EXPECT_TRUE(summarize(cfg, result).passed());
  result.rate = 1.2;
  EXPECT_FALSE(summarize(cfg, result).passed());
  result.study = "converge-k";
  result.rate = 1.0;
  EXPECT_TRUE(summarize(cfg, result).passed());
  cfg.dg_order = 1;
  EXPECT_FALSE(summarize(cfg, result).passed());

  std::ostringstream os;
  write_report(os, summarize(cfg, result));
  EXPECT_NE(os.str().find("FAIL fitted_rate"), std::string::npos);
}

TEST(Study, ComparisonSummaryChecksBothConditions) {
  std::vector<ComparisonRow> rows{{0.3, 0.1, 0.1, 0.01, 0.5}};
  EXPECT_TRUE(summarize_comparison(rows).passed());
  rows[0].mini_g_tilde = 0.05;
  EXPECT_FALSE(summarize_comparison(rows).passed());
  rows[0].mini_g_tilde = 0.5;
  rows[0].stream_g_tilde = 0.1 + 1e-9;
  EXPECT_FALSE(summarize_comparison(rows).passed());
}
