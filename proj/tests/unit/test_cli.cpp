#include <gtest/gtest.h>

#include <sstream>

#include "apdisc/commands.hpp"

using namespace apdisc;

namespace {

struct Run {
  int code;
  Json report;
  std::string text;
  std::string err;
};

Run run(const std::string& cmd, Config c) {
  std::ostringstream out, err;
  const int code = run_command(cmd, c, out, err);
  Run r{code, Json(), out.str(), err.str()};
  if (code != kExitUsage && code != kExitResource && c.format == "json") r.report = Json::parse(r.text);
  return r;
}

Config box(std::vector<Coord> sides) {
  Config c;
  c.box = std::move(sides);
  return c;
}

const Json& first(const Run& r, const std::string& op) {
  for (const auto& row : r.report["records"]) {
    if (row["op"] == op) return row;
  }
  throw std::runtime_error("no record " + op);
}

}  // namespace

TEST(Cli, BoundOnBoxes) {
  EXPECT_NEAR(first(run("bound", box({16})), "f_of_N")["f"].get<double>(), 2.0, 1e-12);
  EXPECT_NEAR(first(run("bound", box({16, 16})), "f_of_N")["f"].get<double>(), std::pow(2.0, 4.0 / 3), 1e-12);
}

TEST(Cli, BoundOnPolytope) {
  Config c;
  c.polytope = DATA_DIR "/tri.poly";
  const auto r = run("bound", c);
  ASSERT_EQ(r.code, kExitOk);
  const auto& fk = first(r, "f_K");
  EXPECT_TRUE(fk.contains("s_lo"));
  EXPECT_TRUE(fk.contains("s_hi"));
}

TEST(Cli, ColorIsReplayable) {
  auto c = box({256});
  c.seed = 7;
  const auto a = run("color", c), b = run("color", c);
  ASSERT_EQ(a.code, kExitOk);
  auto ja = a.report, jb = b.report;
  ja.erase("run");
  jb.erase("run");
  EXPECT_EQ(ja.dump(), jb.dump());
  const auto& rec = first(a, "gamma2_coloring");
  EXPECT_LT(rec["ratio_to_bound"].get<double>(), 10.0);
  EXPECT_EQ(rec["seed"], 7);
}

TEST(Cli, ColorSinglePoint) {
  EXPECT_EQ(first(run("color", box({1})), "gamma2_coloring")["disc"], 1);
}

TEST(Cli, BruteAndLowerBound) {
  EXPECT_EQ(first(run("brute", box({4})), "brute_force_min_disc")["min_disc"], 2);
  const auto lb = run("lowerbound", box({4}));
  EXPECT_NEAR(first(lb, "certified_lower_bound")["value"].get<double>(), 0.0695, 1e-4);
  EXPECT_EQ(first(lb, "soundness")["holds"], true);
}

TEST(Cli, VerifyDefaultPasses) {
  const auto r = run("verify", Config{});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.report["violation"], false);
}

TEST(Cli, VerifyInjectedFault) {
  Config c = box({6});
  c.lemma = "certificates";
  c.inject_fault = true;
  const auto r = run("verify", c);
  EXPECT_EQ(r.code, kExitViolation);
  EXPECT_GT(first(r, "ap_cert")["max_residual"].get<double>(), 1e-9);
}

TEST(Cli, LargeSetsTable) {
  Config c = box({16, 16, 4});
  c.lemma = "large-sets";
  const auto r = run("verify", c);
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(first(r, "large_sets")["table"].size(), 15u);
}

TEST(Cli, SweepSlopeAndDegenerateFit) {
  Config c = box({64});
  c.scales = {"1", "2", "4", "8", "16", "32", "64"};
  c.color_limit = 0;
  const auto r = run("sweep", c);
  EXPECT_LT(first(r, "slope_fit")["deviation"].get<double>(), 0.05);
  c.scales = {"2"};
  EXPECT_EQ(first(run("sweep", c), "slope_fit")["degenerate"], true);
}

TEST(Cli, CsvProjection) {
  Config c = box({16});
  c.format = "csv";
  const auto r = run("bound", c);
  EXPECT_EQ(r.text.rfind("op,seed,", 0), 0u);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("bound", Config{}).code, kExitUsage);
  Config both = box({4});
  both.polytope = DATA_DIR "/tri.poly";
  EXPECT_EQ(run("bound", both).code, kExitUsage);
  Config big = box({64, 64});
  big.max_sets = 1000;
  EXPECT_EQ(run("brute", big).code, kExitResource);
  EXPECT_THROW(parse_box("3,x"), UsageError);
}
