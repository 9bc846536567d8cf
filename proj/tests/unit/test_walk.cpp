#include <gtest/gtest.h>

#include <cmath>

#include "apdisc/walk.hpp"
#include "helpers.hpp"

using namespace apdisc;

TEST(GsWalk, SingleColumnIsFair) {
  Eigen::MatrixXd r(1, 1);
  r << 0.7;
  int plus = 0;
  const int runs = 4000;
  for (int s = 0; s < runs; ++s) plus += gs_walk(r, static_cast<std::uint64_t>(s)).x[0] > 0;
  EXPECT_NEAR(plus / static_cast<double>(runs), 0.5, 5 * 0.5 / std::sqrt(runs));
}

TEST(GsWalk, OrthonormalColumnsGiveUniformMarginals) {
  const Eigen::MatrixXd r = Eigen::MatrixXd::Identity(4, 4);
  const int runs = 10000;
  Eigen::VectorXd plus = Eigen::VectorXd::Zero(4);
  for (int s = 0; s < runs; ++s) plus += (gs_walk(r, static_cast<std::uint64_t>(s)).x.array() > 0).cast<double>().matrix();
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(plus[i] / runs, 0.5, 5 * 0.5 / std::sqrt(runs));
}

TEST(GsWalk, DeterministicPerSeed) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Random(6, 15);
  r.array().rowwise() /= r.colwise().norm().array();
  const auto a = gs_walk(r, 99), b = gs_walk(r, 99);
  EXPECT_EQ(a.x, b.x);
  EXPECT_TRUE((a.x.array().abs() == 1).all());
}

TEST(GsWalk, MartingaleSteps) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Random(5, 30);
  r.array().rowwise() /= r.colwise().norm().array();
  WalkOptions opt;
  opt.record_trace = true;
  const auto w = gs_walk(r, 5, opt);
  ASSERT_FALSE(w.trace.empty());
  for (const auto& s : w.trace) {
    EXPECT_GT(s.delta_plus + s.delta_minus, 0);
    EXPECT_NEAR(s.prob_plus * s.delta_plus, (1 - s.prob_plus) * s.delta_minus, 1e-12);
  }
  // dependent columns force the least-squares fallback path or many refreshes; both must finish
  EXPECT_TRUE((w.x.array().abs() == 1).all());
}

TEST(GsWalk, SparseAndDenseAgree) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Random(20, 12);
  r.array().rowwise() /= r.colwise().norm().array();
  const ColSparse rs = r.sparseView();
  EXPECT_EQ(gs_walk(r, 3).x, gs_walk(rs, 3).x);
}

TEST(GsWalk, Preconditions) {
  Eigen::MatrixXd r(2, 1);
  r << 1, 1;
  EXPECT_THROW(gs_walk(r, 1), PreconditionError);
  r << std::nan(""), 0;
  EXPECT_THROW(gs_walk(r, 1), StructuralError);
  EXPECT_EQ(gs_walk(Eigen::MatrixXd(3, 0), 1).x.size(), 0);
}

TEST(Gamma2Coloring, SingleSet) {
  auto u = testing_util::line(1);
  SetSystem s(u);
  const std::vector<std::uint32_t> m{0};
  s.add_set(m);
  auto sp = std::make_shared<const SetSystem>(s);
  const auto rep = gamma2_coloring(s, size_bound_cert(sp), 1);
  EXPECT_EQ(rep.disc, 1);
  EXPECT_TRUE(std::isfinite(rep.ratio));
}

TEST(Gamma2Coloring, Box256WithinScale) {
  const BoxSpec box({256});
  ApCertOptions opt;
  opt.keep_left = false;
  const auto ac = ap_cert(box, opt);
  const auto fam = maximal_family(box);
  const auto m = static_cast<Index>(count_all_aps(fam));
  const auto rep = gamma2_coloring(ac.cert, m, [&](const Coloring& c) { return all_ap_disc(fam, c); }, 7);
  EXPECT_LE(rep.ratio, 10.0);
  const auto again = gamma2_coloring(ac.cert, m, [&](const Coloring& c) { return all_ap_disc(fam, c); }, 7);
  EXPECT_EQ(rep.disc, again.disc);
}

TEST(BruteForce, SmallBoxes) {
  EXPECT_EQ(brute_force_min_disc(enumerate_all_aps(BoxSpec({2}))).min_disc, 1);
  EXPECT_EQ(brute_force_min_disc(enumerate_all_aps(BoxSpec({4}))).min_disc, 2);
  EXPECT_EQ(brute_force_min_disc(enumerate_all_aps(BoxSpec({1, 1}))).min_disc, 1);
}

TEST(BruteForce, WitnessAchievesMinimum) {
  for (auto sides : {std::vector<Coord>{9}, {3, 4}}) {
    const auto all = enumerate_all_aps(BoxSpec(sides));
    const auto r = brute_force_min_disc(all);
    EXPECT_EQ(disc_eval(all, r.witness), r.min_disc);
  }
}

TEST(BruteForce, MatchesNaiveEnumeration) {
  const auto all = enumerate_all_aps(BoxSpec({7}));
  std::int64_t best = 1 << 20;
  for (int mask = 0; mask < 128; ++mask) {
    Eigen::VectorXi x(7);
    for (int i = 0; i < 7; ++i) x[i] = (mask >> i & 1) ? 1 : -1;
    best = std::min(best, disc_eval(all, Coloring(x, ColoringSource::external)));
  }
  EXPECT_EQ(brute_force_min_disc(all).min_disc, best);
}

TEST(BruteForce, Pdisc) {
  auto u = testing_util::line(2);
  SetSystem s(u);
  const std::vector<std::uint32_t> m{0, 1};
  s.add_set(m);
  EXPECT_EQ(brute_force_min_pdisc(s, OrderingSigma::identity(2)).min_disc, 1);
  const auto maps = enumerate_maximal_aps(BoxSpec({4}));
  EXPECT_GE(brute_force_min_pdisc(maps, lex_order(maps.universe())).min_disc, 1);
  EXPECT_EQ(brute_force_min_disc(SetSystem(u)).min_disc, 0);
}

TEST(BruteForce, Guard) {
  EXPECT_THROW(brute_force_min_disc(enumerate_maximal_aps(BoxSpec({30}))), ResourceError);
}
