#include <gtest/gtest.h>

#include <cmath>

#include "apdisc/fourier.hpp"
#include "apdisc/walk.hpp"
#include "helpers.hpp"

using namespace apdisc;
using testing_util::coloring;

namespace {

LatticePoint vec(std::initializer_list<Coord> c) {
  LatticePoint p(static_cast<Index>(c.size()));
  Index i = 0;
  for (Coord x : c) p[i++] = x;
  return p;
}

Polytope interval(std::int64_t a, std::int64_t b) {
  RationalMatrix v(1, 2);
  v << Rational(a), Rational(b);
  return Polytope(v);
}

}  // namespace

TEST(CombConvolve, TwoPointColoring) {
  const Universe u(1, {0, 1});
  const auto chi = coloring({1, -1});
  const CombFunction g{vec({1}), 2};
  const std::vector<Coord> x0{0}, x1{1}, x2{2}, far{9};
  EXPECT_EQ(comb_convolve(u, chi, g, x0), 1);
  EXPECT_EQ(comb_convolve(u, chi, g, x1), 0);
  EXPECT_EQ(comb_convolve(u, chi, g, x2), -1);
  EXPECT_EQ(comb_convolve(u, chi, g, far), 0);
  const CombFunction id{vec({1}), 1};
  EXPECT_EQ(comb_convolve(u, chi, id, x1), -1);
}

TEST(ConvolutionIdentity, Box4) {
  const auto u = box_universe(BoxSpec({4}));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto chi = random_coloring(4, seed);
    const auto r = convolution_identity_check(*u, chi, {vec({1}), 2});
    EXPECT_TRUE(r.holds());
    EXPECT_EQ(r.points_checked, 5);  // x = 1..5
  }
}

TEST(ConvolutionIdentity, LongCombsAndTwoDimensions) {
  const auto u = box_universe(BoxSpec({4, 3}));
  const auto chi = random_coloring(u->size(), 11);
  EXPECT_TRUE(convolution_identity_check(*u, chi, {vec({7, -5}), 6}).holds());
  EXPECT_TRUE(convolution_identity_check(*u, chi, {vec({1, -1}), 3}).holds());
}

TEST(Parseval, Examples) {
  const Universe u(1, {0, 1});
  const auto r = parseval_check(u, coloring({1, -1}), {vec({1}), 2});
  EXPECT_DOUBLE_EQ(r.direct, 2.0);
  EXPECT_NEAR(r.transform, 2.0, 1e-9);
  EXPECT_TRUE(r.agrees);
  const auto same = parseval_check(u, coloring({1, 1}), {vec({1}), 2});
  EXPECT_DOUBLE_EQ(same.direct, 6.0);
  EXPECT_NEAR(same.transform, 6.0, 1e-9);
  const auto box = box_universe(BoxSpec({3, 4}));
  const auto id = parseval_check(*box, random_coloring(12, 2), {vec({0, 1}), 1});
  EXPECT_DOUBLE_EQ(id.direct, 12.0);
}

TEST(Parseval, ModulusGrowsWhenTheCombIsLong) {
  const auto u = box_universe(BoxSpec({4}));
  const auto r = parseval_check(*u, random_coloring(4, 1), {vec({3}), 5});
  EXPECT_GT(r.retries, 0);
  EXPECT_GE(r.modulus[0], 4 + 4 * 3);
  EXPECT_TRUE(r.agrees);
}

TEST(LowerBoundParams, Intervals) {
  const auto p = choose_lb_params(interval(1, 4));
  EXPECT_EQ(p.ell, 1);
  EXPECT_EQ(p.m, Rational(4, 3));
  EXPECT_EQ(p.zeta_half_m, 5);
  EXPECT_EQ(p.epsilon, Rational(1, 4));
  EXPECT_TRUE(params_valid(p));
  const auto q = choose_lb_params(interval(1, 16));
  EXPECT_EQ(q.ell, 1);
  EXPECT_EQ(q.m, Rational(4, 5));
  RationalMatrix pt(1, 1);
  pt << Rational(3);
  EXPECT_THROW(choose_lb_params(Polytope(pt)), DomainError);
}

TEST(LowerBoundParams, LargeBodyUsesLongerCombs) {
  const auto p = choose_lb_params(Polytope::box(std::vector<Coord>{400, 400}));
  EXPECT_GE(p.s_star, Rational(24));
  EXPECT_GE(p.ell, 2);
  EXPECT_TRUE(params_valid(p));
}

TEST(CertifiedLowerBound, Interval4) {
  const auto lb = certified_lower_bound(ShiftedBody(interval(1, 4)));
  EXPECT_EQ(lb.zeta_outer, 23);
  EXPECT_EQ(lb.zeta_m, 9);
  EXPECT_EQ(lb.omega_size, 4);
  EXPECT_NEAR(lb.value, std::sqrt(4.0 / (4.0 * 23 * 9)), 1e-12);
}

TEST(CertifiedLowerBound, EmptyBody) {
  RationalMatrix v(2, 4);
  v << Rational(1, 4), Rational(3, 4), Rational(1, 4), Rational(3, 4), Rational(0), Rational(0), Rational(3), Rational(3);
  const ShiftedBody narrow{Polytope(v)};
  EXPECT_EQ(certified_lower_bound(narrow).value, 0.0);
}

TEST(CertifiedLowerBound, InvalidParams) {
  FourierLBParams p;
  p.ell = 5;
  p.m = Rational(1);
  p.zeta_half_m = 3;
  EXPECT_THROW(certified_lower_bound(ShiftedBody(interval(1, 4)), p), DomainError);
}

TEST(CertifiedLowerBound, BelowExactOptimum) {
  for (auto sides : {std::vector<Coord>{5}, {9}, {3, 3}, {2, 4}}) {
    const BoxSpec box(sides);
    const auto lb = certified_lower_bound(ShiftedBody(Polytope::box(sides)));
    EXPECT_LE(lb.value, static_cast<double>(brute_force_min_disc(enumerate_all_aps(box)).min_disc));
  }
}

TEST(EnergyAudit, RandomColorings) {
  const ShiftedBody body(Polytope::box(std::vector<Coord>{6, 5}));
  const auto params = choose_lb_params(body.base);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (const auto& a : energy_audit(body, params, random_coloring(30, seed))) EXPECT_TRUE(a.holds);
  }
}

TEST(ShiftSearch, FindsTheBestGridShift) {
  RationalMatrix v(1, 2);
  v << Rational(1, 3), Rational(5, 2);
  const auto s = best_shift_on_grid(Polytope(v), 6);
  EXPECT_EQ(s.sampled, 6);
  EXPECT_EQ(s.best_count, 3);
}

TEST(Parseval, SinglePointDomain) {
  auto u = box_universe(BoxSpec({1, 1, 1}));
  LatticePoint b(3);
  b << 1, -2, 0;
  const auto rep = parseval_check(*u, random_coloring(1, 5), {b, 1});
  EXPECT_DOUBLE_EQ(rep.direct, 1.0);
  EXPECT_TRUE(rep.agrees);
}
