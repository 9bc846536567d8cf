#pragma once

// Rational-vertex polytopes, their lattice points, the difference body,
// the counting function zeta and the bound f(K).

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "apdisc/apgen.hpp"
#include "apdisc/core.hpp"
#include "apdisc/rational.hpp"

namespace apdisc {

/// conv(columns of `vertices`), a d x V rational matrix.
class Polytope {
 public:
  explicit Polytope(RationalMatrix vertices);

  /// [1,N_1] x ... x [1,N_d] by its 2^d corners.
  static Polytope box(std::span<const Coord> sides);

  int dim() const noexcept { return static_cast<int>(vertices_.rows()); }
  Index num_vertices() const noexcept { return vertices_.cols(); }
  const RationalMatrix& vertices() const noexcept { return vertices_; }

  bool contains(const RationalVector& x) const;
  bool contains(std::span<const Coord> x) const;

  /// Integer bounding box of t * P: per-coordinate [ceil(t min), floor(t max)].
  std::pair<std::vector<Coord>, std::vector<Coord>> lattice_bounds(const Rational& t = Rational(1)) const;

  /// -P == P, checked on vertices.
  bool is_symmetric() const;

  Polytope scaled(const Rational& r) const;

 private:
  RationalMatrix vertices_;
};

struct ShiftedBody {
  ShiftedBody(Polytope base, RationalVector shift);
  explicit ShiftedBody(Polytope base);

  Polytope base;
  RationalVector shift;

  int dim() const noexcept { return base.dim(); }
  bool contains(std::span<const Coord> x) const;
};

inline constexpr std::uint64_t kDefaultMaxScan = 50'000'000;

/// Omega_{v+K}: lattice points of the body in lexicographic order.
UniversePtr integer_points(const ShiftedBody& body, std::uint64_t max_scan = kDefaultMaxScan);

/// K - K as conv of the distinct pairwise vertex differences (0 included).
Polytope difference_body(const Polytope& k);

/// Minkowski sum conv{p + q}: vertices of both generator sets added pairwise.
Polytope minkowski_sum(const Polytope& p, const Polytope& q);

/// min t >= 0 with z in t * P for P containing 0; nullopt if no such t.
std::optional<Rational> gauge(const Polytope& p, std::span<const Coord> z);

struct ZetaEvaluation {
  Rational t;
  Index count = 1;
};

/// Gauges of all lattice points of t_max * P, answering zeta(t) for t <= t_max.
class GaugeTable {
 public:
  GaugeTable(const Polytope& symmetric, Rational t_max, std::uint64_t max_scan = kDefaultMaxScan);

  const Rational& t_max() const noexcept { return t_max_; }
  /// |Z^d cap t P| for 0 <= t <= t_max.
  Index count(const Rational& t) const;
  /// Ascending gauges of the stored points (the origin contributes 0).
  const std::vector<Rational>& gauges() const noexcept { return gauges_; }
  /// Nonzero lattice points with gauge <= t, first nonzero coordinate positive, lexicographic.
  std::vector<LatticePoint> canonical_points(const Rational& t) const;

 private:
  Rational t_max_;
  int dim_;
  std::vector<Rational> gauges_;
  std::vector<std::pair<Rational, LatticePoint>> canonical_;
};

/// zeta_P(t) = |Z^d cap t P| for symmetric P.
ZetaEvaluation zeta(const Polytope& symmetric, const Rational& t);

struct FKResult {
  Rational s_star;
  double f_K = 1;
  /// Every s <= s_lo fails s >= zeta(1/s); s_hi satisfies it.
  Rational s_lo;
  Rational s_hi;
  bool attained = true;
};

/// s* = inf{s : s >= zeta_{K-K}(1/s)} and f(K) = sqrt(s*).
FKResult f_K(const Polytope& k);
FKResult f_K_of_difference(const Polytope& difference);

/// MAP_B(a, b) by stepping with the membership oracle.
CanonicalAP maximal_ap_in_body(const LatticePoint& a, const LatticePoint& b, const ShiftedBody& body);

/// Maximal APs of Omega_B for every canonical nonzero lattice step in K - K.
MaximalFamily maximal_family(const ShiftedBody& body, std::uint64_t max_scan = kDefaultMaxScan);
SetSystem enumerate_maximal_aps_in_body(const ShiftedBody& body);

struct MaxShiftRow {
  RationalVector shift;
  Index count = 0;
  bool holds = true;
};

struct MaxShiftReport {
  Index zeta_one = 1;
  std::vector<MaxShiftRow> rows;
  /// max count / zeta(1): the measured constant of the second inequality.
  double max_ratio = 0;
  bool all_hold = true;
};

/// |Z^d cap (v + K)| <= zeta_{K-K}(1) for every sampled v.
MaxShiftReport check_zeta_maxshift(const Polytope& k, const std::vector<RationalVector>& shifts);

struct ScalingReport {
  Rational t;
  Index zeta_one = 1;
  Index zeta_t = 1;
  Rational upper;
  bool lower_holds = true;
  bool upper_holds = true;
};

/// zeta(1) <= zeta(t) <= (4t+1)^d zeta(1) for symmetric P and t >= 1.
ScalingReport check_zeta_scaling(const Polytope& symmetric, const Rational& t);

/// Text format: "dim d", "vertex c1 ... cd" (one per vertex), optional
/// "shift c1 ... cd"; coordinates are p or p/q; '#' starts a comment.
ShiftedBody parse_polytope(std::string_view text);
ShiftedBody load_polytope(const std::string& path);
std::string format_polytope(const ShiftedBody& body);

}  // namespace apdisc
