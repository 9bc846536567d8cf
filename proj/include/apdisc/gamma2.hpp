#pragma once

// Explicit gamma_2 factorizations A = L R with tracked value
// ||L||_{2->inf} * ||R||_{1->2}, the composition calculus, the threshold
// construction for maximal APs, the halving recursion for all APs, the bound
// function f(N) and spectral lower bounds.

#include <Eigen/SparseCore>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "apdisc/apgen.hpp"
#include "apdisc/core.hpp"
#include "apdisc/rational.hpp"

namespace apdisc {

using RowSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using ColSparse = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// f(N) = max over I of (prod_{i in I} N_i)^{1/(2|I|+2)}, kept exact as
/// s = f^2 = base^{1/root} with base = prod_{i in I} N_i and root = |I|+1.
struct FBoundResult {
  std::vector<Coord> sides;
  double value = 1;
  std::vector<int> argmax_subset;
  BigInt base{1};
  int root = 1;

  double s() const { return value * value; }
  /// length > s, decided exactly as length^root > base.
  bool exceeded_by(Index length) const;
};

FBoundResult f_of_N(const BoxSpec& box);

/// Node of a certificate construction tree.
struct Provenance {
  std::string kind;
  double value = 0;
  Index rows = 0;
  Index inner = 0;
  Index cols = 0;
  std::string note;
  std::vector<std::shared_ptr<const Provenance>> children;
};

/// A = L R. L may be dropped to save memory (right-only); its row norms are
/// always kept, which is all the value and the walk need.
struct FactorizationCertificate {
  std::optional<RowSparse> L;
  ColSparse R;
  Eigen::VectorXd left_row_norms;
  double value = 0;
  std::shared_ptr<const SetSystem> target;
  std::shared_ptr<const Provenance> provenance;

  Index rows() const noexcept { return left_row_norms.size(); }
  Index inner() const noexcept { return R.rows(); }
  Index cols() const noexcept { return R.cols(); }
  bool has_left() const noexcept { return L.has_value(); }

  double left_norm() const;
  double right_norm() const;
};

/// Column Euclidean norms of a sparse matrix.
Eigen::VectorXd column_norms(const ColSparse& r);
Eigen::VectorXd row_norms(const RowSparse& l);

/// Recomputes the value from the norms and rescales so both factors have norm sqrt(value).
void balance(FactorizationCertificate& cert);

FactorizationCertificate size_bound_cert(std::shared_ptr<const SetSystem> family);
FactorizationCertificate degree_bound_cert(std::shared_ptr<const SetSystem> family);

/// Rows of f1 followed by rows of f2 (same columns).
FactorizationCertificate union_cert(const FactorizationCertificate& f1, const FactorizationCertificate& f2);

/// One target row per alignment entry (p1, p2): row p1 of f1 plus (or minus)
/// row p2 of f2; p2 = -1 means the f2 part is empty.
struct RowAlignment {
  Index first;
  Index second;
};

enum class TriangleMode { sum, difference };

FactorizationCertificate triangle_cert(const FactorizationCertificate& f1, const FactorizationCertificate& f2,
                                       const std::vector<RowAlignment>& alignment, TriangleMode mode,
                                       std::shared_ptr<const SetSystem> target = nullptr);

/// f1 on columns col1[j] and f2 on columns col2[j] of an n-column universe; the
/// column images must be disjoint.
FactorizationCertificate disjoint_support_cert(const FactorizationCertificate& f1, const std::vector<Index>& col1,
                                               const FactorizationCertificate& f2, const std::vector<Index>& col2,
                                               Index n, std::shared_ptr<const SetSystem> target = nullptr);

/// Keeps the listed rows and columns: A' = A(rows, cols).
FactorizationCertificate restrict_cert(const FactorizationCertificate& f, const std::vector<Index>& rows,
                                       const std::vector<Index>& cols, std::shared_ptr<const SetSystem> target = nullptr);

/// Drops L (keeping its row norms).
void drop_left(FactorizationCertificate& cert);

/// Threshold split of a maximal family: size bound on chains whose step is not
/// large plus all singletons, degree bound on chains with large steps.
struct MapCertificate {
  FactorizationCertificate cert;
  std::shared_ptr<const SetSystem> family;
  std::vector<bool> large_step;
  Index large_count = 0;
  Index small_max_size = 1;
  Index max_large_degree = 0;
};

MapCertificate map_cert(const MaximalFamily& family, const std::function<bool(Index)>& is_large);
/// Box version with s = f(N)^2 and all singletons in the target.
MapCertificate map_cert(const BoxSpec& box);

struct DecayCheck {
  std::vector<Coord> parent;
  std::vector<Coord> child;
  double f_parent = 1;
  double f_child = 1;
  double factor = 1;
  bool holds = true;
};

struct ApCertificate {
  FactorizationCertificate cert;
  FBoundResult f;
  double ratio = 0;
  std::vector<DecayCheck> decay;
  std::vector<Coord> rounded;
  /// Value of the prefix-maximal certificate on the rounded box.
  double prefix_value = 0;
};

struct ApCertOptions {
  bool keep_left = true;
  std::uint64_t max_sets = kDefaultMaxSets;
};

/// Certificate for all APs of the box via the halving recursion.
ApCertificate ap_cert(const BoxSpec& box, const ApCertOptions& options = {});

/// ap_cert values of every box N <= hat from one right-only certificate on
/// the power-of-2 box `hat`: rows kept are the APs inside N, columns the points
/// of N. values[i] is the value for the box whose sides are the i-th lattice
/// point of the hat.
struct SubboxValues {
  std::vector<Coord> hat;
  UniversePtr boxes;
  std::vector<double> values;
  double hat_value = 0;
  std::vector<DecayCheck> decay;

  double value(std::span<const Coord> sides) const;
};

SubboxValues ap_cert_subbox_values(const BoxSpec& hat, const ApCertOptions& options = {});

/// Upper bounds on the values ap_cert / map_cert produce, from the recursion
/// v_PA(N) <= v_PA(N') + v_M(N') without building matrices.
struct ValueBound {
  double map_value = 0;
  double prefix_value = 0;
  double ap_value = 0;
  std::vector<DecayCheck> decay;
};

double map_value_bound(const BoxSpec& box);
ValueBound ap_value_bound(const BoxSpec& box);

/// max |(L R - A)_ij| over the target, streaming row by row.
double max_residual(const FactorizationCertificate& cert, const SetSystem& target);

struct SpectralBounds {
  double nuclear_over_sqrt_mn = 0;
  double sigma_min_disc_lb = 0;
  double sigma_max = 0;
  double sigma_min = 0;
};

SpectralBounds spectral_lower_bounds(const SetSystem& family, std::uint64_t max_entries = 20'000'000);

}  // namespace apdisc
