#pragma once

// Ground sets, set systems and exact (prefix) discrepancy evaluation.

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "apdisc/errors.hpp"

namespace apdisc {

using Index = std::int64_t;
using Coord = std::int64_t;
using LatticePoint = Eigen::Matrix<Coord, Eigen::Dynamic, 1>;

/// Strict lexicographic comparison of two coordinate tuples of equal length.
bool lex_less(std::span<const Coord> x, std::span<const Coord> y);

/// An ordered, duplicate-free list of lattice points of a common dimension.
///
/// Point ranks are 0-based and fixed at construction. A universe built from
/// box extents answers `find` in closed form; any other universe uses a hash
/// index.
class Universe {
 public:
  /// `flat` holds the points back to back, `dim` coordinates each.
  Universe(int dim, std::vector<Coord> flat);

  /// The box [1,N_1] x ... x [1,N_d] in lexicographic order.
  static Universe box(std::span<const Coord> sides);

  int dim() const noexcept { return dim_; }
  Index size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  std::span<const Coord> point(Index i) const {
    return {coords_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)};
  }
  LatticePoint point_vector(Index i) const;

  std::optional<Index> find(std::span<const Coord> x) const;
  std::optional<Index> find(const LatticePoint& x) const {
    return find(std::span<const Coord>(x.data(), static_cast<std::size_t>(x.size())));
  }
  bool contains(std::span<const Coord> x) const { return find(x).has_value(); }

  /// Side lengths if this universe is a box, empty otherwise.
  const std::vector<Coord>& box_sides() const noexcept { return sides_; }
  bool is_box() const noexcept { return !sides_.empty(); }
  bool is_lex_sorted() const;

  std::span<const Coord> flat() const noexcept { return coords_; }

 private:
  Universe(int dim, std::vector<Coord> flat, std::vector<Coord> sides);

  int dim_;
  Index size_;
  std::vector<Coord> coords_;
  std::vector<Coord> sides_;
  std::unordered_multimap<std::uint64_t, Index> hash_index_;
};

using UniversePtr = std::shared_ptr<const Universe>;

/// A family of subsets of a universe, stored as CSR rows of strictly
/// increasing point ranks. Sets may carry an integer tag (e.g. a step id).
class SetSystem {
 public:
  explicit SetSystem(UniversePtr universe);

  /// Appends a set; throws StructuralError unless strictly increasing and in range.
  Index add_set(std::span<const std::uint32_t> members, std::int32_t tag = -1);
  /// Appends without validation; for generators that produce sorted data by construction.
  Index add_set_unchecked(std::span<const std::uint32_t> members, std::int32_t tag = -1);

  void reserve(std::size_t sets, std::size_t entries);

  Index size() const noexcept { return static_cast<Index>(offsets_.size()) - 1; }
  bool empty() const noexcept { return size() == 0; }
  std::span<const std::uint32_t> set(Index i) const {
    const auto b = offsets_[static_cast<std::size_t>(i)];
    const auto e = offsets_[static_cast<std::size_t>(i) + 1];
    return {members_.data() + b, e - b};
  }
  std::int32_t tag(Index i) const { return tags_[static_cast<std::size_t>(i)]; }
  std::size_t total_entries() const noexcept { return members_.size(); }
  std::size_t max_set_size() const;
  /// Largest number of sets containing a single point.
  std::size_t max_degree() const;

  const Universe& universe() const noexcept { return *universe_; }
  const UniversePtr& universe_ptr() const noexcept { return universe_; }

  /// m x n 0/1 incidence matrix (rows are sets).
  Eigen::SparseMatrix<double, Eigen::RowMajor> incidence() const;
  Eigen::MatrixXd dense_incidence() const;

  /// Appends every set of `other` (same universe object required).
  void append(const SetSystem& other);

 private:
  UniversePtr universe_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> members_;
  std::vector<std::int32_t> tags_;
};

enum class ColoringSource { random, gswalk, bruteforce, external };

std::string_view to_string(ColoringSource source);

/// A +/-1 assignment over a universe.
class Coloring {
 public:
  Coloring(Eigen::VectorXi values, ColoringSource source,
           std::optional<std::uint64_t> seed = std::nullopt);

  const Eigen::VectorXi& values() const noexcept { return values_; }
  int operator[](Index i) const { return values_[i]; }
  Index size() const noexcept { return values_.size(); }
  ColoringSource source() const noexcept { return source_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }

 private:
  Eigen::VectorXi values_;
  ColoringSource source_;
  std::optional<std::uint64_t> seed_;
};

/// Bijection universe rank -> 1..n.
class OrderingSigma {
 public:
  explicit OrderingSigma(std::vector<std::uint32_t> rank);
  static OrderingSigma identity(Index n);

  std::uint32_t operator()(Index i) const { return rank_[static_cast<std::size_t>(i)]; }
  Index size() const noexcept { return static_cast<Index>(rank_.size()); }

 private:
  std::vector<std::uint32_t> rank_;
};

std::int64_t chi_sum(std::span<const std::uint32_t> set, const Coloring& chi);

/// max over sets of |chi-sum|; 0 for an empty family.
std::int64_t disc_eval(const SetSystem& family, const Coloring& chi);

/// max over sets T and j of |sum of chi over {w in T : sigma(w) <= j}|.
std::int64_t pdisc_eval(const SetSystem& family, const OrderingSigma& sigma, const Coloring& chi);

/// max over sets and contiguous slices of each set (in stored order) of
/// |chi-sum|, i.e. max prefix minus min prefix with the empty prefix included.
std::int64_t subinterval_max_disc(const SetSystem& sorted_family, const Coloring& chi);

}  // namespace apdisc
