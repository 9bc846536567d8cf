#pragma once

// Arithmetic progressions in boxes and other line-convex lattice sets:
// canonical descriptors, maximal / prefix-maximal / all APs, the
// lexicographic order, and the large-step counting set.

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "apdisc/core.hpp"

namespace apdisc {

/// Side lengths (N_1, ..., N_d), each >= 1.
struct BoxSpec {
  explicit BoxSpec(std::vector<Coord> sides);

  std::vector<Coord> sides;

  int dim() const noexcept { return static_cast<int>(sides.size()); }
  Index volume() const noexcept;
  Coord max_side() const noexcept;
};

UniversePtr box_universe(const BoxSpec& box);

/// AP_d(a, b, l) = {a + i b : 0 <= i < l}.
struct APDescriptor {
  LatticePoint start;
  LatticePoint step;
  Index length = 1;
};

/// An AP in canonical form: l = 1 implies b = 0, and l >= 2 implies the first
/// nonzero coordinate of b is positive. Equal descriptors <=> equal point sets.
struct CanonicalAP {
  APDescriptor descriptor;
  std::uint64_t point_hash = 0;

  friend bool operator==(const CanonicalAP& x, const CanonicalAP& y) {
    return x.descriptor.length == y.descriptor.length && x.descriptor.start == y.descriptor.start &&
           x.descriptor.step == y.descriptor.step;
  }
};

bool is_canonical_step(const LatticePoint& b);
CanonicalAP canonicalize(const APDescriptor& ap);
std::vector<LatticePoint> ap_points(const APDescriptor& ap);

/// MAP_N(a, b): the residue line of a mod b intersected with the box.
CanonicalAP maximal_ap(const LatticePoint& a, const LatticePoint& b, const BoxSpec& box);
/// Same for any universe whose intersection with every lattice line is contiguous.
CanonicalAP maximal_ap(const LatticePoint& a, const LatticePoint& b, const Universe& universe);

/// Canonical nonzero steps with |b_i| <= N_i - 1, sorted lexicographically.
std::vector<LatticePoint> canonical_box_steps(const BoxSpec& box);
/// Canonical forms of all pairwise differences of universe points, sorted.
std::vector<LatticePoint> canonical_difference_steps(const Universe& universe);

/// Longest maximal AP with step b in the box: min over b_i != 0 of 1 + floor((N_i-1)/|b_i|).
Index max_map_length(const BoxSpec& box, const LatticePoint& b);

/// The maximal-AP structure of a line-convex universe for a list of steps.
struct MaximalFamily {
  UniversePtr universe;
  std::vector<LatticePoint> steps;
  /// Non-singleton maximal APs, lexicographically sorted; tag = step id.
  SetSystem chains;
  /// Longest maximal AP per step (1 if every class is a singleton).
  std::vector<Index> longest;
  /// Per point: first step id for which the point is a singleton class, or -1.
  std::vector<std::int32_t> singleton_step;
};

MaximalFamily maximal_family(UniversePtr universe, std::vector<LatticePoint> steps);
MaximalFamily maximal_family(const BoxSpec& box);

/// How singleton maximal APs enter a maximal family.
enum class SingletonPolicy {
  /// Singletons arising for an enumerated step, deduplicated; points covered by
  /// no enumerated AP (only possible with no steps) also appear.
  from_steps,
  /// Every point as a singleton (MAP(a, b) for b outside the enumerated range).
  all_points,
};

SetSystem maximal_aps(const MaximalFamily& family, SingletonPolicy policy = SingletonPolicy::from_steps);

inline constexpr std::uint64_t kDefaultMaxSets = 20'000'000;

/// |A| = number of distinct nonempty APs: all slices of every chain plus singletons.
std::uint64_t count_all_aps(const MaximalFamily& family);
SetSystem all_aps(const MaximalFamily& family, std::uint64_t max_sets = kDefaultMaxSets);

/// Backward-inextensible APs: chain prefixes, chain suffixes and all singletons.
std::uint64_t count_prefix_maximal(const MaximalFamily& family);
SetSystem prefix_maximal_aps(const MaximalFamily& family, std::uint64_t max_sets = kDefaultMaxSets);

/// disc of all APs, from the chains: every AP is a contiguous slice of one.
std::int64_t all_ap_disc(const MaximalFamily& family, const Coloring& chi);

SetSystem enumerate_maximal_aps(const BoxSpec& box);
SetSystem enumerate_all_aps(const BoxSpec& box, std::uint64_t max_sets = kDefaultMaxSets);
SetSystem enumerate_prefix_maximal(const BoxSpec& box, std::uint64_t max_sets = kDefaultMaxSets);

/// Maximal APs with one step: the classes partition the universe.
SetSystem step_partition(const UniversePtr& universe, const LatticePoint& b);

/// sigma(x) = 1-based rank of x in lexicographic order.
OrderingSigma lex_order(const Universe& universe);

/// Endpoints x = a, y = a + (l-1) b with AP = residue line of a intersected
/// with the lexicographic interval [x, y].
std::pair<LatticePoint, LatticePoint> lex_interval_repr(const CanonicalAP& ap, const BoxSpec& box);

struct LargeStepSet {
  std::int64_t s = 2;
  /// Canonical steps whose longest maximal AP has more than s points.
  std::vector<LatticePoint> steps;
  /// prod_i (4 N_i / s + 1).
  double lemma_bound = 0;
};

LargeStepSet large_step_set(const BoxSpec& box, std::int64_t s);

/// Number of nonzero b in Z^d (both signs) whose longest maximal AP has at least s points.
std::uint64_t count_steps_at_least(const BoxSpec& box, std::int64_t s);

/// Lookup of an AP row by its two smallest members and its size.
class ApRowIndex {
 public:
  explicit ApRowIndex(const SetSystem& family);

  std::optional<Index> find(std::span<const std::uint32_t> sorted_members) const;

 private:
  struct Key {
    std::uint32_t first;
    std::uint32_t second;
    std::uint64_t size;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  std::unordered_map<Key, Index, KeyHash> rows_;
};

}  // namespace apdisc
