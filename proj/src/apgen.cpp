#include "apdisc/apgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace apdisc {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  v ^= v >> 31;
  v *= 0x7fb5d329728ea185ULL;
  v ^= v >> 27;
  return (h ^ v) * 0x100000001b3ULL + 0x9e3779b97f4a7c15ULL;
}

void check_dim(const LatticePoint& x, int d, const char* what) {
  if (x.size() != d) {
    throw StructuralError(std::string(what) + " has dimension " + std::to_string(x.size()) +
                          ", expected " + std::to_string(d));
  }
}

bool in_box(const LatticePoint& x, const BoxSpec& box) {
  for (int i = 0; i < box.dim(); ++i) {
    if (x[i] < 1 || x[i] > box.sides[i]) return false;
  }
  return true;
}

void require_lex_sorted(const Universe& u) {
  if (!u.is_lex_sorted()) throw StructuralError("maximal families need a lexicographically sorted universe");
}

void guard(std::uint64_t count, std::uint64_t limit, const char* what) {
  if (count > limit) throw ResourceError(what, count, limit);
}

}  // namespace

BoxSpec::BoxSpec(std::vector<Coord> s) : sides(std::move(s)) {
  if (sides.empty()) throw StructuralError("box needs at least one side");
  for (Coord n : sides) {
    if (n < 1) throw DomainError("box sides must be >= 1, got " + std::to_string(n));
  }
  long double v = 1;
  for (Coord n : sides) v *= static_cast<long double>(n);
  if (v > 4.0e9L) throw ResourceError("box volume exceeds 32-bit point ranks", static_cast<std::uint64_t>(v), 4'000'000'000ULL);
}

Index BoxSpec::volume() const noexcept {
  Index v = 1;
  for (Coord n : sides) v *= n;
  return v;
}

Coord BoxSpec::max_side() const noexcept { return *std::max_element(sides.begin(), sides.end()); }

UniversePtr box_universe(const BoxSpec& box) {
  return std::make_shared<const Universe>(Universe::box(box.sides));
}

bool is_canonical_step(const LatticePoint& b) {
  for (Index i = 0; i < b.size(); ++i) {
    if (b[i] != 0) return b[i] > 0;
  }
  return false;
}

CanonicalAP canonicalize(const APDescriptor& ap) {
  if (ap.length < 1) throw DomainError("AP length must be >= 1");
  if (ap.start.size() != ap.step.size()) throw StructuralError("AP start and step dimensions differ");
  CanonicalAP c;
  c.descriptor = ap;
  auto& d = c.descriptor;
  if (d.length == 1 || d.step.isZero()) {
    if (d.length >= 2) throw DomainError("an AP with zero step has length 1");
    d.step.setZero();
  } else if (!is_canonical_step(d.step)) {
    d.start = d.start + (d.length - 1) * d.step;
    d.step = -d.step;
  }
  std::uint64_t h = mix(0, static_cast<std::uint64_t>(d.length));
  for (Index i = 0; i < d.start.size(); ++i) h = mix(h, static_cast<std::uint64_t>(d.start[i]));
  for (Index i = 0; i < d.step.size(); ++i) h = mix(h, static_cast<std::uint64_t>(d.step[i]));
  c.point_hash = h;
  return c;
}

std::vector<LatticePoint> ap_points(const APDescriptor& ap) {
  if (ap.length < 1) throw DomainError("AP length must be >= 1");
  std::vector<LatticePoint> pts;
  pts.reserve(static_cast<std::size_t>(ap.length));
  LatticePoint x = ap.start;
  for (Index i = 0; i < ap.length; ++i) {
    pts.push_back(x);
    x += ap.step;
  }
  return pts;
}

CanonicalAP maximal_ap(const LatticePoint& a, const LatticePoint& b, const BoxSpec& box) {
  check_dim(a, box.dim(), "start point");
  check_dim(b, box.dim(), "step");
  if (!in_box(a, box)) throw DomainError("start point lies outside the box");
  if (b.isZero()) throw DomainError("maximal AP needs a nonzero step");
  Index back = std::numeric_limits<Index>::max();
  Index fwd = back;
  for (int i = 0; i < box.dim(); ++i) {
    if (b[i] > 0) {
      back = std::min(back, (a[i] - 1) / b[i]);
      fwd = std::min(fwd, (box.sides[i] - a[i]) / b[i]);
    } else if (b[i] < 0) {
      back = std::min(back, (box.sides[i] - a[i]) / -b[i]);
      fwd = std::min(fwd, (a[i] - 1) / -b[i]);
    }
  }
  return canonicalize({a - back * b, b, back + fwd + 1});
}

CanonicalAP maximal_ap(const LatticePoint& a, const LatticePoint& b, const Universe& universe) {
  check_dim(a, universe.dim(), "start point");
  check_dim(b, universe.dim(), "step");
  if (!universe.contains({a.data(), static_cast<std::size_t>(a.size())})) {
    throw DomainError("start point lies outside the domain");
  }
  if (b.isZero()) throw DomainError("maximal AP needs a nonzero step");
  LatticePoint x = a;
  while (universe.find(LatticePoint(x - b))) x -= b;
  LatticePoint start = x;
  Index len = 1;
  while (universe.find(LatticePoint(x + b))) {
    x += b;
    ++len;
  }
  return canonicalize({start, b, len});
}

std::vector<LatticePoint> canonical_box_steps(const BoxSpec& box) {
  const int d = box.dim();
  std::vector<LatticePoint> out;
  LatticePoint b(d);
  for (int i = 0; i < d; ++i) b[i] = -(box.sides[i] - 1);
  while (true) {
    if (is_canonical_step(b)) out.push_back(b);
    int k = d - 1;
    for (; k >= 0; --k) {
      if (++b[k] <= box.sides[k] - 1) break;
      b[k] = -(box.sides[k] - 1);
    }
    if (k < 0) break;
  }
  return out;
}

std::vector<LatticePoint> canonical_difference_steps(const Universe& universe) {
  const int d = universe.dim();
  std::vector<Coord> flat;
  const Index n = universe.size();
  for (Index i = 0; i < n; ++i) {
    const auto p = universe.point(i);
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto q = universe.point(j);
      std::vector<Coord> diff(d);
      for (int k = 0; k < d; ++k) diff[k] = q[k] - p[k];
      LatticePoint v = Eigen::Map<LatticePoint>(diff.data(), d);
      if (is_canonical_step(v)) flat.insert(flat.end(), diff.begin(), diff.end());
    }
  }
  const std::size_t m = flat.size() / static_cast<std::size_t>(d);
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  auto row = [&](std::size_t r) { return std::span<const Coord>(flat.data() + r * d, static_cast<std::size_t>(d)); };
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return lex_less(row(x), row(y)); });
  std::vector<LatticePoint> out;
  for (std::size_t r : idx) {
    const auto s = row(r);
    if (!out.empty() && std::equal(s.begin(), s.end(), out.back().data())) continue;
    out.emplace_back(Eigen::Map<const LatticePoint>(s.data(), d));
  }
  return out;
}

Index max_map_length(const BoxSpec& box, const LatticePoint& b) {
  check_dim(b, box.dim(), "step");
  if (b.isZero()) throw DomainError("step must be nonzero");
  Index best = std::numeric_limits<Index>::max();
  for (int i = 0; i < box.dim(); ++i) {
    if (b[i] != 0) best = std::min(best, 1 + (box.sides[i] - 1) / std::abs(b[i]));
  }
  return best;
}

// ------------------------------------------------------------ MaximalFamily

MaximalFamily maximal_family(UniversePtr universe, std::vector<LatticePoint> steps) {
  require_lex_sorted(*universe);
  const int d = universe->dim();
  const Index n = universe->size();
  MaximalFamily fam{universe, std::move(steps), SetSystem(universe), {}, std::vector<std::int32_t>(n, -1)};
  fam.longest.reserve(fam.steps.size());
  std::vector<Coord> x(d);
  std::vector<std::uint32_t> chain;
  for (std::size_t k = 0; k < fam.steps.size(); ++k) {
    const LatticePoint& b = fam.steps[k];
    check_dim(b, d, "step");
    if (!is_canonical_step(b)) throw DomainError("maximal family steps must be canonical");
    Index longest = 1;
    for (Index i = 0; i < n; ++i) {
      const auto p = universe->point(i);
      for (int c = 0; c < d; ++c) x[c] = p[c] - b[c];
      if (universe->find(x)) continue;
      chain.assign(1, static_cast<std::uint32_t>(i));
      for (int c = 0; c < d; ++c) x[c] = p[c] + b[c];
      while (auto j = universe->find(x)) {
        chain.push_back(static_cast<std::uint32_t>(*j));
        for (int c = 0; c < d; ++c) x[c] += b[c];
      }
      if (chain.size() == 1) {
        if (fam.singleton_step[i] < 0) fam.singleton_step[i] = static_cast<std::int32_t>(k);
      } else {
        fam.chains.add_set_unchecked(chain, static_cast<std::int32_t>(k));
        longest = std::max<Index>(longest, static_cast<Index>(chain.size()));
      }
    }
    fam.longest.push_back(longest);
  }
  return fam;
}

MaximalFamily maximal_family(const BoxSpec& box) {
  return maximal_family(box_universe(box), canonical_box_steps(box));
}

SetSystem maximal_aps(const MaximalFamily& family, SingletonPolicy policy) {
  SetSystem out(family.universe);
  out.append(family.chains);
  const Index n = family.universe->size();
  std::vector<bool> covered(n, false);
  if (policy == SingletonPolicy::from_steps) {
    for (Index t = 0; t < family.chains.size(); ++t) {
      for (auto i : family.chains.set(t)) covered[i] = true;
    }
  }
  for (Index i = 0; i < n; ++i) {
    const bool take = policy == SingletonPolicy::all_points || family.singleton_step[i] >= 0 || !covered[i];
    if (take) {
      const std::uint32_t m = static_cast<std::uint32_t>(i);
      out.add_set_unchecked({&m, 1}, family.singleton_step[i]);
    }
  }
  return out;
}

std::uint64_t count_all_aps(const MaximalFamily& family) {
  std::uint64_t c = static_cast<std::uint64_t>(family.universe->size());
  for (Index t = 0; t < family.chains.size(); ++t) {
    const std::uint64_t len = family.chains.set(t).size();
    c += len * (len - 1) / 2;
  }
  return c;
}

SetSystem all_aps(const MaximalFamily& family, std::uint64_t max_sets) {
  guard(count_all_aps(family), max_sets, "all-AP family too large");
  SetSystem out(family.universe);
  const Index n = family.universe->size();
  for (Index i = 0; i < n; ++i) {
    const std::uint32_t m = static_cast<std::uint32_t>(i);
    out.add_set_unchecked({&m, 1});
  }
  for (Index t = 0; t < family.chains.size(); ++t) {
    const auto c = family.chains.set(t);
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = i + 2; j <= c.size(); ++j) out.add_set_unchecked(c.subspan(i, j - i), family.chains.tag(t));
    }
  }
  return out;
}

std::uint64_t count_prefix_maximal(const MaximalFamily& family) {
  std::uint64_t c = static_cast<std::uint64_t>(family.universe->size());
  for (Index t = 0; t < family.chains.size(); ++t) c += 2 * family.chains.set(t).size() - 3;
  return c;
}

SetSystem prefix_maximal_aps(const MaximalFamily& family, std::uint64_t max_sets) {
  guard(count_prefix_maximal(family), max_sets, "prefix-maximal family too large");
  SetSystem out(family.universe);
  const Index n = family.universe->size();
  for (Index i = 0; i < n; ++i) {
    const std::uint32_t m = static_cast<std::uint32_t>(i);
    out.add_set_unchecked({&m, 1});
  }
  for (Index t = 0; t < family.chains.size(); ++t) {
    const auto c = family.chains.set(t);
    const auto tag = family.chains.tag(t);
    for (std::size_t len = 2; len <= c.size(); ++len) out.add_set_unchecked(c.first(len), tag);
    for (std::size_t len = c.size() - 1; len >= 2; --len) out.add_set_unchecked(c.last(len), tag);
  }
  return out;
}

std::int64_t all_ap_disc(const MaximalFamily& family, const Coloring& chi) {
  const std::int64_t single = family.universe->empty() ? 0 : 1;
  return std::max(single, subinterval_max_disc(family.chains, chi));
}

SetSystem enumerate_maximal_aps(const BoxSpec& box) { return maximal_aps(maximal_family(box)); }

SetSystem enumerate_all_aps(const BoxSpec& box, std::uint64_t max_sets) {
  return all_aps(maximal_family(box), max_sets);
}

SetSystem enumerate_prefix_maximal(const BoxSpec& box, std::uint64_t max_sets) {
  return prefix_maximal_aps(maximal_family(box), max_sets);
}

SetSystem step_partition(const UniversePtr& uptr, const LatticePoint& b) {
  const Universe& universe = *uptr;
  check_dim(b, universe.dim(), "step");
  if (b.isZero()) throw DomainError("step must be nonzero");
  LatticePoint c = is_canonical_step(b) ? LatticePoint(b) : LatticePoint(-b);
  const int d = universe.dim();
  SetSystem out(uptr);
  std::vector<bool> seen(universe.size(), false);
  std::vector<std::uint32_t> chain;
  LatticePoint x(d);
  for (Index i = 0; i < universe.size(); ++i) {
    if (seen[i]) continue;
    x = universe.point_vector(i);
    while (universe.find(LatticePoint(x - c))) x -= c;
    chain.clear();
    for (auto j = universe.find(x); j; j = universe.find(x)) {
      chain.push_back(static_cast<std::uint32_t>(*j));
      seen[*j] = true;
      x += c;
    }
    std::sort(chain.begin(), chain.end());
    out.add_set_unchecked(chain);
  }
  return out;
}

OrderingSigma lex_order(const Universe& universe) {
  const Index n = universe.size();
  std::vector<Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) { return lex_less(universe.point(a), universe.point(b)); });
  std::vector<std::uint32_t> rank(n);
  for (Index r = 0; r < n; ++r) rank[idx[r]] = static_cast<std::uint32_t>(r + 1);
  return OrderingSigma(std::move(rank));
}

std::pair<LatticePoint, LatticePoint> lex_interval_repr(const CanonicalAP& ap, const BoxSpec& box) {
  const auto& d = ap.descriptor;
  check_dim(d.start, box.dim(), "AP start");
  check_dim(d.step, box.dim(), "AP step");
  if (d.length < 1) throw DomainError("AP length must be >= 1");
  const bool canonical = d.length == 1 ? d.step.isZero() : is_canonical_step(d.step);
  if (!canonical) throw DomainError("lex_interval_repr needs a canonical AP");
  LatticePoint y = d.start + (d.length - 1) * d.step;
  if (!in_box(d.start, box) || !in_box(y, box)) throw DomainError("AP leaves the box");
  return {d.start, y};
}

LargeStepSet large_step_set(const BoxSpec& box, std::int64_t s) {
  if (s < 2) throw DomainError("large_step_set needs s >= 2");
  LargeStepSet out;
  out.s = s;
  for (auto& b : canonical_box_steps(box)) {
    if (max_map_length(box, b) > s) out.steps.push_back(std::move(b));
  }
  out.lemma_bound = 1;
  for (Coord n : box.sides) out.lemma_bound *= 4.0 * static_cast<double>(n) / static_cast<double>(s) + 1.0;
  return out;
}

std::uint64_t count_steps_at_least(const BoxSpec& box, std::int64_t s) {
  if (s < 2) throw DomainError("count_steps_at_least needs s >= 2");
  std::uint64_t prod = 1;
  for (Coord n : box.sides) prod *= static_cast<std::uint64_t>(2 * ((n - 1) / (s - 1)) + 1);
  return prod - 1;
}

// ---------------------------------------------------------------- ApRowIndex

std::size_t ApRowIndex::KeyHash::operator()(const Key& k) const noexcept {
  return static_cast<std::size_t>(mix(mix(k.first, k.second), k.size));
}

ApRowIndex::ApRowIndex(const SetSystem& family) {
  rows_.reserve(static_cast<std::size_t>(family.size()));
  for (Index t = 0; t < family.size(); ++t) {
    const auto s = family.set(t);
    if (s.empty()) continue;
    rows_.emplace(Key{s[0], s.size() > 1 ? s[1] : UINT32_MAX, s.size()}, t);
  }
}

std::optional<Index> ApRowIndex::find(std::span<const std::uint32_t> m) const {
  if (m.empty()) return std::nullopt;
  auto it = rows_.find(Key{m[0], m.size() > 1 ? m[1] : UINT32_MAX, m.size()});
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

}  // namespace apdisc
