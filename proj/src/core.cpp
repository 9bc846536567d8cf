#include "apdisc/core.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace apdisc {

namespace {

std::uint64_t hash_coords(std::span<const Coord> x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Coord c : x) {
    auto v = static_cast<std::uint64_t>(c);
    v ^= v >> 33;
    v *= 0xff51afd7ed558ccdULL;
    v ^= v >> 33;
    h = (h ^ v) * 0x100000001b3ULL;
  }
  return h;
}

void check_coloring(const Universe& u, const Coloring& chi) {
  if (chi.size() != u.size()) {
    throw StructuralError("coloring has " + std::to_string(chi.size()) +
                          " entries but the universe has " + std::to_string(u.size()) + " points");
  }
}

}  // namespace

bool lex_less(std::span<const Coord> x, std::span<const Coord> y) {
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

// ---------------------------------------------------------------- Universe

Universe::Universe(int dim, std::vector<Coord> flat) : dim_(dim), coords_(std::move(flat)) {
  if (dim_ < 1) throw StructuralError("universe dimension must be at least 1");
  if (coords_.size() % static_cast<std::size_t>(dim_) != 0) {
    throw StructuralError("flat coordinate buffer is not a multiple of the dimension");
  }
  size_ = static_cast<Index>(coords_.size() / static_cast<std::size_t>(dim_));
  hash_index_.reserve(static_cast<std::size_t>(size_));
  for (Index i = 0; i < size_; ++i) {
    if (find(point(i))) throw StructuralError("universe points must be distinct");
    hash_index_.emplace(hash_coords(point(i)), i);
  }
}

Universe Universe::box(std::span<const Coord> sides) {
  if (sides.empty()) throw StructuralError("box needs at least one side");
  Index n = 1;
  for (Coord s : sides) {
    if (s < 1) throw DomainError("box sides must be >= 1");
    n *= s;
  }
  const int d = static_cast<int>(sides.size());
  std::vector<Coord> flat(static_cast<std::size_t>(n) * d);
  std::vector<Coord> x(d, 1);
  for (Index i = 0; i < n; ++i) {
    std::copy(x.begin(), x.end(), flat.begin() + static_cast<std::ptrdiff_t>(i) * d);
    for (int k = d - 1; k >= 0; --k) {
      if (++x[k] <= sides[k]) break;
      x[k] = 1;
    }
  }
  return Universe(d, std::move(flat), std::vector<Coord>(sides.begin(), sides.end()));
}

Universe::Universe(int dim, std::vector<Coord> flat, std::vector<Coord> sides)
    : dim_(dim), coords_(std::move(flat)), sides_(std::move(sides)) {
  size_ = static_cast<Index>(coords_.size() / static_cast<std::size_t>(dim_));
}

LatticePoint Universe::point_vector(Index i) const {
  const auto p = point(i);
  LatticePoint v(dim_);
  for (int k = 0; k < dim_; ++k) v[k] = p[k];
  return v;
}

std::optional<Index> Universe::find(std::span<const Coord> x) const {
  if (static_cast<int>(x.size()) != dim_) throw StructuralError("point dimension mismatch");
  if (!sides_.empty()) {
    Index r = 0;
    for (int k = 0; k < dim_; ++k) {
      if (x[k] < 1 || x[k] > sides_[k]) return std::nullopt;
      r = r * sides_[k] + (x[k] - 1);
    }
    return r;
  }
  auto [b, e] = hash_index_.equal_range(hash_coords(x));
  for (auto it = b; it != e; ++it) {
    const auto p = point(it->second);
    if (std::equal(p.begin(), p.end(), x.begin())) return it->second;
  }
  return std::nullopt;
}

bool Universe::is_lex_sorted() const {
  for (Index i = 1; i < size_; ++i) {
    if (!lex_less(point(i - 1), point(i))) return false;
  }
  return true;
}

// --------------------------------------------------------------- SetSystem

SetSystem::SetSystem(UniversePtr universe) : universe_(std::move(universe)) {
  if (!universe_) throw StructuralError("set system needs a universe");
}

Index SetSystem::add_set(std::span<const std::uint32_t> members, std::int32_t tag) {
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (static_cast<Index>(members[i]) >= universe_->size()) {
      throw StructuralError("set member " + std::to_string(members[i]) + " out of range");
    }
    if (i > 0 && members[i - 1] >= members[i]) {
      throw StructuralError("set members must be strictly increasing");
    }
  }
  return add_set_unchecked(members, tag);
}

Index SetSystem::add_set_unchecked(std::span<const std::uint32_t> members, std::int32_t tag) {
  members_.insert(members_.end(), members.begin(), members.end());
  offsets_.push_back(members_.size());
  tags_.push_back(tag);
  return size() - 1;
}

void SetSystem::reserve(std::size_t sets, std::size_t entries) {
  offsets_.reserve(sets + 1);
  tags_.reserve(sets);
  members_.reserve(entries);
}

std::size_t SetSystem::max_set_size() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < offsets_.size(); ++i) best = std::max(best, offsets_[i] - offsets_[i - 1]);
  return best;
}

std::size_t SetSystem::max_degree() const {
  std::vector<std::size_t> deg(static_cast<std::size_t>(universe_->size()), 0);
  for (auto m : members_) ++deg[m];
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

Eigen::SparseMatrix<double, Eigen::RowMajor> SetSystem::incidence() const {
  Eigen::SparseMatrix<double, Eigen::RowMajor> a(size(), universe_->size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(members_.size());
  for (Index i = 0; i < size(); ++i) {
    for (auto j : set(i)) trips.emplace_back(static_cast<int>(i), static_cast<int>(j), 1.0);
  }
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

Eigen::MatrixXd SetSystem::dense_incidence() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size(), universe_->size());
  for (Index i = 0; i < size(); ++i) {
    for (auto j : set(i)) a(i, j) = 1.0;
  }
  return a;
}

void SetSystem::append(const SetSystem& other) {
  if (other.universe_ != universe_) throw StructuralError("append requires the same universe");
  for (Index i = 0; i < other.size(); ++i) add_set_unchecked(other.set(i), other.tag(i));
}

// ---------------------------------------------------------------- Coloring

std::string_view to_string(ColoringSource source) {
  switch (source) {
    case ColoringSource::random: return "random";
    case ColoringSource::gswalk: return "gswalk";
    case ColoringSource::bruteforce: return "bruteforce";
    case ColoringSource::external: return "external";
  }
  return "unknown";
}

Coloring::Coloring(Eigen::VectorXi values, ColoringSource source, std::optional<std::uint64_t> seed)
    : values_(std::move(values)), source_(source), seed_(seed) {
  for (Index i = 0; i < values_.size(); ++i) {
    if (values_[i] != 1 && values_[i] != -1) {
      throw StructuralError("coloring entries must be exactly +1 or -1");
    }
  }
}

OrderingSigma::OrderingSigma(std::vector<std::uint32_t> rank) : rank_(std::move(rank)) {
  std::vector<bool> seen(rank_.size(), false);
  for (auto r : rank_) {
    if (r < 1 || r > rank_.size() || seen[r - 1]) {
      throw StructuralError("ordering ranks must be a permutation of 1..n");
    }
    seen[r - 1] = true;
  }
}

OrderingSigma OrderingSigma::identity(Index n) {
  std::vector<std::uint32_t> r(static_cast<std::size_t>(n));
  std::iota(r.begin(), r.end(), 1U);
  return OrderingSigma(std::move(r));
}

// -------------------------------------------------------------- evaluation

std::int64_t chi_sum(std::span<const std::uint32_t> set, const Coloring& chi) {
  std::int64_t s = 0;
  for (auto i : set) {
    if (static_cast<Index>(i) >= chi.size()) throw StructuralError("set index out of range");
    s += chi[i];
  }
  return s;
}

std::int64_t disc_eval(const SetSystem& family, const Coloring& chi) {
  check_coloring(family.universe(), chi);
  std::int64_t best = 0;
  const int* v = chi.values().data();
  for (Index t = 0; t < family.size(); ++t) {
    std::int64_t s = 0;
    for (auto i : family.set(t)) s += v[i];
    best = std::max(best, s < 0 ? -s : s);
  }
  return best;
}

std::int64_t pdisc_eval(const SetSystem& family, const OrderingSigma& sigma, const Coloring& chi) {
  check_coloring(family.universe(), chi);
  if (sigma.size() != chi.size()) throw StructuralError("ordering and coloring sizes differ");
  std::int64_t best = 0;
  std::vector<std::uint32_t> order;
  for (Index t = 0; t < family.size(); ++t) {
    const auto members = family.set(t);
    order.assign(members.begin(), members.end());
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return sigma(a) < sigma(b); });
    std::int64_t s = 0;
    for (auto i : order) {
      s += chi[i];
      best = std::max(best, s < 0 ? -s : s);
    }
  }
  return best;
}

std::int64_t subinterval_max_disc(const SetSystem& sorted_family, const Coloring& chi) {
  check_coloring(sorted_family.universe(), chi);
  std::int64_t best = 0;
  const int* v = chi.values().data();
  for (Index t = 0; t < sorted_family.size(); ++t) {
    std::int64_t s = 0, lo = 0, hi = 0;
    for (auto i : sorted_family.set(t)) {
      s += v[i];
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    best = std::max(best, hi - lo);
  }
  return best;
}

}  // namespace apdisc
