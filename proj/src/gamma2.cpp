#include "apdisc/gamma2.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace apdisc {

namespace {

using StorageIndex = RowSparse::StorageIndex;

// Appends rows of a row-major sparse matrix in order.
class RowBuilder {
 public:
  explicit RowBuilder(Index cols) : cols_(cols) { outer_.push_back(0); }

  void reserve(std::size_t rows, std::size_t nnz) {
    outer_.reserve(rows + 1);
    inner_.reserve(nnz);
    values_.reserve(nnz);
  }
  void push(Index col, double v) {
    inner_.push_back(static_cast<StorageIndex>(col));
    values_.push_back(v);
  }
  void end_row() {
    if (inner_.size() > static_cast<std::size_t>(std::numeric_limits<StorageIndex>::max())) {
      throw ResourceError("sparse factor exceeds 32-bit indexing", inner_.size(),
                          static_cast<std::uint64_t>(std::numeric_limits<StorageIndex>::max()));
    }
    outer_.push_back(static_cast<StorageIndex>(inner_.size()));
  }
  RowSparse finish() {
    const Index rows = static_cast<Index>(outer_.size()) - 1;
    RowSparse m(rows, cols_);
    m.resizeNonZeros(static_cast<Index>(inner_.size()));
    std::copy(outer_.begin(), outer_.end(), m.outerIndexPtr());
    std::copy(inner_.begin(), inner_.end(), m.innerIndexPtr());
    std::copy(values_.begin(), values_.end(), m.valuePtr());
    std::vector<StorageIndex>().swap(inner_);
    std::vector<double>().swap(values_);
    return m;
  }

 private:
  Index cols_;
  std::vector<StorageIndex> outer_;
  std::vector<StorageIndex> inner_;
  std::vector<double> values_;
};

RowSparse identity_rows(Index n) {
  RowBuilder b(n);
  b.reserve(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    b.push(i, 1.0);
    b.end_row();
  }
  return b.finish();
}

RowSparse incidence_rows(const SetSystem& s) {
  RowBuilder b(s.universe().size());
  b.reserve(static_cast<std::size_t>(s.size()), s.total_entries());
  for (Index t = 0; t < s.size(); ++t) {
    for (auto j : s.set(t)) b.push(j, 1.0);
    b.end_row();
  }
  return b.finish();
}

double max_or_zero(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.maxCoeff(); }

std::shared_ptr<const Provenance> node(std::string kind, const FactorizationCertificate& c, std::string note,
                                       std::vector<std::shared_ptr<const Provenance>> children) {
  auto p = std::make_shared<Provenance>();
  p->kind = std::move(kind);
  p->value = c.value;
  p->rows = c.rows();
  p->inner = c.inner();
  p->cols = c.cols();
  p->note = std::move(note);
  p->children = std::move(children);
  return p;
}

// Rescales f so that its left factor has norm 1 (value moves into R).
void normalize_left(FactorizationCertificate& f) {
  const double l = f.left_norm();
  if (l <= 0) return;
  if (f.L) f.L->coeffs() /= l;
  f.left_row_norms /= l;
  f.R.coeffs() *= l;
}

void check_columns(const FactorizationCertificate& a, const FactorizationCertificate& b) {
  if (a.cols() != b.cols()) throw StructuralError("certificates act on universes of different size");
}

BigInt ipow(const BigInt& x, int e) { return boost::multiprecision::pow(x, static_cast<unsigned>(e)); }

}  // namespace

// -------------------------------------------------------------------- f(N)

bool FBoundResult::exceeded_by(Index length) const {
  if (length <= 1) return base < 1;
  return ipow(BigInt(length), root) > base;
}

FBoundResult f_of_N(const BoxSpec& box) {
  const int d = box.dim();
  if (d > 20) throw ResourceError("f(N) subset enumeration limited to d <= 20", static_cast<std::uint64_t>(d), 20);
  FBoundResult best;
  best.sides = box.sides;
  for (std::uint32_t mask = 1; mask < (1U << d); ++mask) {
    BigInt p = 1;
    int q = 1;
    for (int i = 0; i < d; ++i) {
      if (mask & (1U << i)) {
        p *= box.sides[i];
        ++q;
      }
    }
    // p^{1/q} > best.base^{1/best.root}
    if (ipow(p, best.root) > ipow(best.base, q)) {
      best.base = p;
      best.root = q;
      best.argmax_subset.clear();
      for (int i = 0; i < d; ++i) {
        if (mask & (1U << i)) best.argmax_subset.push_back(i);
      }
    }
  }
  double logp = 0;
  for (int i : best.argmax_subset) logp += std::log(static_cast<double>(box.sides[i]));
  best.value = std::exp(logp / (2.0 * best.root));
  return best;
}

// ----------------------------------------------------------- certificates

double FactorizationCertificate::left_norm() const { return max_or_zero(left_row_norms); }

double FactorizationCertificate::right_norm() const { return max_or_zero(column_norms(R)); }

Eigen::VectorXd column_norms(const ColSparse& r) {
  Eigen::VectorXd out(r.cols());
  for (Index j = 0; j < r.cols(); ++j) {
    double s = 0;
    for (ColSparse::InnerIterator it(r, j); it; ++it) s += it.value() * it.value();
    out[j] = std::sqrt(s);
  }
  return out;
}

Eigen::VectorXd row_norms(const RowSparse& l) {
  Eigen::VectorXd out(l.rows());
  for (Index i = 0; i < l.rows(); ++i) {
    double s = 0;
    for (RowSparse::InnerIterator it(l, i); it; ++it) s += it.value() * it.value();
    out[i] = std::sqrt(s);
  }
  return out;
}

void balance(FactorizationCertificate& c) {
  const double l = c.left_norm(), r = c.right_norm();
  c.value = l * r;
  if (l <= 0 || r <= 0) return;
  const double alpha = std::sqrt(r / l);
  if (c.L) c.L->coeffs() *= alpha;
  c.left_row_norms *= alpha;
  c.R.coeffs() /= alpha;
}

void drop_left(FactorizationCertificate& c) { c.L.reset(); }

FactorizationCertificate size_bound_cert(std::shared_ptr<const SetSystem> family) {
  FactorizationCertificate c;
  c.L = incidence_rows(*family);
  c.left_row_norms = row_norms(*c.L);
  c.R = ColSparse(identity_rows(family->universe().size()));
  c.target = family;
  balance(c);
  c.provenance = node("size", c, "max set size " + std::to_string(family->max_set_size()), {});
  return c;
}

FactorizationCertificate degree_bound_cert(std::shared_ptr<const SetSystem> family) {
  FactorizationCertificate c;
  c.L = identity_rows(family->size());
  c.left_row_norms = Eigen::VectorXd::Ones(family->size());
  c.R = ColSparse(incidence_rows(*family));
  c.target = family;
  balance(c);
  c.provenance = node("degree", c, "max degree " + std::to_string(family->max_degree()), {});
  return c;
}

FactorizationCertificate union_cert(const FactorizationCertificate& f1, const FactorizationCertificate& f2) {
  check_columns(f1, f2);
  FactorizationCertificate a = f1, b = f2;
  normalize_left(a);
  normalize_left(b);
  FactorizationCertificate c;
  const Index k1 = a.inner(), k2 = b.inner();
  if (a.L && b.L) {
    RowBuilder lb(k1 + k2);
    lb.reserve(static_cast<std::size_t>(a.rows() + b.rows()),
               static_cast<std::size_t>(a.L->nonZeros() + b.L->nonZeros()));
    for (Index i = 0; i < a.rows(); ++i) {
      for (RowSparse::InnerIterator it(*a.L, i); it; ++it) lb.push(it.col(), it.value());
      lb.end_row();
    }
    a.L.reset();
    for (Index i = 0; i < b.rows(); ++i) {
      for (RowSparse::InnerIterator it(*b.L, i); it; ++it) lb.push(k1 + it.col(), it.value());
      lb.end_row();
    }
    b.L.reset();
    c.L = lb.finish();
  }
  c.left_row_norms.resize(a.rows() + b.rows());
  c.left_row_norms << a.left_row_norms, b.left_row_norms;
  c.R.resize(k1 + k2, a.cols());
  {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(a.R.nonZeros() + b.R.nonZeros()));
    for (Index j = 0; j < a.cols(); ++j) {
      for (ColSparse::InnerIterator it(a.R, j); it; ++it) trips.emplace_back(it.row(), j, it.value());
      for (ColSparse::InnerIterator it(b.R, j); it; ++it) trips.emplace_back(k1 + it.row(), j, it.value());
    }
    c.R.setFromTriplets(trips.begin(), trips.end());
  }
  if (f1.target && f2.target) {
    auto t = std::make_shared<SetSystem>(*f1.target);
    t->append(*f2.target);
    c.target = std::move(t);
  }
  balance(c);
  c.provenance = node("union", c, "", {f1.provenance, f2.provenance});
  return c;
}

FactorizationCertificate triangle_cert(const FactorizationCertificate& f1, const FactorizationCertificate& f2,
                                       const std::vector<RowAlignment>& alignment, TriangleMode mode,
                                       std::shared_ptr<const SetSystem> target) {
  check_columns(f1, f2);
  const Index k1 = f1.inner(), k2 = f2.inner();
  const Index m = static_cast<Index>(alignment.size());
  for (const auto& a : alignment) {
    if (a.first < 0 || a.first >= f1.rows() || a.second >= f2.rows()) {
      throw ConstructionError("triangle alignment refers to a missing row");
    }
  }
  const bool uses_second =
      std::any_of(alignment.begin(), alignment.end(), [](const RowAlignment& a) { return a.second >= 0; });
  if (!uses_second) {
    // A = B + 0: keep f1's factors
    std::vector<Index> rows(static_cast<std::size_t>(m)), cols(static_cast<std::size_t>(f1.cols()));
    for (Index i = 0; i < m; ++i) rows[static_cast<std::size_t>(i)] = alignment[static_cast<std::size_t>(i)].first;
    for (Index j = 0; j < f1.cols(); ++j) cols[static_cast<std::size_t>(j)] = j;
    auto c = restrict_cert(f1, rows, cols, std::move(target));
    c.provenance = node("triangle", c, "second operand unused", {f1.provenance, f2.provenance});
    return c;
  }
  FactorizationCertificate c;
  c.left_row_norms.resize(m);
  for (Index i = 0; i < m; ++i) {
    const auto& a = alignment[static_cast<std::size_t>(i)];
    const double x = f1.left_row_norms[a.first];
    const double y = a.second >= 0 ? f2.left_row_norms[a.second] : 0.0;
    c.left_row_norms[i] = std::sqrt(x * x + y * y);
  }
  if (f1.L && f2.L) {
    RowBuilder lb(k1 + k2);
    for (const auto& a : alignment) {
      for (RowSparse::InnerIterator it(*f1.L, a.first); it; ++it) lb.push(it.col(), it.value());
      if (a.second >= 0) {
        for (RowSparse::InnerIterator it(*f2.L, a.second); it; ++it) lb.push(k1 + it.col(), it.value());
      }
      lb.end_row();
    }
    c.L = lb.finish();
  }
  const double sign = mode == TriangleMode::sum ? 1.0 : -1.0;
  c.R.resize(k1 + k2, f1.cols());
  {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(f1.R.nonZeros() + f2.R.nonZeros()));
    for (Index j = 0; j < f1.cols(); ++j) {
      for (ColSparse::InnerIterator it(f1.R, j); it; ++it) trips.emplace_back(it.row(), j, it.value());
      for (ColSparse::InnerIterator it(f2.R, j); it; ++it) trips.emplace_back(k1 + it.row(), j, sign * it.value());
    }
    c.R.setFromTriplets(trips.begin(), trips.end());
  }
  c.target = std::move(target);
  balance(c);
  c.provenance = node("triangle", c, mode == TriangleMode::sum ? "sum" : "difference", {f1.provenance, f2.provenance});
  return c;
}

FactorizationCertificate disjoint_support_cert(const FactorizationCertificate& f1, const std::vector<Index>& col1,
                                               const FactorizationCertificate& f2, const std::vector<Index>& col2,
                                               Index n, std::shared_ptr<const SetSystem> target) {
  if (static_cast<Index>(col1.size()) != f1.cols() || static_cast<Index>(col2.size()) != f2.cols()) {
    throw StructuralError("column maps do not match the certificates");
  }
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (const auto* cols : {&col1, &col2}) {
    for (Index j : *cols) {
      if (j < 0 || j >= n) throw StructuralError("column map out of range");
      if (used[j]) throw StructuralError("disjoint-support certificates overlap");
      used[j] = true;
    }
  }
  const Index k1 = f1.inner(), k2 = f2.inner();
  FactorizationCertificate c;
  if (f1.L && f2.L) {
    RowBuilder lb(k1 + k2);
    lb.reserve(static_cast<std::size_t>(f1.rows() + f2.rows()),
               static_cast<std::size_t>(f1.L->nonZeros() + f2.L->nonZeros()));
    for (Index i = 0; i < f1.rows(); ++i) {
      for (RowSparse::InnerIterator it(*f1.L, i); it; ++it) lb.push(it.col(), it.value());
      lb.end_row();
    }
    for (Index i = 0; i < f2.rows(); ++i) {
      for (RowSparse::InnerIterator it(*f2.L, i); it; ++it) lb.push(k1 + it.col(), it.value());
      lb.end_row();
    }
    c.L = lb.finish();
  }
  c.left_row_norms.resize(f1.rows() + f2.rows());
  c.left_row_norms << f1.left_row_norms, f2.left_row_norms;
  c.R.resize(k1 + k2, n);
  {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(f1.R.nonZeros() + f2.R.nonZeros()));
    for (Index j = 0; j < f1.cols(); ++j) {
      for (ColSparse::InnerIterator it(f1.R, j); it; ++it) trips.emplace_back(it.row(), col1[j], it.value());
    }
    for (Index j = 0; j < f2.cols(); ++j) {
      for (ColSparse::InnerIterator it(f2.R, j); it; ++it) trips.emplace_back(k1 + it.row(), col2[j], it.value());
    }
    c.R.setFromTriplets(trips.begin(), trips.end());
  }
  c.target = std::move(target);
  balance(c);
  c.provenance = node("disjoint", c, "", {f1.provenance, f2.provenance});
  return c;
}

FactorizationCertificate restrict_cert(const FactorizationCertificate& f, const std::vector<Index>& rows,
                                       const std::vector<Index>& cols, std::shared_ptr<const SetSystem> target) {
  FactorizationCertificate c;
  c.left_row_norms.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= f.rows()) throw StructuralError("row selection out of range");
    c.left_row_norms[static_cast<Index>(i)] = f.left_row_norms[rows[i]];
  }
  if (f.L) {
    RowBuilder lb(f.inner());
    for (Index r : rows) {
      for (RowSparse::InnerIterator it(*f.L, r); it; ++it) lb.push(it.col(), it.value());
      lb.end_row();
    }
    c.L = lb.finish();
  }
  c.R.resize(f.inner(), static_cast<Index>(cols.size()));
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] < 0 || cols[j] >= f.cols()) throw StructuralError("column selection out of range");
    for (ColSparse::InnerIterator it(f.R, cols[j]); it; ++it) trips.emplace_back(it.row(), static_cast<Index>(j), it.value());
  }
  c.R.setFromTriplets(trips.begin(), trips.end());
  c.target = std::move(target);
  balance(c);
  c.provenance = node("restrict", c, "", {f.provenance});
  return c;
}

// ---------------------------------------------------------------- map_cert

MapCertificate map_cert(const MaximalFamily& family, const std::function<bool(Index)>& is_large) {
  MapCertificate out;
  const auto& u = family.universe;
  out.large_step.resize(family.steps.size());
  for (std::size_t k = 0; k < family.steps.size(); ++k) {
    out.large_step[k] = is_large(family.longest[k]);
    if (out.large_step[k]) ++out.large_count;
  }
  auto small = std::make_shared<SetSystem>(u);
  auto large = std::make_shared<SetSystem>(u);
  for (Index t = 0; t < family.chains.size(); ++t) {
    const auto k = family.chains.tag(t);
    (out.large_step[static_cast<std::size_t>(k)] ? large : small)->add_set_unchecked(family.chains.set(t), k);
  }
  for (Index i = 0; i < u->size(); ++i) {
    const std::uint32_t m = static_cast<std::uint32_t>(i);
    small->add_set_unchecked({&m, 1}, -1);
  }
  out.small_max_size = static_cast<Index>(small->max_set_size());
  out.max_large_degree = static_cast<Index>(large->max_degree());
  auto size = size_bound_cert(small);
  auto deg = degree_bound_cert(large);
  small.reset();
  large.reset();
  out.cert = union_cert(size, deg);
  out.family = out.cert.target;
  return out;
}

MapCertificate map_cert(const BoxSpec& box) {
  const auto f = f_of_N(box);
  return map_cert(maximal_family(box), [&](Index len) { return f.exceeded_by(len); });
}

// ----------------------------------------------------------------- ap_cert

namespace {

struct PrefixNode {
  FactorizationCertificate cert;
  std::shared_ptr<const SetSystem> family;
};

struct Recursion {
  const ApCertOptions& options;
  std::map<std::vector<Coord>, std::shared_ptr<PrefixNode>> prefix_memo;
  std::map<std::vector<Coord>, std::shared_ptr<MapCertificate>> map_memo;
  std::vector<DecayCheck> decay;

  std::shared_ptr<MapCertificate> map_for(const std::vector<Coord>& sides) {
    auto& slot = map_memo[sides];
    if (!slot) {
      slot = std::make_shared<MapCertificate>(map_cert(BoxSpec(sides)));
      if (!options.keep_left) drop_left(slot->cert);
    }
    return slot;
  }

  std::shared_ptr<PrefixNode> prefix_for(const std::vector<Coord>& sides) {
    if (auto it = prefix_memo.find(sides); it != prefix_memo.end()) return it->second;
    auto out = std::make_shared<PrefixNode>();
    const BoxSpec box(sides);
    const Index n = box.volume();
    auto fam = maximal_family(box);
    out->family = std::make_shared<const SetSystem>(prefix_maximal_aps(fam, options.max_sets));
    if (n == 1) {
      FactorizationCertificate c;
      c.L = identity_rows(1);
      c.left_row_norms = Eigen::VectorXd::Ones(1);
      c.R = ColSparse(identity_rows(1));
      c.target = out->family;
      balance(c);
      c.provenance = node("base", c, "single point", {});
      if (!options.keep_left) drop_left(c);
      out->cert = std::move(c);
      prefix_memo[sides] = out;
      return out;
    }
    const int d = box.dim();
    const int axis = static_cast<int>(std::max_element(sides.begin(), sides.end()) - sides.begin());
    std::vector<Coord> child = sides;
    const Coord half = sides[axis] / 2;
    child[axis] = half;

    DecayCheck dc;
    dc.parent = sides;
    dc.child = child;
    dc.f_parent = f_of_N(box).value;
    dc.f_child = f_of_N(BoxSpec(child)).value;
    dc.factor = std::pow(2.0, -1.0 / ((2.0 * d + 2) * (2.0 * d + 4)));
    dc.holds = dc.f_child <= dc.factor * dc.f_parent + 1e-12;
    decay.push_back(dc);

    auto sub = prefix_for(child);
    auto mc = map_for(child);

    const auto& u = fam.universe;
    const Universe cu = Universe::box(child);
    const Index cn = cu.size();
    std::vector<Index> col1(static_cast<std::size_t>(cn)), col2(static_cast<std::size_t>(cn));
    std::vector<Coord> x(static_cast<std::size_t>(d));
    for (Index r = 0; r < cn; ++r) {
      const auto p = cu.point(r);
      std::copy(p.begin(), p.end(), x.begin());
      col1[r] = *u->find(x);
      x[axis] += half;
      col2[r] = *u->find(x);
    }
    std::vector<std::uint32_t> local(static_cast<std::size_t>(n));
    std::vector<char> upper(static_cast<std::size_t>(n));
    for (Index r = 0; r < cn; ++r) {
      local[col1[r]] = static_cast<std::uint32_t>(r);
      local[col2[r]] = static_cast<std::uint32_t>(r);
      upper[col2[r]] = 1;
    }

    auto s1 = disjoint_support_cert(sub->cert, col1, sub->cert, col2, n);
    auto s2 = disjoint_support_cert(mc->cert, col1, mc->cert, col2, n);
    const Index m1 = sub->cert.rows(), mm = mc->cert.rows();
    const ApRowIndex pa_index(*sub->family), m_index(*mc->family);

    std::vector<RowAlignment> align;
    align.reserve(static_cast<std::size_t>(out->family->size()));
    std::vector<std::uint32_t> lo, hi;
    for (Index t = 0; t < out->family->size(); ++t) {
      lo.clear();
      hi.clear();
      for (auto g : out->family->set(t)) (upper[g] ? hi : lo).push_back(local[g]);
      std::optional<RowAlignment> a;
      if (hi.empty()) {
        if (auto p = pa_index.find(lo)) a = RowAlignment{*p, -1};
      } else if (lo.empty()) {
        if (auto p = pa_index.find(hi)) a = RowAlignment{m1 + *p, -1};
      } else {
        auto ml = m_index.find(lo);
        auto ph = pa_index.find(hi);
        if (ml && ph) {
          a = RowAlignment{m1 + *ph, *ml};
        } else {
          auto mh = m_index.find(hi);
          auto pl = pa_index.find(lo);
          if (mh && pl) a = RowAlignment{*pl, mm + *mh};
        }
      }
      if (!a) throw ConstructionError("prefix-maximal AP has no split into the halves");
      align.push_back(*a);
    }
    out->cert = triangle_cert(s1, s2, align, TriangleMode::sum, options.keep_left ? out->family : nullptr);
    prefix_memo[sides] = out;
    return out;
  }
};

std::vector<Coord> round_up_pow2(const std::vector<Coord>& sides) {
  std::vector<Coord> r(sides.size());
  for (std::size_t i = 0; i < sides.size(); ++i) {
    Coord p = 1;
    while (p < sides[i]) p *= 2;
    r[i] = p;
  }
  return r;
}

// Rows of the all-AP family as differences of prefix-maximal rows; matches all_aps ordering.
std::vector<RowAlignment> ap_alignment(const MaximalFamily& fam) {
  std::vector<RowAlignment> align;
  const Index n = fam.universe->size();
  align.reserve(static_cast<std::size_t>(count_all_aps(fam)));
  for (Index i = 0; i < n; ++i) align.push_back({i, -1});
  Index offset = n;
  for (Index t = 0; t < fam.chains.size(); ++t) {
    const auto c = fam.chains.set(t);
    const Index len = static_cast<Index>(c.size());
    auto prefix = [&](Index k) -> Index { return k == 1 ? static_cast<Index>(c[0]) : offset + k - 2; };
    for (Index i = 0; i < len; ++i) {
      for (Index j = i + 2; j <= len; ++j) align.push_back({prefix(j), i == 0 ? -1 : prefix(i)});
    }
    offset += 2 * len - 3;
  }
  return align;
}

}  // namespace

ApCertificate ap_cert(const BoxSpec& box, const ApCertOptions& options) {
  ApCertificate out;
  out.f = f_of_N(box);
  out.rounded = round_up_pow2(box.sides);
  Recursion rec{options, {}, {}, {}};
  auto pa = rec.prefix_for(out.rounded);
  out.prefix_value = pa->cert.value;
  out.decay = std::move(rec.decay);
  rec.map_memo.clear();

  const BoxSpec hat(out.rounded);
  auto hat_family = maximal_family(hat);
  const auto align = ap_alignment(hat_family);
  const bool exact = out.rounded == box.sides;
  std::shared_ptr<const SetSystem> hat_target;
  if (options.keep_left || !exact) {
    hat_target = std::make_shared<const SetSystem>(all_aps(hat_family, options.max_sets));
  }
  auto a_hat = triangle_cert(pa->cert, pa->cert, align, TriangleMode::difference,
                             options.keep_left ? hat_target : nullptr);
  rec.prefix_memo.clear();

  if (exact) {
    out.cert = std::move(a_hat);
  } else {
    auto fam = maximal_family(box);
    auto target = std::make_shared<const SetSystem>(all_aps(fam, options.max_sets));
    const ApRowIndex index(*hat_target);
    std::vector<Index> cols(static_cast<std::size_t>(box.volume()));
    const auto& u = *fam.universe;
    const auto& uh = *hat_family.universe;
    for (Index r = 0; r < u.size(); ++r) cols[r] = *uh.find(u.point(r));
    std::vector<Index> rows;
    rows.reserve(static_cast<std::size_t>(target->size()));
    std::vector<std::uint32_t> mapped;
    for (Index t = 0; t < target->size(); ++t) {
      mapped.clear();
      for (auto g : target->set(t)) mapped.push_back(static_cast<std::uint32_t>(cols[g]));
      auto r = index.find(mapped);
      if (!r) throw ConstructionError("AP of the box is missing from the rounded box");
      rows.push_back(*r);
    }
    out.cert = restrict_cert(a_hat, rows, cols, options.keep_left ? target : nullptr);
  }
  out.ratio = out.cert.value / out.f.value;
  return out;
}

double SubboxValues::value(std::span<const Coord> sides) const {
  auto i = boxes->find(sides);
  if (!i) throw DomainError("box is not below the hat");
  return values[static_cast<std::size_t>(*i)];
}

SubboxValues ap_cert_subbox_values(const BoxSpec& hat, const ApCertOptions& options) {
  if (round_up_pow2(hat.sides) != hat.sides) throw DomainError("hat sides must be powers of 2");
  ApCertOptions opt = options;
  opt.keep_left = false;
  auto full = ap_cert(hat, opt);
  SubboxValues out;
  out.hat = hat.sides;
  out.hat_value = full.cert.value;
  out.decay = std::move(full.decay);

  const auto fam = maximal_family(hat);
  const auto& u = *fam.universe;
  const int d = u.dim();
  const Index n = u.size();
  out.boxes = fam.universe;
  // row maxima keyed by the componentwise max of the AP, column maxima by point
  std::vector<double> rmax(static_cast<std::size_t>(n), 0.0), cmax(static_cast<std::size_t>(n), 0.0);
  const Eigen::VectorXd cn = column_norms(full.cert.R);
  const auto& ln = full.cert.left_row_norms;
  for (Index i = 0; i < n; ++i) {
    rmax[i] = ln[i];
    cmax[i] = cn[i];
  }
  Index row = n;
  std::vector<Coord> top(static_cast<std::size_t>(d));
  for (Index t = 0; t < fam.chains.size(); ++t) {
    const auto c = fam.chains.set(t);
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = i + 2; j <= c.size(); ++j, ++row) {
        const auto a = u.point(c[i]), b = u.point(c[j - 1]);
        for (int k = 0; k < d; ++k) top[k] = std::max(a[k], b[k]);
        auto& slot = rmax[static_cast<std::size_t>(*u.find(top))];
        slot = std::max(slot, ln[row]);
      }
    }
  }
  if (row != full.cert.rows()) throw StructuralError("row count mismatch with the all-AP ordering");
  // dominance prefix maxima, one axis at a time; lex order makes stride products
  std::vector<Index> stride(static_cast<std::size_t>(d), 1);
  for (int k = d - 2; k >= 0; --k) stride[k] = stride[k + 1] * hat.sides[k + 1];
  for (int k = 0; k < d; ++k) {
    for (Index i = 0; i < n; ++i) {
      if (u.point(i)[k] == 1) continue;
      rmax[i] = std::max(rmax[i], rmax[i - stride[k]]);
      cmax[i] = std::max(cmax[i], cmax[i - stride[k]]);
    }
  }
  out.values.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out.values[i] = rmax[i] * cmax[i];
  return out;
}

// ---------------------------------------------------------- value calculus

double map_value_bound(const BoxSpec& box) {
  const auto f = f_of_N(box);
  BigInt full = 1;
  Index t1 = 1;
  for (Coord n : box.sides) {
    Coord c = 0;
    while (c + 1 <= n - 1 && f.exceeded_by(1 + (n - 1) / (c + 1))) ++c;
    full *= 2 * c + 1;
    if (c + 1 <= n - 1) t1 = std::max<Index>(t1, 1 + (n - 1) / (c + 1));
  }
  const BigInt large = (full - 1) / 2;
  return std::sqrt(static_cast<double>(t1) + large.convert_to<double>());
}

ValueBound ap_value_bound(const BoxSpec& box) {
  ValueBound out;
  out.map_value = map_value_bound(box);
  std::map<std::vector<Coord>, double> memo;
  std::function<double(const std::vector<Coord>&)> pa = [&](const std::vector<Coord>& sides) -> double {
    if (auto it = memo.find(sides); it != memo.end()) return it->second;
    const BoxSpec b(sides);
    double v = 1;
    if (b.volume() > 1) {
      const int d = b.dim();
      const int axis = static_cast<int>(std::max_element(sides.begin(), sides.end()) - sides.begin());
      std::vector<Coord> child = sides;
      child[axis] /= 2;
      DecayCheck dc;
      dc.parent = sides;
      dc.child = child;
      dc.f_parent = f_of_N(b).value;
      dc.f_child = f_of_N(BoxSpec(child)).value;
      dc.factor = std::pow(2.0, -1.0 / ((2.0 * d + 2) * (2.0 * d + 4)));
      dc.holds = dc.f_child <= dc.factor * dc.f_parent + 1e-12;
      out.decay.push_back(dc);
      v = pa(child) + map_value_bound(BoxSpec(child));
    }
    memo[sides] = v;
    return v;
  };
  out.prefix_value = pa(round_up_pow2(box.sides));
  out.ap_value = 2 * out.prefix_value;
  return out;
}

// --------------------------------------------------------------- checking

double max_residual(const FactorizationCertificate& c, const SetSystem& target) {
  if (!c.L) throw PreconditionError("residual check needs the left factor");
  if (c.rows() != target.size() || c.cols() != target.universe().size()) {
    throw StructuralError("certificate shape does not match the target family");
  }
  const RowSparse r(c.R);
  const Index n = c.cols();
  std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
  std::vector<char> touched(static_cast<std::size_t>(n), 0);
  std::vector<Index> list;
  double worst = 0;
  for (Index i = 0; i < c.rows(); ++i) {
    list.clear();
    for (RowSparse::InnerIterator li(*c.L, i); li; ++li) {
      for (RowSparse::InnerIterator ri(r, li.col()); ri; ++ri) {
        const Index j = ri.col();
        if (!touched[j]) {
          touched[j] = 1;
          list.push_back(j);
        }
        acc[j] += li.value() * ri.value();
      }
    }
    for (auto j : target.set(i)) {
      worst = std::max(worst, std::abs(acc[j] - 1.0));
      touched[j] = 2;
    }
    for (Index j : list) {
      if (touched[j] == 1) worst = std::max(worst, std::abs(acc[j]));
      acc[j] = 0;
      touched[j] = 0;
    }
    for (auto j : target.set(i)) touched[j] = 0;
  }
  return worst;
}

SpectralBounds spectral_lower_bounds(const SetSystem& family, std::uint64_t max_entries) {
  const auto m = static_cast<std::uint64_t>(family.size());
  const auto n = static_cast<std::uint64_t>(family.universe().size());
  if (m * n > max_entries) throw ResourceError("dense SVD too large", m * n, max_entries);
  SpectralBounds out;
  if (m == 0 || n == 0) return out;
  const Eigen::MatrixXd a = family.dense_incidence();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd sv = svd.singularValues();
  out.sigma_max = sv.maxCoeff();
  out.sigma_min = sv.minCoeff();
  out.nuclear_over_sqrt_mn = sv.sum() / std::sqrt(static_cast<double>(m) * static_cast<double>(n));
  out.sigma_min_disc_lb = m >= n ? out.sigma_min * std::sqrt(static_cast<double>(n) / static_cast<double>(m)) : 0.0;
  return out;
}

}  // namespace apdisc
