#include "apdisc/body.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "apdisc/lp.hpp"

namespace apdisc {

namespace {

bool column_less(const RationalMatrix& m, Index a, Index b) {
  for (Index i = 0; i < m.rows(); ++i) {
    if (m(i, a) != m(i, b)) return m(i, a) < m(i, b);
  }
  return false;
}

RationalMatrix dedupe_columns(const RationalMatrix& m) {
  std::vector<Index> idx(static_cast<std::size_t>(m.cols()));
  for (Index j = 0; j < m.cols(); ++j) idx[j] = j;
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) { return column_less(m, a, b); });
  std::vector<Index> keep;
  for (Index j : idx) {
    if (keep.empty() || column_less(m, keep.back(), j)) keep.push_back(j);
  }
  RationalMatrix out(m.rows(), static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) out.col(static_cast<Index>(j)) = m.col(keep[j]);
  return out;
}

std::uint64_t scan_size(const std::vector<Coord>& lo, const std::vector<Coord>& hi) {
  long double n = 1;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (hi[i] < lo[i]) return 0;
    n *= static_cast<long double>(hi[i] - lo[i] + 1);
  }
  return n > 1.8e19L ? UINT64_MAX : static_cast<std::uint64_t>(n);
}

// Calls f on every lattice point of the box [lo, hi] in lexicographic order.
template <class F>
void for_each_lattice_point(const std::vector<Coord>& lo, const std::vector<Coord>& hi, F&& f) {
  const std::size_t d = lo.size();
  for (std::size_t i = 0; i < d; ++i) {
    if (hi[i] < lo[i]) return;
  }
  std::vector<Coord> x = lo;
  while (true) {
    f(std::span<const Coord>(x));
    std::size_t k = d;
    while (k > 0) {
      --k;
      if (++x[k] <= hi[k]) break;
      x[k] = lo[k];
      if (k == 0) return;
    }
  }
}

RationalVector to_rational(std::span<const Coord> x) {
  RationalVector v(static_cast<Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v[static_cast<Index>(i)] = Rational(x[i]);
  return v;
}

bool canonical_coords(std::span<const Coord> z) {
  for (Coord c : z) {
    if (c != 0) return c > 0;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------- Polytope

Polytope::Polytope(RationalMatrix vertices) : vertices_(std::move(vertices)) {
  if (vertices_.rows() < 1) throw StructuralError("polytope dimension must be at least 1");
  if (vertices_.cols() < 1) throw StructuralError("polytope needs at least one vertex");
}

Polytope Polytope::box(std::span<const Coord> sides) {
  const int d = static_cast<int>(sides.size());
  if (d < 1 || d > 20) throw StructuralError("box polytope dimension out of range");
  const Index corners = Index{1} << d;
  RationalMatrix v(d, corners);
  for (Index c = 0; c < corners; ++c) {
    for (int i = 0; i < d; ++i) v(i, c) = ((c >> (d - 1 - i)) & 1) ? Rational(sides[i]) : Rational(1);
  }
  return Polytope(dedupe_columns(v));
}

bool Polytope::contains(const RationalVector& x) const {
  if (x.size() != dim()) throw StructuralError("point dimension does not match the polytope");
  const Index d = dim();
  RationalMatrix a(d + 1, num_vertices());
  a.topRows(d) = vertices_;
  a.row(d).setConstant(Rational(1));
  RationalVector b(d + 1);
  b.head(d) = x;
  b[d] = 1;
  return lp_feasible(a, b);
}

bool Polytope::contains(std::span<const Coord> x) const { return contains(to_rational(x)); }

std::pair<std::vector<Coord>, std::vector<Coord>> Polytope::lattice_bounds(const Rational& t) const {
  std::vector<Coord> lo(dim()), hi(dim());
  for (int i = 0; i < dim(); ++i) {
    Rational mn = vertices_(i, 0) * t, mx = mn;
    for (Index j = 1; j < num_vertices(); ++j) {
      const Rational v = vertices_(i, j) * t;
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    lo[i] = ceil_to_int(mn);
    hi[i] = floor_to_int(mx);
  }
  return {lo, hi};
}

bool Polytope::is_symmetric() const {
  for (Index j = 0; j < num_vertices(); ++j) {
    if (!contains(RationalVector(-vertices_.col(j)))) return false;
  }
  return true;
}

Polytope Polytope::scaled(const Rational& r) const { return Polytope(RationalMatrix(vertices_ * r)); }

ShiftedBody::ShiftedBody(Polytope b, RationalVector v) : base(std::move(b)), shift(std::move(v)) {
  if (shift.size() != base.dim()) throw StructuralError("shift dimension does not match the polytope");
}

ShiftedBody::ShiftedBody(Polytope b) : base(std::move(b)), shift(RationalVector::Constant(base.dim(), Rational(0))) {}

bool ShiftedBody::contains(std::span<const Coord> x) const {
  if (static_cast<int>(x.size()) != dim()) throw StructuralError("point dimension does not match the body");
  return base.contains(RationalVector(to_rational(x) - shift));
}

UniversePtr integer_points(const ShiftedBody& body, std::uint64_t max_scan) {
  const int d = body.dim();
  std::vector<Coord> lo(d), hi(d);
  const auto& v = body.base.vertices();
  for (int i = 0; i < d; ++i) {
    Rational mn = v.row(i).minCoeff() + body.shift[i];
    Rational mx = v.row(i).maxCoeff() + body.shift[i];
    lo[i] = ceil_to_int(mn);
    hi[i] = floor_to_int(mx);
  }
  const auto n = scan_size(lo, hi);
  if (n > max_scan) throw ResourceError("lattice scan of the body too large", n, max_scan);
  std::vector<Coord> flat;
  for_each_lattice_point(lo, hi, [&](std::span<const Coord> x) {
    if (body.contains(x)) flat.insert(flat.end(), x.begin(), x.end());
  });
  return std::make_shared<const Universe>(d, std::move(flat));
}

Polytope difference_body(const Polytope& k) {
  const Index n = k.num_vertices();
  RationalMatrix diff(k.dim(), n * n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) diff.col(i * n + j) = k.vertices().col(i) - k.vertices().col(j);
  }
  return Polytope(dedupe_columns(diff));
}

Polytope minkowski_sum(const Polytope& p, const Polytope& q) {
  if (p.dim() != q.dim()) throw StructuralError("Minkowski sum of polytopes of different dimension");
  const Index a = p.num_vertices(), b = q.num_vertices();
  RationalMatrix sum(p.dim(), a * b);
  for (Index i = 0; i < a; ++i) {
    for (Index j = 0; j < b; ++j) sum.col(i * b + j) = p.vertices().col(i) + q.vertices().col(j);
  }
  return Polytope(dedupe_columns(sum));
}

std::optional<Rational> gauge(const Polytope& p, std::span<const Coord> z) {
  if (static_cast<int>(z.size()) != p.dim()) throw StructuralError("point dimension does not match the polytope");
  if (std::all_of(z.begin(), z.end(), [](Coord c) { return c == 0; })) return Rational(0);
  const auto res = solve_standard_lp(p.vertices(), to_rational(z),
                                     RationalVector::Constant(p.num_vertices(), Rational(1)));
  if (res.status != LpStatus::optimal) return std::nullopt;
  return res.objective;
}

// -------------------------------------------------------------- GaugeTable

GaugeTable::GaugeTable(const Polytope& p, Rational t_max, std::uint64_t max_scan)
    : t_max_(std::move(t_max)), dim_(p.dim()) {
  if (t_max_ < 0) throw DomainError("zeta needs t >= 0");
  if (!p.is_symmetric()) throw DomainError("zeta needs a centrally symmetric body");
  auto [lo, hi] = p.lattice_bounds(t_max_);
  const auto n = scan_size(lo, hi);
  if (n > max_scan) throw ResourceError("lattice scan for zeta too large", n, max_scan);
  gauges_.push_back(Rational(0));
  for_each_lattice_point(lo, hi, [&](std::span<const Coord> z) {
    if (!canonical_coords(z)) return;
    auto g = gauge(p, z);
    if (!g || *g > t_max_) return;
    gauges_.push_back(*g);
    gauges_.push_back(*g);
    canonical_.emplace_back(*g, Eigen::Map<const LatticePoint>(z.data(), dim_));
  });
  std::sort(gauges_.begin(), gauges_.end());
}

Index GaugeTable::count(const Rational& t) const {
  if (t < 0) throw DomainError("zeta needs t >= 0");
  if (t > t_max_) throw DomainError("zeta argument beyond the tabulated range");
  return std::upper_bound(gauges_.begin(), gauges_.end(), t) - gauges_.begin();
}

std::vector<LatticePoint> GaugeTable::canonical_points(const Rational& t) const {
  if (t > t_max_) throw DomainError("step radius beyond the tabulated range");
  std::vector<LatticePoint> out;
  for (const auto& [g, z] : canonical_) {
    if (g <= t) out.push_back(z);
  }
  return out;
}

ZetaEvaluation zeta(const Polytope& p, const Rational& t) {
  if (t < 0) throw DomainError("zeta needs t >= 0");
  if (t == 0) return {t, 1};
  GaugeTable table(p, t);
  return {t, table.count(t)};
}

// --------------------------------------------------------------------- f(K)

FKResult f_K(const Polytope& k) { return f_K_of_difference(difference_body(k)); }

FKResult f_K_of_difference(const Polytope& d) {
  double extent = 8;
  for (Index j = 0; j < d.num_vertices(); ++j) {
    for (Index i = 0; i < d.dim(); ++i) extent = std::max(extent, std::abs(to_double(d.vertices()(i, j))));
  }
  Rational t(1);
  for (int e = static_cast<int>(std::ceil(std::log2(extent))); e > 0; --e) t /= 2;

  // Every s <= 1/t fails once zeta(t) > 1/t, and s* >= 1 makes t = 1 always enough.
  std::optional<GaugeTable> table;
  while (true) {
    table.emplace(d, t);
    if (t >= 1 || Rational(table->count(t)) > 1 / t) break;
    t *= 2;
  }

  std::vector<Rational> breaks;  // ascending values 1/g of the distinct nonzero gauges
  for (const auto& g : table->gauges()) {
    if (g == 0) continue;
    const Rational w = 1 / g;
    if (breaks.empty() || breaks.back() != w) breaks.push_back(w);
  }
  std::reverse(breaks.begin(), breaks.end());

  FKResult res;
  Rational lo(0);
  bool found = false;
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    const Rational& hi = breaks[i];
    const Rational h(table->count(1 / hi));
    if (h <= hi) {
      res.s_star = std::max(h, lo);
      found = true;
      break;
    }
    lo = hi;
  }
  if (!found) res.s_star = std::max(Rational(1), lo);

  res.attained = res.s_star >= Rational(table->count(1 / res.s_star));
  Rational prev(0), next = res.s_star + 1;
  for (const auto& w : breaks) {
    if (w < res.s_star) prev = w;
    if (w > res.s_star) {
      next = w;
      break;
    }
  }
  res.s_lo = (prev + res.s_star) / 2;
  res.s_hi = res.attained ? res.s_star : Rational((res.s_star + next) / 2);
  res.f_K = std::sqrt(to_double(res.s_star));
  return res;
}

// ------------------------------------------------------- APs inside bodies

CanonicalAP maximal_ap_in_body(const LatticePoint& a, const LatticePoint& b, const ShiftedBody& body) {
  if (a.size() != body.dim() || b.size() != body.dim()) throw StructuralError("dimension mismatch");
  auto inside = [&](const LatticePoint& x) {
    return body.contains(std::span<const Coord>(x.data(), static_cast<std::size_t>(x.size())));
  };
  if (!inside(a)) throw DomainError("start point lies outside the body");
  if (b.isZero()) throw DomainError("maximal AP needs a nonzero step");
  LatticePoint x = a;
  while (inside(LatticePoint(x - b))) x -= b;
  LatticePoint start = x;
  Index len = 1;
  while (inside(LatticePoint(x + b))) {
    x += b;
    ++len;
  }
  return canonicalize({start, b, len});
}

MaximalFamily maximal_family(const ShiftedBody& body, std::uint64_t max_scan) {
  auto universe = integer_points(body, max_scan);
  GaugeTable table(difference_body(body.base), Rational(1), max_scan);
  return maximal_family(std::move(universe), table.canonical_points(Rational(1)));
}

SetSystem enumerate_maximal_aps_in_body(const ShiftedBody& body) { return maximal_aps(maximal_family(body)); }

// ------------------------------------------------------------ lemma checks

MaxShiftReport check_zeta_maxshift(const Polytope& k, const std::vector<RationalVector>& shifts) {
  MaxShiftReport rep;
  rep.zeta_one = zeta(difference_body(k), Rational(1)).count;
  for (const auto& v : shifts) {
    MaxShiftRow row;
    row.shift = v;
    row.count = integer_points(ShiftedBody(k, v))->size();
    row.holds = row.count <= rep.zeta_one;
    rep.all_hold = rep.all_hold && row.holds;
    rep.max_ratio = std::max(rep.max_ratio, static_cast<double>(row.count) / static_cast<double>(rep.zeta_one));
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

ScalingReport check_zeta_scaling(const Polytope& p, const Rational& t) {
  if (t < 1) throw DomainError("the scaling check needs t >= 1");
  GaugeTable table(p, t);
  ScalingReport rep;
  rep.t = t;
  rep.zeta_one = table.count(Rational(1));
  rep.zeta_t = table.count(t);
  Rational factor(1);
  for (int i = 0; i < p.dim(); ++i) factor *= 4 * t + 1;
  rep.upper = factor * rep.zeta_one;
  rep.lower_holds = rep.zeta_one <= rep.zeta_t;
  rep.upper_holds = Rational(rep.zeta_t) <= rep.upper;
  return rep;
}

// ------------------------------------------------------------------ file IO

ShiftedBody parse_polytope(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int d = 0;
  std::vector<RationalVector> verts;
  std::optional<RationalVector> shift;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw StructuralError("polytope line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::vector<std::string> toks;
    for (std::string tok; ls >> tok;) toks.push_back(tok);
    if (key == "dim") {
      if (d != 0) fail("duplicate dim");
      if (toks.size() != 1) fail("dim takes one value");
      try {
        d = std::stoi(toks[0]);
      } catch (const std::exception&) {
        fail("bad dimension '" + toks[0] + "'");
      }
      if (d < 1 || std::to_string(d) != toks[0]) fail("bad dimension '" + toks[0] + "'");
    } else if (key == "vertex" || key == "shift") {
      if (d == 0) fail("dim must come first");
      if (static_cast<int>(toks.size()) != d) fail(key + " needs " + std::to_string(d) + " coordinates");
      RationalVector v(d);
      for (int i = 0; i < d; ++i) v[i] = parse_rational(toks[static_cast<std::size_t>(i)]);
      if (key == "vertex") {
        verts.push_back(std::move(v));
      } else {
        if (shift) fail("duplicate shift");
        shift = std::move(v);
      }
    } else {
      fail("unknown keyword '" + key + "'");
    }
  }
  if (d == 0) throw StructuralError("polytope file has no dim line");
  if (verts.empty()) throw StructuralError("polytope file has no vertices");
  RationalMatrix m(d, static_cast<Index>(verts.size()));
  for (std::size_t j = 0; j < verts.size(); ++j) m.col(static_cast<Index>(j)) = verts[j];
  Polytope p(std::move(m));
  return shift ? ShiftedBody(std::move(p), *shift) : ShiftedBody(std::move(p));
}

ShiftedBody load_polytope(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw StructuralError("cannot open polytope file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_polytope(ss.str());
}

std::string format_polytope(const ShiftedBody& body) {
  std::ostringstream out;
  out << "dim " << body.dim() << "\n";
  for (Index j = 0; j < body.base.num_vertices(); ++j) {
    out << "vertex";
    for (int i = 0; i < body.dim(); ++i) out << " " << to_string(body.base.vertices()(i, j));
    out << "\n";
  }
  if (!body.shift.isZero()) {
    out << "shift";
    for (int i = 0; i < body.dim(); ++i) out << " " << to_string(body.shift[i]);
    out << "\n";
  }
  return out.str();
}

}  // namespace apdisc
