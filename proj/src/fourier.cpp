#include "apdisc/fourier.hpp"

#include <Eigen/LU>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

namespace apdisc {

namespace {

struct LexLess {
  bool operator()(const LatticePoint& a, const LatticePoint& b) const {
    return lex_less({a.data(), static_cast<std::size_t>(a.size())}, {b.data(), static_cast<std::size_t>(b.size())});
  }
};

using PointMap = std::map<LatticePoint, std::int64_t, LexLess>;

void check_comb(const Universe& omega, const Coloring& chi, const CombFunction& g) {
  if (g.ell < 1) throw DomainError("comb length must be at least 1");
  if (g.b.size() != omega.dim()) throw StructuralError("comb step dimension does not match the universe");
  if (chi.size() != omega.size()) throw StructuralError("coloring size does not match the universe");
  if (g.ell > 1 && g.b.isZero()) throw DomainError("comb step must be nonzero");
}

PointMap scatter(const Universe& omega, const Coloring& chi, const CombFunction& g) {
  PointMap acc;
  LatticePoint x(omega.dim());
  for (Index i = 0; i < omega.size(); ++i) {
    const auto p = omega.point(i);
    for (Index t = 0; t < g.ell; ++t) {
      for (int k = 0; k < omega.dim(); ++k) x[k] = p[k] + t * g.b[k];
      acc[x] += chi[i];
    }
  }
  return acc;
}

// In-place n-dimensional transform over a row-major array.
void fft_nd(std::vector<std::complex<double>>& data, const std::vector<Index>& dims, bool inverse) {
  Eigen::FFT<double> fft;
  const int d = static_cast<int>(dims.size());
  Index inner = 1;
  for (int axis = d - 1; axis >= 0; --axis) {
    const Index len = dims[axis];
    const Index outer = static_cast<Index>(data.size()) / (len * inner);
    if (len == 1) continue;  // kissfft cannot plan length 1
    std::vector<std::complex<double>> line(static_cast<std::size_t>(len)), out;
    for (Index o = 0; o < outer; ++o) {
      for (Index in = 0; in < inner; ++in) {
        const Index base = o * len * inner + in;
        for (Index j = 0; j < len; ++j) line[j] = data[base + j * inner];
        if (inverse) {
          fft.inv(out, line);
        } else {
          fft.fwd(out, line);
        }
        for (Index j = 0; j < len; ++j) data[base + j * inner] = out[j];
      }
    }
    inner *= len;
  }
}

}  // namespace

std::int64_t comb_convolve(const Universe& omega, const Coloring& chi, const CombFunction& g,
                           std::span<const Coord> x) {
  check_comb(omega, chi, g);
  std::vector<Coord> y(x.begin(), x.end());
  std::int64_t sum = 0;
  for (Index t = 0; t < g.ell; ++t) {
    if (auto i = omega.find(y)) sum += chi[*i];
    for (std::size_t k = 0; k < y.size(); ++k) y[k] -= g.b[static_cast<Index>(k)];
  }
  return sum;
}

ConvolutionReport convolution_identity_check(const Universe& omega, const Coloring& chi, const CombFunction& g) {
  check_comb(omega, chi, g);
  ConvolutionReport rep;
  const PointMap conv = scatter(omega, chi, g);
  for (const auto& [x, value] : conv) {
    // chi-sum over the distinct points of omega cap AP(x, -b, ell)
    std::int64_t ap_sum = 0;
    for (Index t = 0; t < g.ell; ++t) {
      const LatticePoint y = x - t * g.b;
      if (auto i = omega.find(y)) ap_sum += chi[*i];
    }
    ++rep.points_checked;
    if (ap_sum != value) {
      if (!rep.first_mismatch) rep.first_mismatch = x;
      ++rep.mismatches;
    }
  }
  return rep;
}

ParsevalReport parseval_check(const Universe& omega, const Coloring& chi, const CombFunction& g, double tolerance) {
  check_comb(omega, chi, g);
  ParsevalReport rep;
  const PointMap conv = scatter(omega, chi, g);
  for (const auto& kv : conv) rep.direct += static_cast<double>(kv.second) * static_cast<double>(kv.second);
  if (omega.empty()) return rep;

  const int d = omega.dim();
  std::vector<Coord> lo(d, 0), hi(d, 0);
  for (int k = 0; k < d; ++k) {
    lo[k] = hi[k] = omega.point(0)[k];
  }
  for (Index i = 1; i < omega.size(); ++i) {
    const auto p = omega.point(i);
    for (int k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  rep.modulus.resize(d);
  for (int k = 0; k < d; ++k) {
    Index m = 1;
    while (m < hi[k] - lo[k] + 1) m *= 2;
    rep.modulus[k] = m;
  }
  while (true) {
    // the output support spans extent + (ell-1)|b_k| per axis
    bool wraps = false;
    for (int k = 0; k < d; ++k) {
      if (rep.modulus[k] < hi[k] - lo[k] + 1 + (g.ell - 1) * std::abs(g.b[k])) {
        rep.modulus[k] *= 2;
        wraps = true;
      }
    }
    if (!wraps) break;
    ++rep.retries;
  }
  Index total = 1;
  for (auto m : rep.modulus) {
    total *= m;
    if (total > (Index{1} << 26)) throw ResourceError("cyclic embedding too large", static_cast<std::uint64_t>(total), 1u << 26);
  }
  auto flat = [&](auto&& coord) {
    Index idx = 0;
    for (int k = 0; k < d; ++k) {
      Index c = coord(k) % rep.modulus[k];
      if (c < 0) c += rep.modulus[k];
      idx = idx * rep.modulus[k] + c;
    }
    return idx;
  };
  std::vector<std::complex<double>> a(static_cast<std::size_t>(total)), c(static_cast<std::size_t>(total));
  for (Index i = 0; i < omega.size(); ++i) {
    const auto p = omega.point(i);
    a[flat([&](int k) { return p[k] - lo[k]; })] += static_cast<double>(chi[i]);
  }
  for (Index t = 0; t < g.ell; ++t) c[flat([&](int k) { return t * g.b[k]; })] += 1.0;
  fft_nd(a, rep.modulus, false);
  fft_nd(c, rep.modulus, false);
  for (std::size_t j = 0; j < a.size(); ++j) a[j] *= c[j];
  fft_nd(a, rep.modulus, true);
  for (const auto& z : a) rep.transform += z.real() * z.real();

  const double scale = std::max(1.0, std::abs(rep.direct));
  rep.relative_error = std::abs(rep.transform - rep.direct) / scale;
  rep.agrees = rep.relative_error <= tolerance;
  return rep;
}

bool params_valid(const FourierLBParams& p) {
  if (p.ell < 1 || p.m <= 0) return false;
  return Rational(p.ell) <= Rational(5, 6) + Rational(p.zeta_half_m) / 6;
}

FourierLBParams choose_lb_params(const Polytope& k) {
  const Polytope diff = difference_body(k);
  Eigen::MatrixXd v(diff.dim(), diff.num_vertices());
  for (Index j = 0; j < v.cols(); ++j) {
    for (Index i = 0; i < v.rows(); ++i) v(i, j) = to_double(diff.vertices()(i, j));
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
  if (lu.rank() < diff.dim()) throw DomainError("K - K is not full-dimensional");

  const FKResult fk = f_K_of_difference(diff);
  FourierLBParams p;
  p.s_star = fk.s_star;
  p.m = Rational(4) / fk.s_star;
  p.zeta_half_m = zeta(diff, p.m / 2).count;
  if (p.zeta_half_m <= 1) throw DomainError("zeta(m/2) = 1 leaves no room for the comb");
  p.epsilon = Rational(1) / Rational(p.zeta_half_m - 1);
  p.ell = std::max<Index>(1, floor_to_int(fk.s_star / 12));
  while (p.ell >= 1 && !params_valid(p)) --p.ell;
  if (p.ell < 1) throw DomainError("no comb length satisfies the validity condition");
  return p;
}

CertifiedLowerBound certified_lower_bound(const ShiftedBody& body, const FourierLBParams& params) {
  if (!params_valid(params)) throw DomainError("lower-bound parameters violate the validity condition");
  const Polytope diff = difference_body(body.base);
  CertifiedLowerBound res;
  res.params = params;
  res.omega_size = integer_points(body)->size();
  res.zeta_outer = zeta(diff, 1 + 2 * params.m * params.ell).count;
  res.zeta_m = zeta(diff, params.m).count;
  const double ell = static_cast<double>(params.ell);
  res.value = std::sqrt(ell * ell * static_cast<double>(res.omega_size) /
                        (4.0 * static_cast<double>(res.zeta_outer) * static_cast<double>(res.zeta_m)));
  return res;
}

CertifiedLowerBound certified_lower_bound(const ShiftedBody& body) {
  return certified_lower_bound(body, choose_lb_params(body.base));
}

ShiftSearch best_shift_on_grid(const Polytope& k, Index denominator) {
  if (denominator < 1) throw DomainError("grid denominator must be positive");
  const int d = k.dim();
  ShiftSearch res;
  std::vector<Index> digit(d, 0);
  RationalVector shift(d);
  while (true) {
    for (int i = 0; i < d; ++i) shift[i] = Rational(digit[i], denominator);
    const Index count = integer_points(ShiftedBody(k, shift))->size();
    ++res.sampled;
    if (res.sampled == 1 || count > res.best_count) {
      res.best_count = count;
      res.best_shift = shift;
    }
    int i = d - 1;
    while (i >= 0 && ++digit[i] == denominator) digit[i--] = 0;
    if (i < 0) break;
  }
  return res;
}

std::vector<EnergyAudit> energy_audit(const ShiftedBody& body, const FourierLBParams& params, const Coloring& chi) {
  const Polytope diff = difference_body(body.base);
  const MaximalFamily fam = maximal_family(body);
  if (chi.size() != fam.universe->size()) throw StructuralError("coloring size does not match the body");
  const std::int64_t disc = all_ap_disc(fam, chi);
  const Rational reach = params.m * params.ell;
  const ShiftedBody enlarged(minkowski_sum(body.base, diff.scaled(reach)), body.shift);
  const Index enlarged_count = integer_points(enlarged)->size();

  std::vector<EnergyAudit> out;
  const GaugeTable table(diff, params.m);
  for (const auto& b : table.canonical_points(params.m)) {
    EnergyAudit a{CombFunction{b, params.ell}, 0, disc, enlarged_count, true};
    for (const auto& kv : scatter(*fam.universe, chi, a.g)) a.energy += kv.second * kv.second;
    a.holds = a.energy <= disc * disc * enlarged_count;
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace apdisc
