#pragma once

// Comb functions, their convolution with a coloring, a transform-based
// cross-check and the counting lower bound on disc(A_{v+K}).

#include <cstdint>
#include <optional>
#include <vector>

#include "apdisc/body.hpp"
#include "apdisc/core.hpp"
#include "apdisc/rational.hpp"

namespace apdisc {

/// Indicator of {0, b, ..., (ell-1) b}.
struct CombFunction {
  LatticePoint b;
  Index ell = 1;
};

/// sum_{t < ell} chi(x - t b), chi extended by zero outside the universe.
std::int64_t comb_convolve(const Universe& omega, const Coloring& chi, const CombFunction& g,
                           std::span<const Coord> x);

struct ConvolutionReport {
  Index points_checked = 0;
  Index mismatches = 0;
  std::optional<LatticePoint> first_mismatch;
  bool holds() const noexcept { return mismatches == 0; }
};

/// Scatter convolution against the chi-sum over omega cap AP(x, -b, ell) at
/// every x the comb can reach.
ConvolutionReport convolution_identity_check(const Universe& omega, const Coloring& chi, const CombFunction& g);

struct ParsevalReport {
  double direct = 0;
  double transform = 0;
  double relative_error = 0;
  std::vector<Index> modulus;
  int retries = 0;
  bool agrees = true;
};

/// sum_x (g * chi)(x)^2 exactly and through a cyclic embedding with FFTs.
ParsevalReport parseval_check(const Universe& omega, const Coloring& chi, const CombFunction& g,
                              double tolerance = 1e-6);

struct FourierLBParams {
  Index ell = 1;
  Rational m;
  Rational epsilon;
  /// zeta_{K-K}(m/2).
  Index zeta_half_m = 0;
  Rational s_star;
};

/// ell <= 5/6 + zeta(m/2)/6, exactly.
bool params_valid(const FourierLBParams& p);

FourierLBParams choose_lb_params(const Polytope& k);

struct CertifiedLowerBound {
  double value = 0;
  FourierLBParams params;
  Index zeta_outer = 0;  // zeta(1 + 2 m ell)
  Index zeta_m = 0;      // zeta(m)
  Index omega_size = 0;
};

CertifiedLowerBound certified_lower_bound(const ShiftedBody& body, const FourierLBParams& params);
CertifiedLowerBound certified_lower_bound(const ShiftedBody& body);

struct ShiftSearch {
  RationalVector best_shift;
  Index best_count = 0;
  Index sampled = 0;
};

/// Samples shifts on the grid (1/denominator) Z^d cap [0,1)^d and keeps the
/// one with the most lattice points.
ShiftSearch best_shift_on_grid(const Polytope& k, Index denominator);

struct EnergyAudit {
  CombFunction g;
  std::int64_t energy = 0;
  std::int64_t disc = 0;
  Index enlarged_count = 0;
  bool holds = true;
};

/// sum_x |g_b * chi(x)|^2 <= disc(A_{v+K}, chi)^2 |Z^d cap (v + K + m ell (K-K))|
/// for every canonical b in m (K-K).
std::vector<EnergyAudit> energy_audit(const ShiftedBody& body, const FourierLBParams& params, const Coloring& chi);

}  // namespace apdisc
