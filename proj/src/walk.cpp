#include "apdisc/walk.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <bit>
#include <cmath>

namespace apdisc {

namespace {

constexpr double kClamp = 1e-12;

Eigen::MatrixXd remove_index(const Eigen::MatrixXd& h, Index q) {
  const Index m = h.rows();
  Eigen::MatrixXd out(m - 1, m - 1);
  const Index a = q, b = m - q - 1;
  out.topLeftCorner(a, a) = h.topLeftCorner(a, a);
  out.topRightCorner(a, b) = h.topRightCorner(a, b);
  out.bottomLeftCorner(b, a) = h.bottomLeftCorner(b, a);
  out.bottomRightCorner(b, b) = h.bottomRightCorner(b, b);
  return out;
}

void check_gram(const Eigen::MatrixXd& g) {
  if (g.rows() != g.cols()) throw StructuralError("Gram matrix must be square");
  if (!g.allFinite()) throw StructuralError("walk input has non-finite entries");
  const double lim = (1 + 1e-9) * (1 + 1e-9);
  for (Index i = 0; i < g.rows(); ++i) {
    if (g(i, i) > lim) throw PreconditionError("walk needs columns of norm at most 1");
  }
}

}  // namespace

WalkResult gs_walk_gram(const Eigen::MatrixXd& g, std::uint64_t seed, const WalkOptions& options) {
  check_gram(g);
  const Index n = g.rows();
  WalkResult res;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  res.x = Eigen::VectorXi::Zero(n);
  if (n == 0) return res;
  SplitMix64 rng(seed);

  std::vector<Index> w(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i + 1 < n; ++i) w[i] = i;
  Index pivot = n - 1;

  Eigen::MatrixXd h;  // inverse of g(w, w)
  bool fallback = false;
  std::size_t refreshed_at = 0;
  auto submatrix = [&]() {
    const Index m = static_cast<Index>(w.size());
    Eigen::MatrixXd s(m, m);
    for (Index a = 0; a < m; ++a) {
      for (Index b = 0; b < m; ++b) s(a, b) = g(w[a], w[b]);
    }
    return s;
  };
  auto refresh = [&]() {
    refreshed_at = w.size();
    ++res.refreshes;
    if (w.empty()) {
      h.resize(0, 0);
      return;
    }
    const Eigen::MatrixXd s = submatrix();
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    const double scale = std::max(1e-300, s.diagonal().maxCoeff());
    if (llt.info() != Eigen::Success || llt.matrixL().toDenseMatrix().diagonal().minCoeff() < 1e-7 * std::sqrt(scale)) {
      fallback = true;
      res.used_fallback = true;
      return;
    }
    h = llt.solve(Eigen::MatrixXd::Identity(s.rows(), s.cols()));
  };
  auto drop_position = [&](std::size_t q) {
    if (!fallback) {
      const double hqq = h(static_cast<Index>(q), static_cast<Index>(q));
      if (!(hqq > 0)) {
        fallback = true;
        res.used_fallback = true;
      } else {
        const Eigen::VectorXd col = h.col(static_cast<Index>(q));
        h.noalias() -= col * col.transpose() / hqq;
        h = remove_index(h, static_cast<Index>(q));
      }
    }
    w.erase(w.begin() + static_cast<std::ptrdiff_t>(q));
  };
  refresh();

  Eigen::VectorXd gp, u;
  while (pivot >= 0) {
    const Index m = static_cast<Index>(w.size());
    gp.resize(m);
    for (Index a = 0; a < m; ++a) gp[a] = g(w[a], pivot);
    if (m == 0) {
      u.resize(0);
    } else if (!fallback) {
      u.noalias() = -h * gp;
    } else {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(submatrix());
      u = cod.solve(Eigen::VectorXd(-gp));
    }

    double dplus = (1 - x[pivot]), dminus = (1 + x[pivot]);
    Index lim_plus = pivot, lim_minus = pivot;
    for (Index a = 0; a < m; ++a) {
      const double ua = u[a];
      if (std::abs(ua) < 1e-15) continue;
      const double xi = x[w[a]];
      const double up = ua > 0 ? (1 - xi) / ua : (-1 - xi) / ua;
      const double dn = ua > 0 ? (1 + xi) / ua : (xi - 1) / ua;
      if (up < dplus) {
        dplus = up;
        lim_plus = w[a];
      }
      if (dn < dminus) {
        dminus = dn;
        lim_minus = w[a];
      }
    }
    dplus = std::max(dplus, 0.0);
    dminus = std::max(dminus, 0.0);
    if (!(dplus + dminus > 0)) throw ConstructionError("walk step with no room on either side");
    const double pplus = dminus / (dplus + dminus);
    const bool go_plus = rng.uniform() < pplus;
    const double delta = go_plus ? dplus : -dminus;
    const Index limiting = go_plus ? lim_plus : lim_minus;

    x[pivot] += delta;
    for (Index a = 0; a < m; ++a) x[w[a]] += delta * u[a];

    if (options.record_trace) {
      res.trace.push_back({pivot, dplus, dminus, pplus, delta, m + 1});
    }
    ++res.steps;

    auto frozen = [&](Index i) { return i == limiting || std::abs(x[i]) >= 1 - kClamp; };
    auto clamp = [&](Index i) {
      const double s = i == limiting ? (limiting == pivot ? (delta > 0 ? 1.0 : -1.0) : (x[i] > 0 ? 1.0 : -1.0))
                                     : (x[i] > 0 ? 1.0 : -1.0);
      x[i] = s;
      res.x[i] = static_cast<int>(s);
    };
    for (std::size_t q = w.size(); q-- > 0;) {
      const Index i = w[q];
      if (frozen(i)) {
        clamp(i);
        drop_position(q);
      }
    }
    if (frozen(pivot)) {
      clamp(pivot);
      if (w.empty()) {
        pivot = -1;
      } else {
        pivot = w.back();
        drop_position(w.size() - 1);
      }
    }
    if (!fallback && w.size() * 2 <= refreshed_at && !w.empty()) refresh();
  }
  return res;
}

WalkResult gs_walk(const Eigen::MatrixXd& r, std::uint64_t seed, const WalkOptions& options) {
  if (!r.allFinite()) throw StructuralError("walk input has non-finite entries");
  return gs_walk_gram(r.transpose() * r, seed, options);
}

WalkResult gs_walk(const ColSparse& r, std::uint64_t seed, const WalkOptions& options) {
  for (Index k = 0; k < r.nonZeros(); ++k) {
    if (!std::isfinite(r.valuePtr()[k])) throw StructuralError("walk input has non-finite entries");
  }
  const ColSparse gram = (r.transpose() * r).pruned();
  return gs_walk_gram(Eigen::MatrixXd(gram), seed, options);
}

ColoringReport gamma2_coloring(const FactorizationCertificate& cert, Index num_sets,
                               const std::function<std::int64_t(const Coloring&)>& disc, std::uint64_t seed) {
  ColSparse r = cert.R;
  const double norm = cert.right_norm();
  if (norm > 0) r /= norm;
  auto walk = gs_walk(r, seed);
  ColoringReport rep{Coloring(walk.x, ColoringSource::gswalk, seed), 0, 0, 0};
  rep.disc = disc(rep.coloring);
  rep.scale = std::sqrt(std::log(2.0 * static_cast<double>(std::max<Index>(num_sets, 1)))) * cert.value;
  rep.ratio = rep.scale > 0 ? static_cast<double>(rep.disc) / rep.scale : 0.0;
  return rep;
}

ColoringReport gamma2_coloring(const SetSystem& family, const FactorizationCertificate& cert, std::uint64_t seed) {
  if (cert.cols() != family.universe().size() || cert.rows() != family.size()) {
    throw StructuralError("certificate does not match the set system");
  }
  return gamma2_coloring(cert, family.size(), [&](const Coloring& c) { return disc_eval(family, c); }, seed);
}

Coloring random_coloring(Index n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Eigen::VectorXi v(n);
  for (Index i = 0; i < n; ++i) v[i] = (rng.next() >> 63) ? 1 : -1;
  return Coloring(v, ColoringSource::random, seed);
}

BruteForceResult brute_force_min_disc(const SetSystem& family, int max_n) {
  const Index n = family.universe().size();
  if (n > max_n) throw ResourceError("brute force universe too large", static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(max_n));
  if (n == 0) return {0, Coloring(Eigen::VectorXi(0), ColoringSource::bruteforce), 1};

  std::vector<std::vector<Index>> member_of(static_cast<std::size_t>(n));
  std::vector<std::int64_t> sums(static_cast<std::size_t>(family.size()));
  std::size_t max_size = 0;
  for (Index t = 0; t < family.size(); ++t) {
    const auto s = family.set(t);
    for (auto i : s) member_of[i].push_back(t);
    sums[t] = static_cast<std::int64_t>(s.size());
    max_size = std::max(max_size, s.size());
  }
  std::vector<std::int64_t> hist(max_size + 1, 0);
  for (auto s : sums) ++hist[static_cast<std::size_t>(s)];
  std::int64_t cur = family.empty() ? 0 : static_cast<std::int64_t>(max_size);
  while (cur > 0 && hist[cur] == 0) --cur;

  Eigen::VectorXi x = Eigen::VectorXi::Ones(n);
  BruteForceResult best{cur, Coloring(x, ColoringSource::bruteforce), 1};
  const std::uint64_t total = std::uint64_t{1} << (n - 1);
  for (std::uint64_t k = 1; k < total; ++k) {
    const int bit = std::countr_zero(k);
    const int delta = -2 * x[bit];
    x[bit] = -x[bit];
    for (Index t : member_of[bit]) {
      const std::int64_t old = sums[t] < 0 ? -sums[t] : sums[t];
      sums[t] += delta;
      const std::int64_t now = sums[t] < 0 ? -sums[t] : sums[t];
      --hist[old];
      ++hist[now];
      if (now > cur) cur = now;
    }
    while (cur > 0 && hist[cur] == 0) --cur;
    ++best.evaluated;
    if (cur < best.min_disc) {
      best.min_disc = cur;
      best.witness = Coloring(x, ColoringSource::bruteforce);
    }
  }
  return best;
}

BruteForceResult brute_force_min_pdisc(const SetSystem& family, const OrderingSigma& sigma, int max_n) {
  const Index n = family.universe().size();
  if (n > max_n) throw ResourceError("brute force universe too large", static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(max_n));
  if (sigma.size() != n) throw StructuralError("ordering does not match the universe");
  SetSystem prefixes(family.universe_ptr());
  std::vector<std::uint32_t> order, pre;
  for (Index t = 0; t < family.size(); ++t) {
    const auto s = family.set(t);
    order.assign(s.begin(), s.end());
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return sigma(a) < sigma(b); });
    for (std::size_t len = 1; len <= order.size(); ++len) {
      pre.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(len));
      std::sort(pre.begin(), pre.end());
      prefixes.add_set_unchecked(pre);
    }
  }
  return brute_force_min_disc(prefixes, max_n);
}

}  // namespace apdisc
