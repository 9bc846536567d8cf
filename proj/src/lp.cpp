#include "apdisc/lp.hpp"

#include <cctype>
#include <vector>

#include "apdisc/core.hpp"

namespace apdisc {

Rational parse_rational(std::string_view token) {
  auto digits = [](std::string_view s) {
    if (s.empty()) return false;
    for (char ch : s) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    }
    return true;
  };
  std::string_view body = token;
  bool neg = false;
  if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
    neg = body[0] == '-';
    body.remove_prefix(1);
  }
  const auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
  if (!digits(num) || !digits(den)) throw StructuralError("not a rational number: '" + std::string(token) + "'");
  BigInt p{std::string(num)}, q{std::string(den)};
  if (q == 0) throw StructuralError("zero denominator in '" + std::string(token) + "'");
  Rational r(p, q);
  return neg ? Rational(-r) : r;
}

std::string to_string(const Rational& q) { return q.str(); }

std::int64_t floor_to_int(const Rational& q) {
  BigInt n = boost::multiprecision::numerator(q), d = boost::multiprecision::denominator(q);
  BigInt f = n / d;
  if (n % d != 0 && n < 0) f -= 1;
  return f.convert_to<std::int64_t>();
}

std::int64_t ceil_to_int(const Rational& q) { return -floor_to_int(Rational(-q)); }

namespace {

class Tableau {
 public:
  Tableau(const RationalMatrix& A, const RationalVector& b)
      : m_(A.rows()), n_(A.cols()), width_(n_ + m_ + 1), t_(static_cast<std::size_t>(m_ * width_)), basis_(m_) {
    for (Index i = 0; i < m_; ++i) {
      const bool flip = b[i] < 0;
      for (Index j = 0; j < n_; ++j) at(i, j) = flip ? Rational(-A(i, j)) : A(i, j);
      at(i, n_ + i) = 1;
      at(i, rhs()) = flip ? Rational(-b[i]) : b[i];
      basis_[i] = n_ + i;
    }
  }

  // Returns false if unbounded.
  bool optimize(const std::vector<Rational>& cost, Index eligible) {
    std::vector<Rational> r(static_cast<std::size_t>(eligible));
    while (true) {
      Index enter = -1;
      for (Index j = 0; j < eligible && enter < 0; ++j) {
        Rational rj = cost[j];
        for (Index i = 0; i < m_; ++i) {
          if (at(i, j) != 0 && cost[basis_[i]] != 0) rj -= cost[basis_[i]] * at(i, j);
        }
        if (rj < 0) enter = j;
      }
      if (enter < 0) return true;
      Index leave = -1;
      Rational best;
      for (Index i = 0; i < m_; ++i) {
        if (at(i, enter) <= 0) continue;
        Rational ratio = at(i, rhs()) / at(i, enter);
        if (leave < 0 || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  void pivot(Index row, Index col) {
    const Rational p = at(row, col);
    for (Index j = 0; j < width_; ++j) {
      if (at(row, j) != 0) at(row, j) /= p;
    }
    for (Index i = 0; i < m_; ++i) {
      if (i == row || at(i, col) == 0) continue;
      const Rational f = at(i, col);
      for (Index j = 0; j < width_; ++j) {
        if (at(row, j) != 0) at(i, j) -= f * at(row, j);
      }
    }
    basis_[row] = col;
  }

  // Pivots artificial variables out of the basis where possible.
  void expel_artificials() {
    for (Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (Index j = 0; j < n_; ++j) {
        if (at(i, j) != 0) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  Rational value(const std::vector<Rational>& cost) const {
    Rational z = 0;
    for (Index i = 0; i < m_; ++i) z += cost[basis_[i]] * at(i, rhs());
    return z;
  }

  RationalVector solution() const {
    RationalVector x = RationalVector::Constant(n_, Rational(0));
    for (Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x[basis_[i]] = at(i, rhs());
    }
    return x;
  }

  Index rhs() const { return width_ - 1; }

 private:
  Rational& at(Index i, Index j) { return t_[static_cast<std::size_t>(i * width_ + j)]; }
  const Rational& at(Index i, Index j) const { return t_[static_cast<std::size_t>(i * width_ + j)]; }

  Index m_, n_, width_;
  std::vector<Rational> t_;
  std::vector<Index> basis_;
};

}  // namespace

LpResult solve_standard_lp(const RationalMatrix& A, const RationalVector& b, const RationalVector& c) {
  if (A.rows() != b.size() || A.cols() != c.size()) throw StructuralError("LP dimensions do not match");
  const Index m = A.rows(), n = A.cols();
  Tableau tab(A, b);
  std::vector<Rational> phase1(static_cast<std::size_t>(n + m), Rational(0));
  for (Index i = 0; i < m; ++i) phase1[n + i] = 1;
  tab.optimize(phase1, n + m);
  LpResult res;
  if (tab.value(phase1) != 0) return res;
  tab.expel_artificials();
  std::vector<Rational> phase2(static_cast<std::size_t>(n + m), Rational(0));
  for (Index j = 0; j < n; ++j) phase2[j] = c[j];
  if (!tab.optimize(phase2, n)) {
    res.status = LpStatus::unbounded;
    return res;
  }
  res.status = LpStatus::optimal;
  res.objective = tab.value(phase2);
  res.x = tab.solution();
  return res;
}

bool lp_feasible(const RationalMatrix& A, const RationalVector& b) {
  return solve_standard_lp(A, b, RationalVector::Constant(A.cols(), Rational(0))).status == LpStatus::optimal;
}

}  // namespace apdisc
