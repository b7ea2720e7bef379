#pragma once

// Elements of a real quadratic field Q(sqrt(d)): values a + b*sqrt(d) with
// rational a, b and a fixed squarefree integer d >= 2. Signs, comparisons and
// square-root extraction are all exact. Values with b == 0 are plain
// rationals and combine freely with any d.

#include <optional>
#include <string>

#include "raag/rational.hpp"

namespace raag {

struct Quadratic {
  Rat a;             // rational part
  Rat b;             // coefficient of sqrt(d)
  long long d = 2;   // radicand; meaningful only when b != 0

  Quadratic() : a(0), b(0) {}
  Quadratic(Rat rational) : a(std::move(rational)), b(0) {}
  Quadratic(Rat a_, Rat b_, long long d_) : a(std::move(a_)), b(std::move(b_)), d(d_) {}
  static Quadratic root_term(Rat coeff, long long d) { return {Rat(0), std::move(coeff), d}; }

  bool is_rational() const { return b == 0; }
  /// Exact sign: the sign of a is compared against b*sqrt(d) by squaring,
  /// which is faithful because the two terms are separately sign-definite.
  int sign() const;
  bool is_zero() const { return a == 0 && b == 0; }

  Quadratic operator+(const Quadratic& o) const;
  Quadratic operator-(const Quadratic& o) const;
  Quadratic operator*(const Quadratic& o) const;
  Quadratic operator-() const { return {-a, -b, d}; }
  Quadratic& operator+=(const Quadratic& o) { return *this = *this + o; }
  Quadratic& operator-=(const Quadratic& o) { return *this = *this - o; }
  Quadratic& operator*=(const Quadratic& o) { return *this = *this * o; }

  /// Division; divisor must be nonzero (conjugate trick for b != 0).
  Quadratic operator/(const Quadratic& o) const;

  bool operator==(const Quadratic& o) const;
  bool operator!=(const Quadratic& o) const { return !(*this == o); }

  /// Exact square root within the same field, when one exists.
  /// Solves (x + y*sqrt(d))^2 = a + b*sqrt(d) over the rationals.
  std::optional<Quadratic> sqrt() const;

  RatInterval enclose(unsigned bits) const;
  double approx() const;
  std::string str() const;
};

/// Sign of lhs - rhs, exact.
int cmp(const Quadratic& lhs, const Quadratic& rhs);

inline bool compatible(const Quadratic& x, const Quadratic& y) {
  return x.b == 0 || y.b == 0 || x.d == y.d;
}

}  // namespace raag
