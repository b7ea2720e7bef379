#pragma once

// Exact arithmetic for the two kinds of derived quantities the geometry
// produces:
//
//   Length    l = sqrt(X)                 (X a nonnegative Quadratic)
//   GapValue  g = sqrt(X) - sqrt(Y) - sqrt(Z)
//
// Lengths arise as hypotenuses l(g)^2 = l1^2 + l2^2; gap values arise as
// l(gh) - l(g) - l(h). All predicates used by the reconstruction pipeline
// (signs, equalities against lengths, comparisons against rationals) are
// decided exactly: expressions with up to three distinct radicals by
// sign-preserving squaring, the one-vs-three equality by an algebraic
// certificate plus candidate separation. Comparisons between two gap values
// (six radicals) use certified interval refinement, which terminates
// whenever the values differ, with a normalized-triple test catching the
// equal case produced by symmetric witnesses.

#include <string>

#include "raag/quadratic.hpp"

namespace raag {

/// Exact sign of r + p*sqrt(P) + q*sqrt(Q) with Quadratic coefficients and
/// nonnegative Quadratic radicands. Fully exact: each squaring step strictly
/// reduces the number of radicals (sqrt(P)*sqrt(Q) collapses to sqrt(P*Q)).
int sign_two_radicals(const Quadratic& r, const Quadratic& p, const Quadratic& P,
                      const Quadratic& q, const Quadratic& Q);

/// Exact sign of r + p*sqrt(P).
int sign_one_radical(const Quadratic& r, const Quadratic& p, const Quadratic& P);

/// Exact sign of sqrt(C) - sqrt(A) - sqrt(B).
int cmp_root_vs_root_sum(const Quadratic& C, const Quadratic& A, const Quadratic& B);

/// Exact test sqrt(X) == sqrt(W) + sqrt(Y) + sqrt(Z) (four radicals).
/// Necessary algebraic certificate first, then interval separation of the
/// four conjugate candidates (sqrt(W) +- sqrt(Y) +- sqrt(Z))^2.
bool root_equals_root_sum3(const Quadratic& X, const Quadratic& W, const Quadratic& Y,
                           const Quadratic& Z);

struct Length {
  Quadratic rad;  // value = sqrt(rad), rad >= 0

  Length() : rad(Rat(0)) {}
  explicit Length(Quadratic radicand) : rad(std::move(radicand)) { assert(rad.sign() >= 0); }

  /// Length with value x (x >= 0), i.e. radicand x^2.
  static Length of_scalar(const Quadratic& x) {
    assert(x.sign() >= 0);
    return Length(x * x);
  }

  bool is_zero() const { return rad.is_zero(); }
  /// Exact de-rooting when the value lies in the field itself.
  std::optional<Quadratic> as_scalar() const { return rad.sqrt(); }

  int cmp(const Length& o) const { return raag::cmp(rad, o.rad); }
  bool operator==(const Length& o) const { return rad == o.rad; }
  bool operator!=(const Length& o) const { return !(*this == o); }
  bool operator<(const Length& o) const { return cmp(o) < 0; }
  bool operator<=(const Length& o) const { return cmp(o) <= 0; }

  /// Hypotenuse sqrt(a^2 + b^2) of two lengths: radicands add.
  static Length hypot(const Length& x, const Length& y) { return Length(x.rad + y.rad); }
  /// Value scaled by a nonnegative rational.
  Length scaled(const Rat& c) const { return Length(rad * Quadratic(c * c)); }

  RatInterval enclose(unsigned bits) const;
  double approx() const { return enclose(64).mid().convert_to<double>(); }
  std::string str() const;
};

struct GapValue {
  Quadratic X, Y, Z;  // value = sqrt(X) - sqrt(Y) - sqrt(Z)

  GapValue() : X(Rat(0)), Y(Rat(0)), Z(Rat(0)) {}
  GapValue(Quadratic x, Quadratic y, Quadratic z)
      : X(std::move(x)), Y(std::move(y)), Z(std::move(z)) {
    assert(X.sign() >= 0 && Y.sign() >= 0 && Z.sign() >= 0);
  }
  static GapValue zero() { return GapValue(); }
  static GapValue of_lengths(const Length& sum, const Length& l1, const Length& l2) {
    return {sum.rad, l1.rad, l2.rad};
  }

  int sign() const { return cmp_root_vs_root_sum(X, Y, Z); }
  /// Exact sign of value - c for rational c.
  int cmp_rational(const Rat& c) const;
  /// Exact equality against a Length.
  bool equals_length(const Length& w) const { return root_equals_root_sum3(X, w.rad, Y, Z); }
  /// Exact sign of value - w. Equality decided by certificate; strict signs
  /// by interval refinement (terminates because the values differ).
  int cmp_length(const Length& w) const;

  /// value / 2 (radicands divide by 4).
  GapValue halved() const { return {X * Quadratic(Rat(1, 4)), Y * Quadratic(Rat(1, 4)), Z * Quadratic(Rat(1, 4))}; }

  RatInterval enclose(unsigned bits) const;
  double approx() const { return enclose(64).mid().convert_to<double>(); }
  std::string str() const;
};

/// Exact sign of p - q for gap values known to be comparable: interval
/// refinement with escalating precision, with an exact equal-triple test
/// (after normalizing the symmetric Y/Z pair) short-circuiting the common
/// tie produced by swapped witnesses. Values that agree to 2^-1024 without
/// an equal triple abort (no fixture in this toolkit produces them).
int cmp_gap(const GapValue& p, const GapValue& q);

/// Exact sign of (g + offset) - w for rational offset and Length w, valid
/// when g + offset != w is known a priori (e.g. irrational residuals vs a
/// rational threshold); pure refinement, escalating until separated.
int cmp_gap_offset_vs_length(const GapValue& g, const Rat& offset, const Length& w);

}  // namespace raag
