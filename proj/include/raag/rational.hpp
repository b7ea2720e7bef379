#pragma once

// Exact rational arithmetic base layer: big integers, rationals, rational
// intervals, and directed-rounding square-root enclosures. Everything that
// decides a geometric predicate in this toolkit bottoms out here.

#include <boost/multiprecision/cpp_int.hpp>
#include <cassert>
#include <cstdint>
#include <optional>
#include <string>

namespace raag {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline int sign(const Int& n) { return n.sign(); }
inline int sign(const Rat& q) { return q.sign(); }

/// floor(sqrt(n)) for n >= 0.
inline Int isqrt_floor(const Int& n) {
  assert(n >= 0);
  return boost::multiprecision::sqrt(n);
}

/// Exact square root of a rational, when it is a perfect square.
std::optional<Rat> rat_sqrt(const Rat& q);

inline double approx(const Rat& q) { return q.convert_to<double>(); }

std::string to_string(const Rat& q);

/// Closed interval [lo, hi] with rational endpoints; the workhorse for
/// certified numeric refinement of nested-radical signs.
struct RatInterval {
  Rat lo, hi;

  RatInterval() = default;
  RatInterval(Rat point) : lo(point), hi(std::move(point)) {}
  RatInterval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) { assert(lo <= hi); }

  Rat width() const { return hi - lo; }
  Rat mid() const { return (lo + hi) / 2; }
  bool contains_zero() const { return lo <= 0 && hi >= 0; }

  /// Sign of every point in the interval: +1, -1, or 0 when undecided.
  int definite_sign() const {
    if (lo > 0) return 1;
    if (hi < 0) return -1;
    return 0;
  }

  RatInterval operator+(const RatInterval& o) const { return {lo + o.lo, hi + o.hi}; }
  RatInterval operator-(const RatInterval& o) const { return {lo - o.hi, hi - o.lo}; }
  RatInterval operator-() const { return {-hi, -lo}; }
  RatInterval operator*(const Rat& c) const {
    return c >= 0 ? RatInterval{lo * c, hi * c} : RatInterval{hi * c, lo * c};
  }
};

/// Encloses sqrt(q) for q >= 0 in an interval of width <= 2^-bits.
RatInterval sqrt_interval(const Rat& q, unsigned bits);

/// Encloses sqrt over a nonnegative interval (outward rounded).
RatInterval sqrt_interval(const RatInterval& q, unsigned bits);

}  // namespace raag
