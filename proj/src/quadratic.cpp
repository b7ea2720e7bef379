#include "raag/quadratic.hpp"

#include <sstream>

namespace raag {

std::optional<Rat> rat_sqrt(const Rat& q) {
  if (q < 0) return std::nullopt;
  Int num = numerator(q), den = denominator(q);
  Int sn = isqrt_floor(num), sd = isqrt_floor(den);
  if (sn * sn != num || sd * sd != den) return std::nullopt;
  return Rat(sn, sd);
}

std::string to_string(const Rat& q) {
  std::ostringstream os;
  os << numerator(q);
  if (denominator(q) != 1) os << "/" << denominator(q);
  return os.str();
}

RatInterval sqrt_interval(const Rat& q, unsigned bits) {
  assert(q >= 0);
  // sqrt(n/m) = sqrt(n*m)/m; scale by 4^bits so the integer sqrt carries
  // `bits` fractional bits.
  Int num = numerator(q), den = denominator(q);
  Int scaled = num * den << (2 * bits);
  Int s = isqrt_floor(scaled);
  Int denom = den << bits;
  return {Rat(s, denom), Rat(s + 1, denom)};
}

RatInterval sqrt_interval(const RatInterval& q, unsigned bits) {
  assert(q.hi >= 0);
  Rat lo = q.lo < 0 ? Rat(0) : q.lo;
  return {sqrt_interval(lo, bits).lo, sqrt_interval(q.hi, bits).hi};
}

int Quadratic::sign() const {
  int sa = raag::sign(a), sb = raag::sign(b);
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  // Opposite signs: a + b*sqrt(d) has the sign of the term with the larger
  // square; a^2 vs b^2*d decides exactly (never equal, d squarefree).
  Rat lhs = a * a, rhs = b * b * d;
  if (lhs == rhs) return 0;
  return lhs > rhs ? sa : sb;
}

Quadratic Quadratic::operator+(const Quadratic& o) const {
  assert(compatible(*this, o));
  return {a + o.a, b + o.b, b == 0 ? o.d : d};
}

Quadratic Quadratic::operator-(const Quadratic& o) const { return *this + (-o); }

Quadratic Quadratic::operator*(const Quadratic& o) const {
  assert(compatible(*this, o));
  long long dd = b == 0 ? o.d : d;
  return {a * o.a + b * o.b * dd, a * o.b + b * o.a, dd};
}

Quadratic Quadratic::operator/(const Quadratic& o) const {
  assert(!o.is_zero());
  if (o.b == 0) return {a / o.a, b / o.a, d};
  assert(compatible(*this, o));
  Rat norm = o.a * o.a - o.b * o.b * o.d;  // nonzero: d squarefree
  Quadratic conj{o.a, -o.b, o.d};
  Quadratic num = *this * conj;
  return {num.a / norm, num.b / norm, o.d};
}

bool Quadratic::operator==(const Quadratic& o) const {
  if (b == 0 || o.b == 0) return a == o.a && b == o.b;
  return d == o.d && a == o.a && b == o.b;
}

int cmp(const Quadratic& lhs, const Quadratic& rhs) { return (lhs - rhs).sign(); }

std::optional<Quadratic> Quadratic::sqrt() const {
  if (sign() < 0) return std::nullopt;
  if (b == 0) {
    if (auto r = rat_sqrt(a)) return Quadratic(*r);
    if (auto r = rat_sqrt(a / d)) return Quadratic::root_term(*r, d);
    return std::nullopt;
  }
  // (x + y*sqrt(d))^2 = x^2 + d y^2 + 2xy sqrt(d): match parts. With
  // s = sqrt(a^2 - d b^2) rational, x^2 is (a +- s)/2.
  auto s = rat_sqrt(a * a - b * b * d);
  if (!s) return std::nullopt;
  for (const Rat& x2 : {Rat((a + *s) / 2), Rat((a - *s) / 2)}) {
    auto x = rat_sqrt(x2);
    if (!x || *x == 0) continue;
    Quadratic cand{*x, b / (2 * *x), d};
    if (cand.sign() >= 0 && cand * cand == *this) return cand;
    cand = -cand;
    if (cand.sign() >= 0 && cand * cand == *this) return cand;
  }
  return std::nullopt;
}

RatInterval Quadratic::enclose(unsigned bits) const {
  if (b == 0) return RatInterval(a);
  // Width of b*[sqrt(d) interval] is |b| * 2^-k; pad k so the result meets
  // the requested width.
  unsigned pad = 2;
  Rat babs = b < 0 ? -b : b;
  while (Rat(Int(1) << pad) < babs) pad += 8;
  RatInterval root = sqrt_interval(Rat(d), bits + pad);
  RatInterval scaled = root * b;
  return {a + scaled.lo, a + scaled.hi};
}

double Quadratic::approx() const {
  return enclose(64).mid().convert_to<double>();
}

std::string Quadratic::str() const {
  if (b == 0) return to_string(a);
  std::ostringstream os;
  if (a != 0) os << to_string(a) << (b > 0 ? " + " : " - ");
  else if (b < 0) os << "-";
  Rat babs = b < 0 ? -b : b;
  if (babs != 1) os << to_string(babs) << "*";
  os << "sqrt(" << d << ")";
  return os.str();
}

}  // namespace raag
