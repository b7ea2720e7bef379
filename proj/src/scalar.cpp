#include "raag/scalar.hpp"

#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace raag {
namespace {

// Sum of a scalar and coefficient*sqrt(radicand) terms, normalized so that
// every surviving radicand is nonzero and not a perfect square in the field
// (extractable roots fold into the scalar part; equal radicands combine).
// Signs of sums with <= 3 surviving radicals are decided exactly.
struct RadSum {
  Quadratic scalar{Rat(0)};
  std::vector<std::pair<Quadratic, Quadratic>> terms;  // (coeff, radicand)

  void add_scalar(const Quadratic& s) { scalar += s; }

  void add_root(const Quadratic& coeff, const Quadratic& rad) {
    assert(rad.sign() >= 0);
    if (coeff.is_zero() || rad.is_zero()) return;
    if (auto r = rad.sqrt()) {
      scalar += coeff * *r;
      return;
    }
    for (auto& [c, R] : terms) {
      if (R == rad) {
        c += coeff;  // zero coefficients are dropped by prune()
        return;
      }
    }
    terms.emplace_back(coeff, rad);
  }

  void prune() {
    std::erase_if(terms, [](const auto& t) { return t.first.is_zero(); });
  }

  RatInterval enclose(unsigned bits) const {
    RatInterval acc = scalar.enclose(bits);
    for (const auto& [c, R] : terms) {
      RatInterval root = sqrt_interval(R.enclose(bits), bits);
      RatInterval ce = c.enclose(bits);
      // coeff * root with root >= 0: endpoints are products of endpoints.
      Rat cand1 = ce.lo * root.lo, cand2 = ce.lo * root.hi;
      Rat cand3 = ce.hi * root.lo, cand4 = ce.hi * root.hi;
      Rat lo = std::min(std::min(cand1, cand2), std::min(cand3, cand4));
      Rat hi = std::max(std::max(cand1, cand2), std::max(cand3, cand4));
      acc = acc + RatInterval{lo, hi};
    }
    return acc;
  }
};

int sign_three_radicals(const Quadratic& s, const Quadratic& a1, const Quadratic& A,
                        const Quadratic& a2, const Quadratic& B, const Quadratic& a3,
                        const Quadratic& C);

// Dispatch on surviving radical count; nullopt when four or more remain.
std::optional<int> try_sign(RadSum sum) {
  sum.prune();
  switch (sum.terms.size()) {
    case 0:
      return sum.scalar.sign();
    case 1:
      return sign_one_radical(sum.scalar, sum.terms[0].first, sum.terms[0].second);
    case 2:
      return sign_two_radicals(sum.scalar, sum.terms[0].first, sum.terms[0].second,
                               sum.terms[1].first, sum.terms[1].second);
    case 3:
      return sign_three_radicals(sum.scalar, sum.terms[0].first, sum.terms[0].second,
                                 sum.terms[1].first, sum.terms[1].second, sum.terms[2].first,
                                 sum.terms[2].second);
    default:
      return std::nullopt;
  }
}

// Combine the signs of two expressions E1, E2 with |E1| vs |E2| decided by
// sq_cmp = sign(E1^2 - E2^2); returns sign(E1 + E2).
int combine_opposite(int s1, int s2, int sq_cmp) {
  if (sq_cmp == 0) return 0;
  return sq_cmp > 0 ? s1 : s2;
}

int sign_three_radicals(const Quadratic& s, const Quadratic& a1, const Quadratic& A,
                        const Quadratic& a2, const Quadratic& B, const Quadratic& a3,
                        const Quadratic& C) {
  // Group L = s + a1*sqrt(A) against M = a2*sqrt(B) + a3*sqrt(C). Squaring
  // the two-radical pair M collapses its cross term to sqrt(B*C), so the
  // final comparison has two radicals.
  int sL = sign_one_radical(s, a1, A);
  int sM;
  {
    int sb = a2.sign(), sc = a3.sign();
    if (sb == 0) sM = sc;
    else if (sc == 0) sM = sb;
    else if (sb == sc) sM = sb;
    else sM = combine_opposite(sb, sc, cmp(a2 * a2 * B, a3 * a3 * C));
  }
  if (sL == 0) return sM;
  if (sM == 0) return sL;
  if (sL == sM) return sL;
  // L^2 - M^2 = s^2 + a1^2 A - a2^2 B - a3^2 C + 2 s a1 sqrt(A) - 2 a2 a3 sqrt(BC)
  Quadratic r = s * s + a1 * a1 * A - a2 * a2 * B - a3 * a3 * C;
  int sq = sign_two_radicals(r, s * a1 * Quadratic(Rat(2)), A,
                             a2 * a3 * Quadratic(Rat(-2)), B * C);
  return combine_opposite(sL, sM, sq);
}

RadSum gap_radsum(const GapValue& g) {
  RadSum sum;
  sum.add_root(Quadratic(Rat(1)), g.X);
  sum.add_root(Quadratic(Rat(-1)), g.Y);
  sum.add_root(Quadratic(Rat(-1)), g.Z);
  return sum;
}

constexpr unsigned kMaxBits = 4096;

[[noreturn]] void refinement_overflow(const char* what) {
  throw std::logic_error(std::string("exact comparison failed to separate: ") + what);
}

// Refine until the sign is certain; only legal when the value is nonzero.
int refine_sign(const RadSum& sum, const char* what) {
  for (unsigned bits = 48; bits <= kMaxBits; bits *= 2) {
    int s = sum.enclose(bits).definite_sign();
    if (s != 0) return s;
  }
  refinement_overflow(what);
}

}  // namespace

int sign_one_radical(const Quadratic& r, const Quadratic& p, const Quadratic& P) {
  assert(P.sign() >= 0);
  int st = P.is_zero() ? 0 : p.sign();
  int sr = r.sign();
  if (st == 0) return sr;
  if (sr == 0) return st;
  if (sr == st) return sr;
  return combine_opposite(sr, st, cmp(r * r, p * p * P));
}

int sign_two_radicals(const Quadratic& r, const Quadratic& p, const Quadratic& P,
                      const Quadratic& q, const Quadratic& Q) {
  assert(P.sign() >= 0 && Q.sign() >= 0);
  if (q.is_zero() || Q.is_zero()) return sign_one_radical(r, p, P);
  if (p.is_zero() || P.is_zero()) return sign_one_radical(r, q, Q);
  // L = r + p*sqrt(P) vs M = q*sqrt(Q):
  // L^2 - M^2 = r^2 + p^2 P - q^2 Q + 2 r p sqrt(P), one radical.
  int sL = sign_one_radical(r, p, P);
  int sM = q.sign();
  if (sL == 0) return sM;
  if (sL == sM) return sL;
  int sq = sign_one_radical(r * r + p * p * P - q * q * Q, r * p * Quadratic(Rat(2)), P);
  return combine_opposite(sL, sM, sq);
}

int cmp_root_vs_root_sum(const Quadratic& C, const Quadratic& A, const Quadratic& B) {
  // sqrt(C) and sqrt(A)+sqrt(B) are both nonnegative, so comparing squares
  // is faithful: C vs A + B + 2 sqrt(AB).
  return sign_one_radical(C - A - B, Quadratic(Rat(-2)), A * B);
}

bool root_equals_root_sum3(const Quadratic& X, const Quadratic& W, const Quadratic& Y,
                           const Quadratic& Z) {
  assert(X.sign() >= 0 && W.sign() >= 0 && Y.sign() >= 0 && Z.sign() >= 0);
  // Degenerate radicands reduce to at most two roots per side: exact.
  if (W.is_zero()) return cmp_root_vs_root_sum(X, Y, Z) == 0;
  if (Y.is_zero()) return cmp_root_vs_root_sum(X, W, Z) == 0;
  if (Z.is_zero()) return cmp_root_vs_root_sum(X, W, Y) == 0;

  // Necessary certificate, obtained by squaring sqrt(X) = sqrt(W)+sqrt(Y)+sqrt(Z)
  // twice with sign conditions tracked:
  //   t := X-W-Y-Z            must be >= 0 (t = 2(sqrt(WY)+sqrt(WZ)+sqrt(YZ)))
  //   u := t^2 - 4(WY+WZ+YZ)  must be >= 0 (u = 8(W sqrt(YZ)+Y sqrt(WZ)+Z sqrt(WY)))
  //   u^2 == 64 W X Y Z
  // The certificate pins X to one of the four values (sqrt(W)+-sqrt(Y)+-sqrt(Z))^2.
  Quadratic t = X - W - Y - Z;
  if (t.sign() < 0) return false;
  Quadratic s1 = W * Y + W * Z + Y * Z;
  Quadratic u = t * t - s1 * Quadratic(Rat(4));
  if (u.sign() < 0) return false;
  if (u * u != W * X * Y * Z * Quadratic(Rat(64))) return false;

  // Separate the four candidates: distinct candidates' absolute values
  // differ from sqrt(W)+sqrt(Y)+sqrt(Z) by at least 2*min(sqrt(W),sqrt(Y),sqrt(Z)).
  for (unsigned bits = 48; bits <= kMaxBits; bits *= 2) {
    RatInterval rw = sqrt_interval(W.enclose(bits), bits);
    RatInterval ry = sqrt_interval(Y.enclose(bits), bits);
    RatInterval rz = sqrt_interval(Z.enclose(bits), bits);
    RatInterval rx = sqrt_interval(X.enclose(bits), bits);
    RatInterval diff = rw + ry + rz - rx;
    if (!diff.contains_zero()) return false;
    Rat sep = std::min(std::min(rw.lo, ry.lo), rz.lo) * 2;
    if (sep > 0 && diff.width() < sep) return true;
  }
  refinement_overflow("root_equals_root_sum3 candidates");
}

RatInterval Length::enclose(unsigned bits) const {
  return sqrt_interval(rad.enclose(bits), bits);
}

std::string Length::str() const {
  if (auto s = as_scalar()) return s->str();
  return "sqrt(" + rad.str() + ")";
}

int GapValue::cmp_rational(const Rat& c) const {
  RadSum diff = gap_radsum(*this);
  diff.add_scalar(Quadratic(-c));
  auto s = try_sign(diff);
  assert(s);  // <= 3 radicals: always exact
  return *s;
}

int GapValue::cmp_length(const Length& w) const {
  if (equals_length(w)) return 0;
  RadSum diff = gap_radsum(*this);
  diff.add_root(Quadratic(Rat(-1)), w.rad);
  if (auto s = try_sign(diff)) return *s;
  return refine_sign(diff, "gap vs length");
}

RatInterval GapValue::enclose(unsigned bits) const {
  return gap_radsum(*this).enclose(bits);
}

std::string GapValue::str() const {
  std::ostringstream os;
  os << "sqrt(" << X.str() << ") - sqrt(" << Y.str() << ") - sqrt(" << Z.str() << ")";
  return os.str();
}

int cmp_gap(const GapValue& p, const GapValue& q) {
  RadSum diff = gap_radsum(p);
  diff.add_root(Quadratic(Rat(-1)), q.X);
  diff.add_root(Quadratic(Rat(1)), q.Y);
  diff.add_root(Quadratic(Rat(1)), q.Z);
  if (auto s = try_sign(diff)) return *s;

  // Four or more surviving radicals. Catch exact ties first: identical
  // triples up to the symmetric Y/Z swap, and the doubly-zero case.
  auto key = [](const GapValue& g) {
    bool swap = cmp(g.Y, g.Z) > 0;
    return std::make_pair(swap ? g.Z : g.Y, swap ? g.Y : g.Z);
  };
  if (p.X == q.X && key(p) == key(q)) return 0;
  if (p.sign() == 0 && q.sign() == 0) return 0;
  return refine_sign(diff, "gap vs gap");
}

int cmp_gap_offset_vs_length(const GapValue& g, const Rat& offset, const Length& w) {
  RadSum diff = gap_radsum(g);
  diff.add_scalar(Quadratic(offset));
  diff.add_root(Quadratic(Rat(-1)), w.rad);
  if (auto s = try_sign(diff)) return *s;
  return refine_sign(diff, "gap + offset vs length");
}

}  // namespace raag
