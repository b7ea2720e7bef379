#include "raag/plane_development.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace raag {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string describe(int v) { return std::to_string(v); }

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument(what); }

// ---------------------------------------------------------------------------
// Link classification helpers

void validate_graph(const LinkGraph& g) {
  if (g.n <= 0) bad("link graph has no vertices");
  std::set<std::pair<int, int>> seen;
  for (const auto& [x, y] : g.edges) {
    if (x < 0 || y < 0 || x >= g.n || y >= g.n) bad("edge endpoint out of range");
    if (x == y) bad("self-loop at vertex " + describe(x));
    if (!seen.insert(std::minmax(x, y)).second)
      bad("duplicate edge {" + describe(x) + "," + describe(y) + "}");
  }
  for (const auto& [x, y] : g.edges)
    for (int c = 0; c < g.n; ++c)
      if (c != x && c != y && g.adjacent(x, c) && g.adjacent(y, c))
        bad("3-cycle {" + describe(x) + "," + describe(y) + "," + describe(c) +
            "}: link girth must be at least 4");
}

std::array<int, 4> rotate_circle(const std::array<int, 4>& c, int r, bool rev) {
  std::array<int, 4> out{};
  for (int i = 0; i < 4; ++i) out[i] = c[rev ? ((r - i) % 4 + 4) % 4 : (r + i) % 4];
  return out;
}

bool contains(const std::set<int>& s, int v) { return s.count(v) > 0; }

// ---------------------------------------------------------------------------
// Plane geometry helpers

Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator*(double c, Vec2 a) { return {c * a.x, c * a.y}; }
double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double norm(Vec2 a) { return std::hypot(a.x, a.y); }

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = dot(ab, ab);
  if (len2 == 0) return norm(p - a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

using SegList = std::vector<std::pair<Vec2, Vec2>>;

double distance_to_segments(Vec2 p, const SegList& segs) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : segs) best = std::min(best, point_segment_distance(p, a, b));
  return best;
}

// a t^2 + b t + c on [lo, hi]: one zone of a squared point-segment distance
// restricted to a parametrized line P(t) = p0 + t d.
struct QuadPiece {
  double lo, hi;
  double a, b, c;
};

void segment_pieces(Vec2 p0, Vec2 dvec, Vec2 A, Vec2 B, std::vector<QuadPiece>& out,
                    std::vector<double>& cuts) {
  Vec2 E = B - A;
  double e2 = dot(E, E);
  Vec2 W0 = p0 - A;
  double qa_a = dot(dvec, dvec), qa_b = 2 * dot(W0, dvec), qa_c = dot(W0, W0);
  if (e2 == 0) {
    out.push_back({0, 1, qa_a, qa_b, qa_c});
    return;
  }
  Vec2 W1 = p0 - B;
  double qb_b = 2 * dot(W1, dvec), qb_c = dot(W1, W1);
  double w0 = dot(W0, E), w1 = dot(dvec, E);
  double qm_a = qa_a - w1 * w1 / e2;
  double qm_b = qa_b - 2 * w0 * w1 / e2;
  double qm_c = qa_c - w0 * w0 / e2;

  std::vector<double> bounds{0.0, 1.0};
  if (w1 != 0) {
    for (double s : {0.0, e2}) {
      double t = (s - w0) / w1;
      if (t > 0 && t < 1) {
        bounds.push_back(t);
        cuts.push_back(t);
      }
    }
  }
  std::sort(bounds.begin(), bounds.end());
  for (size_t i = 0; i + 1 < bounds.size(); ++i) {
    double lo = bounds[i], hi = bounds[i + 1];
    if (hi - lo <= 0) continue;
    double s_mid = w0 + w1 * (lo + hi) / 2;
    if (s_mid < 0)
      out.push_back({lo, hi, qa_a, qa_b, qa_c});
    else if (s_mid > e2)
      out.push_back({lo, hi, qa_a, qb_b, qb_c});
    else
      out.push_back({lo, hi, qm_a, qm_b, qm_c});
  }
}

// Exact sup over one chain segment of the distance to a segment soup. Every
// piece of every squared distance is a convex quadratic in t, so the lower
// envelope attains its maximum at interval ends, zone cuts, or crossings of
// two pieces; those are all closed-form candidates.
double segment_sup(Vec2 p0, Vec2 p1, const SegList& segs) {
  Vec2 dvec = p1 - p0;
  std::vector<QuadPiece> pieces;
  std::vector<double> cand{0.0, 1.0};
  for (const auto& [A, B] : segs) segment_pieces(p0, dvec, A, B, pieces, cand);
  for (size_t i = 0; i < pieces.size(); ++i)
    for (size_t j = i + 1; j < pieces.size(); ++j) {
      double lo = std::max(pieces[i].lo, pieces[j].lo);
      double hi = std::min(pieces[i].hi, pieces[j].hi);
      if (lo >= hi) continue;
      double a = pieces[i].a - pieces[j].a;
      double b = pieces[i].b - pieces[j].b;
      double c = pieces[i].c - pieces[j].c;
      if (a == 0) {
        if (b != 0) {
          double t = -c / b;
          if (t > lo && t < hi) cand.push_back(t);
        }
        continue;
      }
      double disc = b * b - 4 * a * c;
      if (disc < 0) continue;
      double root = std::sqrt(disc);
      for (double t : {(-b - root) / (2 * a), (-b + root) / (2 * a)})
        if (t > lo && t < hi) cand.push_back(t);
    }
  double best = 0;
  for (double t : cand)
    best = std::max(best, distance_to_segments(p0 + t * dvec, segs));
  return best;
}

double directed_hausdorff(const std::vector<Vec2>& chain, const SegList& segs) {
  double best = 0;
  for (size_t i = 0; i + 1 < chain.size(); ++i)
    best = std::max(best, segment_sup(chain[i], chain[i + 1], segs));
  return best;
}

// Segment soup of a chain and enough period translates that every point of
// the other chain sees its true nearest periodic copy.
SegList tiled_segments(const std::vector<Vec2>& chain, Vec2 period, int reach) {
  SegList segs;
  for (int shift = -reach; shift <= reach; ++shift) {
    Vec2 off = static_cast<double>(shift) * period;
    for (size_t i = 0; i + 1 < chain.size(); ++i)
      segs.emplace_back(chain[i] + off, chain[i + 1] + off);
  }
  return segs;
}

double chain_length(const std::vector<Vec2>& chain) {
  double len = 0;
  for (size_t i = 0; i + 1 < chain.size(); ++i) len += norm(chain[i + 1] - chain[i]);
  return len;
}

std::string fmt_num(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Link classification

bool LinkGraph::adjacent(int a, int b) const {
  for (const auto& [x, y] : edges)
    if ((x == a && y == b) || (x == b && y == a)) return true;
  return false;
}

std::vector<ModelEdge> LinkReport::fictitious() const {
  std::vector<ModelEdge> out;
  for (const ModelEdge& e : attachments)
    if (!e.present) out.push_back(e);
  return out;
}

LinkReport classify_link(const LinkConfiguration& config) {
  const LinkGraph& g = config.graph;
  validate_graph(g);

  const auto& c = config.circle;
  std::set<int> circle_verts(c.begin(), c.end());
  if (circle_verts.size() != 4) bad("circle vertices are not distinct");
  for (int v : c)
    if (v < 0 || v >= g.n) bad("circle vertex out of range");
  for (int i = 0; i < 4; ++i)
    if (!g.adjacent(c[i], c[(i + 1) % 4]))
      bad("circle is not a 4-cycle: missing edge {" + describe(c[i]) + "," +
          describe(c[(i + 1) % 4]) + "}");

  const LinkPoint& t = config.t;
  if (t.u < 0 || t.u >= g.n) bad("t references a vertex out of range");
  if (t.is_vertex()) {
    if (contains(circle_verts, t.u))
      bad("t lies on the circle: distance below pi/2");
  } else {
    if (t.w < 0 || t.w >= g.n || t.w == t.u) bad("t references a malformed edge");
    if (!g.adjacent(t.u, t.w))
      bad("t lies on {" + describe(t.u) + "," + describe(t.w) + "} which is not an edge");
    if (contains(circle_verts, t.u) || contains(circle_verts, t.w))
      bad("the edge carrying t touches the circle: distance below pi/2");
  }

  // Attachment sets: circle vertices adjacent to each free endpoint. The
  // triangle-free check already forces each set inside one antipodal pair
  // and, for edge-interior t, forbids both endpoints attaching to the same
  // circle vertex.
  LinkReport rep;
  if (t.is_vertex()) {
    rep.ends = {t.u, -1};
  } else {
    rep.ends = {std::min(t.u, t.w), std::max(t.u, t.w)};
  }
  std::set<int> attach0, attach1;
  for (int v : c) {
    if (g.adjacent(rep.ends[0], v)) attach0.insert(v);
    if (rep.ends[1] >= 0 && g.adjacent(rep.ends[1], v)) attach1.insert(v);
  }

  auto position_of = [](const std::array<int, 4>& cyc, int v) {
    for (int i = 0; i < 4; ++i)
      if (cyc[i] == v) return i;
    return -1;
  };

  // Rigid model: t interior, each endpoint attached to exactly one circle
  // vertex, the two attachment points antipodal. No further edge can exist
  // without a 3-cycle, so the identification is complete.
  bool rigid = !t.is_vertex() && attach0.size() == 1 && attach1.size() == 1 &&
               (position_of(c, *attach0.begin()) - position_of(c, *attach1.begin())) % 2 == 0;
  if (rigid) {
    rep.cls = LinkClass::type1;
    for (int rev = 0; rev < 2; ++rev)
      for (int r = 0; r < 4; ++r) {
        auto rl = rotate_circle(c, r, rev == 1);
        if (rl[0] == *attach0.begin() && rl[2] == *attach1.begin()) {
          rep.circle = rl;
          return rep;
        }
      }
    bad("unreachable: rigid configuration without an orientation");
  }

  // Slit model: rotate the cycle so end-0 attachments sit on even positions
  // and end-1 attachments on odd ones. Such an orientation always exists:
  // nonempty attachment sets of the two endpoints use distinct antipodal
  // pairs (a shared pair would force a singleton antipodal pattern, the
  // rigid case, or a 3-cycle).
  rep.cls = LinkClass::type2;
  for (int rev = 0; rev < 2; ++rev)
    for (int r = 0; r < 4; ++r) {
      auto rl = rotate_circle(c, r, rev == 1);
      std::set<int> even{rl[0], rl[2]}, odd{rl[1], rl[3]};
      bool ok = true;
      for (int v : attach0) ok = ok && contains(even, v);
      for (int v : attach1) ok = ok && contains(odd, v);
      if (!ok) continue;
      rep.circle = rl;
      rep.attachments = {
          {0, 0, g.adjacent(rep.ends[0], rl[0])},
          {0, 2, g.adjacent(rep.ends[0], rl[2])},
          {1, 1, rep.ends[1] >= 0 && g.adjacent(rep.ends[1], rl[1])},
          {1, 3, rep.ends[1] >= 0 && g.adjacent(rep.ends[1], rl[3])},
      };
      return rep;
    }
  bad("unreachable: no orientation embeds the configuration in the slit model");
}

// ---------------------------------------------------------------------------
// Dirichlet approximation

namespace {

Int rat_floor(const Rat& r) {
  Int q = numerator(r) / denominator(r);  // truncates toward zero
  if (r < 0 && q * denominator(r) != numerator(r)) --q;
  return q;
}

// Exact floor of a quadratic field element. Irrational values never sit on an
// integer, so interval refinement always separates the two candidates.
Int quad_floor(const Quadratic& x) {
  if (x.is_rational()) return rat_floor(x.a);
  for (unsigned bits = 64; bits <= 1u << 14; bits *= 2) {
    RatInterval box = x.enclose(bits);
    Int lo = rat_floor(box.lo), hi = rat_floor(box.hi);
    if (lo == hi) return lo;
  }
  throw std::runtime_error("floor refinement failed to converge");
}

struct LatticeFrame {
  Quadratic p, q, dx, dy;
  Quadratic dir2;  // dx^2 + dy^2

  DirichletPoint make(const Int& m, const Int& n) const {
    DirichletPoint pt;
    pt.m = m;
    pt.n = n;
    Quadratic cross = dx * (q * Quadratic(Rat(n))) - dy * (p * Quadratic(Rat(m)));
    pt.side = cross.sign();
    pt.dist2 = (cross * cross) / dir2;
    pt.residual = std::sqrt(std::max(0.0, pt.dist2.approx()));
    return pt;
  }
};

}  // namespace

std::vector<DirichletPoint> dirichlet_convergents(const Quadratic& p, const Quadratic& q,
                                                  const Quadratic& dx, const Quadratic& dy,
                                                  int count) {
  if (p.sign() <= 0 || q.sign() <= 0) bad("lattice spacings must be positive");
  if (dx.is_zero() && dy.is_zero()) bad("direction vector vanishes");
  if (!compatible(p, q) || !compatible(p, dx) || !compatible(p, dy) || !compatible(q, dx) ||
      !compatible(q, dy) || !compatible(dx, dy))
    bad("lattice and direction mix distinct quadratic fields");
  if (count <= 0) return {};

  LatticeFrame f{p, q, dx, dy, dx * dx + dy * dy};
  std::vector<DirichletPoint> out;

  if (dx.is_zero()) {  // vertical line: (0, q) lies on it
    out.push_back(f.make(0, 1));
    return out;
  }
  if (dy.is_zero()) {  // horizontal line: (p, 0) lies on it
    out.push_back(f.make(1, 0));
    return out;
  }

  // A point (m p, n q) lies on the line iff m/n equals rho = (q dx)/(p dy);
  // walk the continued-fraction convergents of |rho|. Remainders are
  // recomputed from the integer convergents each round, which keeps
  // coefficient growth linear instead of compounding.
  Quadratic rho = (q * dx) / (p * dy);
  int sigma = rho.sign();
  Quadratic rho_abs = sigma < 0 ? -rho : rho;

  out.push_back(f.make(0, 1));
  if (static_cast<int>(out.size()) >= count) return out;
  out.push_back(f.make(1, 0));

  Int pm2 = 0, qm2 = 1, pm1 = 1, qm1 = 0;
  while (static_cast<int>(out.size()) < count) {
    Quadratic denom = Quadratic(Rat(qm1)) * rho_abs - Quadratic(Rat(pm1));
    if (denom.is_zero()) break;  // previous convergent hit the line exactly
    Quadratic rem =
        -(Quadratic(Rat(qm2)) * rho_abs - Quadratic(Rat(pm2))) / denom;
    Int a = quad_floor(rem);
    Int pk = a * pm1 + pm2, qk = a * qm1 + qm2;
    if (!(pk == 0 && qk == 1))  // a leading zero quotient repeats the seed
      out.push_back(f.make(pk, sigma < 0 ? Int(-qk) : qk));
    bool exact = cmp(rem, Quadratic(Rat(a))) == 0;
    pm2 = pm1;
    qm2 = qm1;
    pm1 = pk;
    qm1 = qk;
    if (exact) break;
  }
  return out;
}

DirichletPoint dirichlet_point(const Quadratic& p, const Quadratic& q, const Quadratic& dx,
                               const Quadratic& dy, double eps, int side) {
  if (!(eps > 0) || !std::isfinite(eps)) bad("tolerance must be positive and finite");
  constexpr int kMaxConvergents = 200;
  // Rat(double) is exact (doubles are dyadic rationals), so the acceptance
  // test dist^2 <= eps^2 is decided in the field, not in floating point.
  Rat eps_rat(eps);
  Quadratic bound = Quadratic(eps_rat * eps_rat) * (dx * dx + dy * dy);

  auto walk = dirichlet_convergents(p, q, dx, dy, kMaxConvergents);
  for (const DirichletPoint& pt : walk) {
    Quadratic cross2 = pt.dist2 * (dx * dx + dy * dy);
    if (cmp(cross2, bound) > 0) continue;
    if (side != 0 && pt.side != 0 && pt.side != side) continue;
    return pt;
  }
  throw std::runtime_error("no convergent reaches the requested tolerance");
}

// ---------------------------------------------------------------------------
// Development

DevelopInput DevelopInput::exact(std::vector<Rat> lengths, std::vector<double> turns,
                                 std::vector<int> slits, int copies) {
  DevelopInput in;
  in.exact_len = std::move(lengths);
  in.seg_len.reserve(in.exact_len.size());
  for (const Rat& r : in.exact_len) in.seg_len.push_back(approx(r));
  in.turn = std::move(turns);
  in.slit = std::move(slits);
  in.copies = copies;
  return in;
}

Development develop(const DevelopInput& input) {
  const size_t k = input.seg_len.size();
  if (k == 0) bad("block needs at least one segment");
  if (input.turn.size() != k || input.slit.size() != k)
    bad("per-vertex turn and slit counts must match the segment count");
  if (!input.label.empty() && input.label.size() != k)
    bad("labels must be empty or one per block vertex");
  if (!input.exact_len.empty() && input.exact_len.size() != k)
    bad("exact lengths must be empty or one per segment");
  if (input.copies < 2) bad("need at least two copies to exhibit the period");

  double total = 0;
  for (size_t i = 0; i < k; ++i) {
    if (!(input.seg_len[i] >= 0)) bad("segment lengths must be nonnegative");
    total += input.seg_len[i];
    if (!input.exact_len.empty()) {
      if (input.exact_len[i] < 0) bad("segment lengths must be nonnegative");
      if (std::abs(approx(input.exact_len[i]) - input.seg_len[i]) >
          1e-9 * std::max(1.0, input.seg_len[i]))
        bad("exact and floating lengths disagree");
    }
    if (input.slit[i] < -1 || input.slit[i] > 1) bad("slit sides are -1, 0 or +1");
    if (!(std::abs(input.turn[i]) < kPi)) bad("turn magnitudes must stay below pi");
  }
  if (!(total > 0)) bad("block has zero total length");

  double net = 0;
  for (double t : input.turn) net += t;
  if (std::abs(net) > 1e-9) bad("turns must cancel over a period");

  // Headings depend only on the position within the block, so every block is
  // the exact translate of the previous one by the period vector.
  std::vector<Vec2> step(k);
  double heading = 0;
  for (size_t i = 0; i < k; ++i) {
    heading += input.turn[i];
    step[i] = {input.seg_len[i] * std::cos(heading), input.seg_len[i] * std::sin(heading)};
  }
  std::vector<Vec2> partial(k + 1);
  for (size_t i = 0; i < k; ++i) partial[i + 1] = partial[i] + step[i];
  Vec2 period = partial[k];
  if (norm(period) <= 1e-12 * total) bad("period vector vanishes");

  Development dev;
  dev.block_size = static_cast<int>(k);
  dev.copies = input.copies;
  dev.period = period;
  dev.seg_len = input.seg_len;
  dev.turn = input.turn;

  Vec2 base{};
  for (int b = 0; b < input.copies; ++b) {
    for (size_t i = 0; i < k; ++i) {
      dev.pts.push_back(base + partial[i]);
      dev.slit.push_back(input.slit[i]);
      dev.label.push_back(input.label.empty() ? std::string() : input.label[i]);
    }
    base = base + period;
  }
  dev.pts.push_back(base);
  dev.slit.push_back(input.slit[0]);
  dev.label.push_back(input.label.empty() ? std::string() : input.label[0]);

  bool straight = true;
  for (double t : input.turn) straight = straight && t == 0.0;
  if (straight && !input.exact_len.empty()) {
    Rat sum = 0;
    for (const Rat& r : input.exact_len) sum += r;
    dev.exact_period_len = sum;
  }

  double plen = norm(period);
  Vec2 u{period.x / plen, period.y / plen};
  for (const Vec2& p : dev.pts) {
    double eta = u.x * p.y - u.y * p.x;
    dev.strip_lo = std::min(dev.strip_lo, eta);
    dev.strip_hi = std::max(dev.strip_hi, eta);
  }
  return dev;
}

// ---------------------------------------------------------------------------
// Straightening

namespace {

struct Gate {
  double xi = 0;
  double eta = 0;
  int side = 0;  // +1: strip cut above the tip, path must stay at or below
  Vec2 tip{};
};

bool gate_allows(const Gate& g, double eta, double tol) {
  return g.side < 0 ? eta >= g.eta - tol : eta <= g.eta + tol;
}

}  // namespace

Straightened straighten(const Development& dev) {
  const int k = dev.block_size;
  const double plen = norm(dev.period);
  Vec2 u{dev.period.x / plen, dev.period.y / plen};
  auto xi_of = [&](Vec2 p) { return dot(p, u); };
  auto eta_of = [&](Vec2 p) { return u.x * p.y - u.y * p.x; };
  const double geom_tol = 1e-9 * std::max(1.0, plen);
  const double tie_eps = 1e-12 * std::max(1.0, plen);

  bool any_slit = false;
  for (int s : dev.slit) any_slit = any_slit || s != 0;

  Straightened out;
  if (!any_slit) {
    out.axis = {dev.pts.front(), dev.pts.back()};
    out.translation_length = plen;
    out.exact_translation_length = dev.exact_period_len;
    out.anchor = 0;
    // Against the straight line the extreme vertex offset is the exact
    // Hausdorff distance: offsets vary linearly along input segments, and
    // the input's projection sweeps the whole line.
    out.hausdorff = std::max(std::abs(dev.strip_lo), std::abs(dev.strip_hi));
    return out;
  }

  // Anchor: a slit vertex whose incoming turn bends toward its slit (the
  // vertex is pinned on the straightened path), closest to its nearer
  // bounding line; without such a vertex every slit vertex is a candidate.
  int anchor_pos = -1;
  bool anchor_toward = false;
  double anchor_dist = 0;
  for (int i = 0; i < k; ++i) {
    if (dev.slit[i] == 0) continue;
    bool toward = dev.turn[i] != 0 && (dev.turn[i] > 0) == (dev.slit[i] > 0);
    double eta = eta_of(dev.pts[i]);
    double line_dist = std::min(eta - dev.strip_lo, dev.strip_hi - eta);
    bool better;
    if (anchor_pos < 0)
      better = true;
    else if (toward != anchor_toward)
      better = toward;
    else
      better = line_dist < anchor_dist;
    if (better) {
      anchor_pos = i;
      anchor_toward = toward;
      anchor_dist = line_dist;
    }
  }
  const int a = anchor_pos;
  const Vec2 S = dev.pts[a], E = dev.pts[a + k];

  // Cuts strictly inside the anchor window. A down slit severs the strip
  // below its tip at that abscissa, so any admissible path passes at or
  // above the tip; up slits mirror this. The cut family is periodic, so a
  // vertex whose own abscissa falls outside the window can still project a
  // translate into it; cuts landing on the window boundary only constrain
  // the endpoint there.
  std::vector<Gate> gates;
  auto add_gate = [&](Vec2 tip, int side) {
    Gate g{xi_of(tip), eta_of(tip), side, tip};
    if (g.xi <= xi_of(S) + tie_eps) {
      if (g.xi >= xi_of(S) - tie_eps && !gate_allows(g, eta_of(S), geom_tol))
        throw std::runtime_error("slits sever the strip at the anchor");
      return;
    }
    if (g.xi >= xi_of(E) - tie_eps) {
      if (g.xi <= xi_of(E) + tie_eps && !gate_allows(g, eta_of(E), geom_tol))
        throw std::runtime_error("slits sever the strip at the anchor");
      return;
    }
    gates.push_back(g);
  };
  for (int j = a + 1; j < a + k; ++j) {
    if (dev.slit[j] == 0) continue;
    double xi_j = xi_of(dev.pts[j]);
    int s_lo = static_cast<int>(std::floor((xi_of(S) - xi_j) / plen)) - 1;
    int s_hi = static_cast<int>(std::ceil((xi_of(E) - xi_j) / plen)) + 1;
    for (int s = s_lo; s <= s_hi; ++s)
      add_gate(dev.pts[j] + static_cast<double>(s) * dev.period, dev.slit[j]);
  }
  std::sort(gates.begin(), gates.end(), [](const Gate& l, const Gate& r) {
    return l.xi < r.xi;
  });
  for (size_t i = 0; i + 1 < gates.size(); ++i) {
    if (gates[i + 1].xi - gates[i].xi > tie_eps) continue;
    bool conflict = gates[i].side != gates[i + 1].side &&
                    !gate_allows(gates[i], gates[i + 1].eta, geom_tol) &&
                    !gate_allows(gates[i + 1], gates[i].eta, geom_tol);
    if (conflict) throw std::runtime_error("slits sever the strip (no admissible path)");
  }

  // Taut path: shortest path from S to E whose corners sit on cut tips.
  // Nodes in abscissa order, edges checked against every cut in between.
  struct Node {
    Vec2 p{};
    double xi = 0;
    double eta = 0;
  };
  std::vector<Node> nodes{{S, xi_of(S), eta_of(S)}};
  for (const Gate& g : gates) nodes.push_back({g.tip, g.xi, g.eta});
  nodes.push_back({E, xi_of(E), eta_of(E)});
  const size_t n = nodes.size();

  auto visible = [&](size_t i, size_t j) {
    if (nodes[j].xi <= nodes[i].xi + tie_eps) return false;
    for (const Gate& g : gates) {
      if (g.xi <= nodes[i].xi + tie_eps || g.xi >= nodes[j].xi - tie_eps) continue;
      double t = (g.xi - nodes[i].xi) / (nodes[j].xi - nodes[i].xi);
      double eta = nodes[i].eta + t * (nodes[j].eta - nodes[i].eta);
      if (!gate_allows(g, eta, geom_tol)) return false;
    }
    return true;
  };
  auto node_ok = [&](size_t i) {
    for (const Gate& g : gates)
      if (std::abs(g.xi - nodes[i].xi) <= tie_eps && !gate_allows(g, nodes[i].eta, geom_tol))
        return false;
    return true;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<int> parent(n, -1);
  if (!node_ok(0) || !node_ok(n - 1))
    throw std::runtime_error("slits sever the strip at the anchor");
  dist[0] = 0;
  for (size_t i = 0; i < n; ++i) {
    if (dist[i] == inf || !node_ok(i)) continue;
    for (size_t j = i + 1; j < n; ++j) {
      if (!node_ok(j) || !visible(i, j)) continue;
      double w = dist[i] + norm(nodes[j].p - nodes[i].p);
      if (w < dist[j]) {
        dist[j] = w;
        parent[j] = static_cast<int>(i);
      }
    }
  }
  if (dist[n - 1] == inf)
    throw std::runtime_error("slits sever the strip (no admissible path)");

  for (int at = static_cast<int>(n) - 1; at >= 0; at = parent[at]) {
    out.axis.push_back(nodes[at].p);
    if (at == 0) break;
  }
  std::reverse(out.axis.begin(), out.axis.end());
  out.translation_length = dist[n - 1];
  out.anchor = a;
  if (out.axis.size() == 2) out.exact_translation_length = dev.exact_period_len;

  std::vector<Vec2> window(dev.pts.begin() + a, dev.pts.begin() + a + k + 1);
  auto xi_span = [&](const std::vector<Vec2>& c) {
    double lo = xi_of(c[0]), hi = lo;
    for (const Vec2& p : c) {
      lo = std::min(lo, xi_of(p));
      hi = std::max(hi, xi_of(p));
    }
    return hi - lo;
  };
  int reach = static_cast<int>(std::ceil((xi_span(window) + xi_span(out.axis)) / plen)) + 1;
  reach = std::clamp(reach, 1, 16);
  out.hausdorff = std::max(directed_hausdorff(window, tiled_segments(out.axis, dev.period, reach)),
                           directed_hausdorff(out.axis, tiled_segments(window, dev.period, reach)));
  return out;
}

LengthBound length_bound_check(const Development& dev, const Straightened& straightened,
                               double eps) {
  const double plen = norm(dev.period);
  Vec2 u{dev.period.x / plen, dev.period.y / plen};
  double total = 0;
  LengthBound lb;
  for (int i = 0; i < dev.block_size; ++i) {
    double proj = dot(dev.pts[i + 1] - dev.pts[i], u);
    lb.max_segment_excess = std::max(lb.max_segment_excess, dev.seg_len[i] - proj);
    total += dev.seg_len[i];
  }
  lb.residual = total - straightened.translation_length;
  const double tol = 1e-9 * std::max(1.0, total);
  lb.ok = lb.max_segment_excess <= 2 * eps + tol && lb.residual >= -tol &&
          lb.residual <= 8 * eps + tol;
  return lb;
}

// ---------------------------------------------------------------------------
// Export

std::string development_csv(const Development& dev) {
  std::string out = "index,label,x,y,slit\n";
  for (size_t i = 0; i < dev.pts.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += dev.label[i];
    out += ',';
    out += fmt_num("%.17g", dev.pts[i].x);
    out += ',';
    out += fmt_num("%.17g", dev.pts[i].y);
    out += ',';
    out += std::to_string(dev.slit[i]);
    out += '\n';
  }
  return out;
}

std::string development_svg(const Development& dev, const Straightened* axis) {
  double x0 = dev.pts[0].x, x1 = x0, y0 = dev.pts[0].y, y1 = y0;
  auto grow = [&](Vec2 p) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  };
  for (const Vec2& p : dev.pts) grow(p);
  if (axis)
    for (const Vec2& p : axis->axis) grow(p);

  const double plen = norm(dev.period);
  Vec2 u{dev.period.x / plen, dev.period.y / plen};
  Vec2 w{-u.y, u.x};
  // Strip boundary endpoints, stretched slightly beyond the drawing.
  double xi_lo = 0, xi_hi = 0;
  for (const Vec2& p : dev.pts) {
    xi_lo = std::min(xi_lo, dot(p, u));
    xi_hi = std::max(xi_hi, dot(p, u));
  }
  double reach = 0.03 * (xi_hi - xi_lo);
  for (double off : {dev.strip_lo, dev.strip_hi}) {
    grow((xi_lo - reach) * u + off * w);
    grow((xi_hi + reach) * u + off * w);
  }

  double span = std::max({x1 - x0, y1 - y0, 1e-9});
  double tick = 0.04 * span;
  double pad = 0.05 * span;
  double scale = 840.0 / (x1 - x0 + 2 * pad);
  auto X = [&](double x) { return (x - x0 + pad) * scale; };
  auto Y = [&](double y) { return (y1 - y + pad) * scale; };
  double width = 840.0;
  double height = (y1 - y0 + 2 * pad) * scale;

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " +
                  fmt_num("%.6g", width) + " " + fmt_num("%.6g", height) + "\">\n";
  auto line = [&](Vec2 aa, Vec2 bb, const char* style) {
    s += "  <line x1=\"" + fmt_num("%.6g", X(aa.x)) + "\" y1=\"" + fmt_num("%.6g", Y(aa.y)) +
         "\" x2=\"" + fmt_num("%.6g", X(bb.x)) + "\" y2=\"" + fmt_num("%.6g", Y(bb.y)) +
         "\" " + style + "/>\n";
  };
  const char* strip_style =
      "stroke=\"#999999\" stroke-width=\"1\" stroke-dasharray=\"6 4\" fill=\"none\"";
  for (double off : {dev.strip_lo, dev.strip_hi})
    line((xi_lo - reach) * u + off * w, (xi_hi + reach) * u + off * w, strip_style);

  s += "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (size_t i = 0; i < dev.pts.size(); ++i) {
    if (i) s += ' ';
    s += fmt_num("%.6g", X(dev.pts[i].x)) + "," + fmt_num("%.6g", Y(dev.pts[i].y));
  }
  s += "\"/>\n";

  const char* slit_style = "stroke=\"#d62728\" stroke-width=\"1.5\" fill=\"none\"";
  for (size_t i = 0; i < dev.pts.size(); ++i) {
    if (dev.slit[i] == 0) continue;
    Vec2 dir = dev.slit[i] > 0 ? w : Vec2{-w.x, -w.y};
    line(dev.pts[i], dev.pts[i] + tick * dir, slit_style);
  }

  if (axis) {
    s += "  <polyline fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1.5\" "
         "stroke-dasharray=\"2 3\" points=\"";
    for (size_t i = 0; i < axis->axis.size(); ++i) {
      if (i) s += ' ';
      s += fmt_num("%.6g", X(axis->axis[i].x)) + "," + fmt_num("%.6g", Y(axis->axis[i].y));
    }
    s += "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace raag
