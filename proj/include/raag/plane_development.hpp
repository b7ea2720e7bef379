#pragma once

// Planar development machinery for piecewise axes. Four stages: classify the
// link at a spanning-geodesic endpoint against the two model graphs, locate
// lattice points near a target line by continued fractions, develop a
// periodic piecewise geodesic onto the plane with slit annotations, and
// straighten the development to a taut path, certifying how much length the
// straightening recovers.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "raag/quadratic.hpp"

namespace raag {

// ---------------------------------------------------------------------------
// Link classification

/// Undirected simple graph with every edge of length pi/2; vertex links of
/// rectangle complexes live here. Vertices are 0..n-1.
struct LinkGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  bool adjacent(int a, int b) const;
};

/// A point of a LinkGraph: either a vertex (w < 0) or the interior of the
/// edge {u, w}.
struct LinkPoint {
  int u = -1;
  int w = -1;

  static LinkPoint vertex(int v) { return {v, -1}; }
  static LinkPoint edge_interior(int a, int b) { return {a, b}; }
  bool is_vertex() const { return w < 0; }
};

/// Input to classify_link: a link graph, a distinguished 4-cycle (the link of
/// the endpoint inside its own minset, a circle of length 2*pi), and the
/// incoming direction of the spanning geodesic.
struct LinkConfiguration {
  LinkGraph graph;
  std::array<int, 4> circle;  // 4-cycle c0-c1-c2-c3-c0
  LinkPoint t;
};

enum class LinkClass { type1, type2 };

/// One of the four attachment slots of the slit model graph: endpoint `end`
/// (0 = the distinguished endpoint, 1 = the other) joined to the circle
/// vertex at position `circle_pos` of the relabeled cycle. Slots 0/2 belong
/// to end 0, slots 1/3 to end 1. An absent slot is a fictitious edge: a slit
/// in the developed strip.
struct ModelEdge {
  int end = 0;
  int circle_pos = 0;
  bool present = false;
};

/// Classification result with an explicit identification: `circle[i]` is the
/// input vertex playing position i of the model cycle and `ends` the vertices
/// playing the two free endpoints (ends[1] < 0 when t is a vertex, in which
/// case both end-1 slots are necessarily absent). For the rigid model the
/// attachment pattern is forced, so `attachments` is only populated for the
/// slit model.
struct LinkReport {
  LinkClass cls = LinkClass::type2;
  std::array<int, 4> circle{};
  std::array<int, 2> ends{-1, -1};
  std::vector<ModelEdge> attachments;

  std::vector<ModelEdge> fictitious() const;
};

/// Decide whether the span of the circle and t is the rigid model (t interior
/// to an edge whose endpoints attach to one antipodal pair, one vertex each)
/// or embeds into the slit model. Throws std::invalid_argument when the
/// configuration is malformed: graph not simple or not triangle-free, the
/// circle not a chordless 4-cycle, or t within distance pi/2 of the circle
/// (t or its edge touching a circle vertex).
LinkReport classify_link(const LinkConfiguration& config);

// ---------------------------------------------------------------------------
// Diophantine approximation of a line by lattice points

/// A lattice point (m*p, n*q) near the target line, with its exact squared
/// perpendicular distance to the line and the side it lies on (+1 above the
/// direction vector, -1 below, 0 on the line).
struct DirichletPoint {
  Int m, n;
  Quadratic dist2;
  double residual = 0;  // sqrt(dist2), approximate
  int side = 0;
};

/// First continued-fraction convergent (m, n) whose lattice point (m*p, n*q)
/// lies within perpendicular distance eps of the line through the origin in
/// direction (dx, dy); |m| is minimal among convergents meeting the bound.
/// When `side` is nonzero, only points on that side (or exactly on the line)
/// are accepted; consecutive convergents alternate sides, so this costs at
/// most one extra step. Spacings p, q must be positive, (dx, dy) nonzero,
/// eps > 0. The residual test is exact: squared distance is compared against
/// eps^2 in the quadratic field, with eps converted to an exact rational.
DirichletPoint dirichlet_point(const Quadratic& p, const Quadratic& q,
                               const Quadratic& dx, const Quadratic& dy,
                               double eps, int side = 0);

/// The convergent walk behind dirichlet_point, in order: the two seed points
/// (0,1) and (1,0), then the continued-fraction convergents of the slope.
/// Stops after `count` entries or when a convergent hits the line exactly.
std::vector<DirichletPoint> dirichlet_convergents(const Quadratic& p,
                                                  const Quadratic& q,
                                                  const Quadratic& dx,
                                                  const Quadratic& dy,
                                                  int count);

// ---------------------------------------------------------------------------
// Development of a periodic piecewise geodesic onto the plane

struct Vec2 {
  double x = 0;
  double y = 0;
};

/// One fundamental block of a periodic piecewise geodesic, repeated `copies`
/// times. Vertex i of each block carries the turn applied before segment i
/// (radians, positive = left) and an optional slit side (+1 the strip is cut
/// above the vertex, -1 below, 0 none). Exact lengths are optional and only
/// consulted when every turn is zero, where the developed period length is a
/// plain sum of rationals.
struct DevelopInput {
  std::vector<double> seg_len;
  std::vector<Rat> exact_len;  // empty, or one exact length per segment
  std::vector<double> turn;
  std::vector<int> slit;
  std::vector<std::string> label;  // optional vertex labels for export
  int copies = 2;

  static DevelopInput exact(std::vector<Rat> lengths, std::vector<double> turns,
                            std::vector<int> slits, int copies);
};

/// A developed piecewise geodesic: `copies` blocks laid out in the plane.
/// Points are indexed 0..copies*block_size; the strip is bounded by the two
/// lines parallel to `period` through offsets strip_lo and strip_hi (signed
/// perpendicular offsets from the line through pts[0]).
struct Development {
  std::vector<Vec2> pts;
  std::vector<int> slit;            // per point
  std::vector<std::string> label;   // per point
  Vec2 period{};
  std::optional<Rat> exact_period_len;
  double strip_lo = 0;
  double strip_hi = 0;
  int block_size = 0;
  int copies = 0;
  std::vector<double> seg_len;      // one block, as supplied
  std::vector<double> turn;         // one block, as supplied

  double width() const { return strip_hi - strip_lo; }
};

/// Lay the periodic piecewise geodesic out in the plane. The heading of each
/// segment depends only on its position within the block (the turns must sum
/// to zero over a block, tolerance 1e-9), which makes all blocks exact
/// translates of each other. Throws std::invalid_argument on inconsistent
/// data: negative or all-zero lengths, |turn| >= pi, nonzero net turn, a zero
/// period vector, or fewer than two copies.
Development develop(const DevelopInput& input);

/// The taut replacement for a development and its certificates.
struct Straightened {
  std::vector<Vec2> axis;      // one period of the taut path
  double translation_length = 0;
  std::optional<Rat> exact_translation_length;
  double hausdorff = 0;        // between one input period and the taut path
  int anchor = -1;             // polyline index the taut period starts at
};

/// Straighten a development. Without slits the result is the straight line
/// through the endpoints and the translation length is |period| (exact when
/// the development was exact). With slits, the strip is cut at every slit
/// vertex (downward cuts sever everything below the vertex at that abscissa,
/// upward cuts everything above) and the result is one period of the
/// shortest path between translates of an anchor vertex that crosses no cut.
/// The anchor is the slit vertex whose incoming turn bends toward its slit,
/// closest to its nearer bounding line; if no vertex bends toward a slit,
/// all slit vertices are candidates. Throws std::runtime_error when the cuts
/// sever the strip (no admissible path).
Straightened straighten(const Development& dev);

/// Certificate comparing a development against its straightening: every
/// segment may exceed its projection on the axis direction by at most
/// 2*eps, and the total length lost by straightening, residual
/// = (sum of segment lengths) - translation_length per period, must lie in
/// [0, 8*eps].
struct LengthBound {
  bool ok = false;
  double residual = 0;
  double max_segment_excess = 0;
};

LengthBound length_bound_check(const Development& dev,
                               const Straightened& straightened, double eps);

// ---------------------------------------------------------------------------
// Export

/// CSV point list: index,label,x,y,slit with %.17g coordinates.
std::string development_csv(const Development& dev);

/// Standalone SVG: the developed polyline, slit ticks, the bounding strip,
/// and optionally the straightened axis. Deterministic byte-for-byte.
std::string development_svg(const Development& dev,
                            const Straightened* axis = nullptr);

}  // namespace raag
