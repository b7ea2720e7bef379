#pragma once

// Free groups acting on the universal cover of a metric rose: a simplicial
// tree whose edges carry positive generator lengths. Vertices are group
// elements (freely reduced words); axes of hyperbolic elements are edge
// lines through vertices, so bridges between axes run vertex to vertex and
// every distance is an exact Quadratic.

#include <optional>
#include <utility>
#include <vector>

#include "raag/quadratic.hpp"
#include "raag/words.hpp"

namespace raag {

class MetricRose {
 public:
  /// gens: (vertex index, petal length) pairs; lengths must be positive and
  /// share a compatible radicand.
  MetricRose(DefiningGraph graph, std::vector<std::pair<int, Quadratic>> gens);

  const DefiningGraph& graph() const { return graph_; }
  const std::vector<int>& gens() const { return gens_; }
  bool contains(int v) const;
  const Quadratic& gen_length(int v) const;
  Quadratic letter_length(const Letter& l) const { return gen_length(l.v); }

  /// Word must be supported on the rose's generators.
  void check_word(const Word& w) const;

 private:
  DefiningGraph graph_;
  std::vector<int> gens_;
  std::vector<Quadratic> lengths_;
};

/// Free (no commutation) reduction and cyclic reduction.
Word free_reduce(Word w);
struct FreeCyclic {
  Word conjugator;
  Word core;
};
FreeCyclic free_cyclic_reduce(const Word& w);

/// Sum of letter lengths of the freely reduced word: d(1, w) in the tree.
Quadratic word_length(const MetricRose& rose, const Word& w);
/// d(x, y) between tree vertices named by group elements.
Quadratic vertex_distance(const MetricRose& rose, const Word& x, const Word& y);

/// Translation length: sum of letter lengths of the cyclic core.
Quadratic tree_length(const MetricRose& rose, const Word& w);

struct Axis {
  Word base;   // a vertex on the axis
  Word cycle;  // cyclically reduced core; the axis is base * (cycle line)
};

/// Axis of a hyperbolic element; throws std::invalid_argument if w is
/// trivial (elliptic).
Axis axis(const MetricRose& rose, const Word& w);

/// Distance from vertex x to the axis of w, via d(x, wx) = l(w) + 2 d(x, A).
Quadratic dist_to_axis(const MetricRose& rose, const Word& x, const Word& w);
/// Nearest axis vertex to x.
Word project_to_axis(const MetricRose& rose, const Word& x, const Word& w);

struct AxisGap {
  Quadratic distance;             // 0 when the axes meet
  Quadratic overlap;              // length of the intersection segment
  bool infinite_overlap = false;  // the axes coincide
  // Translation agreement along a positive-length overlap: +1 same
  // direction, -1 opposite, 0 when there is no segment to compare on.
  int direction = 0;
  // Disjoint: the unique nearest vertices (p1 on axis(w1), p2 on axis(w2)).
  // Meeting: the endpoints of the intersection segment, ordered along
  // axis(w1)'s translation direction (equal for a point intersection).
  Word p1, p2;
};

AxisGap axis_gap(const MetricRose& rose, const Word& w1, const Word& w2);

}  // namespace raag
