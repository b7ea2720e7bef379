#pragma once

// The CAT(0) rectangle complex X = T1 x T2 for a join V1 * V2: a product of
// two metric-rose trees. The star-of-a-vertex case is the same product with
// a rank-1 first factor (a line scaled by the center's length). Lengths in X
// are hypotenuses of factor tree lengths; minsets of maximal Z^2 subgroups
// are flats axis x axis, and all of their intersection and distance data is
// exact.

#include <optional>
#include <utility>
#include <vector>

#include "raag/scalar.hpp"
#include "raag/tree_geometry.hpp"

namespace raag {

// A point of a factor tree: a vertex, or a rational fraction of the way
// along an edge leaving it.
struct TreePoint {
  Word vertex;
  std::optional<Letter> edge;
  Rat offset = 0;  // in (0,1) when edge is set
};

struct ProductPoint {
  TreePoint f1, f2;
};

struct Minset {
  BasicZ2 subgroup;
  Word f1_word, f2_word;  // conjugated generators, one per factor
  Axis factor1, factor2;
  Quadratic l1, l2;  // lattice: translation lengths of the basic generators
};

struct RectangleReport {
  enum class Kind { empty, point, segment, rectangle, strip, line, plane };
  Kind kind = Kind::empty;
  Quadratic r1, r2;               // finite side lengths per factor
  bool inf1 = false, inf2 = false;
  int dir1 = 0, dir2 = 0;         // translation agreement on positive sides
  std::pair<Word, Word> anchor;   // corner (lo,lo); nearest M1 vertex if empty
  std::pair<Word, Word> anchor2;  // corner (hi,hi); nearest M2 vertex if empty
  Length distance;                // zero unless empty
};

const char* kind_name(RectangleReport::Kind k);

struct SpanningGeodesic {
  Length distance;
  std::pair<Word, Word> from, to;  // product vertices on M1, M2
};

struct CornerCover {
  std::optional<long long> k;  // least witness exponent, if found within K
  Word g;                      // h^k p^k at the reported k (or the last tried)
  Quadratic overlap_h, overlap_p;
  std::vector<std::pair<Quadratic, Quadratic>> growth;  // overlaps per k
};

class ProductComplex {
 public:
  /// Product mode. lengths assigns a positive value to every join vertex.
  ProductComplex(DefiningGraph graph, Join join,
                 const std::vector<std::pair<int, Quadratic>>& lengths);

  /// Star mode: factor 1 is the line of the center vertex.
  static ProductComplex star(DefiningGraph graph, int center,
                             const std::vector<std::pair<int, Quadratic>>& lengths);

  const DefiningGraph& graph() const { return graph_; }
  const Join& join() const { return join_; }
  const MetricRose& rose1() const { return rose1_; }
  const MetricRose& rose2() const { return rose2_; }
  bool star_mode() const { return star_mode_; }

  /// Factor projections (side1 letters, side2 letters); throws if the word
  /// leaves the join.
  std::pair<Word, Word> split(const Word& w) const;

  /// Translation length: hypot of the factor tree lengths.
  Length length(const Word& w) const;

  Minset minset(const BasicZ2& H) const;

  RectangleReport minset_intersection(const Minset& m1, const Minset& m2) const;

  SpanningGeodesic minset_distance(const Minset& m1, const Minset& m2) const;

  /// True iff both factor locations are vertices of valence >= 3 (factor
  /// rank >= 2); never true in star mode or on edge interiors.
  bool is_corner(const ProductPoint& p) const;

  /// Star mode: least k <= K with axis(h^k p^k) overlapping axis(h) longer
  /// than l(h) and axis(p) longer than l(p) in the tree factor. Requires
  /// distinct primitive roots.
  CornerCover corner_cover_witness(const Word& h, const Word& p, long long K) const;

 private:
  DefiningGraph graph_;
  Join join_;
  MetricRose rose1_, rose2_;
  bool star_mode_ = false;
};

/// The same Z^2 data conjugated by w: minset translate w * M_H.
BasicZ2 conjugated(const DefiningGraph& g, const BasicZ2& H, const Word& w);

}  // namespace raag
