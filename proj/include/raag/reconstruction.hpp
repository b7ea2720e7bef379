#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "raag/defining_graph.hpp"
#include "raag/oracle.hpp"
#include "raag/product_geometry.hpp"
#include "raag/scalar.hpp"
#include "raag/words.hpp"

namespace raag {

/// Result of maximizing l(gh) - l(g) - l(h) over the lattice ball
///   g = u g1^i g2^j u^-1,  h = v h1^k h2^m v^-1,
/// with both elements nontrivial and all exponents bounded by the budget.
/// For minsets at distance d the supremum over the whole lattice is exactly
/// 2d, so a nonpositive best declares the minsets intersecting. The search
/// is complete over the sampled ball; the identification of the ball maximum
/// with the supremum is the documented completeness assumption.
struct GapEstimate {
  GapValue best;                        // exact value at the winning pair
  std::array<long long, 4> exponents{}; // (i, j, k, m) of the witness
  Word g, h;                            // witness words, conjugated into place
  long long budget = 0;
  bool attained = false;                // best equals the 2d candidate exactly
  std::optional<Length> twice_distance; // independent 2d candidate, when derivable
  std::vector<GapValue> shell_best;     // best over max-norm shells 1..budget

  bool intersecting() const { return best.sign() <= 0; }
};

/// Sup search over the lattice ball. Routes through a factor-separable fast
/// sweep (exact tables at the boundary, certified affine fill inside, double
/// filter, exact re-verification of every finalist against the oracle) and
/// falls back to the direct per-pair sweep when the oracle defeats the
/// certification. Witness ties break to the smallest max-norm shell and then
/// to the lexicographically least exponent tuple, independent of thread
/// count and of the budget.
GapEstimate minset_gap(const LengthOracle& oracle, const DefiningGraph& g,
                       const BasicZ2& G, const BasicZ2& H, long long budget);

/// Serial reference sweep: every pair evaluated through the oracle, every
/// comparison exact. Same results as minset_gap, kept for tests and the
/// benchmark. Cost grows like budget^4; budgets above 20 are rejected.
GapEstimate minset_gap_reference(const LengthOracle& oracle, const DefiningGraph& g,
                                 const BasicZ2& G, const BasicZ2& H, long long budget);

/// Certificate for one finite side of a reconstructed rectangle: a primitive
/// direction g in G satisfying the doubling criterion
///   l(g^t) + d(R, g^t R) == d(R, g^(2t) R)
/// exactly, its partner h in H, and the recovered side length
/// r = l(g^t) - d(R, g^t R).
struct GridlineData {
  Word g, h;          // primitive gridline generators on the two sides
  long long t = 1;    // power used in the doubling certificate
  Quadratic r;        // side length
  int direction = 0;  // +1 when g and h translate the side the same way
};

/// Shape of M_G meets M_H recovered from length data alone. Field meanings
/// match RectangleReport so the two routes can be compared literally.
struct ReconstructedRectangle {
  RectangleReport::Kind kind = RectangleReport::Kind::empty;
  Quadratic r1, r2;                // finite side lengths (0 when point-like)
  bool inf1 = false, inf2 = false; // infinite sides (word-level intersection)
  int dir1 = 0, dir2 = 0;          // direction matches, 0 when undefined
  std::optional<GridlineData> side1, side2;  // certificates for finite sides
  Word shared1, shared2;           // generators of infinite sides, else empty
  bool complete = true;            // false when the budget ran out first
  std::string note;                // what is missing when partial
};

/// Reconstructs the intersection rectangle of two maximal Z^2 minsets from
/// oracle lengths: word-level detection of shared factor directions, a point
/// test (l(g) = d(M_H, g M_H) for every sampled g), the doubling criterion
/// for side lengths, and the -2r / -r distance equations for directions.
/// Requires minset_gap to declare the minsets intersecting; throws
/// std::invalid_argument otherwise and std::runtime_error when the oracle
/// contradicts itself.
ReconstructedRectangle reconstruct_rectangle(const LengthOracle& oracle,
                                             const DefiningGraph& g,
                                             const BasicZ2& G, const BasicZ2& H,
                                             long long budget);

/// One row of a star reconstruction: the signed translation along the center
/// axis and the leftover radial length in the link tree, recovered from
///   lambda(g) = (l(gv)^2 - l(g)^2 - l(v)^2) / (2 l(v))
///   radial(g) = sqrt(l(g)^2 - lambda(g)^2)
/// in exact arithmetic.
struct StarSample {
  Word g;
  Quadratic lambda;
  Length radial;
};

/// Evaluates the star formulas on each sample word. The center's length must
/// be a field scalar; data with l(g)^2 < lambda(g)^2 beyond exact zero throws
/// std::domain_error (no star action can produce it).
std::vector<StarSample> star_reconstruct(const LengthOracle& oracle,
                                         const DefiningGraph& g, int center,
                                         const std::vector<Word>& sample);

/// Affine identification of one minset between two models. Frames are signs
/// per factor: +1 means the models orient that gridline the same way.
struct ChartRecord {
  BasicZ2 subgroup;
  Quadratic l1, l2;             // lattice lengths, equal in both models
  std::array<int, 2> frame{1, 1};
};

/// Overlap data two charts agreed on, checked in both models.
struct GlueRecord {
  std::size_t chart_a = 0, chart_b = 0;
  RectangleReport::Kind kind = RectangleReport::Kind::empty;
  Quadratic r1, r2;
  int dir1 = 0, dir2 = 0;
};

/// First word on which the two length functions differ.
struct MismatchReport {
  Word witness;
  Length value_a, value_b;
};

struct IsometryResult {
  bool ok = false;
  std::vector<ChartRecord> charts;
  std::vector<GlueRecord> gluing;
  std::optional<MismatchReport> mismatch;       // set when the models differ
  std::optional<std::string> coverage_error;    // set when the family is too thin
};

/// Decides whether two length functions are realized by the same complex, at
/// desk scale: compares all short words (length <= 2 first, so the witness is
/// minimal), builds a chart per family member, reconstructs every overlap
/// rectangle in both models, and verifies `samples` seeded random words and
/// minset distances. Any exact disagreement yields a MismatchReport; a family
/// member whose minset meets no other chart yields a coverage error.
IsometryResult build_isometry(const LengthOracle& a, const LengthOracle& b,
                              const DefiningGraph& g,
                              const std::vector<BasicZ2>& family, int samples,
                              unsigned seed = 1);

}  // namespace raag
