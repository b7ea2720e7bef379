#include "raag/product_geometry.hpp"

#include <algorithm>
#include <stdexcept>

#include "raag/words.hpp"

namespace raag {
namespace {

bool in_side(const std::vector<int>& side, int v) {
  return std::binary_search(side.begin(), side.end(), v);
}

std::vector<std::pair<int, Quadratic>> side_lengths(
    const std::vector<int>& side, const std::vector<std::pair<int, Quadratic>>& lengths) {
  std::vector<std::pair<int, Quadratic>> out;
  for (const auto& [v, l] : lengths)
    if (in_side(side, v)) out.push_back({v, l});
  return out;
}

// Canonical point of the factor intersection: the basepoint projection when
// it lands in the overlap, else the overlap endpoint nearer the basepoint.
Word common_point(const MetricRose& rose, const AxisGap& gap, const Word& axis_word) {
  Word cand = project_to_axis(rose, Word{}, axis_word);
  if (gap.infinite_overlap) return cand;
  const Word& lo = gap.p1;
  const Word& hi = gap.p2;
  Quadratic span = vertex_distance(rose, lo, hi);
  Quadratic through = vertex_distance(rose, lo, cand) + vertex_distance(rose, cand, hi);
  if (through == span) return cand;
  Quadratic to_lo = word_length(rose, lo);
  Quadratic to_hi = word_length(rose, hi);
  return cmp(to_lo, to_hi) <= 0 ? lo : hi;
}

// Nearest-vertex pair (on axis 1, on axis 2) for one factor; a common point
// twice when the axes meet.
std::pair<Word, Word> factor_nearest(const MetricRose& rose, const AxisGap& gap,
                                     const Word& w1) {
  if (gap.distance.sign() > 0) return {gap.p1, gap.p2};
  Word s = common_point(rose, gap, w1);
  return {s, s};
}

enum class FactorState { point, segment, line };

FactorState factor_state(const AxisGap& gap) {
  if (gap.infinite_overlap) return FactorState::line;
  return gap.overlap.sign() > 0 ? FactorState::segment : FactorState::point;
}

RectangleReport::Kind kind_of(FactorState a, FactorState b) {
  using K = RectangleReport::Kind;
  using F = FactorState;
  if (a == F::point) return b == F::point ? K::point : (b == F::segment ? K::segment : K::line);
  if (a == F::segment)
    return b == F::point ? K::segment : (b == F::segment ? K::rectangle : K::strip);
  return b == F::point ? K::line : (b == F::segment ? K::strip : K::plane);
}

}  // namespace

const char* kind_name(RectangleReport::Kind k) {
  switch (k) {
    case RectangleReport::Kind::empty: return "empty";
    case RectangleReport::Kind::point: return "point";
    case RectangleReport::Kind::segment: return "segment";
    case RectangleReport::Kind::rectangle: return "rectangle";
    case RectangleReport::Kind::strip: return "strip";
    case RectangleReport::Kind::line: return "line";
    case RectangleReport::Kind::plane: return "plane";
  }
  return "?";
}

ProductComplex::ProductComplex(DefiningGraph graph, Join join,
                               const std::vector<std::pair<int, Quadratic>>& lengths)
    : graph_(std::move(graph)),
      join_(std::move(join)),
      rose1_(graph_, side_lengths(join_.side1, lengths)),
      rose2_(graph_, side_lengths(join_.side2, lengths)) {
  if (join_.side1.empty() || join_.side2.empty())
    throw std::invalid_argument("join sides must be nonempty");
  for (int u : join_.side1)
    for (int v : join_.side2)
      if (!graph_.adjacent(u, v))
        throw std::invalid_argument("join is not complete bipartite: " + graph_.label(u) +
                                    "-" + graph_.label(v));
  for (const auto& [v, l] : lengths) {
    (void)l;
    if (!in_side(join_.side1, v) && !in_side(join_.side2, v))
      throw std::invalid_argument("length assigned outside the join: " + graph_.label(v));
  }
  if (rose1_.gens().size() != join_.side1.size() || rose2_.gens().size() != join_.side2.size())
    throw std::invalid_argument("every join vertex needs a length");
}

ProductComplex ProductComplex::star(DefiningGraph graph, int center,
                                    const std::vector<std::pair<int, Quadratic>>& lengths) {
  if (center < 0 || center >= graph.vertex_count())
    throw std::invalid_argument("star center is not a vertex");
  std::vector<int> link = graph.neighbors(center);
  std::sort(link.begin(), link.end());
  if (link.empty()) throw std::invalid_argument("star center has no neighbors");
  Join j;
  j.side1 = {center};
  j.side2 = std::move(link);
  ProductComplex pc(std::move(graph), std::move(j), lengths);
  pc.star_mode_ = true;
  return pc;
}

std::pair<Word, Word> ProductComplex::split(const Word& w) const {
  Word w1, w2;
  for (const Letter& l : w) {
    if (in_side(join_.side1, l.v))
      w1.push_back(l);
    else if (in_side(join_.side2, l.v))
      w2.push_back(l);
    else
      throw std::invalid_argument("word leaves the join: letter " + graph_.label(l.v));
  }
  return {w1, w2};
}

Length ProductComplex::length(const Word& w) const {
  auto [w1, w2] = split(w);
  return Length::hypot(Length::of_scalar(tree_length(rose1_, w1)),
                       Length::of_scalar(tree_length(rose2_, w2)));
}

Minset ProductComplex::minset(const BasicZ2& H) const {
  bool direct = H.join.side1 == join_.side1 && H.join.side2 == join_.side2;
  bool swapped = H.join.side1 == join_.side2 && H.join.side2 == join_.side1;
  if (!direct && !swapped)
    throw std::invalid_argument("subgroup join does not match the complex");
  const Word& g1 = direct ? H.gen1 : H.gen2;
  const Word& g2 = direct ? H.gen2 : H.gen1;
  auto [w1, w2] = split(H.conjugator);
  Word f1 = free_reduce(conjugate(w1, g1));
  Word f2 = free_reduce(conjugate(w2, g2));
  Minset m{H, f1, f2, axis(rose1_, f1), axis(rose2_, f2),
           tree_length(rose1_, g1), tree_length(rose2_, g2)};
  return m;
}

RectangleReport ProductComplex::minset_intersection(const Minset& m1, const Minset& m2) const {
  AxisGap gap1 = axis_gap(rose1_, m1.f1_word, m2.f1_word);
  AxisGap gap2 = axis_gap(rose2_, m1.f2_word, m2.f2_word);
  RectangleReport r;
  if (gap1.distance.sign() > 0 || gap2.distance.sign() > 0) {
    r.kind = RectangleReport::Kind::empty;
    auto n1 = factor_nearest(rose1_, gap1, m1.f1_word);
    auto n2 = factor_nearest(rose2_, gap2, m1.f2_word);
    r.anchor = {n1.first, n2.first};
    r.anchor2 = {n1.second, n2.second};
    r.distance = Length::hypot(Length::of_scalar(gap1.distance),
                               Length::of_scalar(gap2.distance));
    return r;
  }
  FactorState s1 = factor_state(gap1);
  FactorState s2 = factor_state(gap2);
  r.kind = kind_of(s1, s2);
  r.inf1 = s1 == FactorState::line;
  r.inf2 = s2 == FactorState::line;
  r.r1 = r.inf1 ? Quadratic() : gap1.overlap;
  r.r2 = r.inf2 ? Quadratic() : gap2.overlap;
  r.dir1 = gap1.direction;
  r.dir2 = gap2.direction;
  Word a1 = r.inf1 ? common_point(rose1_, gap1, m1.f1_word) : gap1.p1;
  Word b1 = r.inf1 ? a1 : gap1.p2;
  Word a2 = r.inf2 ? common_point(rose2_, gap2, m1.f2_word) : gap2.p1;
  Word b2 = r.inf2 ? a2 : gap2.p2;
  r.anchor = {a1, a2};
  r.anchor2 = {b1, b2};
  return r;
}

SpanningGeodesic ProductComplex::minset_distance(const Minset& m1, const Minset& m2) const {
  AxisGap gap1 = axis_gap(rose1_, m1.f1_word, m2.f1_word);
  AxisGap gap2 = axis_gap(rose2_, m1.f2_word, m2.f2_word);
  auto n1 = factor_nearest(rose1_, gap1, m1.f1_word);
  auto n2 = factor_nearest(rose2_, gap2, m1.f2_word);
  SpanningGeodesic s;
  s.distance = Length::hypot(Length::of_scalar(gap1.distance),
                             Length::of_scalar(gap2.distance));
  s.from = {n1.first, n2.first};
  s.to = {n1.second, n2.second};
  return s;
}

bool ProductComplex::is_corner(const ProductPoint& p) const {
  for (const auto* tp : {&p.f1, &p.f2}) {
    const MetricRose& rose = tp == &p.f1 ? rose1_ : rose2_;
    rose.check_word(tp->vertex);
    if (free_reduce(tp->vertex) != tp->vertex)
      throw std::invalid_argument("point vertex word is not reduced");
    if (tp->edge) {
      rose.check_word(Word{*tp->edge});
      if (tp->offset <= 0 || tp->offset >= 1)
        throw std::invalid_argument("edge offset must lie in (0,1)");
    }
  }
  if (p.f1.edge || p.f2.edge) return false;
  // Every tree vertex has valence 2 * rank, so >= 3 means rank >= 2.
  return rose1_.gens().size() >= 2 && rose2_.gens().size() >= 2;
}

CornerCover ProductComplex::corner_cover_witness(const Word& h, const Word& p,
                                                 long long K) const {
  if (!star_mode_) throw std::invalid_argument("corner cover requires star mode");
  Word h2 = free_reduce(h);
  Word p2 = free_reduce(p);
  if (h2.empty() || p2.empty()) throw std::invalid_argument("h and p must be nontrivial");
  if (!split(h2).first.empty() || !split(p2).first.empty())
    throw std::invalid_argument("h and p must avoid the star center");
  AxisGap hp = axis_gap(rose2_, h2, p2);
  if (hp.distance.is_zero() && hp.infinite_overlap)
    throw std::invalid_argument("h and p share a primitive root");
  Quadratic lh = tree_length(rose2_, h2);
  Quadratic lp = tree_length(rose2_, p2);
  CornerCover out;
  for (long long k = 1; k <= K; ++k) {
    Word g = free_reduce(concat(power(h2, k), power(p2, k)));
    AxisGap gh = axis_gap(rose2_, g, h2);
    AxisGap gp = axis_gap(rose2_, g, p2);
    Quadratic ov_h = gh.distance.is_zero() ? gh.overlap : Quadratic();
    Quadratic ov_p = gp.distance.is_zero() ? gp.overlap : Quadratic();
    out.growth.push_back({ov_h, ov_p});
    out.g = g;
    out.overlap_h = ov_h;
    out.overlap_p = ov_p;
    if (cmp(ov_h, lh) > 0 && cmp(ov_p, lp) > 0) {
      out.k = k;
      return out;
    }
  }
  return out;
}

BasicZ2 conjugated(const DefiningGraph& g, const BasicZ2& H, const Word& w) {
  BasicZ2 out = H;
  out.conjugator = normal_form(g, concat(w, H.conjugator));
  return out;
}

}  // namespace raag
