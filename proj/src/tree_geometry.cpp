#include "raag/tree_geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace raag {

MetricRose::MetricRose(DefiningGraph graph, std::vector<std::pair<int, Quadratic>> gens)
    : graph_(std::move(graph)) {
  for (const auto& [v, len] : gens) {
    if (v < 0 || v >= graph_.vertex_count())
      throw std::invalid_argument("rose generator is not a graph vertex");
    if (contains(v)) throw std::invalid_argument("duplicate rose generator");
    if (len.sign() <= 0) throw std::invalid_argument("petal length must be positive");
    for (const Quadratic& other : lengths_)
      if (!compatible(other, len))
        throw std::invalid_argument("petal lengths mix incompatible radicands");
    gens_.push_back(v);
    lengths_.push_back(len);
  }
  if (gens_.empty()) throw std::invalid_argument("rose needs at least one petal");
}

bool MetricRose::contains(int v) const {
  return std::find(gens_.begin(), gens_.end(), v) != gens_.end();
}

const Quadratic& MetricRose::gen_length(int v) const {
  for (size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i] == v) return lengths_[i];
  throw std::invalid_argument("vertex is not a rose generator");
}

void MetricRose::check_word(const Word& w) const {
  for (const Letter& l : w)
    if (!contains(l.v)) throw std::invalid_argument("word leaves the rose's generators");
}

Word free_reduce(Word w) {
  Word out;
  out.reserve(w.size());
  for (const Letter& l : w) {
    if (!out.empty() && out.back() == l.inverse())
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

FreeCyclic free_cyclic_reduce(const Word& w) {
  Word core = free_reduce(w);
  Word conj;
  while (core.size() >= 2 && core.front() == core.back().inverse()) {
    conj.push_back(core.front());
    core.erase(core.begin());
    core.pop_back();
  }
  return {conj, core};
}

Quadratic word_length(const MetricRose& rose, const Word& w) {
  rose.check_word(w);
  Quadratic sum = Rat(0);
  for (const Letter& l : free_reduce(w)) sum = sum + rose.letter_length(l);
  return sum;
}

Quadratic vertex_distance(const MetricRose& rose, const Word& x, const Word& y) {
  return word_length(rose, concat(inverse(x), y));
}

Quadratic tree_length(const MetricRose& rose, const Word& w) {
  rose.check_word(w);
  Quadratic sum = Rat(0);
  for (const Letter& l : free_cyclic_reduce(w).core) sum = sum + rose.letter_length(l);
  return sum;
}

Axis axis(const MetricRose& rose, const Word& w) {
  rose.check_word(w);
  auto [conj, core] = free_cyclic_reduce(w);
  if (core.empty()) throw std::invalid_argument("elliptic element has no axis");
  return {conj, core};
}

Quadratic dist_to_axis(const MetricRose& rose, const Word& x, const Word& w) {
  Quadratic displaced = word_length(rose, concat(concat(inverse(x), w), x));
  return (displaced - tree_length(rose, w)) * Quadratic(Rat(1, 2));
}

namespace {

// Vertex at signed edge position i along the axis: base times a periodic
// prefix of the cycle (or of its inverse, walking backwards).
Word axis_vertex(const Axis& a, long long i) {
  Word out = a.base;
  const long long m = static_cast<long long>(a.cycle.size());
  if (i >= 0) {
    for (long long t = 0; t < i; ++t) out.push_back(a.cycle[t % m]);
  } else {
    for (long long t = 0; t < -i; ++t)
      out.push_back(a.cycle[((m - 1 - t) % m + m) % m].inverse());
  }
  return free_reduce(out);
}

Quadratic min_petal(const MetricRose& rose) {
  Quadratic best = rose.gen_length(rose.gens()[0]);
  for (int v : rose.gens())
    if (cmp(rose.gen_length(v), best) < 0) best = rose.gen_length(v);
  return best;
}

}  // namespace

Word project_to_axis(const MetricRose& rose, const Word& x, const Word& w) {
  Axis a = axis(rose, w);
  long long i = 0;
  Quadratic cur = vertex_distance(rose, x, axis_vertex(a, 0));
  for (long long dir : {1, -1}) {
    while (true) {
      Quadratic nxt = vertex_distance(rose, x, axis_vertex(a, i + dir));
      if (cmp(nxt, cur) >= 0) break;
      i += dir;
      cur = nxt;
    }
    if (i != 0) break;  // moved forward: the minimum is not behind
  }
  return axis_vertex(a, i);
}

AxisGap axis_gap(const MetricRose& rose, const Word& w1, const Word& w2) {
  Axis a1 = axis(rose, w1);
  axis(rose, w2);  // validates hyperbolicity
  auto f = [&](long long i) { return dist_to_axis(rose, axis_vertex(a1, i), w2); };

  // d(., axis(w2)) restricted to axis(w1) is piecewise linear with slopes
  // -1, 0, +1 in arc length; the zero-slope part exists only at level 0.
  long long i = 0;
  Quadratic cur = f(0);
  for (long long dir : {1, -1}) {
    while (cur.sign() > 0) {
      Quadratic nxt = f(i + dir);
      if (cmp(nxt, cur) >= 0) break;
      i += dir;
      cur = nxt;
    }
    if (i != 0) break;
  }

  AxisGap out;
  out.distance = cur;
  out.overlap = Rat(0);
  if (cur.sign() > 0) {
    out.p1 = axis_vertex(a1, i);
    out.p2 = project_to_axis(rose, out.p1, w2);
    return out;
  }

  // Intersecting: sweep the zero set of f. A common segment longer than
  // l(w1) + l(w2) forces equal axes, so cap the sweep there.
  Quadratic period_bound = tree_length(rose, w1) + tree_length(rose, w2);
  auto sweep = [&](long long dir) {
    long long j = i;
    Quadratic acc = Rat(0);
    while (cmp(acc, period_bound) <= 0 && f(j + dir).is_zero()) {
      acc = acc + vertex_distance(rose, axis_vertex(a1, j), axis_vertex(a1, j + dir));
      j += dir;
    }
    return j;
  };
  long long hi = sweep(1), lo = sweep(-1);
  out.p1 = axis_vertex(a1, lo);
  out.p2 = axis_vertex(a1, hi);
  out.overlap = vertex_distance(rose, out.p1, out.p2);
  out.infinite_overlap = cmp(out.overlap, period_bound) > 0;

  if (hi > lo) {
    // Locate both endpoints on axis(w2) to compare traversal order.
    Axis a2 = axis(rose, w2);
    auto locate = [&](const Word& q) {
      for (long long j = 0; j <= 100000; ++j)
        for (long long s : {j, -j}) {
          if (axis_vertex(a2, s) == q) return s;
          if (j == 0) break;
        }
      throw std::logic_error("axis overlap endpoint not found on second axis");
    };
    long long jlo = locate(out.p1), jhi = locate(out.p2);
    out.direction = jhi > jlo ? 1 : -1;
  }
  return out;
}

}  // namespace raag
