#include "raag/defining_graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace raag {

std::string ValidationReport::str() const {
  if (ok()) return "valid";
  std::ostringstream os;
  for (size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i];
  }
  return os.str();
}

DefiningGraph DefiningGraph::make(std::vector<std::string> labels,
                                  const std::vector<std::pair<std::string, std::string>>& edges) {
  DefiningGraph g;
  for (size_t i = 0; i < labels.size(); ++i)
    for (size_t j = i + 1; j < labels.size(); ++j)
      if (labels[i] == labels[j])
        throw std::invalid_argument("duplicate vertex label: " + labels[i]);
  g.labels_ = std::move(labels);
  const int n = g.vertex_count();
  g.adj_.assign(n, std::vector<bool>(n, false));
  for (const auto& [a, b] : edges) {
    int u = g.index_of(a), v = g.index_of(b);
    if (u < 0) throw std::invalid_argument("edge references unknown vertex: " + a);
    if (v < 0) throw std::invalid_argument("edge references unknown vertex: " + b);
    g.edges_.emplace_back(u, v);
    if (u != v) g.adj_[u][v] = g.adj_[v][u] = true;
  }
  return g;
}

int DefiningGraph::index_of(const std::string& label) const {
  for (int i = 0; i < vertex_count(); ++i)
    if (labels_[i] == label) return i;
  return -1;
}

std::vector<int> DefiningGraph::neighbors(int v) const {
  std::vector<int> out;
  for (int u = 0; u < vertex_count(); ++u)
    if (adj_[v][u]) out.push_back(u);
  return out;
}

int DefiningGraph::valence(int v) const { return static_cast<int>(neighbors(v).size()); }

ValidationReport DefiningGraph::validate() const {
  ValidationReport r;
  std::set<std::pair<int, int>> seen;
  for (const auto& [u, v] : edges_) {
    if (u == v) {
      r.violations.push_back("loop at vertex " + labels_[u]);
      continue;
    }
    auto key = std::minmax(u, v);
    if (!seen.insert(key).second)
      r.violations.push_back("duplicate edge " + labels_[key.first] + "-" + labels_[key.second]);
  }
  const int n = vertex_count();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        if (adj_[a][b] && adj_[b][c] && adj_[a][c])
          r.violations.push_back("triangle " + labels_[a] + "-" + labels_[b] + "-" + labels_[c]);
  for (int v = 0; v < n; ++v)
    if (valence(v) == 0) r.violations.push_back("isolated vertex " + labels_[v]);
  return r;
}

std::vector<Join> DefiningGraph::maximal_joins() const {
  // A maximal join is a Galois-closed pair: side2 is the set of common
  // neighbors of side1 and vice versa. Enumerating closures of all nonempty
  // vertex subsets finds every such pair; graphs here are small (n <= ~16).
  const int n = vertex_count();
  auto common_neighbors = [&](unsigned mask) {
    unsigned out = (1u << n) - 1;
    for (int v = 0; v < n; ++v)
      if (mask & (1u << v)) {
        unsigned nb = 0;
        for (int u = 0; u < n; ++u)
          if (adj_[v][u]) nb |= 1u << u;
        out &= nb;
      }
    return out;
  };
  std::set<std::pair<unsigned, unsigned>> found;
  for (unsigned s1 = 1; s1 < (1u << n); ++s1) {
    unsigned s2 = common_neighbors(s1);
    if (!s2) continue;
    if (common_neighbors(s2) != s1) continue;  // not Galois-closed, hence not maximal
    unsigned lo = std::min(s1, s2), hi = std::max(s1, s2);
    found.insert({lo, hi});
  }
  std::vector<Join> joins;
  for (const auto& [ma, mb] : found) {
    // Side1 carries the least vertex; masks order by lowest set bit.
    unsigned first = (ma & -ma) < (mb & -mb) ? ma : mb;
    unsigned second = first == ma ? mb : ma;
    Join j;
    for (int v = 0; v < n; ++v) {
      if (first & (1u << v)) j.side1.push_back(v);
      if (second & (1u << v)) j.side2.push_back(v);
    }
    joins.push_back(std::move(j));
  }
  std::sort(joins.begin(), joins.end(), [](const Join& a, const Join& b) {
    return std::pair(a.side1, a.side2) < std::pair(b.side1, b.side2);
  });
  return joins;
}

std::optional<int> DefiningGraph::star_vertex() const {
  for (int v = 0; v < vertex_count(); ++v)
    if (valence(v) == vertex_count() - 1) return v;
  return std::nullopt;
}

std::string DefiningGraph::join_str(const Join& j) const {
  std::ostringstream os;
  auto side = [&](const std::vector<int>& s) {
    os << "{";
    for (size_t i = 0; i < s.size(); ++i) {
      if (i) os << ",";
      os << labels_[s[i]];
    }
    os << "}";
  };
  side(j.side1);
  os << "*";
  side(j.side2);
  return os.str();
}

}  // namespace raag
