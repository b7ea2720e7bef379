#pragma once

// The defining graph of a right-angled Artin group: a finite simplicial
// triangle-free graph with no isolated vertices. Vertices are kept in input
// order, which is the canonical order used by every tie-break in the
// toolkit. Join combinatorics (maximal complete bipartite subgraphs) feed
// the Z^2-subgroup machinery.

#include <optional>
#include <string>
#include <vector>

namespace raag {

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string str() const;
};

struct Join {
  std::vector<int> side1, side2;  // vertex indices, each sorted ascending
  bool operator==(const Join&) const = default;
};

class DefiningGraph {
 public:
  /// Builds a graph from labels and label pairs. Throws std::invalid_argument
  /// on malformed input (duplicate labels, edge endpoint not a vertex).
  static DefiningGraph make(std::vector<std::string> labels,
                            const std::vector<std::pair<std::string, std::string>>& edges);

  int vertex_count() const { return static_cast<int>(labels_.size()); }
  const std::string& label(int v) const { return labels_[v]; }
  const std::vector<std::string>& labels() const { return labels_; }
  /// Index of a label, or -1.
  int index_of(const std::string& label) const;

  bool adjacent(int u, int v) const { return adj_[u][v]; }
  std::vector<int> neighbors(int v) const;
  int valence(int v) const;
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  /// Lists every violated structural invariant: loops, duplicate edges,
  /// triangles, isolated vertices. Empty report = valid defining graph.
  ValidationReport validate() const;

  /// All inclusion-maximal complete bipartite subgraphs, one per unordered
  /// pair of sides, side1 holding the least vertex; sorted deterministically.
  /// Requires a valid graph.
  std::vector<Join> maximal_joins() const;

  /// The least vertex whose star is the whole graph, if any.
  std::optional<int> star_vertex() const;

  std::string join_str(const Join& j) const;

 private:
  std::vector<std::string> labels_;
  std::vector<std::pair<int, int>> edges_;     // as given (deduped form in adj_)
  std::vector<std::vector<bool>> adj_;
};

}  // namespace raag
