#pragma once

// Declarative experiment configs: one sectioned key/value text file carrying
// a defining graph, its edge metric, an optional product or star model, named
// subgroups and words, search budgets, tolerances and output routing. Every
// number is exact (p/q rationals, optional sqrt terms), so configs diff
// cleanly and replay byte-for-byte.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "raag/defining_graph.hpp"
#include "raag/product_geometry.hpp"
#include "raag/rational.hpp"
#include "raag/words.hpp"

namespace raag {

/// Parse failure; the message starts with "line N:" for the offending line.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A named commuting generator pair, kept as words. Resolution into the
/// ambient maximal Z^2 (basic_generators) happens where a command needs it,
/// so that a config with a structurally broken graph still parses and
/// cmd_validate can report the defect.
struct SubgroupSpec {
  std::string name;
  Word gen1, gen2;
};

struct ExperimentConfig {
  DefiningGraph graph;
  std::vector<std::pair<int, Quadratic>> lengths;  // vertex -> edge length

  // The geometric model, at most one of the two.
  std::optional<Join> join;        // [model] join = a b | c d
  std::optional<int> star_center;  // [model] star = v

  std::vector<SubgroupSpec> subgroups;              // input order
  std::vector<std::pair<std::string, Word>> words;  // named word list

  long long budget_n = 10;   // lattice ball radius (N)
  long long budget_k = 50;   // corner-cover exponent cap (K)
  long long budget_s = 100;  // sample count for randomized checks (S)
  unsigned seed = 0;

  Rat tolerance;  // floating comparisons; default 1/10^12
  Rat epsilon;    // development bend scale; default 1/100

  std::string out_dir;           // empty = current directory
  std::string format = "text";   // text | json | csv | svg

  ExperimentConfig();

  const Word* find_word(const std::string& name) const;
  const SubgroupSpec* find_subgroup(const std::string& name) const;
  bool has_model() const { return join.has_value() || star_center.has_value(); }

  /// Length assigned to a vertex, if any.
  std::optional<Quadratic> length_of(int v) const;

  /// Materializes the configured model. Throws std::invalid_argument when
  /// the config declares none, a model vertex has no length, or the join is
  /// not complete bipartite.
  ProductComplex complex() const;
};

/// Parses config text. References must resolve (length keys, model members,
/// word letters) and budgets, tolerances and lengths must be positive; any
/// violation throws ConfigError naming the line. Structural graph defects
/// (triangles, isolated vertices, duplicate edges) are not parse errors:
/// they are what cmd_validate reports.
ExperimentConfig parse_config(const std::string& text);

/// Reads and parses a file. A missing or unreadable file throws
/// std::ios_base::failure; parse problems throw ConfigError.
ExperimentConfig load_config(const std::string& path);

/// Exact value of a metric token: "5/4", "sqrt2", "3 sqrt2", "2 - sqrt2",
/// "1/2 + 1/2 sqrt5". The radicand must be a squarefree integer >= 2.
/// Quadratic::str() spellings ("3/2*sqrt(2)") parse back unchanged.
Quadratic parse_quadratic(const std::string& text);

}  // namespace raag
