#pragma once

// Words in a right-angled Artin group over a defining graph. Letters are
// signed generators; two letters commute exactly when their vertices are
// adjacent. The canonical normal form is the shortlex-least word in the
// commutation class of the free reduction, computed greedily.

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "raag/defining_graph.hpp"

namespace raag {

struct Letter {
  int v = 0;      // vertex index
  int sign = 1;   // +1 or -1
  bool operator==(const Letter&) const = default;
  // Order: vertex, then inverse before positive (a^-1 < a < b^-1 < b).
  bool operator<(const Letter& o) const {
    return v != o.v ? v < o.v : sign < o.sign;
  }
  Letter inverse() const { return {v, -sign}; }
};

using Word = std::vector<Letter>;

Word parse_word(const DefiningGraph& g, const std::string& text);
std::string word_str(const DefiningGraph& g, const Word& w);

Word inverse(const Word& w);
Word concat(const Word& a, const Word& b);
Word power(const Word& w, long long k);
/// u w u^-1
Word conjugate(const Word& u, const Word& w);

/// Canonical normal form: freely reduce (cancelling pairs separated only by
/// commuting letters), then pick the lexicographically least shuffle.
Word normal_form(const DefiningGraph& g, const Word& w);
bool is_trivial(const DefiningGraph& g, const Word& w);
bool equal_elements(const DefiningGraph& g, const Word& a, const Word& b);

/// Vertices appearing in the normal form.
std::set<int> support(const DefiningGraph& g, const Word& w);

bool commutes(const DefiningGraph& g, const Word& a, const Word& b);

struct CyclicForm {
  Word conjugator;  // c
  Word core;        // cyclically reduced, canonical in its conjugacy class
  // invariant: the input equals c * core * c^-1
};

CyclicForm cyclic_reduce(const DefiningGraph& g, const Word& w);

struct RootPower {
  Word root;           // primitive, canonical orientation (root <= root^-1)
  long long exponent;  // input == root^exponent
};

/// Requires a nontrivial word.
RootPower primitive_root(const DefiningGraph& g, const Word& w);

struct BasicZ2 {
  Join join;
  Word gen1, gen2;  // gen1 in F(side1), gen2 in F(side2), both primitive
  Word conjugator;  // the maximal Z^2 is conjugator <gen1,gen2> conjugator^-1
  std::array<long long, 2> g_coords{}, h_coords{};  // inputs in that basis
};

/// The maximal Z^2 subgroup containing <g,h> for commuting, non-powered g,h.
/// Throws std::invalid_argument when g,h generate a cyclic group, do not
/// commute, or their supports do not conjugate into any join.
BasicZ2 basic_generators(const DefiningGraph& g, const Word& wg, const Word& wh);

}  // namespace raag
