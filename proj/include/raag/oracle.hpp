#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "raag/defining_graph.hpp"
#include "raag/product_geometry.hpp"
#include "raag/scalar.hpp"
#include "raag/words.hpp"

namespace raag {

/// Where a length function came from. Geometric oracles satisfy the length
/// axioms by construction, table oracles only on the words they know, and
/// adversarial oracles deliberately break them to exercise error paths.
enum class Provenance { geometric, table, adversarial };

/// A translation length function presented as a black box. evaluate must be
/// pure and reentrant: same word, same answer, no observable state beyond
/// caching. Failures (unknown word, malformed input) surface as exceptions
/// carrying the offending word.
struct LengthOracle {
  Provenance provenance = Provenance::geometric;
  std::string name;
  std::function<Length(const Word&)> evaluate;

  Length operator()(const Word& w) const { return evaluate(w); }
};

/// The length function of a product complex, memoized per queried word.
LengthOracle geometric_oracle(const ProductComplex& X, std::string name = "geometric");

/// Builds an oracle from lines of the form
///   word <tab> value
/// where value is a decimal, a ratio p/q, or sqrt(p/q). Entries are keyed by
/// conjugacy class (canonical cyclic core), and lookups also try the inverse,
/// so one line covers the whole class both ways. The trivial class is always
/// 0; assigning it anything else, or giving one class two different values,
/// is rejected. Lines that are blank or start with '#' are skipped. Unknown
/// words throw std::out_of_range naming the word.
LengthOracle table_oracle(const DefiningGraph& g, const std::string& text,
                          std::string name = "table");

/// base with finitely many conjugacy classes rerouted to fixed values. The
/// result is marked adversarial: it is meant to violate the length axioms.
LengthOracle override_oracle(const LengthOracle& base, const DefiningGraph& g,
                             const std::vector<std::pair<Word, Length>>& overrides);

/// Wrapper that appends every queried word to log before delegating.
LengthOracle recording_oracle(const LengthOracle& base,
                              std::shared_ptr<std::vector<Word>> log);

/// Exact parser for table values: decimal ("1.25"), ratio ("5/4"), or
/// sqrt of either ("sqrt(2)", "sqrt(9/4)"). Negative lengths are rejected.
Length parse_length_value(const std::string& text);

/// Exact rational from "p/q", "-3", or a decimal literal ("1.25").
/// Throws std::invalid_argument on anything else.
Rat parse_rational(const std::string& text);

}  // namespace raag
