#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "raag/config.hpp"
#include "raag/oracle.hpp"

using namespace raag;

TEST_SUITE_BEGIN("config");

namespace {

template <typename Fn>
std::string thrown_message(Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

std::string parse_err(const std::string& text) {
  return thrown_message([&] { parse_config(text); });
}

// Error text must name the offending line and the problem.
void expect_err(const std::string& text, const std::string& line_prefix,
                const std::string& substring) {
  std::string m = parse_err(text);
  INFO("config error: " << m);
  CHECK(m.rfind(line_prefix, 0) == 0);
  CHECK(m.find(substring) != std::string::npos);
}

// Complete-bipartite 4-cycle with one sqrt(2) edge; every section present.
const char* kSquare = R"(# two free factors of rank 2
[graph]
vertices = a b c d
edges = a-c a-d b-c b-d

[lengths]
a = 1
b = 1
c = sqrt2
d = 1

[model]
join = a b | c d

[subgroups]
G = a, c
H = b a b^-1, d c d^-1

[words]
diag = a c
conj = a b a^-1

[budgets]
N = 12
K = 7
S = 25
seed = 9

[tolerances]
tolerance = 1/1000000
epsilon = 1/1000

[output]
dir = out/figs
format = json
)";

}  // namespace

TEST_CASE("parse_quadratic accepts the exact metric token forms") {
  CHECK(parse_quadratic("5/4") == Quadratic(Rat(5, 4)));
  CHECK(parse_quadratic("7") == Quadratic(Rat(7)));
  CHECK(parse_quadratic("1.25") == Quadratic(Rat(5, 4)));
  CHECK(parse_quadratic("0") == Quadratic());

  Quadratic root2(Rat(0), Rat(1), 2);
  CHECK(parse_quadratic("sqrt2") == root2);
  CHECK(parse_quadratic("sqrt(2)") == root2);
  CHECK(parse_quadratic("-sqrt(2)") == Quadratic(Rat(0), Rat(-1), 2));
  CHECK(parse_quadratic("3 sqrt2") == Quadratic(Rat(0), Rat(3), 2));
  CHECK(parse_quadratic("3*sqrt(2)") == Quadratic(Rat(0), Rat(3), 2));
  CHECK(parse_quadratic("3/2 sqrt2") == Quadratic(Rat(0), Rat(3, 2), 2));
  CHECK(parse_quadratic("2 - sqrt2") == Quadratic(Rat(2), Rat(-1), 2));
  CHECK(parse_quadratic("1/2 + 1/2 sqrt5") == Quadratic(Rat(1, 2), Rat(1, 2), 5));
  CHECK(parse_quadratic("1/2 + 1/2*sqrt(5)") == Quadratic(Rat(1, 2), Rat(1, 2), 5));
  CHECK(parse_quadratic("sqrt6").d == 6);
}

TEST_CASE("parse_quadratic round-trips Quadratic::str") {
  std::vector<Quadratic> values = {
      Quadratic(),
      Quadratic(Rat(5, 4)),
      Quadratic(Rat(-3)),
      Quadratic(Rat(0), Rat(1), 2),
      Quadratic(Rat(0), Rat(-1), 2),
      Quadratic(Rat(2), Rat(-1), 2),
      Quadratic(Rat(1, 2), Rat(1, 2), 5),
      Quadratic(Rat(0), Rat(-3, 2), 7),
      Quadratic(Rat(-7, 3), Rat(11, 5), 3),
  };
  for (const Quadratic& q : values) {
    CAPTURE(q.str());
    CHECK(parse_quadratic(q.str()) == q);
  }
}

TEST_CASE("parse_quadratic rejects malformed and non-squarefree tokens") {
  for (const char* bad : {"", "sqrt", "x", "1 +", "1 + 2", "1 2 3", "sqrt2 sqrt2",
                          "1 & sqrt2", "sqrt-2", "sqrt(2", "1/0"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_quadratic(bad), std::invalid_argument);
  }
  for (const char* bad : {"sqrt0", "sqrt1", "sqrt4", "sqrt8", "sqrt12", "sqrt(9)"}) {
    CAPTURE(bad);
    CHECK_THROWS_WITH_AS(parse_quadratic(bad),
                         doctest::Contains("squarefree"), std::invalid_argument);
  }
}

TEST_CASE("parse_rational is exact on ratios and decimals") {
  CHECK(parse_rational("5/4") == Rat(5, 4));
  CHECK(parse_rational("-7/2") == Rat(-7, 2));
  CHECK(parse_rational("0.1") == Rat(1, 10));
  CHECK(parse_rational("-0.25") == Rat(-1, 4));
  CHECK(parse_rational("3") == Rat(3));
  for (const char* bad : {"", "x", "1/0", "1.2.3", "1e3"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_rational(bad), std::invalid_argument);
  }
}

TEST_CASE("a full config parses with every section") {
  ExperimentConfig cfg = parse_config(kSquare);

  REQUIRE(cfg.graph.vertex_count() == 4);
  CHECK(cfg.graph.labels() == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(cfg.graph.edges().size() == 4);
  CHECK(cfg.graph.adjacent(0, 2));
  CHECK(!cfg.graph.adjacent(0, 1));

  REQUIRE(cfg.lengths.size() == 4);
  CHECK(*cfg.length_of(0) == Quadratic(Rat(1)));
  CHECK(*cfg.length_of(2) == Quadratic(Rat(0), Rat(1), 2));

  REQUIRE(cfg.join.has_value());
  CHECK(cfg.join->side1 == std::vector<int>{0, 1});
  CHECK(cfg.join->side2 == std::vector<int>{2, 3});
  CHECK(!cfg.star_center.has_value());
  CHECK(cfg.has_model());

  REQUIRE(cfg.subgroups.size() == 2);
  CHECK(cfg.subgroups[0].name == "G");
  CHECK(cfg.subgroups[0].gen1 == parse_word(cfg.graph, "a"));
  CHECK(cfg.subgroups[0].gen2 == parse_word(cfg.graph, "c"));
  CHECK(cfg.subgroups[1].gen1 == parse_word(cfg.graph, "b a b^-1"));
  CHECK(cfg.find_subgroup("H") == &cfg.subgroups[1]);
  CHECK(cfg.find_subgroup("Z") == nullptr);

  REQUIRE(cfg.words.size() == 2);
  const Word* diag = cfg.find_word("diag");
  REQUIRE(diag != nullptr);
  CHECK(*diag == parse_word(cfg.graph, "a c"));
  CHECK(*cfg.find_word("conj") == parse_word(cfg.graph, "a b a^-1"));
  CHECK(cfg.find_word("absent") == nullptr);

  CHECK(cfg.budget_n == 12);
  CHECK(cfg.budget_k == 7);
  CHECK(cfg.budget_s == 25);
  CHECK(cfg.seed == 9u);
  CHECK(cfg.tolerance == Rat(1, 1000000));
  CHECK(cfg.epsilon == Rat(1, 1000));
  CHECK(cfg.out_dir == "out/figs");
  CHECK(cfg.format == "json");
}

TEST_CASE("omitted sections fall back to the documented defaults") {
  ExperimentConfig cfg = parse_config("[graph]\nvertices = a b\nedges = a-b\n");
  CHECK(cfg.budget_n == 10);
  CHECK(cfg.budget_k == 50);
  CHECK(cfg.budget_s == 100);
  CHECK(cfg.seed == 0u);
  CHECK(cfg.tolerance == Rat(Int(1), Int("1000000000000")));
  CHECK(cfg.epsilon == Rat(1, 100));
  CHECK(cfg.format == "text");
  CHECK(cfg.out_dir.empty());
  CHECK(!cfg.has_model());
  CHECK(cfg.lengths.empty());
  CHECK(cfg.subgroups.empty());
  CHECK(cfg.words.empty());
}

TEST_CASE("the configured complex reproduces exact lengths") {
  ExperimentConfig cfg = parse_config(kSquare);
  ProductComplex X = cfg.complex();
  CHECK(!X.star_mode());
  // l(a) = 1; l(ac) = sqrt(1 + 2) with l(c) = sqrt(2).
  CHECK(X.length(parse_word(cfg.graph, "a")).cmp(Length::of_scalar(Quadratic(Rat(1)))) == 0);
  CHECK(X.length(parse_word(cfg.graph, "a c")).cmp(Length(Quadratic(Rat(3)))) == 0);
}

TEST_CASE("a star model builds the line-times-link complex") {
  ExperimentConfig cfg = parse_config(
      "[graph]\nvertices = a b c\nedges = a-b a-c\n"
      "[lengths]\na = 2\nb = 1\nc = 1\n"
      "[model]\nstar = a\n");
  REQUIRE(cfg.star_center.has_value());
  CHECK(*cfg.star_center == 0);
  ProductComplex X = cfg.complex();
  CHECK(X.star_mode());
  CHECK(X.length(parse_word(cfg.graph, "a")).cmp(Length::of_scalar(Quadratic(Rat(2)))) == 0);
}

TEST_CASE("complex() names what is missing") {
  std::string no_model = "[graph]\nvertices = a b\nedges = a-b\n[lengths]\na = 1\nb = 1\n";
  CHECK(thrown_message([&] { parse_config(no_model).complex(); })
            .find("declares no model") != std::string::npos);

  std::string missing_length =
      "[graph]\nvertices = a b c d\nedges = a-c a-d b-c b-d\n"
      "[lengths]\na = 1\nb = 1\nc = 1\n"
      "[model]\njoin = a b | c d\n";
  CHECK(thrown_message([&] { parse_config(missing_length).complex(); })
            .find("no length assigned to vertex 'd'") != std::string::npos);

  std::string not_bipartite =
      "[graph]\nvertices = a b c d e\nedges = a-b b-c c-d d-e e-a\n"
      "[lengths]\na = 1\nc = 1\n"
      "[model]\njoin = a | c\n";
  CHECK(thrown_message([&] { parse_config(not_bipartite).complex(); })
            .find("not complete bipartite") != std::string::npos);
}

TEST_CASE("structural graph defects parse and are left to validate()") {
  ExperimentConfig triangle = parse_config(
      "[graph]\nvertices = a b c\nedges = a-b b-c a-c\n");
  ValidationReport report = triangle.graph.validate();
  REQUIRE(!report.ok());
  bool named = false;
  for (const std::string& v : report.violations)
    if (v.find("triangle a-b-c") != std::string::npos) named = true;
  CHECK(named);

  ExperimentConfig pentagon = parse_config(
      "[graph]\nvertices = a b c d e\nedges = a-b b-c c-d d-e e-a\n");
  CHECK(pentagon.graph.validate().ok());
}

TEST_CASE("parse errors name the offending line") {
  expect_err("x = 1\n", "line 1:", "before any section");
  expect_err("[nope]\n", "line 1:", "unknown section [nope]");
  expect_err("[graph]\n[graph]\n", "line 2:", "duplicate section [graph]");
  expect_err("[graph\n", "line 1:", "unterminated");
  expect_err("[graph] junk\n", "line 1:", "trailing text");
  expect_err("[graph]\nvertices a b\n", "line 2:", "expected key = value");
  expect_err("[graph]\n= 1\n", "line 2:", "empty key");
  expect_err("[graph]\nvertices = a a\n", "line 2:", "duplicate vertex label: a");
  expect_err("[graph]\nvertices = a b\nedges = a=b\n", "line 3:", "bad edge 'a=b'");
  expect_err("[graph]\nvertices = a b\nedges = a-b-c\n", "line 3:", "bad edge");
  expect_err("[graph]\nvertices = a b\nedges = a-z\n", "line 3:",
             "unknown vertex 'z' in edge a-z");
  expect_err("[graph]\ncolor = red\n", "line 2:", "unknown key 'color' in [graph]");
  expect_err("[graph]\nedges =\n", "", "[graph] declares no vertices");
  CHECK(parse_err("[lengths]\n") == "config has no [graph] section");

  std::string g = "[graph]\nvertices = a b\nedges = a-b\n";  // 3 lines
  expect_err(g + "[lengths]\nz = 1\n", "line 5:", "unknown vertex 'z'");
  expect_err(g + "[lengths]\na = 1\na = 2\n", "line 6:", "duplicate length for vertex 'a'");
  expect_err(g + "[lengths]\na = 0\n", "line 5:", "must be positive");
  expect_err(g + "[lengths]\na = -1\n", "line 5:", "must be positive");
  expect_err(g + "[lengths]\na = 1 - sqrt2\n", "line 5:", "must be positive");
  expect_err(g + "[lengths]\na = sqrt8\n", "line 5:", "squarefree");

  expect_err(g + "[model]\njoin = a b\n", "line 5:", "two sides");
  expect_err(g + "[model]\njoin = a |\n", "line 5:", "empty join side");
  expect_err(g + "[model]\njoin = a | b | a\n", "line 5:", "more than two sides");
  expect_err(g + "[model]\njoin = a a | b\n", "line 5:", "repeated vertex");
  expect_err(g + "[model]\njoin = a | a\n", "line 5:", "both join sides");
  expect_err(g + "[model]\nstar = a b\n", "line 5:", "one center");
  expect_err(g + "[model]\njoin = a | b\nstar = a\n", "line 6:", "both join and star");
  expect_err(g + "[model]\nflat = a\n", "line 5:", "unknown key 'flat' in [model]");

  expect_err(g + "[subgroups]\nG = a\n", "line 5:", "two generators");
  expect_err(g + "[subgroups]\nG = a, b, a\n", "line 5:", "two generators");
  expect_err(g + "[subgroups]\nG = a, z\n", "line 5:", "unknown generator: z");
  expect_err(g + "[subgroups]\nG = a,\n", "line 5:", "empty subgroup generator");
  expect_err(g + "[subgroups]\nG = a, b\nG = b, a\n", "line 6:", "duplicate subgroup 'G'");

  expect_err(g + "[words]\nw = a\nw = b\n", "line 6:", "duplicate word 'w'");
  expect_err(g + "[words]\nw = q\n", "line 5:", "unknown generator: q");

  expect_err(g + "[budgets]\nN = 0\n", "line 5:", "budget N must be positive");
  expect_err(g + "[budgets]\nK = -2\n", "line 5:", "budget K must be positive");
  expect_err(g + "[budgets]\nS = abc\n", "line 5:", "bad integer: abc");
  expect_err(g + "[budgets]\nN = 12.5\n", "line 5:", "bad integer");
  expect_err(g + "[budgets]\nQ = 1\n", "line 5:", "unknown key 'Q' in [budgets]");
  expect_err(g + "[budgets]\nseed = -1\n", "line 5:", "seed out of range");
  expect_err(g + "[budgets]\nseed = 4294967296\n", "line 5:", "seed out of range");

  expect_err(g + "[tolerances]\nepsilon = 0\n", "line 5:", "epsilon must be positive");
  expect_err(g + "[tolerances]\ntolerance = x\n", "line 5:", "bad rational");
  expect_err(g + "[tolerances]\nfoo = 1\n", "line 5:", "unknown key 'foo' in [tolerances]");

  expect_err(g + "[output]\nformat = yaml\n", "line 5:", "one of text, json, csv, svg");
  expect_err(g + "[output]\npath = x\n", "line 5:", "unknown key 'path' in [output]");
}

TEST_CASE("seed upper boundary is accepted") {
  ExperimentConfig cfg = parse_config(
      "[graph]\nvertices = a b\nedges = a-b\n[budgets]\nseed = 4294967295\n");
  CHECK(cfg.seed == 4294967295u);
}

TEST_CASE("comments, inline comments and CRLF endings are tolerated") {
  ExperimentConfig cfg = parse_config(
      "# header\r\n[graph]\r\nvertices = a b # the two factors\r\n"
      "edges = a-b\r\n\r\n[lengths]\r\na = 5/4 # exact\r\nb = 1\r\n");
  CHECK(cfg.graph.labels() == std::vector<std::string>{"a", "b"});
  CHECK(*cfg.length_of(0) == Quadratic(Rat(5, 4)));
}

TEST_CASE("repeated vertices and edges keys accumulate") {
  ExperimentConfig cfg = parse_config(
      "[graph]\nvertices = a b\nvertices = c d\nedges = a-c a-d\nedges = b-c b-d\n");
  CHECK(cfg.graph.vertex_count() == 4);
  CHECK(cfg.graph.edges().size() == 4);
  CHECK(cfg.graph.validate().ok());
}

TEST_CASE("load_config reads files and reports missing ones") {
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "raag_config_roundtrip.cfg";
  {
    std::ofstream out(path);
    out << kSquare;
  }
  ExperimentConfig cfg = load_config(path.string());
  CHECK(cfg.graph.vertex_count() == 4);
  CHECK(cfg.budget_n == 12);
  fs::remove(path);

  CHECK_THROWS_AS(load_config((fs::temp_directory_path() / "raag_no_such.cfg").string()),
                  std::ios_base::failure);
}

TEST_SUITE_END();
